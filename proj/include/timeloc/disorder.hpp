#ifndef TIMELOC_DISORDER_HPP
#define TIMELOC_DISORDER_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "timeloc/rng.hpp"

// Temporally disordered periodic drive and the effective spatial disorder it
// produces on the ring: spatial sawtooth harmonics g_n, random temporal
// amplitudes f_k with a fixed Gaussian envelope for |g_k f_k|, resonant
// products c_k = g_k f_{-k}, and sampled potentials (ring grid and long line).

namespace timeloc {

using cdouble = std::complex<double>;
inline constexpr double pi = 3.141592653589793238462643383279;
inline constexpr double golden_alpha = 0.61803398874989484820;  // (sqrt(5)-1)/2

// g_n = i(-1)^n/(pi n) for n != 0, g_0 = 0; g_{-n} = conj(g_n).
inline cdouble sawtooth_coefficient(long n) {
  if (n == 0) return {0.0, 0.0};
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return {0.0, sign / (pi * static_cast<double>(n))};
}

// |g_k f_k| envelope: exp(-k^2/(2 k0^2)) / (sqrt(k0) pi^{1/4}).
inline double drive_envelope(double k, double k0) {
  return std::exp(-k * k / (2.0 * k0 * k0)) /
         (std::sqrt(k0) * std::pow(pi, 0.25));
}

inline double correlation_length(double k0) { return std::sqrt(2.0) / k0; }
inline double correlation_energy(double k0) { return 0.5 * k0 * k0; }

struct DriveSpec {
  double k0 = 10.0;        // correlation wavenumber
  int cutoff = 0;          // max harmonic K; 0 -> 4*k0
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;

  int resolved_cutoff() const {
    return cutoff > 0 ? cutoff : static_cast<int>(std::lround(4.0 * k0));
  }
  void validate() const {
    if (!(k0 > 0.0)) throw std::invalid_argument("DriveSpec: k0 must be > 0");
    if (resolved_cutoff() < 1)
      throw std::invalid_argument("DriveSpec: cutoff K must be >= 1");
  }
};

// Hermitian-symmetric temporal Fourier amplitudes, f_0 = 0.
struct DriveCoefficients {
  double k0 = 0.0;
  std::vector<cdouble> fpos;  // f_k for k = 1..K

  int cutoff() const { return static_cast<int>(fpos.size()); }
  cdouble f(long k) const {
    if (k == 0) return {0.0, 0.0};
    const long a = k > 0 ? k : -k;
    if (a > cutoff()) return {0.0, 0.0};
    const cdouble v = fpos[static_cast<std::size_t>(a - 1)];
    return k > 0 ? v : std::conj(v);
  }
  // f(t) = sum_k f_k e^{i k omega t}, real by symmetry
  double evaluate(double omega_t) const {
    double s = 0.0;
    for (int k = 1; k <= cutoff(); ++k) {
      const cdouble v = fpos[static_cast<std::size_t>(k - 1)];
      s += 2.0 * (v.real() * std::cos(k * omega_t) -
                  v.imag() * std::sin(k * omega_t));
    }
    return s;
  }
};

// c_k = g_k f_{-k}; |c_k| equals the envelope exactly, phases random.
struct EffectiveDisorderCoefficients {
  double k0 = 0.0;
  std::vector<cdouble> cpos;  // c_k for k = 1..K

  int cutoff() const { return static_cast<int>(cpos.size()); }
  cdouble c(long k) const {
    if (k == 0) return {0.0, 0.0};
    const long a = k > 0 ? k : -k;
    if (a > cutoff()) return {0.0, 0.0};
    const cdouble v = cpos[static_cast<std::size_t>(a - 1)];
    return k > 0 ? v : std::conj(v);
  }
  // sum_k c_k e^{ik theta}, real by symmetry
  double evaluate(double theta) const {
    double s = 0.0;
    for (int k = 1; k <= cutoff(); ++k) {
      const cdouble v = cpos[static_cast<std::size_t>(k - 1)];
      s += 2.0 * (v.real() * std::cos(k * theta) -
                  v.imag() * std::sin(k * theta));
    }
    return s;
  }
};

// f_k = E(k)/|g_k| e^{i phi_k}, phi_k uniform in [0, 2pi) from the counter
// stream; f_{-k} = conj(f_k), f_0 = 0.
inline DriveCoefficients synthesize_drive(const DriveSpec& spec) {
  spec.validate();
  const int K = spec.resolved_cutoff();
  CounterRng rng{spec.seed};
  DriveCoefficients out;
  out.k0 = spec.k0;
  out.fpos.resize(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const double mag = drive_envelope(k, spec.k0) * pi * k;  // E(k)/|g_k|
    const double ph =
        rng.phase(stream::drive_phase, spec.realization, static_cast<std::uint64_t>(k));
    out.fpos[static_cast<std::size_t>(k - 1)] = std::polar(mag, ph);
  }
  return out;
}

inline EffectiveDisorderCoefficients effective_coefficients(
    const DriveCoefficients& drive) {
  EffectiveDisorderCoefficients out;
  out.k0 = drive.k0;
  out.cpos.resize(static_cast<std::size_t>(drive.cutoff()));
  for (int k = 1; k <= drive.cutoff(); ++k)
    out.cpos[static_cast<std::size_t>(k - 1)] =
        sawtooth_coefficient(k) * drive.f(-k);
  return out;
}

// V * sum_k c_k e^{ik theta} on a grid of angles in [-pi, pi).
// The complex sum is accumulated and the imaginary residue checked.
inline std::vector<double> potential_on_grid(
    const EffectiveDisorderCoefficients& c, double V,
    std::span<const double> grid) {
  std::vector<double> out(grid.size());
  double max_imag = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double th = grid[i];
    if (!(th >= -pi && th < pi))
      throw std::invalid_argument("potential_on_grid: angle outside [-pi, pi)");
    cdouble s{0.0, 0.0};
    for (int k = 1; k <= c.cutoff(); ++k) {
      const cdouble ck = c.cpos[static_cast<std::size_t>(k - 1)];
      const cdouble e = std::polar(1.0, k * th);
      s += ck * e + std::conj(ck * e);
    }
    max_imag = std::max(max_imag, std::abs(s.imag()));
    out[i] = V * s.real();
  }
  if (V != 0.0 && max_imag > 1e-10)
    throw std::runtime_error("potential_on_grid: imaginary residue exceeds 1e-10");
  return out;
}

// Gaussian-correlated potential on a long line, for transfer-matrix runs.
// Ensemble autocovariance C(d) = V^2 exp(-k0^2 d^2/4).
struct LinePotential {
  std::vector<double> samples;
  double h = 0.0;   // grid spacing
  double L = 0.0;   // total length
  double V = 0.0;
  double k0 = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
};

// Spectral synthesis on one long periodic domain: modes k_j = 2 pi j / L with
// spectrum P(k) = (2 sqrt(pi)/k0) exp(-k^2/k0^2) and independent uniform
// phases; trapezoid weight (half) on the j = 0 bin. The grid is rounded up to
// a power of two so an FFT can do the evaluation; the returned h is L/N.
inline LinePotential synthesize_line_potential(double k0, double V, double L,
                                               double h_max, std::uint64_t seed,
                                               std::uint64_t realization = 0) {
  if (!(k0 > 0.0) || !(L > 0.0) || !(h_max > 0.0))
    throw std::invalid_argument("synthesize_line_potential: bad parameters");
  const double zeta = correlation_length(k0);
  if (h_max > 0.5 * zeta)
    throw std::invalid_argument(
        "synthesize_line_potential: h > zeta/2 under-resolves the disorder");

  std::size_t N = 1;
  while (L / static_cast<double>(N) > h_max || N < 64) N <<= 1;
  const double h = L / static_cast<double>(N);

  const double dk = 2.0 * pi / L;
  const double kmax = 5.0 * k0;
  std::size_t M = static_cast<std::size_t>(kmax / dk);
  if (M > N / 2) M = N / 2;

  // FFTW c2r is unnormalized: x_n = spec_0 + 2 sum_{j>=1} Re(spec_j e^{2pi i jn/N}),
  // so spec_j = a_j e^{i phi_j}/2 realizes x_n = sum_j a_j cos(k_j x_n + phi_j).
  CounterRng rng{seed};
  std::vector<cdouble> spec(N / 2 + 1, cdouble{0.0, 0.0});
  for (std::size_t j = 0; j <= M; ++j) {
    const double kj = dk * static_cast<double>(j);
    const double P = (2.0 * std::sqrt(pi) / k0) * std::exp(-kj * kj / (k0 * k0));
    const double phi = rng.phase(stream::line_phase, realization, j);
    if (j == 0) {
      const double a0 = std::sqrt(P * dk / pi);  // half-weight trapezoid bin
      spec[0] = cdouble{a0 * std::cos(phi), 0.0};
    } else {
      const double aj = std::sqrt(2.0 * P * dk / pi);
      spec[j] = 0.5 * std::polar(aj, phi);
    }
  }

  LinePotential out;
  out.samples.resize(N);
  {
    // fftw_execute is thread-safe, plan creation/destruction is not
    static std::mutex plan_mutex;
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(plan_mutex);
      plan = fftw_plan_dft_c2r_1d(
          static_cast<int>(N), reinterpret_cast<fftw_complex*>(spec.data()),
          out.samples.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard<std::mutex> lock(plan_mutex);
      fftw_destroy_plan(plan);
    }
  }
  for (auto& s : out.samples) s *= V;
  out.h = h;
  out.L = L;
  out.V = V;
  out.k0 = k0;
  out.seed = seed;
  out.realization = realization;
  return out;
}

}  // namespace timeloc

#endif
