#ifndef TIMELOC_EFFECTIVE_MODEL_HPP
#define TIMELOC_EFFECTIVE_MODEL_HPP

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "timeloc/disorder.hpp"
#include "timeloc/eigensolver.hpp"

// Rotating-frame effective Hamiltonian on the ring:
//   H = mu P^2/2 + V sum_k c_k e^{ik Theta} + (lambda/2) cos(s Theta) + omega^2/2
// in the plane-wave basis P|n> = (n + beta)|n>, plus the second-order
// correction from the non-secular harmonics and the map back to the
// laboratory frame.

namespace timeloc {

struct PlaneWaveBasis {
  int n_min = 0;
  int n_max = 0;
  double beta = 0.0;

  int size() const { return n_max - n_min + 1; }
  int n(int i) const { return n_min + i; }

  static PlaneWaveBasis centered(int halfwidth, double beta = 0.0) {
    return {-halfwidth, halfwidth, beta};
  }
};

// Momentum offset of the rotating-frame grid: lab momenta are integers, so
// P = p - alpha - omega lives on n + beta with beta = (-(alpha+omega)) mod 1.
inline double momentum_offset(double alpha, double omega) {
  const double b = -(alpha + omega);
  double frac = b - std::floor(b);
  if (frac >= 1.0) frac -= 1.0;
  // snap the tiny residue left by floor() at integer alpha+omega
  if (frac > 1.0 - 1e-12) frac = 0.0;
  return frac;
}

struct EffectiveModelSpec {
  double mu = 1.0;       // kinetic coefficient
  double V = 0.0;        // disorder strength
  double lambda = 0.0;   // lattice amplitude, 0 disables the lattice
  int s = 1;             // lattice harmonic
  double omega = 0.0;    // drive frequency
  double alpha = 0.0;    // degeneracy-breaking offset
  double beta = 0.0;     // momentum offset of the basis
  EffectiveDisorderCoefficients c;

  void validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("EffectiveModelSpec: mu <= 0");
    if (lambda != 0.0 && s < 1)
      throw std::invalid_argument("EffectiveModelSpec: s must be >= 1");
    if (beta < 0.0 || beta >= 1.0)
      throw std::invalid_argument("EffectiveModelSpec: beta outside [0, 1)");
  }
};

inline Eigen::MatrixXcd build_matrix(const EffectiveModelSpec& spec,
                                     const PlaneWaveBasis& basis) {
  spec.validate();
  const int K = spec.c.cutoff();
  if (spec.V != 0.0 && basis.n_max - basis.n_min < K)
    throw std::invalid_argument(
        "build_matrix: basis narrower than the disorder cutoff");
  const int N = basis.size();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    const double p = basis.n(i) + basis.beta;
    H(i, i) = 0.5 * spec.mu * p * p + 0.5 * spec.omega * spec.omega;
    for (int j = 0; j < N; ++j) {
      const int d = basis.n(i) - basis.n(j);
      if (d == 0) continue;
      cdouble v{0.0, 0.0};
      if (std::abs(d) <= K && spec.V != 0.0) v += spec.V * spec.c.c(d);
      if (spec.lambda != 0.0 && std::abs(d) == spec.s)
        v += 0.25 * spec.lambda;
      if (v != cdouble{0.0, 0.0}) H(i, j) += v;
    }
  }
  return H;
}

struct EigenSolution {
  Eigen::VectorXd energies;   // ascending, absolute (includes omega^2/2)
  Eigen::VectorXd shifted;    // E - omega^2/2
  Eigen::MatrixXcd vectors;   // columns over the basis
  PlaneWaveBasis basis;
  double omega = 0.0;
};

inline EigenSolution diagonalize(const Eigen::MatrixXcd& H,
                                 const PlaneWaveBasis& basis, double omega) {
  EighResult r = eigh(H);
  EigenSolution sol;
  sol.energies = std::move(r.values);
  sol.vectors = std::move(r.vectors);
  sol.shifted = sol.energies.array() - 0.5 * omega * omega;
  sol.basis = basis;
  sol.omega = omega;
  return sol;
}

// |psi(Theta)|^2 per radian on a grid, normalized so the integral over the
// ring is 1.
inline std::vector<double> density_on_grid(const EigenSolution& sol, int state,
                                           std::span<const double> grid) {
  const int N = sol.basis.size();
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    cdouble amp{0.0, 0.0};
    for (int i = 0; i < N; ++i)
      amp += sol.vectors(i, state) * std::polar(1.0, sol.basis.n(i) * grid[g]);
    out[g] = std::norm(amp) / (2.0 * pi);
  }
  return out;
}

// Probability density at a fixed ring position versus time: the rotating
// profile passes by as Theta = theta_fixed - omega t, with period 2 pi/omega.
inline std::vector<double> lab_frame_series(const EigenSolution& sol, int state,
                                            double theta_fixed,
                                            std::span<const double> times) {
  const int N = sol.basis.size();
  std::vector<double> out(times.size());
  for (std::size_t g = 0; g < times.size(); ++g) {
    const double th = theta_fixed - sol.omega * times[g];
    cdouble amp{0.0, 0.0};
    for (int i = 0; i < N; ++i)
      amp += sol.vectors(i, state) * std::polar(1.0, sol.basis.n(i) * th);
    out[g] = std::norm(amp) / (2.0 * pi);
  }
  return out;
}

// Second-order contribution of the non-secular harmonics,
//   H2(Theta) = -(V^2/(2 omega^2)) sum_{m != 0} A_m(Theta) A_{-m}(Theta)/m^2,
//   A_m(Theta) = sum_n n g_n f_{m-n} e^{in Theta}.
// Pairing +m with -m keeps exactly the time-independent part of the
// second-order term; A_{-m} = -conj(A_m) makes H2 real and non-negative.
struct SecondOrderCorrection {
  std::vector<double> samples;
  std::vector<cdouble> fourier;  // h_q for q = 0..2K; h_{-q} = conj(h_q)
  double omega = 0.0;
  double V = 0.0;

  cdouble h(long q) const {
    const long a = q >= 0 ? q : -q;
    if (a >= static_cast<long>(fourier.size())) return {0.0, 0.0};
    const cdouble v = fourier[static_cast<std::size_t>(a)];
    return q >= 0 ? v : std::conj(v);
  }
};

inline SecondOrderCorrection second_order_correction(
    const DriveCoefficients& drive, double V, double omega,
    std::span<const double> grid) {
  if (!(omega > 0.0))
    throw std::invalid_argument("second_order_correction: omega must be > 0");
  const int K = drive.cutoff();
  SecondOrderCorrection out;
  out.omega = omega;
  out.V = V;
  out.fourier.assign(static_cast<std::size_t>(2 * K + 1), cdouble{0.0, 0.0});

  const double pref = -(V * V) / (2.0 * omega * omega);
  for (int q = 0; q <= 2 * K; ++q) {
    cdouble acc{0.0, 0.0};
    for (int m = -2 * K; m <= 2 * K; ++m) {
      if (m == 0) continue;
      cdouble s{0.0, 0.0};
      const int nlo = std::max(-K, q - K);
      const int nhi = std::min(K, q + K);
      for (int n = nlo; n <= nhi; ++n) {
        const int n2 = q - n;
        if (n == 0 || n2 == 0) continue;
        const cdouble f1 = drive.f(m - n);
        if (f1 == cdouble{0.0, 0.0}) continue;
        const cdouble f2 = drive.f(-m - n2);
        if (f2 == cdouble{0.0, 0.0}) continue;
        s += static_cast<double>(n) * static_cast<double>(n2) *
             sawtooth_coefficient(n) * sawtooth_coefficient(n2) * f1 * f2;
      }
      acc += s / (static_cast<double>(m) * static_cast<double>(m));
    }
    out.fourier[static_cast<std::size_t>(q)] = pref * acc;
  }

  out.samples.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double th = grid[g];
    if (!(th >= -pi && th < pi))
      throw std::invalid_argument(
          "second_order_correction: angle outside [-pi, pi)");
    double v = out.fourier[0].real();
    for (int q = 1; q <= 2 * K; ++q) {
      const cdouble hq = out.fourier[static_cast<std::size_t>(q)];
      v += 2.0 * (hq.real() * std::cos(q * th) - hq.imag() * std::sin(q * th));
    }
    out.samples[g] = v;
  }
  return out;
}

// H_eff plus the second-order correction as extra Fourier couplings.
inline Eigen::MatrixXcd build_matrix_with_correction(
    const EffectiveModelSpec& spec, const PlaneWaveBasis& basis,
    const SecondOrderCorrection& h2) {
  Eigen::MatrixXcd H = build_matrix(spec, basis);
  const int N = basis.size();
  const long Q = static_cast<long>(h2.fourier.size()) - 1;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const long d = basis.n(i) - basis.n(j);
      if (std::abs(d) <= Q) H(i, j) += h2.h(d);
    }
  return H;
}

}  // namespace timeloc

#endif
