#ifndef TIMELOC_FLOQUET_HPP
#define TIMELOC_FLOQUET_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "timeloc/disorder.hpp"
#include "timeloc/effective_model.hpp"
#include "timeloc/eigensolver.hpp"

// Exact Floquet Hamiltonian H_F = H(t) - i d/dt of the lab-frame model in the
// joint basis e^{in theta} e^{im omega t}, quasienergy folding, and the
// comparison of its resonant bunch against the effective model.

namespace timeloc {

struct FloquetBasisWindow {
  int n_center = 0;    // near round(omega + alpha)
  int n_halfwidth = 0;
  int m_halfwidth = 0;

  int n_size() const { return 2 * n_halfwidth + 1; }
  int m_size() const { return 2 * m_halfwidth + 1; }
  long dim() const { return static_cast<long>(n_size()) * m_size(); }
};

// <n,m|H_F|n',m'> = delta delta [(n-alpha)^2/2 + m omega]
//                 + V g_{n-n'} f_{m-m'}
//                 + (lambda/4) delta_{|n-n'|,s} delta_{|m-m'|,s}
inline Eigen::MatrixXcd build_floquet(const DriveCoefficients& drive, double V,
                                      double lambda, int s, double omega,
                                      double alpha,
                                      const FloquetBasisWindow& win) {
  const int K = drive.cutoff();
  if (2 * win.n_halfwidth < K || 2 * win.m_halfwidth < K)
    throw std::invalid_argument(
        "build_floquet: window clips the drive cutoff (halfwidth < K/2)");
  const int N = win.n_size(), M = win.m_size();
  const long dim = win.dim();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);

  auto idx = [&](int a, int b) { return static_cast<long>(a) * M + b; };

  for (int a = 0; a < N; ++a) {
    const double n = win.n_center - win.n_halfwidth + a;
    for (int b = 0; b < M; ++b) {
      const double m = -win.m_halfwidth + b;
      H(idx(a, b), idx(a, b)) = 0.5 * (n - alpha) * (n - alpha) + m * omega;
    }
  }
  if (V != 0.0) {
    for (int a = 0; a < N; ++a)
      for (int a2 = 0; a2 < N; ++a2) {
        const int dn = a - a2;
        if (dn == 0 || std::abs(dn) > K) continue;
        const cdouble g = sawtooth_coefficient(dn);
        for (int b = 0; b < M; ++b) {
          const int blo = std::max(0, b - K), bhi = std::min(M - 1, b + K);
          for (int b2 = blo; b2 <= bhi; ++b2) {
            const int dm = b - b2;
            const cdouble fv = drive.f(dm);
            if (fv != cdouble{0.0, 0.0})
              H(idx(a, b), idx(a2, b2)) += V * g * fv;
          }
        }
      }
  }
  if (lambda != 0.0) {
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < M; ++b)
        for (int sn : {-s, s})
          for (int sm : {-s, s}) {
            const int a2 = a - sn, b2 = b - sm;
            if (a2 < 0 || a2 >= N || b2 < 0 || b2 >= M) continue;
            H(idx(a, b), idx(a2, b2)) += 0.25 * lambda;
          }
  }
  return H;
}

struct FloquetSolution {
  Eigen::VectorXd values;    // raw eigenvalues, ascending
  Eigen::MatrixXcd vectors;
  FloquetBasisWindow window;
  double omega = 0.0;
  double alpha = 0.0;
};

inline FloquetSolution diagonalize_floquet(const Eigen::MatrixXcd& H,
                                           const FloquetBasisWindow& win,
                                           double omega, double alpha) {
  EighResult r = eigh(H);
  return {std::move(r.values), std::move(r.vectors), win, omega, alpha};
}

struct QuasienergySpectrum {
  std::vector<double> raw;
  std::vector<double> folded;  // in [E_ref, E_ref + omega)
  double E_ref = 0.0;
  double omega = 0.0;
};

inline QuasienergySpectrum quasienergies(const Eigen::VectorXd& raw,
                                         double omega, double E_ref) {
  if (!(omega > 0.0)) throw std::invalid_argument("quasienergies: omega <= 0");
  QuasienergySpectrum out;
  out.omega = omega;
  out.E_ref = E_ref;
  out.raw.assign(raw.data(), raw.data() + raw.size());
  out.folded.resize(out.raw.size());
  for (std::size_t i = 0; i < out.raw.size(); ++i) {
    double x = std::fmod(out.raw[i] - E_ref, omega);
    if (x < 0.0) x += omega;
    out.folded[i] = E_ref + x;
  }
  return out;
}

// distance on the quasienergy circle of circumference omega
inline double fold_distance(double de, double omega) {
  double x = std::fmod(de + 0.5 * omega, omega);
  if (x < 0.0) x += omega;
  return std::abs(x - 0.5 * omega);
}

struct LevelPair {
  int eff_index = 0;
  double E_eff = 0.0;       // absolute effective energy
  double quasienergy = 0.0; // raw eigenvalue of the matched Floquet state
  double residual = 0.0;    // mod-omega circle distance
  double overlap = 0.0;     // |<psi_F(t=0)|e^{i n_res theta} psi_eff>|
  bool ambiguous = false;
};

struct ComparisonReport {
  std::vector<LevelPair> levels;
  double max_residual = 0.0;
  double median_residual = 0.0;
  double min_overlap = 1.0;
  int n_res = 0;
};

namespace detail {

// t = 0 spatial amplitudes of every Floquet eigenstate: sum over m blocks.
inline Eigen::MatrixXcd floquet_t0_amplitudes(const FloquetSolution& fs) {
  const int N = fs.window.n_size(), M = fs.window.m_size();
  const long dim = fs.window.dim();
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(N, dim);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < M; ++b)
      U.row(a) += fs.vectors.row(static_cast<long>(a) * M + b);
  return U;
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// Pairs the lowest `count` effective levels with Floquet states. Matching is
// by maximum overlap of the t = 0 wavefunctions (the m-translated copies of a
// physical state share one wavefunction, so the residual is taken mod omega);
// a pairing is flagged ambiguous when a *different* state (overlap below half
// the matched one) carries a quasienergy within 1e-3 omega of the match.
inline ComparisonReport compare_with_effective(const FloquetSolution& fs,
                                               const EigenSolution& eff,
                                               int count) {
  const int N = fs.window.n_size();
  const long dim = fs.window.dim();
  if (count < 1 || count > static_cast<int>(eff.energies.size()))
    throw std::invalid_argument("compare_with_effective: bad count");

  const int n_res = static_cast<int>(std::lround(fs.omega + fs.alpha));
  const Eigen::MatrixXcd U = detail::floquet_t0_amplitudes(fs);
  Eigen::VectorXd unorm(dim);
  for (long j = 0; j < dim; ++j) unorm(j) = U.col(j).norm();

  ComparisonReport rep;
  rep.n_res = n_res;
  std::vector<bool> claimed(static_cast<std::size_t>(dim), false);
  std::vector<double> resids;

  for (int i = 0; i < count; ++i) {
    // effective state mapped to the lab frame at t=0: b_n = a_{n - n_res}
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(N);
    for (int a = 0; a < N; ++a) {
      const int n = fs.window.n_center - fs.window.n_halfwidth + a;
      const int nu = n - n_res;
      if (nu >= eff.basis.n_min && nu <= eff.basis.n_max)
        b(a) = eff.vectors(nu - eff.basis.n_min, i);
    }
    const Eigen::VectorXcd proj = U.adjoint() * b;

    long best = -1;
    double best_ovl = -1.0;
    for (long j = 0; j < dim; ++j) {
      if (claimed[static_cast<std::size_t>(j)] || unorm(j) < 1e-12) continue;
      const double ovl = std::abs(proj(j)) / unorm(j);
      if (ovl > best_ovl) {
        best_ovl = ovl;
        best = j;
      }
    }
    if (best < 0) throw std::runtime_error("compare_with_effective: no candidates");
    claimed[static_cast<std::size_t>(best)] = true;

    LevelPair pair;
    pair.eff_index = i;
    pair.E_eff = eff.energies(i);
    pair.quasienergy = fs.values(best);
    pair.residual = fold_distance(fs.values(best) - eff.energies(i), fs.omega);
    pair.overlap = best_ovl;
    for (long j = 0; j < dim; ++j) {
      if (j == best || claimed[static_cast<std::size_t>(j)]) continue;
      if (unorm(j) < 1e-12) continue;
      const double ovl = std::abs(proj(j)) / unorm(j);
      if (ovl < 0.5 * best_ovl &&
          fold_distance(fs.values(j) - fs.values(best), fs.omega) <
              1e-3 * fs.omega) {
        pair.ambiguous = true;
        break;
      }
    }
    rep.levels.push_back(pair);
    resids.push_back(pair.residual);
    rep.max_residual = std::max(rep.max_residual, pair.residual);
    rep.min_overlap = std::min(rep.min_overlap, pair.overlap);
  }
  rep.median_residual = detail::median_of(resids);
  return rep;
}

struct SecondOrderCheck {
  double median_without = 0.0;
  double median_with = 0.0;
  bool improved = false;
};

// Does adding H^(2) to the effective model reduce the level residuals against
// the exact quasienergies?
inline SecondOrderCheck second_order_check(const EffectiveModelSpec& spec,
                                           const PlaneWaveBasis& basis,
                                           const DriveCoefficients& drive,
                                           const FloquetSolution& fs,
                                           int count) {
  const std::vector<double> grid{0.0};  // samples unused, coefficients matter
  const SecondOrderCorrection h2 =
      second_order_correction(drive, spec.V, spec.omega, grid);

  const EigenSolution plain =
      diagonalize(build_matrix(spec, basis), basis, spec.omega);
  const EigenSolution corrected = diagonalize(
      build_matrix_with_correction(spec, basis, h2), basis, spec.omega);

  const ComparisonReport r0 = compare_with_effective(fs, plain, count);
  const ComparisonReport r2 = compare_with_effective(fs, corrected, count);

  SecondOrderCheck out;
  out.median_without = r0.median_residual;
  out.median_with = r2.median_residual;
  out.improved = out.median_with <= out.median_without;
  return out;
}

}  // namespace timeloc

#endif
