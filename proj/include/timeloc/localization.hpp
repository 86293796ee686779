#ifndef TIMELOC_LOCALIZATION_HPP
#define TIMELOC_LOCALIZATION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "timeloc/disorder.hpp"

// Localization-length estimators with one shared convention: xi is the
// e-folding length of the *density*, so amplitudes decay as e^{-x/(2 xi)} and
// the amplitude Lyapunov exponent gamma relates to it by xi = 1/(2 gamma).
// Both closed forms below, their transfer-matrix check and the tail fits
// agree under this convention.

namespace timeloc {

struct BornInput {
  double E = 0.0;   // energy above the potential mean (tilde E)
  double k0 = 0.0;
  double V = 0.0;
};

struct BornResult {
  double xi = 0.0;
  double zeta = 0.0;        // disorder correlation length sqrt(2)/k0
  double indicator = 0.0;   // weak-scattering indicator V^2/(E * E_zeta)
};

// xi = (k0 E / (sqrt(pi) V^2)) exp(8 E / k0^2)
inline BornResult born_xi(const BornInput& in) {
  if (!(in.E > 0.0)) throw std::invalid_argument("born_xi: requires E > 0");
  if (!(in.k0 > 0.0) || !(in.V != 0.0))
    throw std::invalid_argument("born_xi: requires k0 > 0 and V != 0");
  BornResult r;
  r.xi = in.k0 * in.E / (std::sqrt(pi) * in.V * in.V) *
         std::exp(8.0 * in.E / (in.k0 * in.k0));
  r.zeta = correlation_length(in.k0);
  r.indicator = in.V * in.V / (in.E * correlation_energy(in.k0));
  return r;
}

struct LyapunovEstimate {
  double gamma = 0.0;      // amplitude log-growth rate <ln||.||>/L
  double stderr_ = 0.0;    // across-realization standard error of gamma
  double xi = 0.0;         // density e-folding length, 1/(2 gamma)
  double E = 0.0;
  int realizations = 0;
  double L = 0.0;
  double h = 0.0;
  std::vector<std::string> warnings;
};

struct LyapunovOptions {
  int renorm_cadence = 64;
};

// Amplitude growth rate of one realization from products of the 3-point
// transfer matrices of psi_{j+1} = 2 psi_j - psi_{j-1} + 2 h^2 (V_j - E) psi_j,
// with periodic log-norm renormalization.
inline double lyapunov_single(const LinePotential& pot, double E,
                              const LyapunovOptions& opt = {}) {
  const double h = pot.h;
  const double h2 = 2.0 * h * h;
  double p0 = 1.0, p1 = 1.0;
  double logsum = 0.0;
  const int cadence = std::max(opt.renorm_cadence, 1);
  const std::size_t n = pot.samples.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double p2 = (2.0 + h2 * (pot.samples[j] - E)) * p1 - p0;
    p0 = p1;
    p1 = p2;
    if ((j + 1) % static_cast<std::size_t>(cadence) == 0) {
      const double nrm = std::abs(p0) + std::abs(p1);
      logsum += std::log(nrm);
      p0 /= nrm;
      p1 /= nrm;
    }
  }
  logsum += std::log(std::hypot(p0, p1));
  return logsum / (static_cast<double>(n) * h);
}

// Averages gamma over fresh realizations sharing the potential's parameters.
inline LyapunovEstimate lyapunov(const LinePotential& first, double E,
                                 int realizations = 1,
                                 const LyapunovOptions& opt = {}) {
  if (realizations < 1)
    throw std::invalid_argument("lyapunov: need at least one realization");
  const double zeta = correlation_length(first.k0);
  if (first.h > zeta / 10.0)
    throw std::invalid_argument("lyapunov: grid does not resolve zeta/10");
  if (E > 0.0) {
    const double lam_db = 2.0 * pi / std::sqrt(2.0 * E);
    if (first.h > lam_db / 10.0)
      throw std::invalid_argument(
          "lyapunov: grid does not resolve the de Broglie wavelength/10");
  }

  LyapunovEstimate est;
  est.E = E;
  est.L = first.L;
  est.h = first.h;
  est.realizations = realizations;

  std::vector<double> gammas;
  gammas.reserve(static_cast<std::size_t>(realizations));
  gammas.push_back(lyapunov_single(first, E, opt));
  for (int r = 1; r < realizations; ++r) {
    const LinePotential pot = synthesize_line_potential(
        first.k0, first.V, first.L, first.h, first.seed,
        first.realization + static_cast<std::uint64_t>(r));
    gammas.push_back(lyapunov_single(pot, E, opt));
  }

  double mean = 0.0;
  for (double g : gammas) mean += g;
  mean /= static_cast<double>(gammas.size());
  double var = 0.0;
  for (double g : gammas) var += (g - mean) * (g - mean);
  if (gammas.size() > 1) var /= static_cast<double>(gammas.size() - 1);
  est.gamma = mean;
  est.stderr_ = gammas.size() > 1
                    ? std::sqrt(var / static_cast<double>(gammas.size()))
                    : 0.0;
  est.xi = mean != 0.0 ? 1.0 / (2.0 * mean) : 0.0;

  if (E > 0.0 && first.V != 0.0) {
    const double predicted = born_xi({E, first.k0, first.V}).xi;
    if (first.L < 50.0 * predicted)
      est.warnings.push_back("lyapunov: L < 50 * predicted xi (" +
                             std::to_string(predicted) + ")");
  }
  return est;
}

struct TailFit {
  double xi = 0.0;       // density e-folding length from the pooled slope
  double center = 0.0;   // peak ordinate
  double r2 = 0.0;
  double span = 0.0;     // total fitted flank length
  int points = 0;
  bool flagged = false;  // multi-peak / poor fit (r2 below threshold)
};

struct TailFitOptions {
  bool periodic = false;       // ring ordinate (wrap distances)
  double smooth_sigma = 0.0;   // Gaussian pre-smoothing width, 0 = off
  double floor = 1e-12;        // absolute density floor
  double rel_floor = 1e-9;     // floor relative to the peak
  double upturn = 10.0;        // stop flank at density > upturn * running min
  double core_exclusion = 0.0; // 0 -> max(xi_estimate/2, 3 h)
  double xi_estimate = 0.0;    // seed for the core exclusion, 0 -> 3 h only
  double r2_threshold = 0.9;   // below this the fit is flagged
  double max_reach = 0.0;      // cap on the flank distance, 0 = none
  int min_points = 4;          // per flank
};

namespace detail {

// Gaussian smoothing along the grid; wraps on periodic ordinates.
inline std::vector<double> smooth_density(std::span<const double> dens,
                                          double h, double sigma,
                                          bool periodic) {
  const std::size_t n = dens.size();
  const long w = std::lround(std::ceil(4.0 * sigma / h));
  std::vector<double> kern(static_cast<std::size_t>(2 * w + 1));
  double ksum = 0.0;
  for (long i = -w; i <= w; ++i) {
    const double x = static_cast<double>(i) * h / sigma;
    kern[static_cast<std::size_t>(i + w)] = std::exp(-0.5 * x * x);
    ksum += kern[static_cast<std::size_t>(i + w)];
  }
  for (auto& k : kern) k /= ksum;
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (long d = -w; d <= w; ++d) {
      long j = static_cast<long>(i) + d;
      if (periodic) {
        j = ((j % static_cast<long>(n)) + static_cast<long>(n)) %
            static_cast<long>(n);
      } else {
        if (j < 0 || j >= static_cast<long>(n)) continue;
      }
      s += kern[static_cast<std::size_t>(d + w)] *
           dens[static_cast<std::size_t>(j)];
    }
    out[i] = s;
  }
  return out;
}

}  // namespace detail

// Exponential tail fit of a single-peak density profile. The density is
// optionally pre-smoothed, both flanks are walked outward from the peak until
// the floor or a sustained up-turn (another lobe), and ln(density) is
// regressed against distance with a common slope and per-flank intercepts.
// Model: density ~ exp(-d/xi), so xi = -1/slope.
inline TailFit fit_tail(std::span<const double> ordinate,
                        std::span<const double> density,
                        const TailFitOptions& opt = {}) {
  const std::size_t n = density.size();
  if (ordinate.size() != n || n < 8)
    throw std::invalid_argument("fit_tail: bad input sizes");
  const double h = ordinate[1] - ordinate[0];
  if (!(h > 0.0)) throw std::invalid_argument("fit_tail: unsorted ordinate");

  std::vector<double> work;
  std::span<const double> dens = density;
  if (opt.smooth_sigma > 0.0) {
    work = detail::smooth_density(density, h, opt.smooth_sigma, opt.periodic);
    dens = work;
  }

  std::size_t j0 = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (dens[i] > dens[j0]) j0 = i;
  const double peak = dens[j0];
  if (!(peak > 0.0)) throw std::invalid_argument("fit_tail: empty density");

  // decimation step: one point per smoothing width
  const std::size_t step =
      opt.smooth_sigma > 0.0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(
                                         std::lround(opt.smooth_sigma / h)))
          : 1;
  double core = opt.core_exclusion;
  if (core <= 0.0)
    core = std::max(0.5 * opt.xi_estimate,
                    std::max(3.0 * h, 2.0 * opt.smooth_sigma));
  const double lo = std::max(opt.floor, opt.rel_floor * peak);

  std::vector<double> xs, ys;
  std::vector<int> flank_id;
  int flanks = 0;
  const std::size_t reach = opt.periodic ? n / 2 : n;
  for (int sgn : {+1, -1}) {
    std::vector<double> fx, fy;
    double runmin = std::numeric_limits<double>::infinity();
    for (std::size_t s = 1; s * step < reach; ++s) {
      const long off = sgn * static_cast<long>(s * step);
      long j = static_cast<long>(j0) + off;
      if (opt.periodic) {
        j = ((j % static_cast<long>(n)) + static_cast<long>(n)) %
            static_cast<long>(n);
      } else if (j < 0 || j >= static_cast<long>(n)) {
        break;
      }
      const double d = static_cast<double>(s * step) * h;
      if (opt.max_reach > 0.0 && d > opt.max_reach) break;
      const double v = dens[static_cast<std::size_t>(j)];
      if (v < lo) break;
      runmin = std::min(runmin, v);
      if (v > opt.upturn * runmin) break;
      if (d < core) continue;
      fx.push_back(d);
      fy.push_back(std::log(v));
    }
    if (static_cast<int>(fx.size()) >= opt.min_points) {
      xs.insert(xs.end(), fx.begin(), fx.end());
      ys.insert(ys.end(), fy.begin(), fy.end());
      flank_id.insert(flank_id.end(), fx.size(), flanks);
      ++flanks;
    }
  }

  TailFit fit;
  fit.center = ordinate[j0];
  if (xs.empty()) {
    fit.flagged = true;
    return fit;
  }

  // least squares for [slope, intercept_0, (intercept_1)]
  const int np = static_cast<int>(xs.size());
  const int cols = 1 + flanks;
  Eigen::MatrixXd A(np, cols);
  Eigen::VectorXd b(np);
  for (int i = 0; i < np; ++i) {
    A(i, 0) = xs[static_cast<std::size_t>(i)];
    for (int f = 0; f < flanks; ++f)
      A(i, 1 + f) = flank_id[static_cast<std::size_t>(i)] == f ? 1.0 : 0.0;
    b(i) = ys[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
  const double slope = sol(0);
  const Eigen::VectorXd resid = b - A * sol;
  const double ss_res = resid.squaredNorm();
  const double mean_y = b.mean();
  double ss_tot = 0.0;
  for (int i = 0; i < np; ++i) ss_tot += (b(i) - mean_y) * (b(i) - mean_y);

  fit.points = np;
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  fit.xi = slope < 0.0 ? -1.0 / slope : 0.0;
  double span = 0.0;
  for (int f = 0; f < flanks; ++f) {
    double lo_x = 1e300, hi_x = -1e300;
    for (int i = 0; i < np; ++i)
      if (flank_id[static_cast<std::size_t>(i)] == f) {
        lo_x = std::min(lo_x, xs[static_cast<std::size_t>(i)]);
        hi_x = std::max(hi_x, xs[static_cast<std::size_t>(i)]);
      }
    span += hi_x - lo_x;
  }
  fit.span = span;
  fit.flagged = !(fit.xi > 0.0) || fit.r2 < opt.r2_threshold;
  return fit;
}

}  // namespace timeloc

#endif
