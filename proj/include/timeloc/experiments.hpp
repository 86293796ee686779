#ifndef TIMELOC_EXPERIMENTS_HPP
#define TIMELOC_EXPERIMENTS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "timeloc/classical.hpp"
#include "timeloc/config.hpp"
#include "timeloc/csv.hpp"
#include "timeloc/disorder.hpp"
#include "timeloc/effective_model.hpp"
#include "timeloc/floquet.hpp"
#include "timeloc/lattice.hpp"
#include "timeloc/line_io.hpp"
#include "timeloc/localization.hpp"
#include "timeloc/manifest.hpp"
#include "timeloc/parallel.hpp"

// Named experiment pipelines behind the CLI. Every pipeline resolves its
// parameters from the flat config (defaults below), writes CSV outputs plus a
// manifest into the output directory, and is deterministic for a fixed
// (config, seed) for any worker count.

namespace timeloc {

struct PhysicsParams {
  double k0 = 10.0;
  double V = 20.0;
  double omega = 2000.0 - golden_alpha;
  double alpha = golden_alpha;
  double lambda = 0.0;
  int s = 100;
  double mu = 1.0;
  int cutoff = 0;  // 0 -> 4 k0
};

inline PhysicsParams physics_from(const Config& cfg) {
  PhysicsParams p;
  p.k0 = cfg.get("physics.k0", p.k0);
  p.alpha = cfg.get("physics.alpha", p.alpha);
  p.omega = cfg.get("physics.omega", 2000.0 - p.alpha);
  p.V = cfg.get("physics.V", p.V);
  p.lambda = cfg.get("physics.lambda", p.lambda);
  p.s = static_cast<int>(cfg.get("physics.s", static_cast<long>(p.s)));
  p.mu = cfg.get("physics.mu", p.mu);
  p.cutoff = static_cast<int>(cfg.get("numerics.cutoff", 0L));
  return p;
}

struct RunResult {
  std::filesystem::path outdir;
  RunManifest manifest;
};

namespace pipelines {

// ---- born-vs-tm ------------------------------------------------------------
// Born closed form against the transfer-matrix Lyapunov estimate.
inline void born_vs_tm(const Config& cfg, const std::filesystem::path& dir,
                       RunManifest& man, int threads) {
  const double k0 = cfg.get("physics.k0", 1000.0);
  const double V = cfg.get("physics.V", 4000.0);
  const std::vector<double> Es = cfg.get_list("numerics.E_list", {8000.0});
  const int realizations =
      static_cast<int>(cfg.get("numerics.realizations", 24L));
  const std::uint64_t seed = cfg.get("experiment.seed", std::uint64_t{1});
  const double zeta = correlation_length(k0);
  const double h = cfg.get("numerics.h", zeta / 12.0);

  CsvWriter csv(dir / "loclength.csv");
  csv.comment("localization length: Born closed form vs transfer matrix");
  csv.comment("xi is the density e-folding length; gamma the amplitude rate");
  csv.header("E,xi_born,xi_tm,stderr_xi,indicator");

  for (std::size_t ei = 0; ei < Es.size(); ++ei) {
    const double E = Es[ei];
    const BornResult born = born_xi({E, k0, V});
    const double L = cfg.get("numerics.L", std::max(200.0 * born.xi, 3000.0 * zeta));

    std::vector<double> gammas(static_cast<std::size_t>(realizations));
    parallel_for(realizations, threads, [&](long r) {
      const LinePotential pot = synthesize_line_potential(
          k0, V, L, h, seed,
          static_cast<std::uint64_t>(r) + 1000 * static_cast<std::uint64_t>(ei));
      gammas[static_cast<std::size_t>(r)] = lyapunov_single(pot, E);
    });
    double mean = 0.0;
    for (double g : gammas) mean += g;
    mean /= static_cast<double>(gammas.size());
    double var = 0.0;
    for (double g : gammas) var += (g - mean) * (g - mean);
    if (gammas.size() > 1) var /= static_cast<double>(gammas.size() - 1);
    const double se_gamma = std::sqrt(var / static_cast<double>(gammas.size()));
    const double xi_tm = 1.0 / (2.0 * mean);
    const double se_xi = se_gamma / (2.0 * mean * mean);

    csv.row({E, born.xi, xi_tm, se_xi, born.indicator});
    if (ei == 0) {
      man.summary["xi_born"] = born.xi;
      man.summary["xi_tm"] = xi_tm;
      man.summary["stderr_xi"] = se_xi;
      man.summary["indicator"] = born.indicator;
    }
  }
  man.add_file(dir, "loclength.csv");
}

// ---- fig1 ------------------------------------------------------------------
// Eigenstates of the disordered effective model: spectrum, per-state tail
// fits, and the laboratory-frame density of one localized state.
inline void fig1(const Config& cfg, const std::filesystem::path& dir,
                 RunManifest& man, int threads) {
  const PhysicsParams p = [&] {
    PhysicsParams q = physics_from(cfg);
    q.k0 = cfg.get("physics.k0", 100.0);
    q.V = cfg.get("physics.V", 300.0);
    return q;
  }();
  const std::uint64_t seed = cfg.get("experiment.seed", std::uint64_t{1});
  const int K = p.cutoff > 0 ? p.cutoff : static_cast<int>(std::lround(4 * p.k0));
  const int halfwidth = static_cast<int>(
      cfg.get("numerics.basis_halfwidth", static_cast<long>(K + 80)));
  const double shell_lo = cfg.get("numerics.shell_lo", 0.8 * 3.6 * p.k0);
  const double shell_hi = cfg.get("numerics.shell_hi", 1.2 * 3.6 * p.k0);
  const int grid_points = static_cast<int>(cfg.get("numerics.grid_points", 4096L));

  DriveSpec ds;
  ds.k0 = p.k0;
  ds.cutoff = K;
  ds.seed = seed;
  const DriveCoefficients drive = synthesize_drive(ds);
  const auto c = effective_coefficients(drive);
  write_coefficients(dir / "drive_coefficients.txt", K,
                     [&](int k) { return drive.f(k); }, "drive f_k");
  write_coefficients(dir / "effective_coefficients.txt", K,
                     [&](int k) { return c.c(k); }, "effective c_k");

  EffectiveModelSpec spec;
  spec.mu = p.mu;
  spec.V = p.V;
  spec.omega = p.omega;
  spec.alpha = p.alpha;
  spec.beta = momentum_offset(p.alpha, p.omega);
  spec.c = c;
  const PlaneWaveBasis basis = PlaneWaveBasis::centered(halfwidth, spec.beta);
  const EigenSolution sol = diagonalize(build_matrix(spec, basis), basis, p.omega);

  CsvWriter spectrum(dir / "spectrum.csv");
  spectrum.comment("effective-model spectrum, E absolute, Etilde = E - omega^2/2");
  spectrum.header("index,E,Etilde");
  for (int i = 0; i < sol.energies.size(); ++i)
    spectrum.row({static_cast<double>(i), sol.energies(i), sol.shifted(i)});

  std::vector<double> theta(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i)
    theta[static_cast<std::size_t>(i)] = -pi + 2.0 * pi * i / grid_points;

  std::vector<int> shell;
  for (int i = 0; i < sol.shifted.size(); ++i)
    if (sol.shifted(i) > shell_lo && sol.shifted(i) < shell_hi)
      shell.push_back(i);

  TailFitOptions fo;
  fo.periodic = true;

  CsvWriter fits(dir / "states_fit.csv");
  fits.comment("per-state exponential tail fits over the shell [" +
               format_double(shell_lo) + ", " + format_double(shell_hi) + "]");
  fits.header("index,Etilde,xi_fit,r2,xi_born,flagged");
  struct FitRow { int idx; TailFit fit; double born; };
  std::vector<FitRow> rows(shell.size());
  parallel_for(static_cast<long>(shell.size()), threads, [&](long si) {
    const int i = shell[static_cast<std::size_t>(si)];
    const auto dens = density_on_grid(sol, i, theta);
    TailFitOptions o = fo;
    o.xi_estimate = born_xi({sol.shifted(i), p.k0, p.V}).xi;
    // smoothing must fill both the disorder speckle and the density nodes
    o.smooth_sigma = std::max(correlation_length(p.k0) / 3.0,
                              0.5 * pi / std::sqrt(2.0 * sol.shifted(i)));
    rows[static_cast<std::size_t>(si)] = {
        i, fit_tail(theta, dens, o), born_xi({sol.shifted(i), p.k0, p.V}).xi};
  });
  int best = -1;
  double best_r2 = -1.0;
  for (std::size_t si = 0; si < rows.size(); ++si) {
    const auto& r = rows[si];
    fits.row({static_cast<double>(r.idx), sol.shifted(r.idx), r.fit.xi,
              r.fit.r2, r.born, r.fit.flagged ? 1.0 : 0.0});
    if (r.fit.r2 > best_r2) {
      best_r2 = r.fit.r2;
      best = static_cast<int>(si);
    }
  }

  if (best >= 0) {
    const int i = rows[static_cast<std::size_t>(best)].idx;
    const int nt = 2048;
    const double T = 2.0 * pi / p.omega;
    std::vector<double> times(static_cast<std::size_t>(nt));
    for (int g = 0; g < nt; ++g)
      times[static_cast<std::size_t>(g)] = T * g / nt;
    const auto series = lab_frame_series(sol, i, 0.0, times);
    {
      CsvWriter lab(dir / "labseries.csv");
      lab.comment("probability density at theta = 0 versus time, state " +
                  std::to_string(i));
      lab.header("t_over_T,density");
      for (int g = 0; g < nt; ++g)
        lab.row({times[static_cast<std::size_t>(g)] / T,
                 series[static_cast<std::size_t>(g)]});
    }
    {
      CsvWriter coeff(dir / "state_coefficients.csv");
      coeff.comment("plane-wave coefficients of state " + std::to_string(i));
      coeff.header("n,re,im");
      for (int a = 0; a < basis.size(); ++a)
        coeff.row({static_cast<double>(basis.n(a)), sol.vectors(a, i).real(),
                   sol.vectors(a, i).imag()});
    }
    man.add_file(dir, "labseries.csv");
    man.add_file(dir, "state_coefficients.csv");
    man.summary["series_state"] = i;
    man.summary["series_xi_fit"] = rows[static_cast<std::size_t>(best)].fit.xi;
    man.summary["series_r2"] = best_r2;
  }
  man.add_file(dir, "spectrum.csv");
  man.add_file(dir, "states_fit.csv");
  man.add_file(dir, "drive_coefficients.txt");
  man.add_file(dir, "effective_coefficients.txt");
  man.summary["basis_halfwidth"] = halfwidth;
  man.summary["n_shell_states"] = static_cast<double>(shell.size());
}

// ---- fig2 ------------------------------------------------------------------
// Driven-lattice reduction: hopping, disorder at the minima, chain spectra and
// tail fits of mid-band states.
inline void fig2(const Config& cfg, const std::filesystem::path& dir,
                 RunManifest& man, int threads) {
  LatticeSpec spec;
  spec.s = static_cast<int>(cfg.get("physics.s", 100L));
  spec.lambda = cfg.get("physics.lambda", 2e4);
  spec.k0 = cfg.get("physics.k0", 100.0);
  spec.band = cfg.get("physics.band", std::string("lowest")) == "first-excited"
                  ? Band::first_excited
                  : Band::lowest;
  spec.V = cfg.get("physics.V", spec.band == Band::lowest ? 10.0 : 300.0);
  spec.seed = cfg.get("experiment.seed", std::uint64_t{1});
  const int realizations =
      static_cast<int>(cfg.get("numerics.realizations", 24L));

  const double J = hopping(spec.lambda, spec.s, spec.band);
  const LatticeXi xif = lattice_xi(J, spec.s, spec.V);
  const double a = 2.0 * pi / static_cast<double>(spec.s);

  struct Row { double med = 0.0; int n = 0; };
  std::vector<Row> rows(static_cast<std::size_t>(realizations));
  std::vector<double> eps0;
  parallel_for(realizations, threads, [&](long r) {
    LatticeSpec rs = spec;
    rs.realization = static_cast<std::uint64_t>(r);
    const OnsiteEnergies eps = onsite_energies(rs);
    if (r == 0) eps0 = eps.values;
    const auto eig = diagonalize_chain({J, eps.values});
    std::vector<double> ord(static_cast<std::size_t>(spec.s));
    for (int j = 0; j < spec.s; ++j) ord[static_cast<std::size_t>(j)] = j * a;
    std::vector<double> fits;
    for (int i = 0; i < spec.s; ++i) {
      if (std::abs(eig.values(i)) > 0.5 * J) continue;  // mid-band only
      std::vector<double> dens(static_cast<std::size_t>(spec.s));
      for (int j = 0; j < spec.s; ++j)
        dens[static_cast<std::size_t>(j)] =
            eig.vectors(j, i) * eig.vectors(j, i);
      TailFitOptions o;
      o.periodic = true;
      o.r2_threshold = 0.5;
      o.xi_estimate = xif.xi;
      // mid-band chain densities alternate site to site; the up-turn stop
      // would trigger on that pattern, so flanks end at the floor instead
      o.upturn = 1e300;
      o.rel_floor = 1e-8;
      const TailFit f = fit_tail(ord, dens, o);
      if (!f.flagged && f.xi > 0.0) fits.push_back(f.xi);
    }
    std::sort(fits.begin(), fits.end());
    Row row;
    row.n = static_cast<int>(fits.size());
    if (!fits.empty())
      row.med = fits.size() % 2 ? fits[fits.size() / 2]
                                : 0.5 * (fits[fits.size() / 2 - 1] +
                                         fits[fits.size() / 2]);
    rows[static_cast<std::size_t>(r)] = row;
  });

  CsvWriter csv(dir / "chains.csv");
  csv.comment("tight-binding chains from the driven lattice; xi in Theta-radians");
  csv.header("realization,band,J,xi_formula,xi_fit_median,n_fits");
  std::vector<double> meds;
  for (int r = 0; r < realizations; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    csv.row({static_cast<double>(r),
             spec.band == Band::first_excited ? 1.0 : 0.0, J, xif.xi, row.med,
             static_cast<double>(row.n)});
    if (row.n > 0) meds.push_back(row.med);
  }
  std::sort(meds.begin(), meds.end());

  CsvWriter chain(dir / "chain_sites.csv");
  chain.comment("on-site energies of realization 0");
  chain.header("j,eps");
  for (std::size_t j = 0; j < eps0.size(); ++j)
    chain.row({static_cast<double>(j), eps0[j]});

  man.add_file(dir, "chains.csv");
  man.add_file(dir, "chain_sites.csv");
  man.summary["J"] = J;
  man.summary["xi_formula"] = xif.xi;
  if (!meds.empty())
    man.summary["xi_fit_median"] =
        meds.size() % 2 ? meds[meds.size() / 2]
                        : 0.5 * (meds[meds.size() / 2 - 1] + meds[meds.size() / 2]);
  man.summary["weak_disorder"] = xif.weak_disorder ? 1.0 : 0.0;
}

// ---- sos -------------------------------------------------------------------
// Stroboscopic sections of the exact classical dynamics at two drive
// frequencies plus the effective phase-space portrait.
inline void sos(const Config& cfg, const std::filesystem::path& dir,
                RunManifest& man, int threads) {
  PhysicsParams p = physics_from(cfg);
  p.k0 = cfg.get("physics.k0", 10.0);
  p.V = cfg.get("physics.V", 20.0);
  const std::uint64_t seed = cfg.get("experiment.seed", std::uint64_t{1});
  const std::vector<double> omegas = cfg.get_list(
      "numerics.omega_list", {300.0 - p.alpha, 2000.0 - p.alpha});
  const int spp = static_cast<int>(cfg.get("numerics.steps_per_period", 640L));
  const int n_periods = static_cast<int>(cfg.get("numerics.n_periods", 400L));
  const int fan = static_cast<int>(cfg.get("numerics.fan_count", 8L));

  DriveSpec ds;
  ds.k0 = p.k0;
  ds.seed = seed;
  const DriveCoefficients drive = synthesize_drive(ds);
  const auto c = effective_coefficients(drive);

  // deepest effective well locates the regular resonant orbit
  double theta_min = 0.0, v_min = 1e300;
  for (int i = 0; i < 4096; ++i) {
    const double th = -pi + 2.0 * pi * i / 4096.0;
    const double v = p.V * c.evaluate(th);
    if (v < v_min) {
      v_min = v;
      theta_min = th;
    }
  }
  const double P0_res = cfg.get("numerics.P0", 1.0);

  for (std::size_t oi = 0; oi < omegas.size(); ++oi) {
    const double omega = omegas[oi];
    ClassicalParams par;
    par.drive = drive;
    par.V = p.V;
    par.lambda = p.lambda;
    par.s = p.s;
    par.omega = omega;
    par.alpha = p.alpha;
    IntegratorConfig icfg;
    icfg.steps_per_period = spp;

    struct Orbit { std::vector<PoincarePoint> pts; };
    std::vector<Orbit> orbits(static_cast<std::size_t>(fan) + 1);
    parallel_for(fan + 1, threads, [&](long ic) {
      ClassicalState st;
      if (ic == 0) {  // designated resonant orbit in the deepest well
        st.theta = theta_min;
        st.p = p.alpha + omega + P0_res;
      } else {
        const double u = static_cast<double>(ic - 1) / std::max(1, fan - 1);
        st.theta = -pi + 2.0 * pi * u;
        st.p = p.alpha + omega +
               (u - 0.5) * std::sqrt(2.0 * p.V);
      }
      const auto traj = integrate_periods(st, par, icfg, n_periods);
      orbits[static_cast<std::size_t>(ic)].pts =
          poincare(traj, omega, p.alpha).points;
    });

    const std::string tag = std::to_string(static_cast<int>(std::lround(omega + p.alpha)));
    CsvWriter sec(dir / ("section_" + tag + ".csv"));
    sec.comment("stroboscopic section, omega = " + format_double(omega));
    sec.comment("ic = 0 is the designated resonant deep-well orbit");
    sec.header("ic,Theta,P");
    for (std::size_t ic = 0; ic < orbits.size(); ++ic)
      for (const auto& pt : orbits[ic].pts)
        sec.row({static_cast<double>(ic), pt.Theta, pt.P});
    man.add_file(dir, "section_" + tag + ".csv");

    // H_eff spread along the resonant orbit
    double mean = 0.0;
    for (const auto& pt : orbits[0].pts)
      mean += heff_energy(pt.Theta, pt.P, c, p.V, omega);
    mean /= static_cast<double>(orbits[0].pts.size());
    double var = 0.0;
    for (const auto& pt : orbits[0].pts) {
      const double e = heff_energy(pt.Theta, pt.P, c, p.V, omega);
      var += (e - mean) * (e - mean);
    }
    var /= static_cast<double>(orbits[0].pts.size());
    man.summary["heff_spread_" + tag] = std::sqrt(var);
  }

  // portrait of the effective Hamiltonian for contour plots
  CsvWriter por(dir / "portrait.csv");
  por.comment("effective-Hamiltonian energy on a (Theta, P) grid");
  por.header("Theta,P,Heff");
  const int gt = 121, gp = 41;
  const double pmax = std::sqrt(2.0 * p.V) * 1.5;
  for (int i = 0; i < gt; ++i) {
    const double th = -pi + 2.0 * pi * i / gt;
    for (int j = 0; j < gp; ++j) {
      const double P = -pmax + 2.0 * pmax * j / (gp - 1);
      por.row({th, P, heff_energy(th, P, c, p.V, omegas.back())});
    }
  }
  man.add_file(dir, "portrait.csv");
}

// ---- levels ----------------------------------------------------------------
// Effective levels vs folded quasienergies across a disorder-strength list.
inline void levels(const Config& cfg, const std::filesystem::path& dir,
                   RunManifest& man, int threads) {
  PhysicsParams p = physics_from(cfg);
  p.k0 = cfg.get("physics.k0", 10.0);
  const std::uint64_t seed = cfg.get("experiment.seed", std::uint64_t{1});
  const std::vector<double> Vs =
      cfg.get_list("numerics.V_list", {0.0, 5.0, 10.0, 15.0, 20.0});
  const int count = static_cast<int>(cfg.get("numerics.levels_count", 8L));
  const int K = p.cutoff > 0 ? p.cutoff : static_cast<int>(std::lround(4 * p.k0));
  const int W = static_cast<int>(
      cfg.get("numerics.window_halfwidth", static_cast<long>(K / 2 + 2)));
  const int eff_halfwidth = static_cast<int>(
      cfg.get("numerics.basis_halfwidth", static_cast<long>(3 * K)));

  DriveSpec ds;
  ds.k0 = p.k0;
  ds.cutoff = K;
  ds.seed = seed;
  const DriveCoefficients drive = synthesize_drive(ds);
  const auto c = effective_coefficients(drive);

  CsvWriter csv(dir / "levels.csv");
  csv.comment("effective levels vs folded quasienergies, omega = " +
              format_double(p.omega));
  csv.header("V,level,E_eff,quasienergy_folded,residual,overlap");

  double max_resid = 0.0;
  for (double V : Vs) {
    EffectiveModelSpec spec;
    spec.mu = p.mu;
    spec.V = V;
    spec.omega = p.omega;
    spec.alpha = p.alpha;
    spec.beta = momentum_offset(p.alpha, p.omega);
    spec.c = c;
    const PlaneWaveBasis basis = PlaneWaveBasis::centered(eff_halfwidth, spec.beta);
    const EigenSolution eff = diagonalize(build_matrix(spec, basis), basis, p.omega);

    FloquetBasisWindow win;
    win.n_center = static_cast<int>(std::lround(p.omega + p.alpha));
    win.n_halfwidth = W;
    win.m_halfwidth = W;
    const auto HF = build_floquet(drive, V, p.lambda, p.s, p.omega, p.alpha, win);
    const FloquetSolution fs = diagonalize_floquet(HF, win, p.omega, p.alpha);
    const ComparisonReport rep = compare_with_effective(fs, eff, count);

    const double E_ref = eff.energies(0) - 0.5 * p.omega;
    for (const auto& lv : rep.levels) {
      Eigen::VectorXd one(1);
      one(0) = lv.quasienergy;
      const double folded = quasienergies(one, p.omega, E_ref).folded[0];
      csv.row({V, static_cast<double>(lv.eff_index), lv.E_eff, folded,
               lv.residual, lv.overlap});
      max_resid = std::max(max_resid, lv.residual);
    }
  }
  (void)threads;
  man.add_file(dir, "levels.csv");
  man.summary["max_residual"] = max_resid;
  man.summary["window_halfwidth"] = W;
}

// ---- eigenstate-compare ----------------------------------------------------
// Densities of one effective eigenstate against the matched Floquet state.
inline void eigenstate_compare(const Config& cfg,
                               const std::filesystem::path& dir,
                               RunManifest& man, int threads) {
  PhysicsParams p = physics_from(cfg);
  p.k0 = cfg.get("physics.k0", 10.0);
  p.V = cfg.get("physics.V", 20.0);
  const std::uint64_t seed = cfg.get("experiment.seed", std::uint64_t{1});
  const int state = static_cast<int>(cfg.get("numerics.state_index", 7L));
  const int K = p.cutoff > 0 ? p.cutoff : static_cast<int>(std::lround(4 * p.k0));
  const int W = static_cast<int>(
      cfg.get("numerics.window_halfwidth", static_cast<long>(K / 2 + 12)));
  const int eff_halfwidth = static_cast<int>(
      cfg.get("numerics.basis_halfwidth", static_cast<long>(3 * K)));
  const int grid_points = static_cast<int>(cfg.get("numerics.grid_points", 1024L));

  DriveSpec ds;
  ds.k0 = p.k0;
  ds.cutoff = K;
  ds.seed = seed;
  const DriveCoefficients drive = synthesize_drive(ds);
  const auto c = effective_coefficients(drive);

  EffectiveModelSpec spec;
  spec.mu = p.mu;
  spec.V = p.V;
  spec.omega = p.omega;
  spec.alpha = p.alpha;
  spec.beta = momentum_offset(p.alpha, p.omega);
  spec.c = c;
  const PlaneWaveBasis basis = PlaneWaveBasis::centered(eff_halfwidth, spec.beta);
  const EigenSolution eff = diagonalize(build_matrix(spec, basis), basis, p.omega);

  FloquetBasisWindow win;
  win.n_center = static_cast<int>(std::lround(p.omega + p.alpha));
  win.n_halfwidth = W;
  win.m_halfwidth = W;
  const auto HF = build_floquet(drive, p.V, p.lambda, p.s, p.omega, p.alpha, win);
  const FloquetSolution fs = diagonalize_floquet(HF, win, p.omega, p.alpha);
  const ComparisonReport rep = compare_with_effective(fs, eff, state + 1);
  const LevelPair& pair = rep.levels.back();

  // t = 0 wavefunction of the matched Floquet state, shifted back by n_res
  const int N = win.n_size(), M = win.m_size();
  long best = -1;
  for (long j = 0; j < fs.values.size(); ++j)
    if (fs.values(j) == pair.quasienergy) {
      best = j;
      break;
    }
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < M; ++b)
      u(a) += fs.vectors(static_cast<long>(a) * M + b, best);
  u /= u.norm();

  CsvWriter csv(dir / "state_density.csv");
  csv.comment("effective eigenstate " + std::to_string(state) +
              " vs matched Floquet state at t = 0");
  csv.comment("overlap = " + format_double(pair.overlap) +
              ", residual = " + format_double(pair.residual));
  csv.header("Theta,rho_eff,rho_floquet");
  for (int g = 0; g < grid_points; ++g) {
    const double th = -pi + 2.0 * pi * g / grid_points;
    cdouble ae{0.0, 0.0};
    for (int i = 0; i < basis.size(); ++i)
      ae += eff.vectors(i, state) * std::polar(1.0, basis.n(i) * th);
    cdouble af{0.0, 0.0};
    for (int a = 0; a < N; ++a) {
      const int nu = win.n_center - win.n_halfwidth + a - rep.n_res;
      af += u(a) * std::polar(1.0, nu * th);
    }
    csv.row({th, std::norm(ae) / (2.0 * pi), std::norm(af) / (2.0 * pi)});
  }
  (void)threads;
  man.add_file(dir, "state_density.csv");
  man.summary["overlap"] = pair.overlap;
  man.summary["residual"] = pair.residual;
  man.summary["E_eff"] = pair.E_eff;
}

// ---- lattice-sweep ---------------------------------------------------------
inline void lattice_sweep(const Config& cfg, const std::filesystem::path& dir,
                          RunManifest& man, int threads) {
  const std::vector<double> Vs =
      cfg.get_list("numerics.V_list", {5.0, 10.0, 20.0, 40.0});
  CsvWriter csv(dir / "lattice_sweep.csv");
  csv.comment("chain localization across disorder strengths");
  csv.header("V,J,xi_formula,xi_fit_median");
  for (double V : Vs) {
    Config sub = cfg;
    sub.set("physics.V", format_double(V));
    const auto subdir = dir / ("V_" + format_double(V));
    std::filesystem::create_directories(subdir);
    RunManifest sm;
    fig2(sub, subdir, sm, threads);
    csv.row({V, sm.summary["J"], sm.summary["xi_formula"],
             sm.summary.count("xi_fit_median") ? sm.summary["xi_fit_median"]
                                               : 0.0});
  }
  man.add_file(dir, "lattice_sweep.csv");
}

// ---- custom (disorder dumps) -----------------------------------------------
inline void custom(const Config& cfg, const std::filesystem::path& dir,
                   RunManifest& man, int threads) {
  PhysicsParams p = physics_from(cfg);
  const std::uint64_t seed = cfg.get("experiment.seed", std::uint64_t{1});
  const int K = p.cutoff > 0 ? p.cutoff : static_cast<int>(std::lround(4 * p.k0));

  DriveSpec ds;
  ds.k0 = p.k0;
  ds.cutoff = K;
  ds.seed = seed;
  const DriveCoefficients drive = synthesize_drive(ds);
  const auto c = effective_coefficients(drive);
  write_coefficients(dir / "drive_coefficients.txt", K,
                     [&](int k) { return drive.f(k); }, "drive f_k");
  write_coefficients(dir / "effective_coefficients.txt", K,
                     [&](int k) { return c.c(k); }, "effective c_k");

  const int M = static_cast<int>(cfg.get("numerics.grid_points", 1024L));
  std::vector<double> grid(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i)
    grid[static_cast<std::size_t>(i)] = -pi + 2.0 * pi * i / M;
  const auto pot = potential_on_grid(c, p.V, grid);
  CsvWriter ring(dir / "ring_potential.csv");
  ring.comment("effective ring potential");
  ring.header("Theta,V_eff");
  for (int i = 0; i < M; ++i)
    ring.row({grid[static_cast<std::size_t>(i)],
              pot[static_cast<std::size_t>(i)]});

  const double zeta = correlation_length(p.k0);
  const double L = cfg.get("numerics.L", 200.0 * zeta * 10.0);
  const auto line = synthesize_line_potential(p.k0, p.V, L, zeta / 10.0, seed);
  write_line_potential(dir / "line_potential.bin", line);

  (void)threads;
  man.add_file(dir, "drive_coefficients.txt");
  man.add_file(dir, "effective_coefficients.txt");
  man.add_file(dir, "ring_potential.csv");
  man.add_file(dir, "line_potential.bin");
  man.summary["cutoff"] = K;
}

}  // namespace pipelines

// Runs a named experiment; writes resolved config + manifest.
inline RunResult run_experiment(Config cfg) {
  const std::string name = cfg.get("experiment.name", std::string("custom"));
  const std::string outdir = cfg.get("experiment.outdir", std::string("run_out"));
  const int threads =
      static_cast<int>(cfg.get("experiment.threads", 1L));
  cfg.set("experiment.name", name);
  cfg.set("experiment.outdir", outdir);

  const std::filesystem::path dir(outdir);
  std::filesystem::create_directories(dir);

  RunManifest man;
  man.experiment = name;
  const auto t0 = std::chrono::steady_clock::now();

  if (name == "born-vs-tm") pipelines::born_vs_tm(cfg, dir, man, threads);
  else if (name == "fig1") pipelines::fig1(cfg, dir, man, threads);
  else if (name == "fig2") pipelines::fig2(cfg, dir, man, threads);
  else if (name == "sos") pipelines::sos(cfg, dir, man, threads);
  else if (name == "levels") pipelines::levels(cfg, dir, man, threads);
  else if (name == "eigenstate-compare")
    pipelines::eigenstate_compare(cfg, dir, man, threads);
  else if (name == "lattice-sweep") pipelines::lattice_sweep(cfg, dir, man, threads);
  else if (name == "custom") pipelines::custom(cfg, dir, man, threads);
  else throw std::invalid_argument("run_experiment: unknown experiment " + name);

  {
    std::ofstream echo(dir / "resolved.cfg");
    echo << cfg.render();
  }
  man.config = cfg;
  man.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  man.write(dir);
  RunResult res;
  res.outdir = dir;
  res.manifest = man;
  return res;
}

struct SweepResult {
  std::vector<std::filesystem::path> point_dirs;
  std::vector<std::string> failures;  // "value: error"
};

// Runs the configured experiment once per axis value, each in its own
// subdirectory; aggregates the manifests' summary rows ordered by value.
inline SweepResult sweep(const Config& base, const std::string& axis,
                         const std::vector<double>& values) {
  if (!axis.empty() && values.empty()) {
    // empty sweep is a success with an empty table
  }
  const std::string outdir =
      base.get("experiment.outdir", std::string("sweep_out"));
  const std::filesystem::path dir(outdir);
  std::filesystem::create_directories(dir);

  SweepResult result;
  result.point_dirs.resize(values.size());
  std::vector<std::optional<RunManifest>> manifests(values.size());
  std::vector<std::string> errors(values.size());

  const int threads = static_cast<int>(base.get("experiment.threads", 1L));
  parallel_for(static_cast<long>(values.size()), threads, [&](long i) {
    Config point = base;
    point.set(axis, format_double(values[static_cast<std::size_t>(i)]));
    char tag[32];
    std::snprintf(tag, sizeof(tag), "point_%03ld", i);
    point.set("experiment.outdir", (dir / tag).string());
    point.set("experiment.threads", "1");
    try {
      const RunResult r = run_experiment(point);
      manifests[static_cast<std::size_t>(i)] = r.manifest;
      result.point_dirs[static_cast<std::size_t>(i)] = r.outdir;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  });

  // union of summary keys, deterministic order
  std::set<std::string> keys;
  for (const auto& m : manifests)
    if (m)
      for (const auto& [k, v] : m->summary) keys.insert(k);

  CsvWriter agg(dir / "sweep.csv");
  agg.comment("sweep over " + axis);
  std::string header = axis;
  for (const auto& k : keys) header += "," + k;
  agg.header(header);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!manifests[i]) continue;
    std::string line = format_double(values[i]);
    for (const auto& k : keys) {
      const auto it = manifests[i]->summary.find(k);
      line += ",";
      line += it == manifests[i]->summary.end() ? "nan"
                                                : format_double(it->second);
    }
    agg.row_raw(line);
  }

  for (std::size_t i = 0; i < values.size(); ++i)
    if (!errors[i].empty())
      result.failures.push_back(format_double(values[i]) + ": " + errors[i]);
  if (!result.failures.empty()) {
    std::ofstream f(dir / "failures.txt");
    for (const auto& line : result.failures) f << line << "\n";
  }
  return result;
}

}  // namespace timeloc

#endif
