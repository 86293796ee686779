#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "timeloc/classical.hpp"
#include "timeloc/effective_model.hpp"

using namespace timeloc;
using Catch::Approx;

namespace {

ClassicalParams make_params(double k0, double V, double omega,
                            std::uint64_t seed, double lambda = 0.0,
                            int s = 1) {
  DriveSpec ds;
  ds.k0 = k0;
  ds.seed = seed;
  ClassicalParams par;
  par.drive = synthesize_drive(ds);
  par.V = V;
  par.lambda = lambda;
  par.s = s;
  par.omega = omega;
  par.alpha = golden_alpha;
  return par;
}

}  // namespace

TEST_CASE("force identities", "[classical]") {
  auto par = make_params(10.0, 0.0, 100.0, 1);
  CHECK(force(0.7, 0.3, par) == 0.0);

  // lattice term vanishes at theta = 0 for all t
  par.lambda = 50.0;
  par.s = 5;
  for (double t : {0.0, 0.17, 0.44}) CHECK(force(0.0, t, par) == 0.0);

  // disorder force averages to zero over the ring (derivative of a
  // zero-mean Fourier series)
  par.lambda = 0.0;
  par.V = 20.0;
  const int M = 256;
  double mean = 0.0, rms = 0.0;
  for (int i = 0; i < M; ++i) {
    const double f = force(-pi + 2.0 * pi * i / M, 0.05, par);
    mean += f;
    rms += f * f;
  }
  mean /= M;
  rms = std::sqrt(rms / M);
  CHECK(std::abs(mean) < 1e-9 * rms);

  // truncation beyond the drive cutoff is rejected
  par.cutoff = par.drive.cutoff() + 1;
  CHECK_THROWS_AS(force(0.1, 0.0, par), std::invalid_argument);
}

TEST_CASE("free motion is exact", "[classical]") {
  auto par = make_params(5.0, 0.0, 80.0, 1);
  ClassicalState st{0.3, 81.0, 0.0};
  IntegratorConfig cfg;
  cfg.steps_per_period = 128;
  const auto traj = integrate_periods(st, par, cfg, 50);
  const double T = 2.0 * pi / par.omega;
  const auto& last = traj.back();
  CHECK(last.p == 81.0);  // exactly conserved
  const double expect = wrap_angle(0.3 + (81.0 - par.alpha) * 50.0 * T);
  CHECK(last.theta == Approx(expect).margin(1e-10));
}

TEST_CASE("integrator converges at second order", "[classical]") {
  auto par = make_params(5.0, 20.0, 50.0, 3);
  const ClassicalState st{0.2, 50.0 + golden_alpha, 0.0};
  const double T = 2.0 * pi / par.omega;

  // reference at very small dt
  const long nref = 16384;
  const auto ref = integrate_steps(st, par, T / nref, nref);
  auto err = [&](long n) {
    const auto end = integrate_steps(st, par, T / n, n);
    return std::hypot(wrap_angle(end.theta - ref.theta), end.p - ref.p);
  };
  const double e1 = err(512);
  const double e2 = err(1024);
  CHECK(e1 / e2 == Approx(4.0).epsilon(0.5));
}

TEST_CASE("the splitting is time reversible", "[classical]") {
  auto par = make_params(8.0, 15.0, 60.0, 5);
  const ClassicalState st{-1.1, 60.0, 0.0};
  const double dt = 2.0 * pi / par.omega / 512;
  const long n = 1000;

  double theta = st.theta, p = st.p;
  for (long i = 0; i < n; ++i)
    step_kdk(theta, p, static_cast<double>(i) * dt, dt, par);
  for (long i = n; i-- > 0;)
    step_kdk(theta, p, static_cast<double>(i + 1) * dt, -dt, par);
  CHECK(theta == Approx(st.theta).margin(1e-9));
  CHECK(p == Approx(st.p).margin(1e-9));
}

TEST_CASE("free sections sit on a momentum line", "[classical]") {
  auto par = make_params(5.0, 0.0, 40.0, 1);
  ClassicalState st{1.0, 40.0 + golden_alpha + 0.25, 0.0};
  IntegratorConfig cfg;
  cfg.steps_per_period = 64;
  const auto traj = integrate_periods(st, par, cfg, 30);
  const auto sec = poincare(traj, par.omega, par.alpha);
  for (const auto& pt : sec.points) CHECK(pt.P == Approx(0.25).margin(1e-12));
}

TEST_CASE("poincare rejects off-period sampling", "[classical]") {
  std::vector<ClassicalState> traj{{0.0, 1.0, 0.0}, {0.1, 1.0, 0.37}};
  CHECK_THROWS_AS(poincare(traj, 10.0, 0.0), std::invalid_argument);
}

TEST_CASE("effective energy gradient matches finite differences", "[classical]") {
  DriveSpec ds;
  ds.k0 = 10.0;
  ds.seed = 7;
  const auto c = effective_coefficients(synthesize_drive(ds));
  const double V = 20.0, omega = 300.0;

  const double Th = 0.37, P = 1.3, eps = 1e-6;
  const double dP_num =
      (heff_energy(Th, P + eps, c, V, omega) - heff_energy(Th, P - eps, c, V, omega)) /
      (2.0 * eps);
  CHECK(dP_num == Approx(P).epsilon(1e-6));

  const double dTh_num =
      (heff_energy(Th + eps, P, c, V, omega) - heff_energy(Th - eps, P, c, V, omega)) /
      (2.0 * eps);
  // analytic derivative of the disorder sum
  double dTh = 0.0;
  for (int k = 1; k <= c.cutoff(); ++k) {
    const cdouble ck = c.c(k);
    dTh += 2.0 * V * k *
           (-ck.real() * std::sin(k * Th) - ck.imag() * std::cos(k * Th));
  }
  CHECK(dTh_num == Approx(dTh).epsilon(1e-5));
}

TEST_CASE("section energy spread shrinks with omega", "[classical][slow]") {
  // regular deep-well resonant orbit; the H_eff spread along the section
  // measures the non-secular corrections
  DriveSpec ds;
  ds.k0 = 10.0;
  ds.seed = 1;
  const auto drive = synthesize_drive(ds);
  const auto c = effective_coefficients(drive);
  const double V = 20.0;

  double theta_min = 0.0, vmin = 1e300;
  for (int i = 0; i < 4096; ++i) {
    const double th = -pi + 2.0 * pi * i / 4096.0;
    if (V * c.evaluate(th) < vmin) {
      vmin = V * c.evaluate(th);
      theta_min = th;
    }
  }

  auto spread = [&](double omega_base) {
    ClassicalParams par;
    par.drive = drive;
    par.V = V;
    par.omega = omega_base - golden_alpha;
    par.alpha = golden_alpha;
    IntegratorConfig cfg;
    cfg.steps_per_period = 640;
    ClassicalState st{theta_min, par.alpha + par.omega + 1.0, 0.0};
    const auto sec =
        poincare(integrate_periods(st, par, cfg, 200), par.omega, par.alpha);
    double mean = 0.0;
    for (const auto& pt : sec.points)
      mean += heff_energy(pt.Theta, pt.P, c, V, par.omega);
    mean /= static_cast<double>(sec.points.size());
    double var = 0.0;
    for (const auto& pt : sec.points) {
      const double e = heff_energy(pt.Theta, pt.P, c, V, par.omega) - mean;
      var += e * e;
    }
    return std::sqrt(var / static_cast<double>(sec.points.size()));
  };

  const double s300 = spread(300.0);
  const double s600 = spread(600.0);
  const double s2000 = spread(2000.0);
  CHECK(s300 > s600);
  CHECK(s600 > s2000);
}
