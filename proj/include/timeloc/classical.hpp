#ifndef TIMELOC_CLASSICAL_HPP
#define TIMELOC_CLASSICAL_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "timeloc/disorder.hpp"

// Exact classical dynamics of the lab-frame Hamiltonian
//   H = (p - alpha)^2/2 + V g(theta) f(t) + lambda cos(s theta) cos(s omega t)
// with g the Fourier-truncated sawtooth (the classical system is defined as
// the truncated one, matching the quantum model). Second-order kick-drift-kick
// splitting; both half-kicks of a step evaluate the drive at the step
// midpoint time. Stroboscopic sampling lands on exact multiples of the period.

namespace timeloc {

struct ClassicalState {
  double theta = 0.0;  // wrapped to [-pi, pi) on output
  double p = 0.0;
  double t = 0.0;
};

struct ClassicalParams {
  DriveCoefficients drive;
  double V = 0.0;
  double lambda = 0.0;
  int s = 1;
  double omega = 1.0;
  double alpha = 0.0;
  int cutoff = 0;  // force truncation of g'; 0 -> drive cutoff
};

struct IntegratorConfig {
  int steps_per_period = 1024;

  void validate() const {
    if (steps_per_period < 50)
      throw std::invalid_argument(
          "IntegratorConfig: need >= 50 steps per period (dt*omega <= 2pi/50)");
  }
};

inline double wrap_angle(double th) {
  double w = std::remainder(th, 2.0 * pi);
  if (w >= pi) w -= 2.0 * pi;
  return w;
}

// d g/d theta of the truncated sawtooth: -(2/pi) sum_{n=1}^{N} (-1)^n cos(n theta)
inline double sawtooth_derivative(double theta, int cutoff) {
  double s = 0.0;
  double sign = -1.0;
  for (int n = 1; n <= cutoff; ++n) {
    s += sign * std::cos(n * theta);
    sign = -sign;
  }
  return -(2.0 / pi) * s;
}

// -dV/dtheta = -V g'(theta) f(t) + lambda s sin(s theta) cos(s omega t)
inline double force(double theta, double t, const ClassicalParams& par) {
  const int cut = par.cutoff > 0 ? par.cutoff : par.drive.cutoff();
  if (cut > par.drive.cutoff())
    throw std::invalid_argument("force: cutoff exceeds the drive cutoff");
  double F = 0.0;
  if (par.V != 0.0)
    F -= par.V * sawtooth_derivative(theta, cut) *
         par.drive.evaluate(par.omega * t);
  if (par.lambda != 0.0)
    F += par.lambda * par.s * std::sin(par.s * theta) *
         std::cos(par.s * par.omega * t);
  return F;
}

// One KDK step from time t0; the drive is evaluated at t0 + dt/2.
inline void step_kdk(double& theta, double& p, double t0, double dt,
                     const ClassicalParams& par) {
  const double tmid = t0 + 0.5 * dt;
  p += 0.5 * dt * force(theta, tmid, par);
  theta += dt * (p - par.alpha);  // dtheta/dt = p - alpha
  p += 0.5 * dt * force(theta, tmid, par);
}

// Integrates whole drive periods; returns the state at t_n = n * 2pi/omega
// for n = 0..n_periods (times computed from integer counts, so stroboscopic
// instants are exact).
inline std::vector<ClassicalState> integrate_periods(
    const ClassicalState& initial, const ClassicalParams& par,
    const IntegratorConfig& cfg, int n_periods) {
  cfg.validate();
  const double T = 2.0 * pi / par.omega;
  const double dt = T / cfg.steps_per_period;
  std::vector<ClassicalState> out;
  out.reserve(static_cast<std::size_t>(n_periods) + 1);
  double theta = initial.theta;
  double p = initial.p;
  out.push_back({wrap_angle(theta), p, initial.t});
  for (int n = 0; n < n_periods; ++n) {
    for (int j = 0; j < cfg.steps_per_period; ++j) {
      const double t0 =
          initial.t + (static_cast<double>(n) +
                       static_cast<double>(j) / cfg.steps_per_period) *
                          T;
      step_kdk(theta, p, t0, dt, par);
    }
    out.push_back({wrap_angle(theta), p,
                   initial.t + static_cast<double>(n + 1) * T});
  }
  return out;
}

// Fixed-step integration for convergence studies; returns the final state.
inline ClassicalState integrate_steps(const ClassicalState& initial,
                                      const ClassicalParams& par, double dt,
                                      long nsteps) {
  double theta = initial.theta;
  double p = initial.p;
  for (long i = 0; i < nsteps; ++i) {
    const double t0 = initial.t + static_cast<double>(i) * dt;
    step_kdk(theta, p, t0, dt, par);
  }
  return {wrap_angle(theta), p, initial.t + static_cast<double>(nsteps) * dt};
}

struct PoincarePoint {
  double Theta = 0.0;  // theta - omega t, wrapped
  double P = 0.0;      // p - alpha - omega
};

struct PoincareSection {
  std::vector<PoincarePoint> points;
  double omega = 0.0;
  double alpha = 0.0;
};

// Rotating-frame section from a trajectory sampled at integer periods.
inline PoincareSection poincare(const std::vector<ClassicalState>& traj,
                                double omega, double alpha) {
  PoincareSection sec;
  sec.omega = omega;
  sec.alpha = alpha;
  sec.points.reserve(traj.size());
  const double T = 2.0 * pi / omega;
  for (const auto& st : traj) {
    const double phase = st.t / T;
    if (std::abs(phase - std::round(phase)) > 1e-9)
      throw std::invalid_argument(
          "poincare: trajectory not sampled at integer periods");
    sec.points.push_back(
        {wrap_angle(st.theta - omega * st.t), st.p - alpha - omega});
  }
  return sec;
}

// H_eff(Theta, P) = P^2/2 + V sum_k c_k e^{ik Theta} + omega^2/2
inline double heff_energy(double Theta, double P,
                          const EffectiveDisorderCoefficients& c, double V,
                          double omega) {
  return 0.5 * P * P + V * c.evaluate(Theta) + 0.5 * omega * omega;
}

}  // namespace timeloc

#endif
