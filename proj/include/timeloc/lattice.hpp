#ifndef TIMELOC_LATTICE_HPP
#define TIMELOC_LATTICE_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "timeloc/disorder.hpp"
#include "timeloc/eigensolver.hpp"

// Reduction of the driven-lattice effective model to a tight-binding Anderson
// chain: deep-lattice hopping, on-site energies sampled from the synthesized
// disorder at the s lattice minima, and the weak-disorder localization length.

namespace timeloc {

enum class Band { lowest, first_excited };

// J = (2^5 lambda^3 s^2 / pi^2)^{1/4} exp(-sqrt(32 lambda)/s); the first
// excited band carries 32 times the lowest-band hopping.
inline double hopping(double lambda, int s, Band band = Band::lowest) {
  if (!(lambda > 0.0) || s < 1)
    throw std::invalid_argument("hopping: requires lambda > 0 and s >= 1");
  const double ss = static_cast<double>(s);
  const double J = std::pow(32.0 * lambda * lambda * lambda * ss * ss / (pi * pi),
                            0.25) *
                   std::exp(-std::sqrt(32.0 * lambda) / ss);
  return band == Band::first_excited ? 32.0 * J : J;
}

struct LatticeXi {
  double xi = 0.0;  // in Theta-radians
  bool weak_disorder = true;  // V < J, the stated validity regime
};

// xi = 8 pi J^2 / (s V^2), band-center value in the weak disorder limit.
inline LatticeXi lattice_xi(double J, int s, double V) {
  if (!(V > 0.0)) throw std::invalid_argument("lattice_xi: requires V > 0");
  LatticeXi r;
  r.xi = 8.0 * pi * J * J / (static_cast<double>(s) * V * V);
  r.weak_disorder = V < J;
  return r;
}

// site units <-> Theta-radians (lattice constant 2 pi / s)
inline double xi_sites_to_radians(double xi_sites, int s) {
  return xi_sites * 2.0 * pi / static_cast<double>(s);
}

struct LatticeSpec {
  int s = 100;
  double lambda = 2e4;
  double V = 10.0;
  double k0 = 100.0;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
  Band band = Band::lowest;
};

struct OnsiteEnergies {
  std::vector<double> values;        // epsilon_j at Theta_j = (2j+1) pi / s
  double neighbor_correlation = 0.0; // exp(-k0^2 (2 pi/s)^2 / 4)
  std::vector<std::string> warnings;
};

inline OnsiteEnergies onsite_energies(const LatticeSpec& spec) {
  if (spec.s < 1) throw std::invalid_argument("onsite_energies: s < 1");
  DriveSpec ds;
  ds.k0 = spec.k0;
  ds.seed = spec.seed;
  ds.realization = spec.realization;
  const auto c = effective_coefficients(synthesize_drive(ds));

  OnsiteEnergies out;
  out.values.resize(static_cast<std::size_t>(spec.s));
  for (int j = 0; j < spec.s; ++j) {
    const double theta = (2.0 * j + 1.0) * pi / static_cast<double>(spec.s);
    out.values[static_cast<std::size_t>(j)] = spec.V * c.evaluate(theta);
  }
  const double a = 2.0 * pi / static_cast<double>(spec.s);
  out.neighbor_correlation = std::exp(-spec.k0 * spec.k0 * a * a / 4.0);
  if (out.neighbor_correlation > 0.05)
    out.warnings.push_back(
        "onsite_energies: neighbor correlation " +
        std::to_string(out.neighbor_correlation) +
        " > 0.05, sites are not uncorrelated");
  return out;
}

struct TightBindingChain {
  double J = 0.0;
  std::vector<double> eps;  // s on-site energies, periodic ring
};

// Full spectrum of the periodic tridiagonal-plus-corner chain.
inline EighResultReal diagonalize_chain(const TightBindingChain& chain) {
  const int s = static_cast<int>(chain.eps.size());
  if (s < 3) throw std::invalid_argument("diagonalize_chain: need s >= 3");
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(s, s);
  for (int j = 0; j < s; ++j) {
    H(j, j) = chain.eps[static_cast<std::size_t>(j)];
    const int jn = (j + 1) % s;
    H(j, jn) = -chain.J;
    H(jn, j) = -chain.J;
  }
  return eigh(H);
}

}  // namespace timeloc

#endif
