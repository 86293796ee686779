#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <vector>

#include "timeloc/disorder.hpp"

using namespace timeloc;
using Catch::Approx;

TEST_CASE("sawtooth coefficients", "[disorder]") {
  // g_1 = -i/pi, g_0 = 0, g_{-2} = conj(g_2) = -i/(2 pi)
  const cdouble g1 = sawtooth_coefficient(1);
  CHECK(g1.real() == 0.0);
  CHECK(g1.imag() == Approx(-1.0 / pi).epsilon(1e-14));

  CHECK(sawtooth_coefficient(0) == cdouble{0.0, 0.0});

  const cdouble gm2 = sawtooth_coefficient(-2);
  CHECK(gm2 == std::conj(sawtooth_coefficient(2)));
  CHECK(gm2.imag() == Approx(-1.0 / (2.0 * pi)).epsilon(1e-14));

  for (long n : {-7L, -3L, 1L, 4L, 9L})
    CHECK(sawtooth_coefficient(-n) == std::conj(sawtooth_coefficient(n)));
}

TEST_CASE("drive synthesis fixes |g_k f_k| to the envelope", "[disorder]") {
  DriveSpec spec;
  spec.k0 = 1000.0;
  spec.cutoff = 4000;
  spec.seed = 42;
  const DriveCoefficients f = synthesize_drive(spec);

  // oracle: envelope at k = 1 evaluates to 0.0237526...
  const double e1 = std::abs(sawtooth_coefficient(1) * f.f(1));
  CHECK(e1 == Approx(0.0237526).margin(2e-6));
  CHECK(e1 == Approx(drive_envelope(1.0, 1000.0)).epsilon(1e-14));

  for (int k : {1, 17, 500, 4000}) {
    CHECK(std::abs(f.f(k)) ==
          Approx(drive_envelope(k, spec.k0) * pi * k).epsilon(1e-13));
    CHECK(f.f(-k) == std::conj(f.f(k)));
  }
  CHECK(f.f(0) == cdouble{0.0, 0.0});
}

TEST_CASE("f(t) is real on a time grid and deterministic", "[disorder]") {
  DriveSpec spec;
  spec.k0 = 10.0;
  spec.seed = 7;
  const DriveCoefficients f = synthesize_drive(spec);
  const DriveCoefficients f2 = synthesize_drive(spec);
  REQUIRE(f.fpos.size() == f2.fpos.size());
  for (std::size_t i = 0; i < f.fpos.size(); ++i) CHECK(f.fpos[i] == f2.fpos[i]);

  // realness via the complex sum
  double rms = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double wt = 2.0 * pi * i / 64.0;
    cdouble s{0.0, 0.0};
    for (int k = -f.cutoff(); k <= f.cutoff(); ++k)
      s += f.f(k) * std::polar(1.0, k * wt);
    CHECK(std::abs(s.imag()) < 1e-12 * (1.0 + std::abs(s.real())));
    rms += s.real() * s.real();
    CHECK(f.evaluate(wt) == Approx(s.real()).margin(1e-9));
  }
  CHECK(rms > 0.0);
}

TEST_CASE("effective coefficients: magnitudes exact, conjugate symmetric",
          "[disorder]") {
  DriveSpec spec;
  spec.k0 = 25.0;
  spec.seed = 3;
  const DriveCoefficients f = synthesize_drive(spec);
  const EffectiveDisorderCoefficients c = effective_coefficients(f);

  CHECK(c.c(0) == cdouble{0.0, 0.0});
  for (int k = 1; k <= c.cutoff(); ++k) {
    CHECK(std::abs(c.c(k)) == Approx(drive_envelope(k, spec.k0)).epsilon(1e-13));
    CHECK(c.c(-k) == std::conj(c.c(k)));
  }
}

TEST_CASE("ring potential: V=0 and zero mean", "[disorder]") {
  DriveSpec spec;
  spec.k0 = 10.0;
  spec.seed = 11;
  const auto c = effective_coefficients(synthesize_drive(spec));

  const int M = 256;
  std::vector<double> grid(M);
  for (int i = 0; i < M; ++i) grid[i] = -pi + 2.0 * pi * i / M;

  const auto zero = potential_on_grid(c, 0.0, grid);
  for (double v : zero) CHECK(v == 0.0);

  const auto pot = potential_on_grid(c, 20.0, grid);
  double mean = 0.0;
  for (double v : pot) mean += v;
  mean /= M;
  double rms = 0.0;
  for (double v : pot) rms += v * v;
  rms = std::sqrt(rms / M);
  CHECK(std::abs(mean) < 1e-9 * rms);
}

TEST_CASE("ring potential ensemble variance approaches V^2", "[disorder][stats]") {
  const double k0 = 100.0, V = 3.0;
  const int R = 220, M = 64;
  std::vector<double> grid(M);
  for (int i = 0; i < M; ++i) grid[i] = -pi + 2.0 * pi * i / M;

  double acc = 0.0;
  long cnt = 0;
  for (int r = 0; r < R; ++r) {
    DriveSpec spec;
    spec.k0 = k0;
    spec.seed = 1234;
    spec.realization = static_cast<std::uint64_t>(r);
    const auto pot = potential_on_grid(
        effective_coefficients(synthesize_drive(spec)), V, grid);
    for (double v : pot) {
      acc += v * v;
      ++cnt;
    }
  }
  const double var = acc / static_cast<double>(cnt);
  // expectation: V^2 (1 - 1/(sqrt(pi) k0)) = 0.99436 V^2 for k0 = 100
  CHECK(var / (V * V) > 0.98);
  CHECK(var / (V * V) < 1.02);
}

TEST_CASE("line potential: V=0, rejects coarse grids", "[disorder]") {
  const auto zero = synthesize_line_potential(10.0, 0.0, 20.0, 0.01, 5);
  for (double v : zero.samples) CHECK(v == 0.0);
  CHECK(zero.h <= 0.01);

  CHECK_THROWS_AS(synthesize_line_potential(10.0, 1.0, 20.0, 0.1, 5),
                  std::invalid_argument);
}

TEST_CASE("line potential autocovariance", "[disorder][stats]") {
  const double k0 = 20.0, V = 2.5;
  const double zeta = correlation_length(k0);
  const double L = 200.0 * zeta;
  const int R = 120;

  double c0 = 0.0, czeta = 0.0;
  long cnt = 0;
  std::size_t lag = 0;
  for (int r = 0; r < R; ++r) {
    const auto pot =
        synthesize_line_potential(k0, V, L, zeta / 10.0, 99,
                                  static_cast<std::uint64_t>(r));
    if (r == 0) lag = static_cast<std::size_t>(std::lround(zeta / pot.h));
    const auto& s = pot.samples;
    for (std::size_t i = 0; i + lag < s.size(); ++i) {
      c0 += s[i] * s[i];
      czeta += s[i] * s[i + lag];
      ++cnt;
    }
  }
  c0 /= static_cast<double>(cnt);
  czeta /= static_cast<double>(cnt);
  CHECK(c0 / (V * V) == Approx(1.0).margin(0.02));
  // C(zeta)/V^2 -> e^{-1/2}; the lag grid rounds zeta to the nearest sample
  CHECK(czeta / (V * V) == Approx(std::exp(-0.5)).margin(0.03 * std::exp(-0.5) + 0.01));
}
