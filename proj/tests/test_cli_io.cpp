#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "timeloc/config.hpp"
#include "timeloc/csv.hpp"
#include "timeloc/experiments.hpp"
#include "timeloc/line_io.hpp"
#include "timeloc/manifest.hpp"

using namespace timeloc;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("timeloc_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing, sections, overrides, echo", "[cli]") {
  const auto cfg = Config::from_string(
      "# comment\n"
      "[experiment]\n"
      "name = levels\n"
      "seed = 42\n"
      "[physics]\n"
      "V = 12.5\n"
      "k0 = 10   # trailing comment\n"
      "[numerics]\n"
      "V_list = 0, 5, 10\n");
  CHECK(cfg.get("experiment.name", std::string()) == "levels");
  CHECK(cfg.get("experiment.seed", std::uint64_t{0}) == 42);
  CHECK(cfg.get("physics.V", 0.0) == 12.5);
  CHECK(cfg.get("physics.k0", 0.0) == 10.0);
  const auto list = cfg.get_list("numerics.V_list", {});
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 5.0);
  CHECK(cfg.get("physics.absent", 7.0) == 7.0);

  // render -> parse roundtrip
  const auto cfg2 = Config::from_string(cfg.render());
  CHECK(cfg2.values() == cfg.values());

  CHECK_THROWS_AS(Config::from_string("key_without_value\n"), std::runtime_error);
}

TEST_CASE("line potential file roundtrip", "[cli]") {
  const auto dir = temp_dir("linepot");
  const auto pot = synthesize_line_potential(20.0, 3.0, 10.0, 0.005, 77, 2);
  write_line_potential(dir / "pot.bin", pot);
  const auto back = read_line_potential(dir / "pot.bin");
  CHECK(back.h == pot.h);
  CHECK(back.L == pot.L);
  CHECK(back.V == pot.V);
  CHECK(back.k0 == pot.k0);
  CHECK(back.seed == pot.seed);
  CHECK(back.realization == pot.realization);
  REQUIRE(back.samples.size() == pot.samples.size());
  for (std::size_t i = 0; i < pot.samples.size(); i += 97)
    CHECK(back.samples[i] == pot.samples[i]);
}

TEST_CASE("unknown experiment fails loudly", "[cli]") {
  Config cfg;
  cfg.set("experiment.name", "no-such-thing");
  cfg.set("experiment.outdir", (temp_dir("unknown") / "x").string());
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("manifest checksums cover the outputs", "[cli]") {
  const auto dir = temp_dir("manifest");
  Config cfg;
  cfg.set("experiment.name", "custom");
  cfg.set("experiment.outdir", dir.string());
  cfg.set("experiment.seed", "9");
  cfg.set("physics.k0", "10");
  const auto res = run_experiment(cfg);
  CHECK_FALSE(fs::exists(dir / "manifest.json.tmp"));
  const auto man = RunManifest::read(dir);
  CHECK(man.experiment == "custom");
  REQUIRE(man.checksums.count("ring_potential.csv") == 1);
  for (const auto& [name, sum] : man.checksums) {
    std::ostringstream hex;
    hex << std::hex << fnv1a64_file(dir / name);
    CHECK(hex.str() == sum);
  }
  CHECK(fs::exists(dir / "resolved.cfg"));
}

TEST_CASE("identical runs are byte-identical for any worker count",
          "[cli][determinism]") {
  auto run_with = [&](const std::string& tag, int threads) {
    const auto dir = temp_dir("det_" + tag);
    Config cfg;
    cfg.set("experiment.name", "born-vs-tm");
    cfg.set("experiment.outdir", dir.string());
    cfg.set("experiment.seed", "3");
    cfg.set("experiment.threads", std::to_string(threads));
    cfg.set("physics.k0", "100");
    cfg.set("physics.V", "400");
    cfg.set("numerics.E_list", "80,120");
    cfg.set("numerics.realizations", "6");
    cfg.set("numerics.L", "8");
    run_experiment(cfg);
    return slurp(dir / "loclength.csv");
  };
  const auto a = run_with("a", 1);
  const auto b = run_with("b", 8);
  CHECK(a == b);
  CHECK_FALSE(a.empty());

  auto fig2_with = [&](const std::string& tag, int threads) {
    const auto dir = temp_dir("detf_" + tag);
    Config cfg;
    cfg.set("experiment.name", "fig2");
    cfg.set("experiment.outdir", dir.string());
    cfg.set("experiment.seed", "5");
    cfg.set("experiment.threads", std::to_string(threads));
    cfg.set("numerics.realizations", "8");
    run_experiment(cfg);
    return slurp(dir / "chains.csv");
  };
  const auto fa = fig2_with("a", 1);
  const auto fb = fig2_with("b", 8);
  CHECK(fa == fb);
}

TEST_CASE("fig2 manifest reports the lattice constants", "[cli]") {
  const auto dir = temp_dir("fig2");
  Config cfg;
  cfg.set("experiment.name", "fig2");
  cfg.set("experiment.outdir", dir.string());
  cfg.set("experiment.seed", "1");
  cfg.set("numerics.realizations", "4");
  const auto res = run_experiment(cfg);
  CHECK(res.manifest.summary.at("J") == Approx(7.57).margin(0.01));
  CHECK(res.manifest.summary.at("xi_formula") == Approx(0.144).margin(0.001));
}

TEST_CASE("born-vs-tm table contains the reference Born value", "[cli]") {
  const auto dir = temp_dir("bvt");
  Config cfg;
  cfg.set("experiment.name", "born-vs-tm");
  cfg.set("experiment.outdir", dir.string());
  cfg.set("experiment.seed", "2");
  cfg.set("numerics.realizations", "4");
  cfg.set("numerics.L", "40");
  const auto res = run_experiment(cfg);
  CHECK(res.manifest.summary.at("xi_born") == Approx(0.30).margin(0.005));
  const auto text = slurp(dir / "loclength.csv");
  CHECK(text.find("8000,0.300739") != std::string::npos);
}

TEST_CASE("sweep: empty values, ordering, partial failure", "[cli]") {
  // empty sweep succeeds with an empty table
  {
    const auto dir = temp_dir("sweep_empty");
    Config cfg;
    cfg.set("experiment.name", "fig2");
    cfg.set("experiment.outdir", dir.string());
    const auto res = sweep(cfg, "physics.V", {});
    CHECK(res.failures.empty());
    CHECK(fs::exists(dir / "sweep.csv"));
  }
  // one bad point (V = -5 violates lattice_xi's precondition) is reported,
  // the good points survive, rows come out ordered by the axis
  {
    const auto dir = temp_dir("sweep_fail");
    Config cfg;
    cfg.set("experiment.name", "fig2");
    cfg.set("experiment.outdir", dir.string());
    cfg.set("experiment.seed", "1");
    cfg.set("experiment.threads", "2");
    cfg.set("numerics.realizations", "2");
    const auto res = sweep(cfg, "physics.V", {8.0, -5.0, 12.0});
    REQUIRE(res.failures.size() == 1);
    CHECK(res.failures[0].find("-5") != std::string::npos);
    CHECK(fs::exists(dir / "failures.txt"));
    const auto text = slurp(dir / "sweep.csv");
    const auto p8 = text.find("\n8,");
    const auto p12 = text.find("\n12,");
    CHECK(p8 != std::string::npos);
    CHECK(p12 != std::string::npos);
    CHECK(p8 < p12);
  }
}

TEST_CASE("float formatting is reproducible", "[cli]") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(8000.0) == "8000");
  CHECK(format_double(-1.5e-7) == "-1.4999999999999999e-07");
}
