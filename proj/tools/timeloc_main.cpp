// Batch front end: named experiment pipelines, deterministic seeding,
// parallel sweeps, CSV emission. Data only; plotting happens elsewhere.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "timeloc/experiments.hpp"
#include "timeloc/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string outdir;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key=value config file");
  cmd->add_option("--out", args.outdir, "output directory");
  cmd->add_option("--seed", args.seed, "base seed")->each([&](const std::string&) {
    args.seed_given = true;
  });
  cmd->add_option("--threads", args.threads, "worker threads");
  cmd->add_option("--set", args.sets,
                  "override a config key, e.g. --set physics.V=20");
}

std::string default_root() {
  const char* env = std::getenv("TIMELOC_OUT_ROOT");
  return env ? env : ".";
}

timeloc::Config resolve(const CommonArgs& args, const std::string& experiment,
                        const std::string& default_dir) {
  timeloc::Config cfg;
  if (!args.config_path.empty())
    cfg = timeloc::Config::from_file(args.config_path);
  cfg.set("experiment.name", experiment);
  if (!cfg.has("experiment.outdir"))
    cfg.set("experiment.outdir",
            (std::filesystem::path(default_root()) / default_dir).string());
  if (!args.outdir.empty()) cfg.set("experiment.outdir", args.outdir);
  if (args.seed_given) cfg.set("experiment.seed", std::to_string(args.seed));
  if (args.threads > 0)
    cfg.set("experiment.threads", std::to_string(args.threads));
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int run(const timeloc::Config& cfg) {
  const auto res = timeloc::run_experiment(cfg);
  std::cout << "wrote " << res.outdir.string() << "\n";
  for (const auto& [k, v] : res.manifest.summary)
    std::cout << "  " << k << " = " << timeloc::format_double(v) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"temporal-disorder localization toolkit"};
  app.set_version_flag("--version", TIMELOC_VERSION_STRING);
  app.require_subcommand(1);

  CommonArgs args;
  std::string floquet_mode = "levels";
  std::string sweep_axis, sweep_experiment = "fig2", sweep_values;
  std::string report_dir;

  auto* gen = app.add_subcommand("gen-disorder",
                                 "synthesize drive/disorder and dump them");
  add_common(gen, args);
  auto* eff = app.add_subcommand("eff-spectrum",
                                 "effective-model spectrum, fits, lab series");
  add_common(eff, args);
  auto* loc = app.add_subcommand("loclength",
                                 "Born closed form vs transfer matrix");
  add_common(loc, args);
  auto* lat = app.add_subcommand("lattice",
                                 "driven-lattice chains and localization");
  add_common(lat, args);
  auto* cls = app.add_subcommand("classical",
                                 "stroboscopic sections and portrait");
  add_common(cls, args);
  auto* flo = app.add_subcommand("floquet",
                                 "quasienergies vs effective levels");
  add_common(flo, args);
  flo->add_option("--mode", floquet_mode, "levels | compare");
  auto* swp = app.add_subcommand("sweep", "run an experiment across one axis");
  add_common(swp, args);
  swp->add_option("--experiment", sweep_experiment, "experiment to sweep");
  swp->add_option("--axis", sweep_axis, "config key to vary")->required();
  swp->add_option("--values", sweep_values, "comma-separated values")
      ->required();
  auto* rep = app.add_subcommand("report", "verify and summarize a run");
  rep->add_option("dir", report_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run(resolve(args, "custom", "gen_disorder"));
    if (eff->parsed()) return run(resolve(args, "fig1", "eff_spectrum"));
    if (loc->parsed()) return run(resolve(args, "born-vs-tm", "loclength"));
    if (lat->parsed()) return run(resolve(args, "fig2", "lattice"));
    if (cls->parsed()) return run(resolve(args, "sos", "classical"));
    if (flo->parsed())
      return run(resolve(args,
                         floquet_mode == "compare" ? "eigenstate-compare"
                                                   : "levels",
                         "floquet"));
    if (swp->parsed()) {
      timeloc::Config cfg = resolve(args, sweep_experiment, "sweep");
      std::vector<double> values;
      std::string tok;
      std::istringstream ss(sweep_values);
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) values.push_back(std::stod(tok));
      const auto res = timeloc::sweep(cfg, sweep_axis, values);
      std::cout << "wrote " << cfg.get("experiment.outdir", std::string())
                << " (" << values.size() - res.failures.size() << "/"
                << values.size() << " points)\n";
      for (const auto& f : res.failures)
        std::cerr << "failed point " << f << "\n";
      return !values.empty() && res.failures.size() == values.size() ? 1 : 0;
    }
    if (rep->parsed()) {
      const auto man = timeloc::RunManifest::read(report_dir);
      std::cout << "experiment: " << man.experiment << "\n";
      bool ok = true;
      for (const auto& [name, sum] : man.checksums) {
        std::ostringstream hex;
        hex << std::hex
            << timeloc::fnv1a64_file(std::filesystem::path(report_dir) / name);
        const bool match = hex.str() == sum;
        ok = ok && match;
        std::cout << "  " << name << ": " << (match ? "ok" : "CHECKSUM MISMATCH")
                  << "\n";
      }
      for (const auto& [k, v] : man.summary)
        std::cout << "  " << k << " = " << timeloc::format_double(v) << "\n";
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
