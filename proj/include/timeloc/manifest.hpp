#ifndef TIMELOC_MANIFEST_HPP
#define TIMELOC_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "timeloc/config.hpp"
#include "timeloc/version.hpp"

// Run manifest: the resolved configuration, code version, wall time, and a
// checksum per output file. Written atomically (temp file + rename) so a
// manifest on disk always describes a completed run.

namespace timeloc {

inline std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("fnv1a64_file: cannot open " + path.string());
  std::uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

struct RunManifest {
  std::string experiment;
  Config config;
  double wall_time_s = 0.0;
  std::map<std::string, std::string> checksums;  // file -> hex fnv1a64
  std::map<std::string, double> summary;         // headline numbers

  // Registers an output file; checksums are computed at write() time, after
  // every stream has been closed.
  void add_file(const std::filesystem::path&, const std::string& name) {
    checksums[name] = "";
  }

  void write(const std::filesystem::path& dir) {
    for (auto& [name, sum] : checksums) {
      std::ostringstream hex;
      hex << std::hex << fnv1a64_file(dir / name);
      sum = hex.str();
    }
    nlohmann::json j;
    j["experiment"] = experiment;
    j["version"] = TIMELOC_VERSION_STRING;
    j["wall_time_s"] = wall_time_s;
    j["config"] = config.values();
    j["checksums"] = checksums;
    j["summary"] = summary;
    const auto tmp = dir / "manifest.json.tmp";
    const auto final_path = dir / "manifest.json";
    {
      std::ofstream out(tmp);
      if (!out) throw std::runtime_error("RunManifest: cannot open " +
                                         tmp.string());
      out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, final_path);
  }

  static RunManifest read(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw std::runtime_error("RunManifest: cannot open manifest in " +
                                      dir.string());
    nlohmann::json j;
    in >> j;
    RunManifest m;
    m.experiment = j.value("experiment", "");
    m.wall_time_s = j.value("wall_time_s", 0.0);
    for (const auto& [k, v] : j.at("config").items())
      m.config.set(k, v.get<std::string>());
    for (const auto& [k, v] : j.at("checksums").items())
      m.checksums[k] = v.get<std::string>();
    if (j.contains("summary"))
      for (const auto& [k, v] : j.at("summary").items())
        m.summary[k] = v.get<double>();
    return m;
  }
};

}  // namespace timeloc

#endif
