#ifndef TIMELOC_CONFIG_HPP
#define TIMELOC_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Flat key-value run configuration with [section] headers:
//
//   [experiment]
//   name = born-vs-tm
//   seed = 1
//   [physics]
//   k0 = 1000
//
// Keys are addressed as "section.key". No nesting, no quoting.

namespace timeloc {

class Config {
 public:
  Config() = default;

  static Config from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("Config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
  }

  static Config from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::runtime_error("Config: bad section at line " +
                                   std::to_string(lineno));
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("Config: expected key = value at line " +
                                 std::to_string(lineno));
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      cfg.set(section.empty() ? key : section + "." + key, val);
    }
    return cfg;
  }

  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  double get(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stod(it->second);
  }
  long get(const std::string& key, long fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stol(it->second);
  }
  std::uint64_t get(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stoull(it->second);
  }

  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::string tok;
    std::istringstream ss(it->second);
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  // Echo of the resolved configuration, grouped back into sections,
  // deterministic ordering.
  std::string render() const {
    std::map<std::string, std::map<std::string, std::string>> sections;
    for (const auto& [k, v] : values_) {
      const auto dot = k.find('.');
      if (dot == std::string::npos)
        sections[""][k] = v;
      else
        sections[k.substr(0, dot)][k.substr(dot + 1)] = v;
    }
    std::string out;
    for (const auto& [sec, kv] : sections) {
      if (!sec.empty()) out += "[" + sec + "]\n";
      for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace timeloc

#endif
