#ifndef TIMELOC_LINE_IO_HPP
#define TIMELOC_LINE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "timeloc/csv.hpp"
#include "timeloc/disorder.hpp"

// Line-potential file: a short text header followed by raw little-endian
// float64 samples.
//
//   LINEPOT 1
//   h=... L=... V=... k0=... seed=... realization=... n=...
//   data
//   <n * 8 bytes>

namespace timeloc {

inline void write_line_potential(const std::filesystem::path& path,
                                 const LinePotential& pot) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_line_potential: cannot open " + path.string());
  out << "LINEPOT 1\n";
  out << "h=" << format_double(pot.h) << " L=" << format_double(pot.L)
      << " V=" << format_double(pot.V) << " k0=" << format_double(pot.k0)
      << " seed=" << pot.seed << " realization=" << pot.realization
      << " n=" << pot.samples.size() << "\n";
  out << "data\n";
  out.write(reinterpret_cast<const char*>(pot.samples.data()),
            static_cast<std::streamsize>(pot.samples.size() * sizeof(double)));
}

inline LinePotential read_line_potential(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("read_line_potential: cannot open " + path.string());
  std::string magic, fields, marker;
  std::getline(in, magic);
  if (magic != "LINEPOT 1")
    throw std::runtime_error("read_line_potential: bad magic in " + path.string());
  std::getline(in, fields);
  std::getline(in, marker);
  if (marker != "data")
    throw std::runtime_error("read_line_potential: missing data marker");

  LinePotential pot;
  std::size_t n = 0;
  std::istringstream fs(fields);
  std::string tok;
  while (fs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "h") pot.h = std::stod(val);
    else if (key == "L") pot.L = std::stod(val);
    else if (key == "V") pot.V = std::stod(val);
    else if (key == "k0") pot.k0 = std::stod(val);
    else if (key == "seed") pot.seed = std::stoull(val);
    else if (key == "realization") pot.realization = std::stoull(val);
    else if (key == "n") n = std::stoull(val);
  }
  pot.samples.resize(n);
  in.read(reinterpret_cast<char*>(pot.samples.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("read_line_potential: truncated file");
  return pot;
}

}  // namespace timeloc

#endif
