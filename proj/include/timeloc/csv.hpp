#ifndef TIMELOC_CSV_HPP
#define TIMELOC_CSV_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

// CSV emission with '#'-comment headers and reproducible float formatting
// (same bytes for the same numbers, independent of locale or worker count).

namespace timeloc {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path.string());
  }

  void comment(const std::string& line) { out_ << "# " << line << "\n"; }
  void header(const std::string& columns) { out_ << columns << "\n"; }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ",";
      out_ << format_double(values[i]);
    }
    out_ << "\n";
  }

  void row_raw(const std::string& line) { out_ << line << "\n"; }

 private:
  std::ofstream out_;
};

// Audit format for coefficient sets: "k re im" per line.
// `coeff` maps an integer harmonic to a complex value.
template <typename CoeffFn>
inline void write_coefficients(const std::filesystem::path& path, int cutoff,
                               CoeffFn&& coeff, const std::string& label) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_coefficients: cannot open " +
                                     path.string());
  out << "# " << label << " cutoff=" << cutoff << "\n";
  for (int k = -cutoff; k <= cutoff; ++k) {
    const auto v = coeff(k);
    out << k << " " << format_double(v.real()) << " "
        << format_double(v.imag()) << "\n";
  }
}

}  // namespace timeloc

#endif
