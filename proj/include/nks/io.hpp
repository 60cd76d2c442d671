#pragma once

// CSV output, grid/window parsing and spectrum CSV input.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nks/errors.hpp"
#include "nks/spectrum.hpp"

namespace nks::io {

/// 17 significant digits, scientific notation.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

/// Rows of already-formatted cells under a fixed header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw Error("CsvTable: row width does not match the header");
    rows_.push_back(std::move(cells));
  }
  void add_numeric_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_double(v));
    add_row(std::move(cells));
  }

  void write(std::ostream& os) const {
    auto line = [&os](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
  }

  std::string str() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string tok;
  std::stringstream ss(s);
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(what + ": cannot parse '" + s + "' as a number");
  }
}

inline int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(what + ": cannot parse '" + s + "' as an integer");
  }
}

/// "a:b:n" -> n equispaced points from a to b inclusive.
inline std::vector<double> parse_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw ValidationError("grid '" + spec + "' must have the form t0:t1:n");
  const double a = parse_double(parts[0], "grid"), b = parse_double(parts[1], "grid");
  const int n = parse_int(parts[2], "grid");
  if (n < 1) throw ValidationError("grid '" + spec + "' needs n >= 1");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  if (n > 1) out.back() = b;
  return out;
}

/// "a:b" -> integer window.
inline std::pair<int, int> parse_window(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 2) throw ValidationError("window '" + spec + "' must have the form a:b");
  const int a = parse_int(parts[0], "window"), b = parse_int(parts[1], "window");
  if (a > b) throw ValidationError("window '" + spec + "' is empty");
  return {a, b};
}

inline CsvTable spectrum_table(const Spectrum& s) {
  CsvTable t({"l", "mu", "N_ld"});
  for (int l = 0; l <= s.l_max(); ++l)
    t.add_row({std::to_string(l), format_double(s.mu[l]), format_double(s.multiplicities[l])});
  return t;
}

/// Reads a spectrum CSV with header l,mu,N_ld. The sphere dimension is
/// recovered from N_{1,d} = d + 1.
inline Spectrum read_spectrum_csv(std::istream& in, const std::string& origin = "spectrum") {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(origin + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "l,mu,N_ld") throw ValidationError(origin + ": expected header 'l,mu,N_ld', got '" + line + "'");
  Spectrum s;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 3) throw ValidationError(origin + ": malformed row '" + line + "'");
    const int l = parse_int(cells[0], origin);
    if (l != static_cast<int>(s.mu.size())) throw ValidationError(origin + ": degrees must be 0, 1, 2, ... in order");
    s.mu.push_back(parse_double(cells[1], origin));
    s.multiplicities.push_back(parse_double(cells[2], origin));
  }
  if (s.mu.size() < 2) throw ValidationError(origin + ": need at least degrees 0 and 1");
  s.d = static_cast<int>(std::lround(s.multiplicities[1])) - 1;
  if (s.d < 1) throw ValidationError(origin + ": N_1 must be d + 1 with d >= 1");
  for (int l = 0; l <= s.l_max(); ++l)
    if (std::fabs(s.multiplicities[l] - multiplicity(l, s.d)) > 1e-6 * multiplicity(l, s.d))
      throw ValidationError(origin + ": N_ld column is inconsistent with d = " + std::to_string(s.d));
  return s;
}

inline Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spectrum file '" + path + "'");
  return read_spectrum_csv(in, path);
}

}  // namespace nks::io
