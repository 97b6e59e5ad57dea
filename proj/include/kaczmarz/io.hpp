#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

// Shortest decimal form that round-trips a double exactly (17 significant
// digits).
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Matrix file: first line "m n", then m lines of n space-separated floats.
inline DenseMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line))
    throw BadMatrixFile(path.string(), 1, "missing header line");
  ++lineno;

  std::istringstream header(line);
  long long m = 0, n = 0;
  if (!(header >> m >> n) || m < 1 || n < 1)
    throw BadMatrixFile(path.string(), lineno,
                        "header must be two positive integers \"m n\"");

  DenseMatrix a(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  for (long long i = 0; i < m; ++i) {
    if (!std::getline(in, line))
      throw BadMatrixFile(path.string(), lineno + 1,
                          "unexpected end of file: expected " +
                              std::to_string(m) + " rows");
    ++lineno;
    std::istringstream row(line);
    for (long long j = 0; j < n; ++j) {
      double v = 0.0;
      if (!(row >> v))
        throw BadMatrixFile(path.string(), lineno,
                            "expected " + std::to_string(n) +
                                " numbers on row " + std::to_string(i));
      if (!std::isfinite(v))
        throw BadMatrixFile(path.string(), lineno, "non-finite entry");
      a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
    }
    double extra;
    if (row >> extra)
      throw BadMatrixFile(path.string(), lineno, "trailing data on row");
  }
  return a;
}

// RHS file: one float per line.
inline Vector read_rhs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  Vector b;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    double v = 0.0;
    if (!(row >> v))
      throw BadMatrixFile(path.string(), lineno, "expected one number");
    if (!std::isfinite(v))
      throw BadMatrixFile(path.string(), lineno, "non-finite entry");
    b.push_back(v);
  }
  return b;
}

inline void write_matrix(const std::filesystem::path& path,
                         const DenseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed on " + path.string());
}

inline void write_rhs(const std::filesystem::path& path,
                      std::span<const double> b) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (double v : b) out << format_double(v) << '\n';
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace kaczmarz
