#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "approxh/frames.hpp"
#include "approxh/sign_matrix.hpp"

namespace approxh {

// Sign-text format: one row per line, '+' and '-' characters, no separators.
inline void write_sign_text(std::ostream& os, const SignMatrix& m) {
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) os.put(m(i, j) > 0 ? '+' : '-');
    os.put('\n');
  }
}

inline std::string sign_text(const SignMatrix& m) {
  std::ostringstream os;
  write_sign_text(os, m);
  return os.str();
}

inline SignMatrix read_sign_text(std::istream& is) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw std::invalid_argument("read_sign_text: no rows");
  const long cols = static_cast<long>(lines[0].size());
  Eigen::MatrixXi m(static_cast<long>(lines.size()), cols);
  for (long i = 0; i < m.rows(); ++i) {
    if (static_cast<long>(lines[static_cast<std::size_t>(i)].size()) != cols)
      throw std::invalid_argument("read_sign_text: ragged rows");
    for (long j = 0; j < cols; ++j) {
      const char c = lines[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (c == '+')
        m(i, j) = 1;
      else if (c == '-')
        m(i, j) = -1;
      else
        throw std::invalid_argument(std::string("read_sign_text: bad character '") + c + "'");
    }
  }
  return SignMatrix(std::move(m));
}

// Numeric matrix from comma-separated rows.
inline Eigen::MatrixXd read_numeric_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("read_numeric_csv: bad cell '" + cell + "'");
      }
    }
    if (row.empty()) throw std::invalid_argument("read_numeric_csv: empty row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("read_numeric_csv: no rows");
  const std::size_t cols = rows[0].size();
  Eigen::MatrixXd m(static_cast<long>(rows.size()), static_cast<long>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("read_numeric_csv: ragged rows");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
  }
  return m;
}

// Shortest decimal that round-trips; infinities serialize as "inf".
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kSweepCsvHeader =
    "n,N,distribution,seed,strategy,best_kappa,bases_found,kappa_threshold,wall_time_ms";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.n << ',' << r.N << ',' << r.distribution << ',' << r.seed << ',' << r.strategy << ','
       << format_double(r.best_kappa) << ',' << r.bases_found << ','
       << format_double(r.kappa_threshold) << ',' << format_double(r.wall_time_ms) << '\n';
  }
}

}  // namespace approxh
