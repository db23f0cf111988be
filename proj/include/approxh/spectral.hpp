#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "approxh/sign_matrix.hpp"

namespace approxh {

// s_min below this multiple of s_max is reported as a numerical zero and the
// condition number as infinite.
inline constexpr double kSingularRelTol = 1e-12;

struct SpectralReport {
  long rows = 0;
  long cols = 0;
  double s_min = 0.0;
  double s_max = 0.0;
  double kappa = 0.0;          // infinity when s_min is a numerical zero
  double op_norm = 0.0;
  double hs_norm = 0.0;
  std::string method;
  double tol = 0.0;            // backward-error scale of the decomposition
};

namespace detail {
inline void require_finite(const Eigen::MatrixXd& a, const char* where) {
  if (a.size() == 0) throw std::invalid_argument(std::string(where) + ": empty matrix");
  if (!a.allFinite()) throw std::invalid_argument(std::string(where) + ": non-finite entries");
}

// Full singular spectrum; rows/cols orientation handled here.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& a) {
  if (a.rows() <= a.cols()) return Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues();
  return Eigen::BDCSVD<Eigen::MatrixXd>(Eigen::MatrixXd(a.transpose())).singularValues();
}
}  // namespace detail

inline std::pair<double, double> singular_extremes(const Eigen::MatrixXd& a) {
  detail::require_finite(a, "singular_extremes");
  const Eigen::VectorXd s = detail::singular_values(a);
  return {s(s.size() - 1), s(0)};
}

inline double operator_norm(const Eigen::MatrixXd& a) {
  detail::require_finite(a, "operator_norm");
  return detail::singular_values(a)(0);
}

inline double hs_norm(const Eigen::MatrixXd& a) {
  detail::require_finite(a, "hs_norm");
  return a.norm();
}

inline double condition_number(const Eigen::MatrixXd& a) {
  const auto [smin, smax] = singular_extremes(a);
  if (smax == 0.0 || smin <= kSingularRelTol * smax)
    return std::numeric_limits<double>::infinity();
  return smax / smin;
}

// One decomposition, every scalar the report needs.
inline SpectralReport analyze(const Eigen::MatrixXd& a) {
  detail::require_finite(a, "analyze");
  const Eigen::VectorXd s = detail::singular_values(a);
  SpectralReport r;
  r.rows = a.rows();
  r.cols = a.cols();
  r.s_max = s(0);
  r.s_min = s(s.size() - 1);
  r.op_norm = r.s_max;
  r.hs_norm = a.norm();
  r.method = "bdcsvd";
  r.tol = std::numeric_limits<double>::epsilon() *
          static_cast<double>(std::max(a.rows(), a.cols())) * r.s_max;
  r.kappa = (r.s_max == 0.0 || r.s_min <= kSingularRelTol * r.s_max)
                ? std::numeric_limits<double>::infinity()
                : r.s_max / r.s_min;
  return r;
}

inline SpectralReport analyze(const SignMatrix& m) { return analyze(m.reals()); }

// Upper bound on the smallest singular value of square M: project the first
// k columns onto the orthocomplement of the span of the remaining ones and
// take the shortest image. Rank loss in the trailing block only shrinks the
// projection, so the bound stays valid.
inline double s_min_upper_bound(const Eigen::MatrixXd& m, long k) {
  detail::require_finite(m, "s_min_upper_bound");
  const long n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("s_min_upper_bound: square input required");
  if (k < 1 || k >= n) throw std::invalid_argument("s_min_upper_bound: need 1 <= k < n");

  const Eigen::MatrixXd tail = m.rightCols(n - k);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(tail);
  const long rank = qr.rank();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);

  double best = std::numeric_limits<double>::infinity();
  for (long j = 0; j < k; ++j) {
    const Eigen::VectorXd col = m.col(j);
    const double len = (col - q * (q.transpose() * col)).norm();
    best = std::min(best, len);
  }
  return best;
}

}  // namespace approxh
