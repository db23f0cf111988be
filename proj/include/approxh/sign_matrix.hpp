#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace approxh {

// Dense matrix with entries in {-1,+1}. Construction validates; everything
// downstream may assume well-formed entries.
class SignMatrix {
public:
  SignMatrix() = default;

  explicit SignMatrix(Eigen::MatrixXi m) : m_(std::move(m)) {
    if (m_.size() == 0) throw std::invalid_argument("SignMatrix: empty");
    if (!((m_.array() == 1) || (m_.array() == -1)).all())
      throw std::invalid_argument("SignMatrix: entries must be +1 or -1");
  }

  long rows() const { return m_.rows(); }
  long cols() const { return m_.cols(); }
  int operator()(long i, long j) const { return m_(i, j); }

  const Eigen::MatrixXi& ints() const { return m_; }
  Eigen::MatrixXd reals() const { return m_.cast<double>(); }

  bool operator==(const SignMatrix& o) const { return m_ == o.m_; }

private:
  Eigen::MatrixXi m_;
};

}  // namespace approxh
