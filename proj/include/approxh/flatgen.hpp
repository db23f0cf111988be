#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "approxh/config.hpp"
#include "approxh/errors.hpp"
#include "approxh/numtheory.hpp"
#include "approxh/rng.hpp"
#include "approxh/sign_matrix.hpp"
#include "approxh/spectral.hpp"

namespace approxh {

// Quadratic-character vector over Z_q: 0 at the origin, +/-1 elsewhere.
inline Eigen::VectorXi legendre_vector(long q) {
  detail::require_odd_prime(q, "legendre_vector");
  Eigen::VectorXi v = Eigen::VectorXi::Constant(q, -1);
  v(0) = 0;
  for (long j = 1; j < q; ++j) v(static_cast<std::int64_t>(j) * j % q) = 1;
  return v;
}

// |v^(j)| for v^(j) = sum_k v(k) e^{2 pi i j k / q}, by the direct sum with a
// precomputed root table. Quadratic in q, which is the intended contract;
// exactness of the table indexing (j*k mod q) keeps the error at machine
// scale even for the largest desk-size q.
inline Eigen::VectorXd dft_magnitudes(const Eigen::VectorXd& v) {
  const long q = v.size();
  if (q == 0) throw std::invalid_argument("dft_magnitudes: empty vector");
  std::vector<std::complex<double>> root(static_cast<std::size_t>(q));
  for (long t = 0; t < q; ++t)
    root[static_cast<std::size_t>(t)] =
        std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(q));
  Eigen::VectorXd mags(q);
  for (long j = 0; j < q; ++j) {
    std::complex<double> acc{0.0, 0.0};
    long idx = 0;
    for (long k = 0; k < q; ++k) {
      acc += v(k) * root[static_cast<std::size_t>(idx)];
      idx += j;
      if (idx >= q) idx -= q;
    }
    mags(j) = std::abs(acc);
  }
  return mags;
}

inline Eigen::VectorXd dft_magnitudes(const Eigen::VectorXi& v) {
  return dft_magnitudes(Eigen::VectorXd(v.cast<double>()));
}

// Relative flatness slack for prime q.
inline double flatness_delta(long q, double c_flat) {
  return c_flat * std::pow(static_cast<double>(q), -0.25) *
         std::sqrt(std::log(static_cast<double>(q)));
}

struct FlatVector {
  long q = 0;
  Eigen::VectorXi entries;      // all +/-1
  Eigen::VectorXd fourier_mags;
  double delta_target = 0.0;    // acceptance threshold actually enforced
  double delta_observed = 0.0;  // max_j | |u^(j)|/sqrt(q) - 1 |
  int attempts = 0;
};

// Randomized flattening of the character vector: the origin and the
// non-residues are pinned to -1, each residue is flipped to -1 with
// probability q^{-1/2}. A draw is accepted when every Fourier magnitude is
// within sqrt(q) * delta of sqrt(q). The nominal slack c * q^(-1/4) sqrt(log q)
// is capped below 1 so acceptance always implies an invertible circulant.
inline FlatVector sample_flat_vector(long q, Rng& rng, double c_flat = kCFlat,
                                     int max_retries = 50, double delta_cap = kDeltaCap) {
  detail::require_odd_prime(q, "sample_flat_vector");
  if (max_retries < 1) throw std::invalid_argument("sample_flat_vector: max_retries must be >= 1");
  const double sq = std::sqrt(static_cast<double>(q));
  const double delta = std::min(flatness_delta(q, c_flat), delta_cap);
  const Eigen::VectorXi chi = legendre_vector(q);
  const double flip_p = 1.0 / sq;

  FlatVector best;
  best.q = q;
  best.delta_target = delta;
  for (int attempt = 1; attempt <= max_retries; ++attempt) {
    Eigen::VectorXi u(q);
    u(0) = -1;
    for (long k = 1; k < q; ++k)
      u(k) = chi(k) == 1 ? (rng.bernoulli(flip_p) ? -1 : 1) : -1;
    const Eigen::VectorXd mags = dft_magnitudes(u);
    const double dev = (mags.array() / sq - 1.0).abs().maxCoeff();
    if (attempt == 1 || dev < best.delta_observed) {
      best.entries = u;
      best.fourier_mags = mags;
      best.delta_observed = dev;
    }
    if (dev <= delta) {
      best.entries = u;
      best.fourier_mags = mags;
      best.delta_observed = dev;
      best.attempts = attempt;
      return best;
    }
  }
  throw flatness_error("sample_flat_vector: no accepted draw for q=" + std::to_string(q) +
                       " within " + std::to_string(max_retries) + " attempts (best deviation " +
                       std::to_string(best.delta_observed) + ", target " + std::to_string(delta) +
                       ")");
}

// Circulant with row i the generator cyclically shifted i places right.
inline SignMatrix circulant_matrix(const Eigen::VectorXi& u) {
  const long q = u.size();
  if (q == 0) throw std::invalid_argument("circulant_matrix: empty generator");
  Eigen::MatrixXi m(q, q);
  for (long i = 0; i < q; ++i)
    for (long j = 0; j < q; ++j) m(i, j) = u((j - i + q) % q);
  return SignMatrix(std::move(m));  // validates +/-1 entries
}

struct CirculantCertificate {
  long q = 0;
  double gram_deviation = 0.0;  // ||U U^T - q I||
  double bound = 0.0;           // 3 delta_q q
};

// Independent Gram certificate: forms U U^T exactly in integers and takes the
// extreme eigenvalues of the deviation with a dense symmetric solver. Throws
// when the deviation exceeds 3 delta_q q.
inline CirculantCertificate certify_gram(const SignMatrix& u_mat, double delta_q) {
  if (u_mat.rows() != u_mat.cols())
    throw std::invalid_argument("certify_gram: square input required");
  const long q = u_mat.rows();
  const Eigen::MatrixXi gram = u_mat.ints() * u_mat.ints().transpose();
  const Eigen::MatrixXd dev =
      gram.cast<double>() - static_cast<double>(q) * Eigen::MatrixXd::Identity(q, q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dev, Eigen::EigenvaluesOnly);
  const double norm =
      std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(q - 1)));
  CirculantCertificate cert{q, norm, 3.0 * delta_q * static_cast<double>(q)};
  if (cert.gram_deviation > cert.bound)
    throw certification_error("certify_gram: ||U U^T - q I|| = " + std::to_string(norm) +
                              " exceeds " + std::to_string(cert.bound) + " for q=" +
                              std::to_string(q));
  return cert;
}

}  // namespace approxh
