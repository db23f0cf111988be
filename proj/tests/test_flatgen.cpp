#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "approxh/flatgen.hpp"
#include "approxh/numtheory.hpp"
#include "approxh/rng.hpp"
#include "approxh/spectral.hpp"

using namespace approxh;

namespace {

const std::vector<long> kSmallPrimes{3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43,
                                     47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101};

// Oracle: DFT magnitudes by direct complex accumulation, no root table.
Eigen::VectorXd naive_dft_mags(const Eigen::VectorXd& v) {
  const long q = v.size();
  Eigen::VectorXd mags(q);
  for (long j = 0; j < q; ++j) {
    std::complex<double> acc{0, 0};
    for (long k = 0; k < q; ++k)
      acc += v(k) * std::polar(1.0, 2.0 * std::numbers::pi * double(j) * double(k) / double(q));
    mags(j) = std::abs(acc);
  }
  return mags;
}

}  // namespace

TEST_CASE("character vector pins the origin and the residues") {
  const auto v7 = legendre_vector(7);
  const int want[7] = {0, 1, 1, -1, 1, -1, -1};
  for (long j = 0; j < 7; ++j) CHECK(v7(j) == want[j]);

  for (long q : kSmallPrimes) {
    const auto v = legendre_vector(q);
    CHECK(v(0) == 0);
    CHECK(v.sum() == 0);
    for (long k = 1; k < q; ++k) CHECK(v(k) == legendre_symbol(k, q));
  }
  CHECK_THROWS_AS(legendre_vector(9), std::invalid_argument);
}

TEST_CASE("character transform is flat at exactly sqrt(q)") {
  for (long q : kSmallPrimes) {
    const auto mags = dft_magnitudes(legendre_vector(q));
    const double sq = std::sqrt(static_cast<double>(q));
    CHECK(mags(0) == Catch::Approx(0.0).margin(1e-9 * sq));
    for (long j = 1; j < q; ++j) CHECK(mags(j) == Catch::Approx(sq).epsilon(1e-9));
  }
}

TEST_CASE("transform magnitudes match a naive evaluation and Parseval") {
  Rng rng(7001);
  for (long q : {4L, 12L, 31L, 64L, 101L}) {
    Eigen::VectorXd v(q);
    for (long k = 0; k < q; ++k) v(k) = rng.sign();
    const auto mags = dft_magnitudes(v);
    const auto want = naive_dft_mags(v);
    for (long j = 0; j < q; ++j) CHECK(mags(j) == Catch::Approx(want(j)).margin(1e-10 * q));
    CHECK(mags.squaredNorm() == Catch::Approx(q * v.squaredNorm()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(dft_magnitudes(Eigen::VectorXd()), std::invalid_argument);
}

TEST_CASE("flatness slack follows the q^(-1/4) sqrt(log q) law") {
  CHECK(flatness_delta(101, 1.9) ==
        Catch::Approx(1.9 * std::pow(101.0, -0.25) * std::sqrt(std::log(101.0))).epsilon(1e-15));
  CHECK(flatness_delta(16, 2.0) > flatness_delta(10000, 2.0));
}

TEST_CASE("sampled flat vectors satisfy their acceptance contract") {
  for (long q : kSmallPrimes) {
    Rng rng(derive_seed(42, {q}));
    const auto fv = sample_flat_vector(q, rng);
    CHECK(fv.q == q);
    CHECK(fv.entries.size() == q);
    CHECK(fv.entries(0) == -1);
    const auto chi = legendre_vector(q);
    for (long k = 1; k < q; ++k) {
      if (chi(k) == -1) CHECK(fv.entries(k) == -1);
      CHECK((fv.entries(k) == 1 || fv.entries(k) == -1));
    }
    CHECK(fv.attempts >= 1);
    CHECK(fv.attempts <= 50);
    CHECK(fv.delta_observed <= fv.delta_target);
    CHECK(fv.delta_target <= 0.95);
    const double sq = std::sqrt(static_cast<double>(q));
    const auto mags = dft_magnitudes(fv.entries);
    for (long j = 0; j < q; ++j) {
      CHECK(fv.fourier_mags(j) == Catch::Approx(mags(j)).margin(1e-12 * q));
      CHECK(std::abs(mags(j) - sq) <= sq * fv.delta_target + 1e-12);
    }
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  Rng a(99), b(99), c(100);
  const auto fa = sample_flat_vector(61, a);
  const auto fb = sample_flat_vector(61, b);
  const auto fc = sample_flat_vector(61, c);
  CHECK(fa.entries == fb.entries);
  CHECK(fa.attempts == fb.attempts);
  CHECK(fa.delta_observed == fb.delta_observed);
  CHECK(fa.entries != fc.entries);  // would collide with probability ~2^-30
}

TEST_CASE("an unreachable slack raises after the retry budget") {
  Rng rng(5);
  CHECK_THROWS_AS(sample_flat_vector(13, rng, 0.01, 8), flatness_error);
  CHECK_THROWS_AS(sample_flat_vector(13, rng, 1.9, 0), std::invalid_argument);
}

TEST_CASE("circulant layout shifts the generator right by the row index") {
  Eigen::VectorXi u(3);
  u << 1, -1, -1;
  const auto m = circulant_matrix(u);
  const int want[3][3] = {{1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  for (long i = 0; i < 3; ++i)
    for (long j = 0; j < 3; ++j) CHECK(m(i, j) == want[i][j]);
  CHECK_THROWS_AS(circulant_matrix(legendre_vector(5)), std::invalid_argument);  // has a zero
}

TEST_CASE("circulant singular values are the generator transform magnitudes") {
  for (long q : {13L, 41L, 101L}) {
    Rng rng(derive_seed(7, {q}));
    const auto fv = sample_flat_vector(q, rng);
    const auto m = circulant_matrix(fv.entries);
    auto svals = detail::singular_values(m.reals());
    std::vector<double> dft(fv.fourier_mags.data(), fv.fourier_mags.data() + q);
    std::sort(dft.begin(), dft.end(), std::greater<>());
    REQUIRE(svals.size() == q);
    for (long j = 0; j < q; ++j)
      CHECK(svals(j) == Catch::Approx(dft[static_cast<std::size_t>(j)]).epsilon(1e-9));
  }
}

TEST_CASE("gram certificate accepts flat circulants and reports the true norm") {
  for (long q : {13L, 29L, 61L}) {
    Rng rng(derive_seed(11, {q}));
    const auto fv = sample_flat_vector(q, rng);
    const auto m = circulant_matrix(fv.entries);
    const auto cert = certify_gram(m, fv.delta_target);
    CHECK(cert.q == q);
    CHECK(cert.bound == Catch::Approx(3.0 * fv.delta_target * q).epsilon(1e-15));
    CHECK(cert.gram_deviation <= cert.bound);
    // Independent norm route through the SVD.
    const Eigen::MatrixXd dev = (m.ints() * m.ints().transpose()).cast<double>() -
                                double(q) * Eigen::MatrixXd::Identity(q, q);
    CHECK(cert.gram_deviation == Catch::Approx(operator_norm(dev)).margin(1e-9 * q));
  }
}

TEST_CASE("gram certificate rejects a constant generator") {
  Eigen::VectorXi u = Eigen::VectorXi::Constant(5, -1);
  const auto m = circulant_matrix(u);  // rank one, ||U U^T - 5 I|| = 20
  CHECK_THROWS_AS(certify_gram(m, 0.95), certification_error);
}
