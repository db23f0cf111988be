#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "approxh/errors.hpp"
#include "approxh/numtheory.hpp"
#include "approxh/sign_matrix.hpp"

namespace approxh {

enum class Provenance { sylvester, paley, kronecker };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::sylvester: return "sylvester";
    case Provenance::paley: return "paley";
    case Provenance::kronecker: return "kronecker";
  }
  return "?";
}

struct HadamardMatrix {
  long order = 0;
  SignMatrix entries;
  Provenance provenance = Provenance::sylvester;
};

// Exact integer check of H H^T = n I.
inline bool verify_hadamard(const SignMatrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("verify_hadamard: square input required");
  const long n = h.rows();
  const Eigen::MatrixXi gram = h.ints() * h.ints().transpose();
  return gram == (Eigen::MatrixXi::Identity(n, n) * static_cast<int>(n));
}

namespace detail {
inline void check_cap(long order, long cap, const char* where) {
  if (cap > 0 && order > cap)
    throw size_limit_error(std::string(where) + ": order " + std::to_string(order) +
                           " exceeds cap " + std::to_string(cap));
}

inline HadamardMatrix checked(long order, Eigen::MatrixXi m, Provenance p) {
  HadamardMatrix h{order, SignMatrix(std::move(m)), p};
  if (!verify_hadamard(h.entries))
    throw certification_error("hadamard: constructed matrix failed the exact Gram check");
  return h;
}
}  // namespace detail

// Order 2^k by doubling.
inline HadamardMatrix sylvester(int k, long cap = 8192) {
  if (k < 0) throw std::invalid_argument("sylvester: k must be >= 0");
  if (k >= 62) throw size_limit_error("sylvester: k out of range");
  const long n = 1L << k;
  detail::check_cap(n, cap, "sylvester");
  Eigen::MatrixXi m(1, 1);
  m(0, 0) = 1;
  for (long s = 1; s < n; s *= 2) {
    Eigen::MatrixXi d(2 * s, 2 * s);
    d.topLeftCorner(s, s) = m;
    d.topRightCorner(s, s) = m;
    d.bottomLeftCorner(s, s) = m;
    d.bottomRightCorner(s, s) = -m;
    m.swap(d);
  }
  return detail::checked(n, std::move(m), Provenance::sylvester);
}

// Order q+1 from the quadratic character mod a prime q = 3 (mod 4):
// H = I + S with S skew, S built from the bordered Jacobsthal matrix.
inline HadamardMatrix paley(long q, long cap = 8192) {
  if (q < 3 || !is_prime(static_cast<std::uint64_t>(q)) || q % 4 != 3)
    throw std::invalid_argument("paley: q must be a prime congruent to 3 mod 4");
  detail::check_cap(q + 1, cap, "paley");
  const long n = q + 1;
  // chi[r] = quadratic character of r
  std::vector<int> chi(static_cast<std::size_t>(q), -1);
  chi[0] = 0;
  for (long j = 1; j < q; ++j)
    chi[static_cast<std::size_t>(static_cast<std::int64_t>(j) * j % q)] = 1;

  Eigen::MatrixXi m(n, n);
  m(0, 0) = 1;
  for (long j = 1; j < n; ++j) {
    m(0, j) = 1;
    m(j, 0) = -1;
  }
  for (long a = 0; a < q; ++a)
    for (long b = 0; b < q; ++b)
      m(a + 1, b + 1) = (a == b) ? 1 : chi[static_cast<std::size_t>(((a - b) % q + q) % q)];
  return detail::checked(n, std::move(m), Provenance::paley);
}

inline HadamardMatrix kronecker(const HadamardMatrix& a, const HadamardMatrix& b,
                                long cap = 8192) {
  const long n = a.order * b.order;
  detail::check_cap(n, cap, "kronecker");
  Eigen::MatrixXi m(n, n);
  for (long i = 0; i < a.order; ++i)
    for (long j = 0; j < a.order; ++j)
      m.block(i * b.order, j * b.order, b.order, b.order) =
          a.entries(i, j) > 0 ? b.entries.ints() : Eigen::MatrixXi(-b.entries.ints());
  return detail::checked(n, std::move(m), Provenance::kronecker);
}

// Closure of the Sylvester and Paley orders under Kronecker products, up to a
// size cap. Each order keeps one canonical recipe: Sylvester wins, then
// Paley, then the product with the smallest left factor.
class OrderRegistry {
public:
  explicit OrderRegistry(long cap = 8192) : cap_(cap) {
    if (cap_ < 1) throw std::invalid_argument("OrderRegistry: cap must be >= 1");
    for (long n = 1; n <= cap_; n *= 2) {
      recipes_.emplace(n, Recipe{Provenance::sylvester, n, 0});
      if (n > cap_ / 2) break;
    }
    for (long q = 3; q + 1 <= cap_; q += 4)
      if (is_prime(static_cast<std::uint64_t>(q)))
        recipes_.try_emplace(q + 1, Recipe{Provenance::paley, q, 0});
    // Closure under products; ascending scan over an ordered map reaches a
    // fixpoint because factors precede their products.
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<long> known;
      known.reserve(recipes_.size());
      for (const auto& [o, r] : recipes_) known.push_back(o);
      for (long a : known)
        for (long b : known) {
          if (a > b || a <= 1) continue;
          if (b > cap_ / a) continue;
          if (recipes_.try_emplace(a * b, Recipe{Provenance::kronecker, a, b}).second)
            grew = true;
        }
    }
    for (const auto& [o, r] : recipes_) orders_.push_back(o);
  }

  const std::vector<long>& orders() const { return orders_; }

  std::vector<long> even_orders() const {
    std::vector<long> out;
    for (long o : orders_)
      if (o % 2 == 0) out.push_back(o);
    return out;
  }

  bool constructible(long n) const { return recipes_.count(n) > 0; }

  // Closest even constructible order to n within (1 +/- eps) n; ties go to
  // the smaller order.
  long available_order_near(long n, double eps) const {
    if (n < 1) throw std::invalid_argument("available_order_near: n must be >= 1");
    if (eps < 0.0 || eps >= 1.0)
      throw std::invalid_argument("available_order_near: eps must lie in [0,1)");
    long best = -1;
    for (long o : orders_) {
      if (o % 2 != 0) continue;
      if (o < (1.0 - eps) * n || o > (1.0 + eps) * n) continue;
      if (best < 0 || std::abs(o - n) < std::abs(best - n)) best = o;
    }
    if (best < 0)
      throw not_found_error("available_order_near: no even constructible order within " +
                            std::to_string(eps) + " of " + std::to_string(n));
    return best;
  }

  HadamardMatrix construct(long order) const {
    auto it = recipes_.find(order);
    if (it == recipes_.end())
      throw not_found_error("OrderRegistry: order " + std::to_string(order) +
                            " is not constructible");
    const Recipe& r = it->second;
    switch (r.kind) {
      case Provenance::sylvester: {
        int k = 0;
        while ((1L << k) < order) ++k;
        return sylvester(k, cap_);
      }
      case Provenance::paley:
        return paley(r.a, cap_);
      case Provenance::kronecker:
        return kronecker(construct(r.a), construct(r.b), cap_);
    }
    throw std::logic_error("OrderRegistry: bad recipe");
  }

  long cap() const { return cap_; }

private:
  struct Recipe {
    Provenance kind;
    long a;  // sylvester: the order itself; paley: q; kronecker: left order
    long b;  // kronecker: right order
  };

  long cap_;
  std::map<long, Recipe> recipes_;
  std::vector<long> orders_;
};

}  // namespace approxh
