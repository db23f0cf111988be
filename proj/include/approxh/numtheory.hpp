#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "approxh/errors.hpp"

namespace approxh {

// Deterministic trial division; exact for the whole tool range.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

namespace detail {
inline void require_odd_prime(long q, const char* where) {
  if (q < 3 || q % 2 == 0 || !is_prime(static_cast<std::uint64_t>(q)))
    throw std::invalid_argument(std::string(where) + ": q must be an odd prime, got " +
                                std::to_string(q));
}

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  unsigned __int128 acc = 1, base = b % m;
  while (e) {
    if (e & 1) acc = acc * base % m;
    base = base * base % m;
    e >>= 1;
  }
  return static_cast<std::uint64_t>(acc);
}
}  // namespace detail

// Quadratic character of k mod an odd prime q, via Euler's criterion.
// Returns 0 for k = 0 mod q, +1 on residues, -1 on non-residues.
inline int legendre_symbol(long k, long q) {
  detail::require_odd_prime(q, "legendre_symbol");
  const std::uint64_t uq = static_cast<std::uint64_t>(q);
  std::uint64_t r = static_cast<std::uint64_t>(((k % q) + q) % q);
  if (r == 0) return 0;
  const std::uint64_t e = detail::pow_mod(r, uq / 2, uq);
  return e == 1 ? 1 : -1;
}

// Nonzero quadratic residues mod q, ascending. Size is (q-1)/2.
inline std::vector<long> quadratic_residues(long q) {
  detail::require_odd_prime(q, "quadratic_residues");
  std::vector<char> seen(static_cast<std::size_t>(q), 0);
  for (long j = 1; j < q; ++j)
    seen[static_cast<std::size_t>(static_cast<std::int64_t>(j) * j % q)] = 1;
  std::vector<long> out;
  out.reserve(static_cast<std::size_t>((q - 1) / 2));
  for (long r = 1; r < q; ++r)
    if (seen[static_cast<std::size_t>(r)]) out.push_back(r);
  return out;
}

// Prime in [lo, hi] closest to target; ties go to the smaller prime.
inline long find_prime_in(long lo, long hi, long target) {
  long best = -1;
  for (long p = std::max<long>(lo, 2); p <= hi; ++p) {
    if (!is_prime(static_cast<std::uint64_t>(p))) continue;
    if (best < 0 || std::abs(p - target) < std::abs(best - target)) best = p;
  }
  if (best < 0)
    throw not_found_error("find_prime_in: no prime in [" + std::to_string(lo) + "," +
                          std::to_string(hi) + "]");
  return best;
}

// Four primes q1 >= q2 >= q3 >= q4, each within (1 +/- eps) n/4, summing to n.
struct PrimeQuadruple {
  long n = 0;
  double eps = 0.0;
  std::array<long, 4> q{};  // descending

  long min_prime() const { return q[3]; }
  double max_deviation() const {
    double d = 0;
    for (long v : q) d = std::max(d, std::abs(static_cast<double>(v) - n / 4.0));
    return d;
  }
};

// Even constructible order m plus three odd primes, all within (1 +/- eps) n/4,
// with m + q1 + q2 + q3 = n.
struct OddDecomposition {
  long n = 0;
  double eps = 0.0;
  long m = 0;
  std::array<long, 3> q{};  // descending

  double max_deviation() const {
    double d = std::abs(static_cast<double>(m) - n / 4.0);
    for (long v : q) d = std::max(d, std::abs(static_cast<double>(v) - n / 4.0));
    return d;
  }
};

namespace detail {

inline std::vector<long> primes_in_band(double lo, double hi) {
  std::vector<long> out;
  for (long p = std::max<long>(2, static_cast<long>(std::ceil(lo))); p <= hi; ++p)
    if (is_prime(static_cast<std::uint64_t>(p))) out.push_back(p);
  return out;
}

// Candidate values sorted by |v - center|, then by value. Prefix truncation at
// a deviation threshold is then exact.
inline void sort_by_deviation(std::vector<long>& v, double center) {
  std::sort(v.begin(), v.end(), [center](long a, long b) {
    const double da = std::abs(a - center), db = std::abs(b - center);
    if (da != db) return da < db;
    return a < b;
  });
}

}  // namespace detail

// Minimizes the largest |q_j - n/4| over all admissible quadruples; among
// minimizers returns the ascending-lexicographically smallest multiset.
inline PrimeQuadruple decompose_even(long n, double eps) {
  if (n <= 0 || n % 2 != 0)
    throw std::invalid_argument("decompose_even: n must be positive and even");
  if (eps <= 0.0 || eps >= 1.0)
    throw std::invalid_argument("decompose_even: eps must lie in (0,1)");
  const double center = n / 4.0;
  const double lo = (1.0 - eps) * center, hi = (1.0 + eps) * center;
  std::vector<long> primes = detail::primes_in_band(lo, hi);
  // Odd primes only: an even prime block would force parity mismatches and
  // q = 2 has no quadratic structure to exploit.
  std::erase(primes, 2L);

  std::vector<double> devs;
  for (long p : primes) devs.push_back(std::abs(p - center));
  std::sort(devs.begin(), devs.end());
  devs.erase(std::unique(devs.begin(), devs.end()), devs.end());

  std::vector<long> sorted = primes;
  std::sort(sorted.begin(), sorted.end());

  for (double d : devs) {
    // First feasible threshold is the optimum; scan quadruples a<=b<=c<=r in
    // ascending lexicographic order so the first hit is the canonical one.
    std::vector<long> pool;
    for (long p : sorted)
      if (std::abs(p - center) <= d) pool.push_back(p);
    for (std::size_t ia = 0; ia < pool.size(); ++ia) {
      const long a = pool[ia];
      if (a * 4 > n) break;
      for (std::size_t ib = ia; ib < pool.size(); ++ib) {
        const long b = pool[ib];
        if (a + 3 * b > n) break;
        for (std::size_t ic = ib; ic < pool.size(); ++ic) {
          const long c = pool[ic];
          const long r = n - a - b - c;
          if (r < c) break;
          if (std::abs(r - center) > d) continue;
          if (!std::binary_search(pool.begin(), pool.end(), r)) continue;
          return PrimeQuadruple{n, eps, {r, c, b, a}};
        }
      }
    }
  }
  throw decomposition_error("decompose_even: no prime quadruple for n=" + std::to_string(n) +
                            " at eps=" + std::to_string(eps));
}

// Same objective with one block replaced by an exact constructible order m
// drawn from `orders`; deviation of m counts toward the minimized maximum.
inline OddDecomposition decompose_odd(long n, double eps, const std::vector<long>& orders) {
  if (n <= 0 || n % 2 == 0)
    throw std::invalid_argument("decompose_odd: n must be positive and odd");
  if (eps <= 0.0 || eps >= 1.0)
    throw std::invalid_argument("decompose_odd: eps must lie in (0,1)");
  const double center = n / 4.0;
  const double lo = (1.0 - eps) * center, hi = (1.0 + eps) * center;

  std::vector<long> primes = detail::primes_in_band(lo, hi);
  std::erase(primes, 2L);
  std::vector<long> ms;
  for (long m : orders)
    if (m % 2 == 0 && m >= lo && m <= hi) ms.push_back(m);
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

  std::vector<double> devs;
  for (long p : primes) devs.push_back(std::abs(p - center));
  for (long m : ms) devs.push_back(std::abs(m - center));
  std::sort(devs.begin(), devs.end());
  devs.erase(std::unique(devs.begin(), devs.end()), devs.end());

  for (double d : devs) {
    std::vector<long> pool;
    for (long p : primes)
      if (std::abs(p - center) <= d) pool.push_back(p);
    for (long m : ms) {
      if (std::abs(m - center) > d) continue;
      const long rest = n - m;
      // Triples a<=b<=c in ascending lexicographic order; combined with the
      // ascending scan over m this makes the tie-break total and stable.
      for (std::size_t ia = 0; ia < pool.size(); ++ia) {
        const long a = pool[ia];
        if (3 * a > rest) break;
        for (std::size_t ib = ia; ib < pool.size(); ++ib) {
          const long b = pool[ib];
          const long c = rest - a - b;
          if (c < b) break;
          if (std::abs(c - center) > d) continue;
          if (!std::binary_search(pool.begin(), pool.end(), c)) continue;
          return OddDecomposition{n, eps, m, {c, b, a}};
        }
      }
    }
  }
  throw decomposition_error("decompose_odd: no decomposition for n=" + std::to_string(n) +
                            " at eps=" + std::to_string(eps));
}

}  // namespace approxh
