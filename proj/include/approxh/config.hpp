#pragma once

#include <cstdint>
#include <string>

namespace approxh {

inline constexpr const char* kToolName = "approxh";
inline constexpr const char* kToolVersion = "0.1.0";

// Calibration constants, frozen from pilot runs (tools/calibrate.cpp).
//
// kCFlat: scale of the spectral-flatness acceptance band. Pilot: smallest
//   value for which sampling succeeds within 50 attempts at the 99th
//   percentile over all odd primes q <= 2003, plus headroom.
// kDeltaCap: hard ceiling on the relative flatness slack. The target band
//   c * q^(-1/4) * sqrt(log q) exceeds 1 for small q, where it would accept
//   singular circulants and void the Gram certificate; capping below 1 keeps
//   every accepted block provably invertible.
// kCSr: scale of the cross-term acceptance bound for the random fill block.
//   Pilot: worst observed ||S R^T|| / (sqrt(eps) n) over first-draw fills on
//   [1, 512], plus headroom; small orders dominate.
// kKAccept: condition-number acceptance ceiling, 2x the maximum best-of-32
//   kappa observed over orders 64..512 at seed 0 (the hardest order there is
//   also the hardest over 1..512).
// kSMinFloor: certified lower bound on s_min / sqrt(n). A +/-1 matrix always
//   has s_max >= sqrt(n), so kappa <= kKAccept forces s_min / sqrt(n) >=
//   1 / kKAccept; freezing the reciprocal makes the floor a consequence of
//   the gate rather than a separate empirical claim.
inline constexpr double kCFlat = 1.15;
inline constexpr double kDeltaCap = 0.95;
inline constexpr double kCSr = 1.7;
inline constexpr double kKAccept = 62.5;
inline constexpr double kSMinFloor = 0.016;

struct RunConfig {
  std::uint64_t seed = 0;
  double eps_decompose = 0.3;   // prime-band slack for decompositions
  double eps_accept = 0.2;      // scale in the ||S R^T|| acceptance bound
  double c_flat = kCFlat;
  double delta_cap = kDeltaCap;
  double c_sr = kCSr;
  double kappa_accept = kKAccept;
  int max_retries = 50;         // flat-vector sampling attempts per block
  int max_resamples = 64;       // fill-block rejection attempts
  int max_rebuilds = 32;        // whole-construction redraws against the kappa gate
  long hadamard_cap = 8192;     // largest constructible order kept in the registry
  long fallback_trials = 10000; // random candidates when no decomposition exists
  long exhaustive_budget = 10000000;  // largest enumerable subset family
  long random_samples = 100000; // subset draws in random search mode
};

// Stable 64-bit FNV-1a over the canonical text form of the config.
// Field order is part of the contract; reports embed this value.
inline std::uint64_t config_hash(const RunConfig& c) {
  std::string s;
  s += "seed=" + std::to_string(c.seed);
  s += ";eps_decompose=" + std::to_string(c.eps_decompose);
  s += ";eps_accept=" + std::to_string(c.eps_accept);
  s += ";c_flat=" + std::to_string(c.c_flat);
  s += ";delta_cap=" + std::to_string(c.delta_cap);
  s += ";c_sr=" + std::to_string(c.c_sr);
  s += ";kappa_accept=" + std::to_string(c.kappa_accept);
  s += ";max_retries=" + std::to_string(c.max_retries);
  s += ";max_resamples=" + std::to_string(c.max_resamples);
  s += ";max_rebuilds=" + std::to_string(c.max_rebuilds);
  s += ";hadamard_cap=" + std::to_string(c.hadamard_cap);
  s += ";fallback_trials=" + std::to_string(c.fallback_trials);
  s += ";exhaustive_budget=" + std::to_string(c.exhaustive_budget);
  s += ";random_samples=" + std::to_string(c.random_samples);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace approxh
