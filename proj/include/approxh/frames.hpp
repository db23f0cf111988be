#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "approxh/assembly.hpp"
#include "approxh/config.hpp"
#include "approxh/errors.hpp"
#include "approxh/rng.hpp"
#include "approxh/sign_matrix.hpp"
#include "approxh/spectral.hpp"

namespace approxh {

enum class Distribution { rademacher, gaussian, uniform_symmetric, two_point };

inline const char* distribution_name(Distribution d) {
  switch (d) {
    case Distribution::rademacher: return "rademacher";
    case Distribution::gaussian: return "gaussian";
    case Distribution::uniform_symmetric: return "uniform";
    case Distribution::two_point: return "two-point";
  }
  return "?";
}

inline Distribution parse_distribution(const std::string& s) {
  if (s == "rademacher") return Distribution::rademacher;
  if (s == "gaussian") return Distribution::gaussian;
  if (s == "uniform") return Distribution::uniform_symmetric;
  if (s == "two-point") return Distribution::two_point;
  throw std::invalid_argument("unknown distribution: " + s);
}

// n x N random frame, i.i.d. entries, symmetric about zero. The scale
// parameter a applies to two-point entries; the continuous distributions
// have unit variance.
struct FrameEnsemble {
  long n = 0;
  long N = 0;
  Distribution dist = Distribution::rademacher;
  double a = 1.0;
  std::uint64_t seed = 0;
};

// Columns draw from per-column derived streams, so for a fixed seed the
// frame with more columns extends the frame with fewer. Cumulative sweeps
// rely on this prefix property.
inline Eigen::MatrixXd sample_frame(const FrameEnsemble& e) {
  if (e.n < 1 || e.N < e.n) throw std::invalid_argument("sample_frame: need 1 <= n <= N");
  if (e.dist == Distribution::two_point && e.a <= 0.0)
    throw std::invalid_argument("sample_frame: two-point scale must be positive");
  Eigen::MatrixXd a(e.n, e.N);
  for (long k = 0; k < e.N; ++k) {
    Rng rng(derive_seed(e.seed, {seedtag::frame_column, static_cast<std::uint64_t>(e.n),
                                 static_cast<std::uint64_t>(k)}));
    for (long i = 0; i < e.n; ++i) {
      switch (e.dist) {
        case Distribution::rademacher: a(i, k) = rng.sign(); break;
        case Distribution::gaussian: a(i, k) = rng.normal(); break;
        case Distribution::uniform_symmetric:
          a(i, k) = rng.uniform(-std::numbers::sqrt3, std::numbers::sqrt3);
          break;
        case Distribution::two_point: a(i, k) = e.a * rng.sign(); break;
      }
    }
  }
  return a;
}

// Round-robin partition of column indices with per-class sup-norm matching
// against the scaled target columns.
struct MatchReport {
  long n = 0;
  long N = 0;
  double a = 0.0;
  double nu = 0.0;
  std::vector<std::vector<long>> classes;  // classes[j] = {k : k = j mod n}
  std::vector<std::vector<long>> matches;  // ascending within each class
  long m_min = 0;                          // min_j |matches[j]|
};

inline MatchReport match_columns(const Eigen::MatrixXd& a_mat, const SignMatrix& v, double a,
                                 double nu) {
  const long n = v.rows();
  if (v.cols() != n) throw std::invalid_argument("match_columns: square target required");
  if (a_mat.rows() != n) throw std::invalid_argument("match_columns: row count mismatch");
  if (a_mat.cols() < n) throw std::invalid_argument("match_columns: need at least n columns");
  if (a <= 0.0 || nu < 0.0) throw std::invalid_argument("match_columns: need a > 0 and nu >= 0");

  MatchReport rep;
  rep.n = n;
  rep.N = a_mat.cols();
  rep.a = a;
  rep.nu = nu;
  rep.classes.resize(static_cast<std::size_t>(n));
  rep.matches.resize(static_cast<std::size_t>(n));
  const Eigen::MatrixXd target = a * v.reals();
  for (long k = 0; k < rep.N; ++k) {
    const long j = k % n;
    rep.classes[static_cast<std::size_t>(j)].push_back(k);
    const double dist = (a_mat.col(k) - target.col(j)).lpNorm<Eigen::Infinity>();
    if (dist <= nu) rep.matches[static_cast<std::size_t>(j)].push_back(k);
  }
  rep.m_min = rep.N;
  for (const auto& m : rep.matches) rep.m_min = std::min<long>(rep.m_min, m.size());
  return rep;
}

struct HarvestedBasis {
  std::vector<long> columns;  // columns[j] matches target column j; disjoint across bases
  double kappa = 0.0;
};

// The b-th basis takes the b-th match from every class, so bases are
// pairwise disjoint by construction and stable under frame extension.
inline std::vector<HarvestedBasis> harvest_bases(const Eigen::MatrixXd& a_mat,
                                                 const SignMatrix& v, double a, double nu,
                                                 long max_bases = 64) {
  const MatchReport rep = match_columns(a_mat, v, a, nu);
  const long count = std::min<long>(rep.m_min, max_bases);
  std::vector<HarvestedBasis> out;
  for (long b = 0; b < count; ++b) {
    HarvestedBasis basis;
    Eigen::MatrixXd cols(rep.n, rep.n);
    for (long j = 0; j < rep.n; ++j) {
      const long k = rep.matches[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
      basis.columns.push_back(k);
      cols.col(j) = a_mat.col(k);
    }
    basis.kappa = condition_number(cols);
    out.push_back(std::move(basis));
  }
  return out;
}

struct SearchResult {
  double kappa = std::numeric_limits<double>::infinity();
  std::vector<long> witness;  // ascending column indices
  long draws = 0;
  bool exhaustive = false;
};

namespace detail {
// C(N, n) saturated just above cap.
inline long long subset_count_capped(long N, long n, long long cap) {
  long double acc = 1.0L;
  for (long i = 1; i <= n; ++i) {
    acc = acc * static_cast<long double>(N - n + i) / static_cast<long double>(i);
    if (acc > 2.0L * static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<long long>(acc + 0.5L);
}
}  // namespace detail

// Every n-column subset in lexicographic order; the first minimum is kept.
inline SearchResult best_kappa_exhaustive(const Eigen::MatrixXd& a_mat, long long budget) {
  const long n = a_mat.rows(), N = a_mat.cols();
  if (N < n) throw std::invalid_argument("best_kappa_exhaustive: need N >= n");
  const long long total = detail::subset_count_capped(N, n, budget);
  if (total > budget)
    throw budget_error("best_kappa_exhaustive: C(" + std::to_string(N) + "," + std::to_string(n) +
                       ") exceeds budget " + std::to_string(budget));
  SearchResult res;
  res.exhaustive = true;
  std::vector<long> idx(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd sub(n, n);
  while (true) {
    for (long j = 0; j < n; ++j) sub.col(j) = a_mat.col(idx[static_cast<std::size_t>(j)]);
    ++res.draws;
    const double kappa = condition_number(sub);
    if (kappa < res.kappa) {
      res.kappa = kappa;
      res.witness = idx;
    }
    long i = n - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == N - n + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (long j = i + 1; j < n; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return res;
}

// Independent draws of n distinct columns via partial Fisher-Yates. Each
// subset is evaluated in ascending column order, so its kappa is a function
// of the subset alone; a subset found by both search modes scores
// identically, which keeps "random never beats exhaustive" exact.
inline SearchResult best_kappa_random(const Eigen::MatrixXd& a_mat, long samples, Rng& rng) {
  const long n = a_mat.rows(), N = a_mat.cols();
  if (N < n) throw std::invalid_argument("best_kappa_random: need N >= n");
  if (samples < 1) throw std::invalid_argument("best_kappa_random: need samples >= 1");
  SearchResult res;
  std::vector<long> pool(static_cast<std::size_t>(N));
  for (long i = 0; i < N; ++i) pool[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd sub(n, n);
  std::vector<long> pick(static_cast<std::size_t>(n));
  for (long s = 0; s < samples; ++s) {
    for (long j = 0; j < n; ++j) {
      const long t = rng.uniform_int(j, N - 1);
      std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(t)]);
      pick[static_cast<std::size_t>(j)] = pool[static_cast<std::size_t>(j)];
    }
    std::sort(pick.begin(), pick.end());
    for (long j = 0; j < n; ++j) sub.col(j) = a_mat.col(pick[static_cast<std::size_t>(j)]);
    ++res.draws;
    const double kappa = condition_number(sub);
    if (kappa < res.kappa) {
      res.kappa = kappa;
      res.witness = pick;
    }
  }
  return res;
}

struct SweepCell {
  long n = 0;
  long N = 0;
  Distribution dist = Distribution::rademacher;
  double a = 1.0;
  double nu = -1.0;  // < 0: use a/4 times the default matching slack 0.5
  int trials = 1;
};

struct SweepRecord {
  long n = 0;
  long N = 0;
  std::string distribution;
  std::uint64_t seed = 0;
  std::string strategy;
  double best_kappa = std::numeric_limits<double>::infinity();
  long bases_found = 0;
  double kappa_threshold = 0.0;
  double wall_time_ms = 0.0;
  std::string error;  // empty on success; not part of the CSV schema
};

// Grid runner. Within a group of cells sharing (n, dist, a) the trials are
// seeded per trial index, frames extend with N, and best_kappa is the
// running minimum over the group in ascending-N order, so per seed the
// search is cumulative. Trials run in parallel up to `threads`; records and
// seeds depend only on indices, never on scheduling.
inline std::vector<SweepRecord> phase_sweep(const std::vector<SweepCell>& cells,
                                            double kappa_threshold, const RunConfig& cfg,
                                            int threads = 1) {
  struct Task {
    std::size_t cell;
    int trial;
    std::size_t record;
  };
  // Group cells so cumulative minima can be applied in ascending-N order.
  struct GroupKey {
    long n;
    int dist;
    std::uint64_t a_bits;
    bool operator<(const GroupKey& o) const {
      return std::tie(n, dist, a_bits) < std::tie(o.n, o.dist, o.a_bits);
    }
  };

  std::vector<SweepRecord> records;
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int t = 0; t < cells[c].trials; ++t) {
      tasks.push_back({c, t, records.size()});
      records.emplace_back();
    }
  }

  // V is fixed per dimension across the whole sweep.
  std::map<long, AssemblyResult> targets;
  for (const auto& cell : cells)
    if (!targets.count(cell.n)) {
      RunConfig vcfg = cfg;
      vcfg.seed = derive_seed(cfg.seed, {seedtag::sweep_trial, 0, static_cast<std::uint64_t>(cell.n)});
      targets.emplace(cell.n, assemble(cell.n, vcfg));
    }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t ti = next.fetch_add(1);
      if (ti >= tasks.size()) return;
      const Task& task = tasks[ti];
      const SweepCell& cell = cells[task.cell];
      SweepRecord& rec = records[task.record];
      rec.n = cell.n;
      rec.N = cell.N;
      rec.distribution = distribution_name(cell.dist);
      rec.kappa_threshold = kappa_threshold;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const std::uint64_t seed = derive_seed(
            cfg.seed, {seedtag::sweep_trial, static_cast<std::uint64_t>(cell.n),
                       static_cast<std::uint64_t>(static_cast<int>(cell.dist)),
                       std::bit_cast<std::uint64_t>(cell.a), static_cast<std::uint64_t>(task.trial)});
        rec.seed = seed;
        const Eigen::MatrixXd a_mat = sample_frame({cell.n, cell.N, cell.dist, cell.a, seed});
        const SignMatrix& v = targets.at(cell.n).v;
        const double nu = cell.nu >= 0.0 ? cell.nu : cell.a * 0.5 / 4.0;
        const auto bases = harvest_bases(a_mat, v, cell.a, nu);
        for (const auto& b : bases)
          if (kappa_threshold <= 0.0 || b.kappa < kappa_threshold) ++rec.bases_found;
        const long long family = detail::subset_count_capped(cell.N, cell.n, cfg.exhaustive_budget);
        if (family <= cfg.exhaustive_budget) {
          rec.best_kappa = best_kappa_exhaustive(a_mat, cfg.exhaustive_budget).kappa;
          rec.strategy = "exhaustive";
        } else {
          Rng rng(derive_seed(seed, {seedtag::search_draw}));
          rec.best_kappa = best_kappa_random(a_mat, cfg.random_samples, rng).kappa;
          rec.strategy = "random-" + std::to_string(cfg.random_samples);
        }
      } catch (const std::exception& ex) {
        rec.error = ex.what();
        rec.best_kappa = std::numeric_limits<double>::infinity();
        rec.bases_found = 0;
      }
      rec.wall_time_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Cumulative per-seed minima within each group, ascending N.
  std::map<GroupKey, std::vector<std::size_t>> groups;  // cell indices
  for (std::size_t c = 0; c < cells.size(); ++c)
    groups[{cells[c].n, static_cast<int>(cells[c].dist), std::bit_cast<std::uint64_t>(cells[c].a)}]
        .push_back(c);
  std::map<std::pair<std::size_t, int>, std::size_t> record_at;  // (cell, trial) -> record
  for (const auto& t : tasks) record_at[{t.cell, t.trial}] = t.record;
  for (auto& [key, cell_idx] : groups) {
    std::stable_sort(cell_idx.begin(), cell_idx.end(),
                     [&](std::size_t x, std::size_t y) { return cells[x].N < cells[y].N; });
    std::map<int, double> running;  // trial -> best so far
    for (std::size_t c : cell_idx) {
      for (int t = 0; t < cells[c].trials; ++t) {
        SweepRecord& rec = records[record_at[{c, t}]];
        if (!rec.error.empty()) continue;
        auto [it, fresh] = running.try_emplace(t, rec.best_kappa);
        if (!fresh) {
          it->second = std::min(it->second, rec.best_kappa);
          rec.best_kappa = it->second;
        }
      }
    }
  }
  return records;
}

}  // namespace approxh
