// Command-line surface: construct / verify / decompose / flat / sweep.
//
// Conventions shared by all subcommands:
//   - stdout carries the primary artifact (matrix text, report JSON, CSV);
//     --out redirects it to a file.
//   - construct keeps stdout for the matrix, so its JSON report goes to
//     stderr unless --report names a file. verify/decompose/flat print the
//     report on stdout.
//   - every JSON report embeds {seed, config_hash, version}; reruns with the
//     same triple are byte-identical (nothing time-dependent is emitted).
//   - exit codes: 0 success, 1 bad input or infeasible request, 2 assembled
//     but the condition-number certificate failed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "approxh/approxh.hpp"

namespace {

using approxh::RunConfig;
using json = nlohmann::ordered_json;

// JSON has no infinities; the report contract serializes them as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  return approxh::format_double(v);
}

json stamp(const char* command, const RunConfig& cfg) {
  json j;
  j["tool"] = approxh::kToolName;
  j["version"] = approxh::kToolVersion;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["config_hash"] = approxh::config_hash(cfg);
  return j;
}

json spectral_json(const approxh::SpectralReport& r) {
  json j;
  j["rows"] = r.rows;
  j["cols"] = r.cols;
  j["s_min"] = num(r.s_min);
  j["s_max"] = num(r.s_max);
  j["kappa"] = num(r.kappa);
  j["op_norm"] = num(r.op_norm);
  j["hs_norm"] = num(r.hs_norm);
  j["method"] = r.method;
  j["tol"] = num(r.tol);
  return j;
}

json assembly_json(const approxh::AssemblyReport& r) {
  json j;
  j["n"] = r.n;
  j["branch"] = approxh::branch_name(r.branch);
  j["eps_used"] = r.eps_used;
  j["sizes"] = r.sizes;
  j["m"] = r.m;
  j["q"] = r.q;
  j["delta_q"] = num(r.delta_q);
  json blocks = json::array();
  for (const auto& b : r.blocks) {
    json bj;
    bj["size"] = b.size;
    bj["hadamard"] = b.hadamard;
    bj["delta_target"] = num(b.delta_target);
    bj["delta_observed"] = num(b.delta_observed);
    bj["attempts"] = b.attempts;
    blocks.push_back(std::move(bj));
  }
  j["blocks"] = std::move(blocks);
  j["r_resamples"] = r.r_resamples;
  j["rebuilds"] = r.rebuilds;
  j["fallback_trials"] = r.fallback_trials;
  j["w_top_deviation"] = num(r.w_top_deviation);
  j["s_norm"] = num(r.s_norm);
  j["s_wtop_norm"] = num(r.s_wtop_norm);
  j["sr_norm"] = num(r.sr_norm);
  j["r_norm"] = num(r.r_norm);
  j["spectral"] = spectral_json(r.spectral);
  return j;
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << text;
}

void emit_json(const json& j, const std::string& path, std::ostream& fallback) {
  write_text(path, j.dump(2) + "\n", fallback);
}

// Input or infeasibility errors become a machine-readable report on the
// command's report channel, exit code 1.
int fail(const char* command, const RunConfig& cfg, const std::string& message,
         const std::string& report_path, std::ostream& fallback) {
  json j = stamp(command, cfg);
  j["error"] = message;
  try {
    emit_json(j, report_path, fallback);
  } catch (const std::exception& ex) {
    std::cerr << ex.what() << "\n";
  }
  return 1;
}

int threads_from_env() {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* cap = std::getenv("APPROXH_THREADS")) {
    try {
      const int limit = std::stoi(cap);
      if (limit >= 1 && limit < threads) threads = limit;
    } catch (const std::exception&) {
      // unparseable cap is ignored rather than fatal
    }
  }
  return threads;
}

int cmd_construct(long n, const RunConfig& cfg, const std::string& out_path,
                  const std::string& report_path) {
  approxh::AssemblyResult res;
  try {
    res = approxh::assemble(n, cfg);
  } catch (const std::exception& ex) {
    return fail("construct", cfg, ex.what(), report_path, std::cerr);
  }
  write_text(out_path, approxh::sign_text(res.v), std::cout);
  const bool certified = res.report.spectral.kappa <= cfg.kappa_accept;
  json j = stamp("construct", cfg);
  j["kappa_accept"] = cfg.kappa_accept;
  j["certified"] = certified;
  j["assembly"] = assembly_json(res.report);
  emit_json(j, report_path, std::cerr);
  return certified ? 0 : 2;
}

int cmd_verify(const std::string& in_path, const RunConfig& cfg, const std::string& out_path) {
  std::string text;
  {
    std::ifstream is(in_path, std::ios::binary);
    if (!is) return fail("verify", cfg, "cannot open matrix file: " + in_path, out_path, std::cout);
    std::ostringstream buf;
    buf << is.rdbuf();
    text = buf.str();
  }
  const bool sign_text = !text.empty() && text.find_first_not_of("+-\r\n") == std::string::npos;
  Eigen::MatrixXd m;
  bool is_sign = false;
  try {
    std::istringstream is(text);
    if (sign_text) {
      m = approxh::read_sign_text(is).reals();
      is_sign = true;
    } else {
      m = approxh::read_numeric_csv(is);
      is_sign = m.unaryExpr([](double v) { return std::abs(v) == 1.0 ? 1.0 : 0.0; }).minCoeff() > 0.0;
    }
  } catch (const std::exception& ex) {
    return fail("verify", cfg, ex.what(), out_path, std::cout);
  }
  json j = stamp("verify", cfg);
  j["file"] = in_path;
  j["sign_matrix"] = is_sign;
  j["spectral"] = spectral_json(approxh::analyze(m));
  emit_json(j, out_path, std::cout);
  return 0;
}

int cmd_decompose(long n, double eps, const RunConfig& cfg, const std::string& out_path) {
  json j = stamp("decompose", cfg);
  j["n"] = n;
  j["eps"] = eps;
  try {
    if (n % 2 == 0) {
      const auto d = approxh::decompose_even(n, eps);
      j["kind"] = "even";
      j["primes"] = std::vector<long>(d.q.begin(), d.q.end());
      j["max_deviation"] = num(d.max_deviation());
    } else {
      const approxh::OrderRegistry reg(cfg.hadamard_cap);
      const auto d = approxh::decompose_odd(n, eps, reg.even_orders());
      j["kind"] = "odd";
      j["m"] = d.m;
      j["primes"] = std::vector<long>(d.q.begin(), d.q.end());
      j["max_deviation"] = num(d.max_deviation());
    }
  } catch (const std::exception& ex) {
    return fail("decompose", cfg, ex.what(), out_path, std::cout);
  }
  emit_json(j, out_path, std::cout);
  return 0;
}

int cmd_flat(long q, const RunConfig& cfg, const std::string& out_path) {
  approxh::FlatVector f;
  try {
    approxh::Rng rng(approxh::derive_seed(cfg.seed, {static_cast<std::uint64_t>(q)}));
    f = approxh::sample_flat_vector(q, rng, cfg.c_flat, cfg.max_retries, cfg.delta_cap);
  } catch (const std::exception& ex) {
    return fail("flat", cfg, ex.what(), out_path, std::cout);
  }
  json j = stamp("flat", cfg);
  j["q"] = q;
  j["delta_target"] = num(f.delta_target);
  j["delta_observed"] = num(f.delta_observed);
  j["attempts"] = f.attempts;
  std::string entries(static_cast<std::size_t>(f.q), '+');
  for (long i = 0; i < f.q; ++i)
    if (f.entries(i) < 0) entries[static_cast<std::size_t>(i)] = '-';
  j["entries"] = entries;
  json mags = json::array();
  for (long i = 0; i < f.fourier_mags.size(); ++i) mags.push_back(num(f.fourier_mags(i)));
  j["fourier_mags"] = std::move(mags);
  emit_json(j, out_path, std::cout);
  return 0;
}

// Grid file: {"cells": [{"n":, "N":, "dist":, "a":, "nu":, "trials":}, ...]}
// or a bare array of cells. Missing per-cell fields fall back to the flags.
// Without a grid file, --n and --N define a single cell.
int cmd_sweep(const std::string& grid_path, long inline_n, long inline_N, const RunConfig& cfg,
              double threshold, const std::string& default_dist, double default_a,
              double default_nu, int default_trials, const std::string& out_path,
              const std::string& report_path) {
  std::vector<approxh::SweepCell> cells;
  try {
    json arr = json::array();
    if (!grid_path.empty()) {
      std::ifstream is(grid_path);
      if (!is) throw std::runtime_error("cannot open grid file: " + grid_path);
      const json grid = json::parse(is);
      arr = grid.is_array() ? grid : grid.at("cells");
      if (!arr.is_array() || arr.empty()) throw std::runtime_error("grid has no cells");
    } else {
      if (inline_n < 1 || inline_N < 1)
        throw std::runtime_error("need a grid file or both --n and --N");
      arr.push_back(json{{"n", inline_n}, {"N", inline_N}});
    }
    for (const json& c : arr) {
      approxh::SweepCell cell;
      cell.n = c.at("n").get<long>();
      cell.N = c.at("N").get<long>();
      cell.dist = approxh::parse_distribution(c.value("dist", default_dist));
      cell.a = c.value("a", default_a);
      cell.nu = c.value("nu", default_nu);
      cell.trials = c.value("trials", default_trials);
      if (cell.n < 1 || cell.N < cell.n) throw std::runtime_error("cell needs 1 <= n <= N");
      if (cell.trials < 1) throw std::runtime_error("cell needs trials >= 1");
      cells.push_back(cell);
    }
  } catch (const std::exception& ex) {
    return fail("sweep", cfg, ex.what(), report_path, std::cerr);
  }

  const auto records = approxh::phase_sweep(cells, threshold, cfg, threads_from_env());
  std::ostringstream csv;
  approxh::write_sweep_csv(csv, records);
  write_text(out_path, csv.str(), std::cout);

  json j = stamp("sweep", cfg);
  j["grid"] = grid_path.empty() ? "(inline)" : grid_path;
  j["cells"] = cells.size();
  j["rows"] = records.size();
  j["kappa_threshold"] = num(threshold);
  json errors = json::array();
  for (const auto& r : records)
    if (!r.error.empty()) {
      json e;
      e["n"] = r.n;
      e["N"] = r.N;
      e["seed"] = r.seed;
      e["error"] = r.error;
      errors.push_back(std::move(e));
    }
  j["cell_errors"] = std::move(errors);
  emit_json(j, report_path, std::cerr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"+/-1 matrices with certified condition numbers"};
  app.set_version_flag("--version", approxh::kToolVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  long n = 0, q = 0, big_n = 0;
  double eps = cfg.eps_decompose;
  double threshold = 0.0;
  double a = 1.0, nu = -1.0;
  int trials = 1;
  std::string in_path, out_path, report_path, grid_path, dist = "rademacher";
  int rc = 0;

  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", cfg.seed, "master RNG seed"); };

  CLI::App* construct = app.add_subcommand("construct", "build a +/-1 matrix of order n");
  construct->add_option("--n", n, "matrix order")->required()->check(CLI::PositiveNumber);
  add_seed(construct);
  construct->add_option("--eps", cfg.eps_decompose, "prime-band slack for the decomposition");
  construct->add_option("--kappa-accept", cfg.kappa_accept, "condition-number acceptance gate");
  construct->add_option("--out", out_path, "matrix file (default stdout)");
  construct->add_option("--report", report_path, "JSON report file (default stderr)");
  construct->callback([&] { rc = cmd_construct(n, cfg, out_path, report_path); });

  CLI::App* verify = app.add_subcommand("verify", "spectral report for a matrix file");
  verify->add_option("file", in_path, "sign-text or numeric CSV matrix")->required();
  verify->add_option("--out", out_path, "report file (default stdout)");
  verify->callback([&] { rc = cmd_verify(in_path, cfg, out_path); });

  CLI::App* decompose = app.add_subcommand("decompose", "prime split of n near n/4");
  decompose->add_option("--n", n, "order to split")->required()->check(CLI::PositiveNumber);
  decompose->add_option("--eps", eps, "prime-band slack");
  decompose->add_option("--out", out_path, "report file (default stdout)");
  decompose->callback([&] { rc = cmd_decompose(n, eps, cfg, out_path); });

  CLI::App* flat = app.add_subcommand("flat", "spectrally flat +/-1 vector for prime q");
  flat->add_option("--q", q, "odd prime length")->required()->check(CLI::PositiveNumber);
  add_seed(flat);
  flat->add_option("--out", out_path, "report file (default stdout)");
  flat->callback([&] { rc = cmd_flat(q, cfg, out_path); });

  CLI::App* sweep = app.add_subcommand("sweep", "run a frame-search grid, write CSV");
  sweep->add_option("grid", grid_path, "JSON grid file (or pass --n and --N)");
  sweep->add_option("--n", n, "inline cell: basis dimension")->check(CLI::PositiveNumber);
  sweep->add_option("--N", big_n, "inline cell: frame size")->check(CLI::PositiveNumber);
  add_seed(sweep);
  sweep->add_option("--threshold", threshold, "kappa threshold for counting bases");
  sweep->add_option("--dist", dist, "default cell distribution")
      ->check(CLI::IsMember({"rademacher", "gaussian", "uniform", "two-point"}));
  sweep->add_option("--a", a, "default two-point magnitude");
  sweep->add_option("--nu", nu, "default matching slack (negative: a/8)");
  sweep->add_option("--trials", trials, "default trials per cell")->check(CLI::PositiveNumber);
  sweep->add_option("--budget", cfg.exhaustive_budget, "largest enumerable subset family");
  sweep->add_option("--samples", cfg.random_samples, "draws in random search mode");
  sweep->add_option("--out", out_path, "CSV file (default stdout)");
  sweep->add_option("--report", report_path, "JSON run report (default stderr)");
  sweep->callback([&] {
    rc = cmd_sweep(grid_path, n, big_n, cfg, threshold, dist, a, nu, trials, out_path,
                   report_path);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  return rc;
}
