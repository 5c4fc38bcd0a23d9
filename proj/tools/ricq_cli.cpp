// Command-line front end: verification drivers, threshold search, scalar
// tables, recovery experiments, certificate and report emission.
//
// Exit codes: 0 success/certified, 1 usage or config error, 2 refuted,
// 3 inconclusive.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "ricq/certify.hpp"
#include "ricq/core.hpp"
#include "ricq/io.hpp"
#include "ricq/recovery.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRefuted = 2;
constexpr int kExitInconclusive = 3;

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

ricq::ArithmeticMode parse_mode(const std::string& mode) {
  if (mode == "float") return ricq::ArithmeticMode::Float;
  if (mode == "interval") return ricq::ArithmeticMode::Interval;
  throw CLI::ValidationError("--mode must be 'float' or 'interval'");
}

std::vector<int> parse_index_list(const std::string& text) {
  std::vector<int> out;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

Eigen::VectorXd parse_vector(const std::string& text) {
  const std::vector<double> vals = parse_double_list(text);
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

Eigen::VectorXd load_vector_file(const std::string& path) {
  std::string text = ricq::read_text_file(path);
  for (char& c : text)
    if (c == '\n' || c == '\r' || c == ' ' || c == '\t') c = ',';
  return parse_vector(text);
}

int emit_certificate(const ricq::Certificate& cert, const std::string& out_path) {
  if (!out_path.empty()) ricq::write_text_file(out_path, ricq::certificate_to_json(cert));
  std::cout << "verdict: " << ricq::to_string(cert.verdict)
            << "  delta: " << fmt6(cert.delta) << "  mode: " << ricq::to_string(cert.mode)
            << "\ncells_checked: " << cert.cells_checked
            << "  worst_bound: " << ricq::format_g17(cert.worst_bound) << "\nworst_cell: ["
            << fmt6(cert.worst_cell.t_lo) << ", " << fmt6(cert.worst_cell.t_hi) << "] x ["
            << fmt6(cert.worst_cell.q_lo) << ", " << fmt6(cert.worst_cell.q_hi) << "]"
            << "\nduration_seconds: " << fmt6(cert.duration_seconds) << "\n";
  if (cert.witness) {
    std::cout << "witness: t = " << ricq::format_g17(cert.witness->t)
              << ", q = " << ricq::format_g17(cert.witness->q)
              << ", r = " << ricq::format_g17(cert.witness->r_value) << "\n";
  }
  switch (cert.verdict) {
    case ricq::Verdict::Certified: return kExitOk;
    case ricq::Verdict::Refuted: return kExitRefuted;
    default: return kExitInconclusive;
  }
}

ricq::SensingMatrix load_or_generate(const std::string& matrix_path, long m, long n,
                                     const std::string& gen, std::uint64_t seed) {
  if (!matrix_path.empty()) return ricq::load_matrix(matrix_path);
  if (m <= 0 || n <= 0)
    throw CLI::ValidationError("either --matrix or both --m and --n are required");
  const auto kind = gen == "bernoulli" ? ricq::MatrixGenKind::Bernoulli
                                       : ricq::MatrixGenKind::Gaussian;
  return ricq::generate_matrix(m, n, kind, seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ricq: certified verification of l_q sparse-recovery sufficient "
               "conditions, plus a recovery experiment toolkit"};
  app.require_subcommand(1);

  // ---- pq-table ----
  auto* tab = app.add_subcommand("pq-table", "Tabulate q, p_q, dp_q/dq and B(q) as CSV");
  double tab_from = 0.1, tab_to = 0.9, tab_step = 0.1;
  std::string tab_out;
  tab->add_option("--from", tab_from, "First q value")->required();
  tab->add_option("--to", tab_to, "Last q value")->required();
  tab->add_option("--step", tab_step, "Grid step")->required();
  tab->add_option("--out", tab_out, "Output CSV path (default stdout)");

  // ---- boundary ----
  auto* bnd = app.add_subcommand("boundary", "Evaluate B(q) or certify it decreasing");
  double bnd_q = 0.0, bnd_lo = 0.0, bnd_hi = 0.0, bnd_step = 0.01;
  bool bnd_interval = false;
  bnd->add_option("--q", bnd_q, "Evaluate B at this q");
  bnd->add_flag("--interval", bnd_interval, "Print an outward-rounded enclosure");
  bnd->add_option("--lo", bnd_lo, "Certify decreasing: range start");
  bnd->add_option("--hi", bnd_hi, "Certify decreasing: range end (<= 0.99)");
  bnd->add_option("--step", bnd_step, "Certification mesh step");

  // ---- verify ----
  auto* ver = app.add_subcommand("verify", "Run a verification job");
  int ver_theorem = 0;
  double ver_delta = 0.5, ver_qmax = 0.9181;
  std::string ver_mode = "float", ver_out, ver_config;
  int ver_budget = ricq::kDefaultRefineBudget, ver_workers = 0;
  ver->add_option("--theorem", ver_theorem, "Preset: 7 or 9");
  ver->add_option("--delta", ver_delta, "Isometry constant bound delta_2k");
  ver->add_option("--q-max", ver_qmax, "Largest exponent for the theorem-7 preset");
  ver->add_option("--mode", ver_mode, "'float' or 'interval'");
  ver->add_option("--out", ver_out, "Certificate JSON path");
  ver->add_option("--config", ver_config, "Job config JSON (custom partitions)");
  ver->add_option("--refine-budget", ver_budget, "Extra quartering levels for failing cells");
  ver->add_option("--workers", ver_workers, "Worker threads (default: all cores)");

  // ---- verify-cell ----
  auto* vc = app.add_subcommand("verify-cell", "Corner upper bound for one cell");
  double vc_tlo = 0, vc_thi = 0, vc_qlo = 0, vc_qhi = 0, vc_delta = 0.5;
  std::string vc_mode = "float";
  vc->add_option("--t-lo", vc_tlo)->required();
  vc->add_option("--t-hi", vc_thi)->required();
  vc->add_option("--q-lo", vc_qlo)->required();
  vc->add_option("--q-hi", vc_qhi)->required();
  vc->add_option("--delta", vc_delta)->required();
  vc->add_option("--mode", vc_mode, "'float' or 'interval'");

  // ---- search-qmax ----
  auto* sq = app.add_subcommand("search-qmax", "Largest certifiable exponent at a delta");
  double sq_delta = 0.5, sq_precision = 1e-4;
  int sq_workers = 0;
  sq->add_option("--delta", sq_delta)->required();
  sq->add_option("--precision", sq_precision, "Bracket width (>= 1e-5)");
  sq->add_option("--workers", sq_workers, "Worker threads");

  // ---- threshold-q1 ----
  app.add_subcommand("threshold-q1", "Exact delta threshold of the q = 1 parabola");

  // ---- lemma3-test ----
  auto* l3 = app.add_subcommand("lemma3-test", "Random sweep of the key inequality");
  long l3_samples = 100000;
  std::uint64_t l3_seed = 1;
  int l3_nmax = 64;
  l3->add_option("--samples", l3_samples, "Number of random vectors");
  l3->add_option("--seed", l3_seed, "RNG seed");
  l3->add_option("--n-max", l3_nmax, "Largest vector length");

  // ---- max-gap ----
  auto* mg = app.add_subcommand("max-gap", "Maximizer of sqrt(r) - r^(1/q)/n^(1/q-1/2)");
  long mg_n = 4;
  double mg_q = 0.5;
  mg->add_option("--n", mg_n)->required();
  mg->add_option("--q", mg_q)->required();

  // ---- ric ----
  auto* ric = app.add_subcommand("ric", "Restricted isometry constant of a matrix");
  std::string ric_matrix;
  long ric_m = 0, ric_n = 0, ric_samples = 0;
  int ric_k = 1;
  std::uint64_t ric_seed = 1;
  std::string ric_gen = "gaussian";
  ric->add_option("--matrix", ric_matrix, "Matrix file");
  ric->add_option("--m", ric_m, "Rows (generate instead of --matrix)");
  ric->add_option("--n", ric_n, "Columns");
  ric->add_option("--gen", ric_gen, "gaussian or bernoulli");
  ric->add_option("--seed", ric_seed, "Generation / sampling seed");
  ric->add_option("--k", ric_k, "Sparsity level")->required();
  ric->add_option("--samples", ric_samples,
                  "Monte-Carlo samples (omit for exact enumeration)");

  // ---- recover ----
  auto* rec = app.add_subcommand("recover", "l_q recovery of one instance");
  std::string rec_matrix, rec_rhs, rec_rhs_file;
  double rec_q = 0.5;
  long rec_m = 0, rec_n = 0;
  std::uint64_t rec_seed = 1;
  std::string rec_gen = "gaussian";
  rec->add_option("--matrix", rec_matrix, "Matrix file");
  rec->add_option("--m", rec_m, "Rows (generate instead of --matrix)");
  rec->add_option("--n", rec_n, "Columns");
  rec->add_option("--gen", rec_gen, "gaussian or bernoulli");
  rec->add_option("--seed", rec_seed, "Generation seed");
  rec->add_option("--rhs", rec_rhs, "Right-hand side, comma separated");
  rec->add_option("--rhs-file", rec_rhs_file, "Right-hand side from file");
  rec->add_option("--q", rec_q, "Exponent in (0, 1]")->required();

  // ---- nsp-check ----
  auto* nsp = app.add_subcommand("nsp-check", "Probabilistic null-space-property check");
  std::string nsp_matrix;
  std::string nsp_support;
  double nsp_q = 0.5;
  long nsp_samples = 10000, nsp_m = 0, nsp_n = 0;
  std::uint64_t nsp_seed = 1;
  std::string nsp_gen = "gaussian";
  nsp->add_option("--matrix", nsp_matrix, "Matrix file");
  nsp->add_option("--m", nsp_m, "Rows (generate instead of --matrix)");
  nsp->add_option("--n", nsp_n, "Columns");
  nsp->add_option("--gen", nsp_gen, "gaussian or bernoulli");
  nsp->add_option("--support", nsp_support, "Support indices, 0-based, comma separated")
      ->required();
  nsp->add_option("--q", nsp_q, "Exponent in (0, 1]")->required();
  nsp->add_option("--samples", nsp_samples, "Random null-space directions");
  nsp->add_option("--seed", nsp_seed, "RNG seed");

  // ---- experiment ----
  auto* exp = app.add_subcommand("experiment", "Phase-transition success table");
  long exp_m = 32, exp_n = 64, exp_trials = 50;
  int exp_kfrom = 1, exp_kto = 8;
  std::string exp_qlist = "0.5", exp_out;
  std::uint64_t exp_seed = 1;
  int exp_workers = 0;
  exp->add_option("--m", exp_m)->required();
  exp->add_option("--n", exp_n)->required();
  exp->add_option("--k-from", exp_kfrom)->required();
  exp->add_option("--k-to", exp_kto)->required();
  exp->add_option("--q-list", exp_qlist, "Comma-separated exponents");
  exp->add_option("--trials", exp_trials, "Trials per (k, q)");
  exp->add_option("--seed", exp_seed, "Base seed; trial i uses seed + i");
  exp->add_option("--out", exp_out, "Output CSV path (default stdout)");
  exp->add_option("--workers", exp_workers, "Worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (tab->parsed()) {
      if (!(tab_from > 0.0 && tab_to < 1.0 && tab_from <= tab_to && tab_step > 0.0)) {
        std::cerr << "pq-table: range must lie inside (0, 1) with a positive step\n";
        return kExitUsage;
      }
      std::string csv = "q,p_q,dp_q_dq,B\n";
      const long rows = std::lround(std::floor((tab_to - tab_from) / tab_step + 1e-9)) + 1;
      for (long i = 0; i < rows; ++i) {
        const double q = tab_from + i * tab_step;
        csv += ricq::format_g17(q) + "," + ricq::format_g17(ricq::pq(q)) + "," +
               ricq::format_g17(ricq::pq_derivative(q)) + "," +
               ricq::format_g17(ricq::boundary_B(q)) + "\n";
      }
      if (tab_out.empty())
        std::cout << csv;
      else
        ricq::write_text_file(tab_out, csv);
      return kExitOk;
    }

    if (bnd->parsed()) {
      if (bnd_hi > 0.0) {
        const bool ok = ricq::verify_boundary_decreasing(bnd_lo, bnd_hi, bnd_step);
        std::cout << "decreasing on [" << fmt6(bnd_lo) << ", " << fmt6(bnd_hi)
                  << "]: " << (ok ? "certified" : "not certified") << "\n";
        return ok ? kExitOk : kExitInconclusive;
      }
      if (!(bnd_q > 0.0)) {
        std::cerr << "boundary: provide --q or a --lo/--hi range\n";
        return kExitUsage;
      }
      if (bnd_interval) {
        const auto enc = ricq::boundary_B_interval(bnd_q);
        std::cout << "B(" << fmt6(bnd_q) << ") in [" << ricq::format_g17(enc.lower()) << ", "
                  << ricq::format_g17(enc.upper()) << "]\n";
      } else {
        std::cout << ricq::format_g17(ricq::boundary_B(bnd_q)) << "\n";
      }
      return kExitOk;
    }

    if (ver->parsed()) {
      const ricq::ArithmeticMode mode = parse_mode(ver_mode);
      ricq::Certificate cert;
      if (!ver_config.empty()) {
        const ricq::JobConfig cfg = ricq::parse_job_config(ricq::read_text_file(ver_config));
        const int workers = ver_workers > 0 ? ver_workers : cfg.workers;
        cert = cfg.partitions.empty()
                   ? ricq::theorem7_driver(cfg.delta, cfg.q_max, cfg.mode, nullptr,
                                           cfg.refine_budget, workers)
                   : ricq::verify_partitions(cfg.partitions, cfg.delta, cfg.mode,
                                             cfg.refine_budget, workers);
      } else if (ver_theorem == 7) {
        cert = ricq::theorem7_driver(ver_delta, ver_qmax, mode, nullptr, ver_budget,
                                     ver_workers);
      } else if (ver_theorem == 9) {
        cert = ricq::theorem9_driver(ver_delta, mode, ver_budget, ver_workers);
      } else {
        std::cerr << "verify: pass --theorem 7, --theorem 9, or --config FILE\n";
        return kExitUsage;
      }
      return emit_certificate(cert, ver_out);
    }

    if (vc->parsed()) {
      const double bound = ricq::cell_upper_bound({vc_tlo, vc_thi, vc_qlo, vc_qhi}, vc_delta,
                                                  parse_mode(vc_mode));
      std::cout << ricq::format_g17(bound) << "\n";
      return kExitOk;
    }

    if (sq->parsed()) {
      const double q_star = ricq::search_qmax(sq_delta, sq_precision,
                                              ricq::ArithmeticMode::Float, sq_workers);
      std::cout << "q* in [" << ricq::format_g17(q_star) << ", "
                << ricq::format_g17(q_star + sq_precision) << ")\n";
      return kExitOk;
    }

    if (app.get_subcommand("threshold-q1")->parsed()) {
      std::cout << ricq::format_g17(ricq::q1_threshold()) << "\n";
      return kExitOk;
    }

    if (l3->parsed()) {
      std::mt19937_64 rng(l3_seed);
      long violations = 0;
      double min_margin = std::numeric_limits<double>::infinity();
      for (long s = 0; s < l3_samples; ++s) {
        const int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(l3_nmax - 1));
        const double q = 0.1 + 0.8 * ((rng() >> 11) * 0x1p-53);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i)
          x(i) = ((rng() >> 11) * 0x1p-53) * 2.0 - 1.0;
        const auto res = ricq::key_inequality_check(x, q);
        if (!res.holds) ++violations;
        min_margin = std::min(min_margin, res.rhs - res.lhs);
      }
      std::cout << "samples: " << l3_samples << "  violations: " << violations
                << "  min margin: " << ricq::format_g17(min_margin) << "\n";
      return violations == 0 ? kExitOk : kExitInconclusive;
    }

    if (mg->parsed()) {
      const auto res = ricq::max_gap(mg_n, mg_q);
      std::cout << "r_star: " << ricq::format_g17(res.r_star)
                << "  value: " << ricq::format_g17(res.value) << "\n";
      return kExitOk;
    }

    if (ric->parsed()) {
      const ricq::SensingMatrix phi = load_or_generate(ric_matrix, ric_m, ric_n, ric_gen,
                                                       ric_seed);
      const ricq::RicEstimate est =
          ric_samples > 0 ? ricq::ric_monte_carlo(phi, ric_k, ric_samples, ric_seed)
                          : ricq::ric_exact(phi, ric_k);
      std::cout << "{\"k\": " << est.k << ", \"value\": " << ricq::format_g17(est.value)
                << ", \"method\": \""
                << (est.method == ricq::RicMethod::ExactEnumeration ? "exact-enumeration"
                                                                    : "monte-carlo")
                << "\", \"is_lower_bound\": " << (est.is_lower_bound ? "true" : "false")
                << "}\n";
      return kExitOk;
    }

    if (rec->parsed()) {
      const ricq::SensingMatrix phi = load_or_generate(rec_matrix, rec_m, rec_n, rec_gen,
                                                       rec_seed);
      Eigen::VectorXd b;
      if (!rec_rhs.empty())
        b = parse_vector(rec_rhs);
      else if (!rec_rhs_file.empty())
        b = load_vector_file(rec_rhs_file);
      else {
        std::cerr << "recover: provide --rhs or --rhs-file\n";
        return kExitUsage;
      }
      const ricq::RecoveryResult res = ricq::irls_lq(phi, b, rec_q);
      std::cout << "{\"residual\": " << ricq::format_g17(res.residual)
                << ", \"iterations\": " << res.iterations
                << ", \"converged\": " << (res.converged ? "true" : "false")
                << ", \"support\": [";
      for (std::size_t i = 0; i < res.support.size(); ++i)
        std::cout << (i ? "," : "") << res.support[i];
      std::cout << "], \"x_hat\": [";
      for (Eigen::Index i = 0; i < res.x_hat.size(); ++i)
        std::cout << (i ? "," : "") << ricq::format_g17(res.x_hat(i));
      std::cout << "]}\n";
      return kExitOk;
    }

    if (nsp->parsed()) {
      const ricq::SensingMatrix phi = load_or_generate(nsp_matrix, nsp_m, nsp_n, nsp_gen,
                                                       nsp_seed);
      const auto res = ricq::nsp_check(phi, parse_index_list(nsp_support), nsp_q,
                                       nsp_samples, nsp_seed);
      std::cout << "{\"max_tau_found\": " << ricq::format_g17(res.max_tau_found)
                << ", \"holds_probably\": " << (res.holds_probably ? "true" : "false")
                << ", \"exact\": " << (res.exact ? "true" : "false") << "}\n";
      return kExitOk;
    }

    if (exp->parsed()) {
      if (exp_kfrom < 1 || exp_kto < exp_kfrom) {
        std::cerr << "experiment: need 1 <= k-from <= k-to\n";
        return kExitUsage;
      }
      std::vector<int> ks;
      for (int k = exp_kfrom; k <= exp_kto; ++k) ks.push_back(k);
      const auto table = ricq::phase_transition(exp_m, exp_n, ks,
                                                parse_double_list(exp_qlist), exp_trials,
                                                exp_seed, exp_workers);
      const std::string csv = ricq::experiment_csv(table);
      if (exp_out.empty())
        std::cout << csv;
      else
        ricq::write_text_file(exp_out, csv);
      return kExitOk;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
