#include "ricq/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "ricq/certify.hpp"
#include "ricq/core.hpp"

namespace ricq {

namespace {

constexpr std::uint64_t kSignalSeedSalt = 0x9e3779b97f4a7c15ULL;

// 53-bit uniform in (0, 1]; the +1 keeps log() finite.
double uniform_53(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
}

// Box-Muller on explicit uniforms; two draws per normal keeps the stream
// layout platform-independent.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = uniform_53(rng);
  const double u2 = uniform_53(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void validate_support(const std::vector<int>& t0, Eigen::Index n, const char* who) {
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int idx : t0) {
    if (idx < 0 || idx >= n)
      throw std::invalid_argument(std::string(who) + ": support index out of range");
    if (seen[static_cast<std::size_t>(idx)])
      throw std::invalid_argument(std::string(who) + ": duplicate support index");
    seen[static_cast<std::size_t>(idx)] = true;
  }
}

std::uint64_t binomial_capped(Eigen::Index n, int k, std::uint64_t cap) {
  if (k > n) return 0;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const double projected = static_cast<double>(result) * (n - k + i) / i;
    if (projected > 2.0 * static_cast<double>(cap)) return cap + 1;
    result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    if (result > cap) return cap + 1;
  }
  return result;
}

std::vector<int> random_subset(Eigen::Index n, int k, std::mt19937_64& rng) {
  // partial Fisher-Yates, then sorted for a canonical form
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const std::uint64_t j = i + rng() % static_cast<std::uint64_t>(n - i);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  std::vector<int> out(idx.begin(), idx.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

double quasi_pow_block(const Eigen::VectorXd& h, const std::vector<int>& block, double q) {
  double s = 0.0;
  for (int i : block) s += std::pow(std::abs(h(i)), q);
  return s;
}

double sumsq_block(const Eigen::VectorXd& h, const std::vector<int>& block) {
  double s = 0.0;
  for (int i : block) s += h(i) * h(i);
  return s;
}

Eigen::VectorXd gather(const Eigen::VectorXd& h, const std::vector<int>& block,
                       Eigen::Index n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i : block) out(i) = h(i);
  return out;
}

void parallel_chunks(long count, int workers,
                     const std::function<void(int, long, long)>& body) {
  const int used = static_cast<int>(std::min<long>(std::max(1, workers), std::max(1L, count)));
  if (used == 1) {
    body(0, 0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(used));
  for (int i = 0; i < used; ++i)
    pool.emplace_back(body, i, count * i / used, count * (i + 1) / used);
  for (auto& th : pool) th.join();
}

}  // namespace

SensingMatrix generate_matrix(Eigen::Index m, Eigen::Index n, MatrixGenKind kind,
                              std::uint64_t seed) {
  if (!(m > 0 && m < n))
    throw std::invalid_argument("generate_matrix: need 0 < m < n");
  if (kind == MatrixGenKind::File)
    throw std::invalid_argument("generate_matrix: File is not a generator");
  SensingMatrix phi;
  phi.gen = {kind, seed};
  phi.entries.resize(m, n);
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      phi.entries(i, j) = kind == MatrixGenKind::Gaussian
                              ? standard_normal(rng) * scale
                              : ((rng() >> 63) ? scale : -scale);
  return phi;
}

SupportPartition build_support_partition(const Eigen::VectorXd& h,
                                         const std::vector<int>& t0, int k) {
  if (k < 1) throw std::invalid_argument("build_support_partition: k must be >= 1");
  validate_support(t0, h.size(), "build_support_partition");
  SupportPartition part;
  part.k = k;
  std::vector<int> sorted_t0 = t0;
  std::sort(sorted_t0.begin(), sorted_t0.end());
  part.blocks.push_back(sorted_t0);
  std::vector<bool> in_t0(static_cast<std::size_t>(h.size()), false);
  for (int i : t0) in_t0[static_cast<std::size_t>(i)] = true;
  std::vector<int> rest;
  for (int i = 0; i < h.size(); ++i)
    if (!in_t0[static_cast<std::size_t>(i)]) rest.push_back(i);
  std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
    return std::abs(h(a)) > std::abs(h(b));
  });
  for (std::size_t pos = 0; pos < rest.size(); pos += static_cast<std::size_t>(k))
    part.blocks.emplace_back(rest.begin() + pos,
                             rest.begin() + std::min(pos + k, rest.size()));
  return part;
}

double subset_delta(const SensingMatrix& phi, const std::vector<int>& subset) {
  const int k = static_cast<int>(subset.size());
  Eigen::MatrixXd cols(phi.rows(), k);
  for (int j = 0; j < k; ++j) cols.col(j) = phi.entries.col(subset[static_cast<std::size_t>(j)]);
  const Eigen::MatrixXd gram = cols.transpose() * cols;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  return std::max(hi - 1.0, 1.0 - lo);
}

RicEstimate ric_exact(const SensingMatrix& phi, int k, std::uint64_t enumeration_cap) {
  const Eigen::Index n = phi.cols();
  if (k < 1 || k > n) throw std::invalid_argument("ric_exact: k out of range");
  if (binomial_capped(n, k, enumeration_cap) > enumeration_cap)
    throw std::invalid_argument(
        "ric_exact: C(n, k) exceeds the enumeration cap; use ric_monte_carlo for a "
        "sampled lower bound");
  std::vector<int> subset(static_cast<std::size_t>(k));
  std::iota(subset.begin(), subset.end(), 0);
  double best = 0.0;
  while (true) {
    best = std::max(best, subset_delta(phi, subset));
    // next lexicographic combination
    int i = k - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++subset[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  RicEstimate est;
  est.k = k;
  est.value = best;
  est.method = RicMethod::ExactEnumeration;
  est.is_lower_bound = false;
  return est;
}

RicEstimate ric_monte_carlo(const SensingMatrix& phi, int k, long samples,
                            std::uint64_t seed, int workers) {
  const Eigen::Index n = phi.cols();
  if (k < 1 || k > n) throw std::invalid_argument("ric_monte_carlo: k out of range");
  if (samples < 1) throw std::invalid_argument("ric_monte_carlo: samples must be >= 1");
  const int used = std::max(1, workers > 0 ? workers : resolve_workers(0));
  std::vector<double> per_chunk(static_cast<std::size_t>(used), 0.0);
  parallel_chunks(samples, used, [&](int chunk, long lo, long hi) {
    double best = 0.0;
    for (long s = lo; s < hi; ++s) {
      std::mt19937_64 rng(seed + static_cast<std::uint64_t>(s));
      best = std::max(best, subset_delta(phi, random_subset(n, k, rng)));
    }
    per_chunk[static_cast<std::size_t>(chunk)] = best;
  });
  RicEstimate est;
  est.k = k;
  est.value = *std::max_element(per_chunk.begin(), per_chunk.end());
  est.method = RicMethod::MonteCarlo;
  est.samples = samples;
  est.seed = seed;
  est.is_lower_bound = true;
  return est;
}

RecoveryResult irls_lq(const SensingMatrix& phi, const Eigen::VectorXd& b, double q,
                       const IrlsOptions& opts) {
  require_q_half_open(q, "irls_lq");
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  if (b.size() != m) throw std::invalid_argument("irls_lq: dimension mismatch");

  // feasibility gate and minimum-norm start
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(phi.entries);
  Eigen::VectorXd x = cod.solve(b);
  const double bnorm = b.norm();
  const double feas_tol = opts.feas_tol_rel * std::max(bnorm, 1e-300);
  if ((phi.entries * x - b).norm() > feas_tol)
    throw std::invalid_argument("irls_lq: b is not in the range of Phi (least-squares "
                                "residual above tolerance)");

  RecoveryResult result;
  int iterations = 0;
  bool last_stage_settled = false;
  double eps = opts.eps_start;
  Eigen::VectorXd weights_inv(n);
  while (true) {
    double smoothed_prev = std::numeric_limits<double>::infinity();
    bool settled = false;
    for (int it = 0; it < opts.max_inner; ++it) {
      ++iterations;
      for (Eigen::Index i = 0; i < n; ++i)
        weights_inv(i) = std::pow(x(i) * x(i) + eps, 1.0 - 0.5 * q);
      const Eigen::MatrixXd gram =
          phi.entries * weights_inv.asDiagonal() * phi.entries.transpose();
      Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
      Eigen::VectorXd y = ldlt.solve(b);
      if (!y.allFinite()) y = Eigen::FullPivLU<Eigen::MatrixXd>(gram).solve(b);
      const Eigen::VectorXd x_new = weights_inv.asDiagonal() * (phi.entries.transpose() * y);
      double smoothed = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        smoothed += std::pow(x_new(i) * x_new(i) + eps, 0.5 * q);
      if (smoothed > smoothed_prev * (1.0 + 1e-12)) {
        settled = true;  // the surrogate stopped descending; move to the next stage
        break;
      }
      smoothed_prev = smoothed;
      const double rel = (x_new - x).norm() / std::max(x.norm(), 1e-300);
      x = x_new;
      if (rel < opts.stage_rel_tol) {
        settled = true;
        break;
      }
    }
    result.stage_objectives.push_back(quasi_norm_pow(x, q));
    if (eps <= opts.eps_floor) {
      last_stage_settled = settled;
      break;
    }
    eps = std::max(eps / opts.eps_shrink, opts.eps_floor);
  }

  const double threshold = opts.support_rel * x.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(x(i)) > threshold) result.support.push_back(static_cast<int>(i));

  // Least-squares refit on the detected support.  The eps floor leaves the
  // off-support coordinates at the eps^(1-q/2) level; the refit removes that
  // bias whenever it stays feasible and does not raise the objective.
  if (opts.debias && !result.support.empty() &&
      static_cast<Eigen::Index>(result.support.size()) <= m) {
    Eigen::MatrixXd cols(m, static_cast<Eigen::Index>(result.support.size()));
    for (std::size_t j = 0; j < result.support.size(); ++j)
      cols.col(static_cast<Eigen::Index>(j)) = phi.entries.col(result.support[j]);
    const Eigen::VectorXd z = cols.colPivHouseholderQr().solve(b);
    if ((cols * z - b).norm() <= feas_tol) {
      Eigen::VectorXd refit = Eigen::VectorXd::Zero(n);
      for (std::size_t j = 0; j < result.support.size(); ++j)
        refit(result.support[j]) = z(static_cast<Eigen::Index>(j));
      if (quasi_norm_pow(refit, q) <= quasi_norm_pow(x, q) * (1.0 + 1e-12)) {
        x = refit;
        result.stage_objectives.push_back(quasi_norm_pow(x, q));
      }
    }
  }

  result.x_hat = x;
  result.residual = (phi.entries * x - b).norm();
  result.iterations = iterations;
  result.converged = last_stage_settled && result.residual <= feas_tol;
  return result;
}

NullSpaceBasis null_space_basis(const SensingMatrix& phi) {
  const Eigen::Index n = phi.cols();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi.entries, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = std::max(phi.rows(), n) * (sv.size() > 0 ? sv(0) : 0.0) *
                     std::numeric_limits<double>::epsilon();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  NullSpaceBasis basis;
  basis.basis = svd.matrixV().rightCols(n - rank);
  return basis;
}

TauStats tau_ratio(const Eigen::VectorXd& h, const std::vector<int>& t0, double q) {
  require_q_half_open(q, "tau_ratio");
  validate_support(t0, h.size(), "tau_ratio");
  if (t0.empty()) throw std::invalid_argument("tau_ratio: empty support");
  TauStats stats;
  stats.partition = build_support_partition(h, t0, static_cast<int>(t0.size()));
  double off_support = 0.0;
  for (std::size_t bi = 1; bi < stats.partition.blocks.size(); ++bi)
    off_support += quasi_pow_block(h, stats.partition.blocks[bi], q);
  if (off_support == 0.0)
    throw std::domain_error(
        "tau_ratio: h vanishes off the support; such null vectors are excluded by the "
        "refined null-space property");
  const double on_support = quasi_pow_block(h, stats.partition.blocks[0], q);
  stats.tau = std::pow(on_support / off_support, 1.0 / q);
  stats.t_ratio = stats.partition.blocks.size() > 1
                      ? quasi_pow_block(h, stats.partition.blocks[1], q) / off_support
                      : 0.0;
  return stats;
}

NspCheckResult nsp_check(const SensingMatrix& phi, const std::vector<int>& t0, double q,
                         long samples, std::uint64_t seed) {
  require_q_half_open(q, "nsp_check");
  validate_support(t0, phi.cols(), "nsp_check");
  const NullSpaceBasis nsb = null_space_basis(phi);
  const Eigen::Index d = nsb.dimension();
  NspCheckResult result;
  if (d == 0) {
    result.max_tau_found = 0.0;
    result.holds_probably = true;
    result.exact = true;  // vacuous: no nonzero null vectors
    return result;
  }

  const auto tau_of_coeffs = [&](const Eigen::VectorXd& c) -> double {
    const Eigen::VectorXd h = nsb.basis * c;
    try {
      return tau_ratio(h, t0, q).tau;
    } catch (const std::domain_error&) {
      return 0.0;  // h vanishes off support: excluded direction
    }
  };

  // tau is scale (and sign) invariant, so for a one-dimensional null space
  // the single basis direction is exhaustive.
  if (d == 1) {
    result.max_tau_found = tau_of_coeffs(Eigen::VectorXd::Ones(1));
    result.holds_probably = result.max_tau_found < 1.0;
    result.exact = true;
    return result;
  }

  double best = 0.0;
  Eigen::VectorXd best_c = Eigen::VectorXd::Unit(d, 0);
  const auto consider = [&](const Eigen::VectorXd& c) {
    const double tau = tau_of_coeffs(c);
    if (tau > best) {
      best = tau;
      best_c = c;
    }
  };
  for (Eigen::Index j = 0; j < d; ++j) consider(Eigen::VectorXd::Unit(d, j));
  std::mt19937_64 rng(seed);
  for (long s = 0; s < samples; ++s) {
    Eigen::VectorXd c(d);
    for (Eigen::Index i = 0; i < d; ++i) c(i) = standard_normal(rng);
    const double norm = c.norm();
    if (norm > 0.0) consider(c / norm);
  }
  // local refinement of the worst direction
  for (double step : {0.3, 0.1, 0.03, 0.01, 0.003}) {
    for (int iter = 0; iter < 60; ++iter) {
      Eigen::VectorXd c(d);
      for (Eigen::Index i = 0; i < d; ++i) c(i) = standard_normal(rng);
      Eigen::VectorXd candidate = best_c + step * c;
      const double norm = candidate.norm();
      if (norm > 0.0) consider(candidate / norm);
    }
  }
  result.max_tau_found = best;
  result.holds_probably = best < 1.0;
  result.exact = false;
  return result;
}

BlockBoundReport block_bound_audit(const Eigen::VectorXd& h, const std::vector<int>& t0,
                                   int k, double q, std::optional<double> delta_estimate,
                                   const SensingMatrix* phi) {
  require_q_open(q, "block_bound_audit");
  if (static_cast<int>(t0.size()) > k)
    throw std::invalid_argument("block_bound_audit: |T0| exceeds the block size");
  const SupportPartition part = build_support_partition(h, t0, k);
  double sum_q = 0.0;
  for (std::size_t bi = 1; bi < part.blocks.size(); ++bi)
    sum_q += quasi_pow_block(h, part.blocks[bi], q);
  if (sum_q == 0.0)
    throw std::domain_error("block_bound_audit: h vanishes off the support");

  const double t = quasi_pow_block(h, part.blocks[1], q) / sum_q;
  const double p = pq(q);
  const double kd = static_cast<double>(k);
  const double u = std::pow(t, 1.0 / q);

  double tail_sq = 0.0, tail_norm = 0.0;
  for (std::size_t bi = 2; bi < part.blocks.size(); ++bi) {
    const double ssq = sumsq_block(h, part.blocks[bi]);
    tail_sq += ssq;
    tail_norm += std::sqrt(ssq);
  }

  BlockBoundReport report;
  const auto push = [&](const char* name, double lhs, double rhs, bool lhs_le_rhs,
                        bool applicable) {
    const bool holds = !applicable ||
                       (lhs_le_rhs ? lhs <= rhs * (1.0 + 1e-9) + 1e-12
                                   : lhs * (1.0 + 1e-9) + 1e-12 >= rhs);
    report.entries.push_back({name, lhs, rhs, holds, applicable});
    if (applicable && !holds) report.any_flagged = true;
  };

  push("block_l2sq_sum", tail_sq,
       (1.0 - t) * std::pow(t, (2.0 - q) / q) * std::pow(sum_q, 2.0 / q) /
           std::pow(kd, (2.0 - q) / q),
       true, true);
  push("block_l2_sum", tail_norm,
       (1.0 + (p - 1.0) * u) * std::pow(sum_q, 1.0 / q) / std::pow(kd, 1.0 / q - 0.5), true,
       true);

  const double tau = std::pow(quasi_pow_block(h, part.blocks[0], q) / sum_q, 1.0 / q);
  const double paired_sq = sumsq_block(h, part.blocks[0]) + sumsq_block(h, part.blocks[1]);
  const double shape = (tau * tau + std::pow(t, 2.0 / q)) * std::pow(sum_q, 2.0 / q) /
                       std::pow(kd, 2.0 / q - 1.0);
  push("paired_block_lower", paired_sq, shape, false, true);

  const bool isometry_applicable =
      delta_estimate.has_value() && phi != nullptr &&
      (phi->entries * h).norm() <= 1e-8 * std::max(1.0, h.norm());
  double gram_sq = 0.0;
  if (phi != nullptr) {
    const Eigen::VectorXd paired = gather(h, part.blocks[0], h.size()) +
                                   gather(h, part.blocks[1], h.size());
    gram_sq = (phi->entries * paired).squaredNorm();
  }
  const double delta = delta_estimate.value_or(0.0);
  push("gram_upper", gram_sq,
       ((1.0 - t) * std::pow(t, (2.0 - q) / q) + delta * (1.0 + (p - 1.0) * u) * (1.0 + (p - 1.0) * u)) *
           std::pow(sum_q, 2.0 / q) / std::pow(kd, 2.0 / q - 1.0),
       true, isometry_applicable);
  push("isometry_lower", gram_sq, (1.0 - delta) * shape, false, isometry_applicable);
  return report;
}

std::vector<PhaseTransitionRow> phase_transition(Eigen::Index m, Eigen::Index n,
                                                 const std::vector<int>& k_values,
                                                 const std::vector<double>& q_values,
                                                 long trials, std::uint64_t seed,
                                                 int workers) {
  if (!(m > 0 && m < n)) throw std::invalid_argument("phase_transition: need 0 < m < n");
  if (trials < 1) throw std::invalid_argument("phase_transition: trials must be >= 1");
  for (int k : k_values)
    if (k < 1 || k > n) throw std::invalid_argument("phase_transition: k out of range");
  for (double q : q_values) require_q_half_open(q, "phase_transition");

  std::vector<PhaseTransitionRow> table;
  for (int k : k_values) {
    for (double q : q_values) {
      std::vector<char> success(static_cast<std::size_t>(trials), 0);
      parallel_chunks(trials, resolve_workers(workers), [&](int, long lo, long hi) {
        for (long trial = lo; trial < hi; ++trial) {
          const std::uint64_t base = seed + static_cast<std::uint64_t>(trial);
          const SensingMatrix phi = generate_matrix(m, n, MatrixGenKind::Gaussian, base);
          std::mt19937_64 rng(base ^ kSignalSeedSalt);
          const std::vector<int> support = random_subset(n, k, rng);
          Eigen::VectorXd x_true = Eigen::VectorXd::Zero(n);
          for (int idx : support) x_true(idx) = standard_normal(rng);
          if (x_true.norm() == 0.0) continue;
          const Eigen::VectorXd b = phi.entries * x_true;
          try {
            const RecoveryResult rec = irls_lq(phi, b, q);
            if ((rec.x_hat - x_true).norm() <= 1e-4 * x_true.norm())
              success[static_cast<std::size_t>(trial)] = 1;
          } catch (const std::exception&) {
            // infeasible or solver failure counts as a miss
          }
        }
      });
      PhaseTransitionRow row;
      row.k = k;
      row.q = q;
      row.trials = trials;
      row.success_count = std::count(success.begin(), success.end(), 1);
      table.push_back(row);
    }
  }
  return table;
}

}  // namespace ricq
