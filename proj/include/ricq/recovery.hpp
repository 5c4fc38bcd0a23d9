#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

// Empirical side of the toolkit: sensing-matrix generation, exact and
// Monte-Carlo restricted-isometry estimation, l_q minimization by
// iteratively reweighted least squares, null-space-property checks, block
// bound audits, and phase-transition experiments.

namespace ricq {

enum class MatrixGenKind { Gaussian, Bernoulli, File };

struct MatrixGen {
  MatrixGenKind kind = MatrixGenKind::File;
  std::uint64_t seed = 0;
};

// Dense m x n sensing matrix, m < n, with generation metadata.
struct SensingMatrix {
  Eigen::MatrixXd entries;
  MatrixGen gen;
  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

// gaussian: i.i.d. N(0, 1/m) entries; bernoulli: +-1/sqrt(m) equiprobable.
// Entries are drawn row by row from a mersenne-twister-64 stream seeded with
// `seed` (normals by Box-Muller on 53-bit uniforms), so matrices reproduce
// across platforms up to libm rounding.
SensingMatrix generate_matrix(Eigen::Index m, Eigen::Index n, MatrixGenKind kind,
                              std::uint64_t seed);

// Index sets T0, T1, T2, ... of block size k: T0 is the designated support;
// the remaining indices are sorted by descending magnitude of the given
// vector and chunked k at a time (last block may be short).
struct SupportPartition {
  int k = 0;
  std::vector<std::vector<int>> blocks;
};

SupportPartition build_support_partition(const Eigen::VectorXd& h,
                                         const std::vector<int>& t0, int k);

enum class RicMethod { ExactEnumeration, MonteCarlo };

struct RicEstimate {
  int k = 0;
  double value = 0.0;
  RicMethod method = RicMethod::ExactEnumeration;
  long samples = 0;          // Monte-Carlo only
  std::uint64_t seed = 0;    // Monte-Carlo only
  bool is_lower_bound = false;
};

// max(lambda_max - 1, 1 - lambda_min) of the Gram matrix of the columns S.
double subset_delta(const SensingMatrix& phi, const std::vector<int>& subset);

inline constexpr std::uint64_t kRicEnumerationCap = 2000000;

// Exact delta_k by enumerating all C(n, k) column subsets; refuses (and
// points at ric_monte_carlo) when the subset count exceeds the cap.
RicEstimate ric_exact(const SensingMatrix& phi, int k,
                      std::uint64_t enumeration_cap = kRicEnumerationCap);

// Lower bound on delta_k from `samples` random subsets; per-sample seeds are
// seed + index, so extending the sample count refines the same stream.
RicEstimate ric_monte_carlo(const SensingMatrix& phi, int k, long samples,
                            std::uint64_t seed, int workers = 0);

struct IrlsOptions {
  double eps_start = 1.0;
  double eps_floor = 1e-9;
  double eps_shrink = 10.0;       // divide eps by this between stages
  double stage_rel_tol = 1e-3;    // iterate change that ends a stage
  int max_inner = 200;            // per-stage iteration cap
  double feas_tol_rel = 1e-8;     // ||Phi x - b|| <= tol * ||b|| required
  double support_rel = 1e-6;      // support = entries above support_rel * max|x|
  bool debias = true;             // least-squares refit on the detected support
};

struct RecoveryResult {
  Eigen::VectorXd x_hat;
  double residual = 0.0;
  std::vector<int> support;
  int iterations = 0;
  bool converged = false;
  std::vector<double> stage_objectives;  // ||x||_q^q at each stage end (diagnostic)
};

// l_q minimization subject to Phi x = b by iteratively reweighted least
// squares: x <- argmin sum w_i x_i^2 s.t. Phi x = b with
// w_i = (x_i^2 + eps)^(q/2 - 1), eps decreasing by stages.  The weighted
// subproblem is solved through the m x m dual normal equations.  Throws if
// b is not in the range of Phi.
RecoveryResult irls_lq(const SensingMatrix& phi, const Eigen::VectorXd& b, double q,
                       const IrlsOptions& opts = {});

// Orthonormal basis of Null(Phi) via SVD; d = n - rank columns.
struct NullSpaceBasis {
  Eigen::MatrixXd basis;  // n x d
  Eigen::Index dimension() const { return basis.cols(); }
};

NullSpaceBasis null_space_basis(const SensingMatrix& phi);

struct TauStats {
  double tau = 0.0;      // ||h_T0||_q / ||h_T0c||_q
  double t_ratio = 0.0;  // ||h_T1||_q^q / sum_{i>=1} ||h_Ti||_q^q
  SupportPartition partition;
};

// Defined only for h with nonzero off-support part; the vanishing case is
// excluded by the refined null-space property and reported as an error.
TauStats tau_ratio(const Eigen::VectorXd& h, const std::vector<int>& t0, double q);

struct NspCheckResult {
  double max_tau_found = 0.0;
  bool holds_probably = false;
  bool exact = false;  // true when the null space is a line (or empty)
};

// One-sided probabilistic null-space-property check: samples unit
// coefficient vectors in the null-space basis (coordinate directions first),
// refines the worst by a seeded local search, and reports the largest tau
// found.  A result >= 1 refutes the property; below 1 is evidence only,
// except for null spaces of dimension <= 1 where the check is exhaustive.
NspCheckResult nsp_check(const SensingMatrix& phi, const std::vector<int>& t0, double q,
                         long samples, std::uint64_t seed);

struct BlockBoundEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool applicable = false;
};

struct BlockBoundReport {
  std::vector<BlockBoundEntry> entries;
  bool any_flagged = false;  // some applicable inequality failed
};

// Evaluates both sides of the block estimates on a concrete vector:
//   block_l2sq_sum     sum_{i>=2} ||h_Ti||_2^2 <= (1-t) t^((2-q)/q) S^(2/q) / k^((2-q)/q)
//   block_l2_sum       sum_{i>=2} ||h_Ti||_2  <= (1+(p_q-1)t^(1/q)) S^(1/q) / k^(1/q-1/2)
//   paired_block_lower ||h_T0||^2 + ||h_T1||^2 >= (tau^2 + t^(2/q)) S^(2/q) / k^(2/q-1)
// with S = sum_{i>=1} ||h_Ti||_q^q.  When a matrix and a RIC estimate are
// supplied and h lies in Null(Phi), the two isometry-dependent bounds are
// audited as well; those may flag if the estimate is too small, which is
// informative rather than a failure of the audit.
BlockBoundReport block_bound_audit(const Eigen::VectorXd& h, const std::vector<int>& t0,
                                   int k, double q,
                                   std::optional<double> delta_estimate = std::nullopt,
                                   const SensingMatrix* phi = nullptr);

struct PhaseTransitionRow {
  int k = 0;
  double q = 0.0;
  long success_count = 0;
  long trials = 0;
};

// Success rate of seeded recovery trials: per trial, a fresh gaussian matrix
// (seed + trial) and a k-sparse gaussian signal; success means relative l2
// error <= 1e-4.  Deterministic for a fixed seed, any worker count.
std::vector<PhaseTransitionRow> phase_transition(Eigen::Index m, Eigen::Index n,
                                                 const std::vector<int>& k_values,
                                                 const std::vector<double>& q_values,
                                                 long trials, std::uint64_t seed,
                                                 int workers = 0);

}  // namespace ricq
