#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ricq/core.hpp"
#include "ricq/recovery.hpp"

using namespace ricq;

namespace {

SensingMatrix from_entries(const Eigen::MatrixXd& entries) {
  SensingMatrix phi;
  phi.entries = entries;
  phi.gen = {MatrixGenKind::File, 0};
  return phi;
}

// smallest support (size <= s_max) that reproduces b, by full enumeration
struct L0Oracle {
  std::vector<int> support;
  Eigen::VectorXd solution;
  bool found = false;
};

L0Oracle l0_search(const SensingMatrix& phi, const Eigen::VectorXd& b, int s_max) {
  const Eigen::Index n = phi.cols();
  const double tol = 1e-8 * std::max(b.norm(), 1e-300);
  L0Oracle oracle;
  for (int s = 1; s <= s_max && !oracle.found; ++s) {
    std::vector<int> subset(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) subset[static_cast<std::size_t>(i)] = i;
    while (true) {
      Eigen::MatrixXd cols(phi.rows(), s);
      for (int j = 0; j < s; ++j) cols.col(j) = phi.entries.col(subset[static_cast<std::size_t>(j)]);
      const Eigen::VectorXd z = cols.colPivHouseholderQr().solve(b);
      if ((cols * z - b).norm() <= tol) {
        oracle.found = true;
        oracle.support = subset;
        oracle.solution = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < s; ++j) oracle.solution(subset[static_cast<std::size_t>(j)]) = z(j);
        break;
      }
      int i = s - 1;
      while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - s + i) --i;
      if (i < 0) break;
      ++subset[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < s; ++j)
        subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return oracle;
}

}  // namespace

TEST_CASE("matrix generation is seeded and reproducible") {
  const SensingMatrix a = generate_matrix(4, 8, MatrixGenKind::Gaussian, 42);
  const SensingMatrix b = generate_matrix(4, 8, MatrixGenKind::Gaussian, 42);
  CHECK(a.entries == b.entries);
  const SensingMatrix c = generate_matrix(4, 8, MatrixGenKind::Gaussian, 43);
  CHECK(a.entries != c.entries);
  CHECK_THROWS_AS(generate_matrix(8, 4, MatrixGenKind::Gaussian, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_matrix(4, 4, MatrixGenKind::Gaussian, 1), std::invalid_argument);

  const SensingMatrix bern = generate_matrix(16, 32, MatrixGenKind::Bernoulli, 7);
  const double scale = 1.0 / std::sqrt(16.0);
  for (Eigen::Index i = 0; i < bern.rows(); ++i)
    for (Eigen::Index j = 0; j < bern.cols(); ++j)
      CHECK(std::abs(std::abs(bern.entries(i, j)) - scale) < 1e-15);
}

TEST_CASE("gaussian column norms concentrate near one") {
  const SensingMatrix phi = generate_matrix(64, 128, MatrixGenKind::Gaussian, 5);
  double mean = 0.0;
  for (Eigen::Index j = 0; j < phi.cols(); ++j) mean += phi.entries.col(j).norm();
  mean /= static_cast<double>(phi.cols());
  CHECK(mean > 0.8);
  CHECK(mean < 1.2);
}

TEST_CASE("exact isometry constant on hand-checked matrices") {
  const SensingMatrix eye = from_entries(Eigen::MatrixXd::Identity(2, 2));
  CHECK(ric_exact(eye, 1).value == 0.0);
  CHECK(ric_exact(eye, 2).value == 0.0);
  CHECK_FALSE(ric_exact(eye, 1).is_lower_bound);

  Eigen::MatrixXd row(1, 2);
  row << 1.0, 1.0;  // Gram eigenvalues {0, 2}
  const RicEstimate est = ric_exact(from_entries(row), 2);
  CHECK(std::abs(est.value - 1.0) < 1e-12);

  CHECK_THROWS_AS(ric_exact(eye, 3), std::invalid_argument);
  const SensingMatrix wide = generate_matrix(10, 60, MatrixGenKind::Gaussian, 3);
  CHECK_THROWS_WITH_AS(ric_exact(wide, 30), doctest::Contains("ric_monte_carlo"),
                       std::invalid_argument);
}

TEST_CASE("isometry constant is nondecreasing in the sparsity level") {
  std::mt19937_64 seed_gen(77);
  for (int trial = 0; trial < 5; ++trial) {
    const SensingMatrix phi = generate_matrix(6, 12, MatrixGenKind::Gaussian, seed_gen());
    double prev = 0.0;
    for (int k = 1; k <= 3; ++k) {
      const double cur = ric_exact(phi, k).value;
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("monte-carlo estimate is a lower bound and saturates tiny instances") {
  std::mt19937_64 seed_gen(78);
  for (int trial = 0; trial < 10; ++trial) {
    const SensingMatrix phi = generate_matrix(6, 12, MatrixGenKind::Gaussian, seed_gen());
    for (int k = 1; k <= 3; ++k) {
      const RicEstimate mc = ric_monte_carlo(phi, k, 200, 99, 2);
      const RicEstimate exact = ric_exact(phi, k);
      CHECK(mc.is_lower_bound);
      CHECK(mc.value <= exact.value + 1e-12);
    }
  }
  // enough samples to visit all C(5,2) = 10 subsets of a tiny instance
  const SensingMatrix tiny = generate_matrix(4, 5, MatrixGenKind::Gaussian, 11);
  CHECK(std::abs(ric_monte_carlo(tiny, 2, 2000, 1).value - ric_exact(tiny, 2).value) < 1e-12);

  const SensingMatrix eye = from_entries(Eigen::MatrixXd::Identity(3, 3));
  CHECK(ric_monte_carlo(eye, 2, 50, 1).value == 0.0);
  CHECK_THROWS_AS(ric_monte_carlo(tiny, 9, 10, 1), std::invalid_argument);
}

TEST_CASE("subset deltas grow along nested subset chains") {
  const SensingMatrix phi = generate_matrix(8, 16, MatrixGenKind::Gaussian, 21);
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> chain;
    std::vector<bool> used(16, false);
    double prev = 0.0;
    for (int k = 1; k <= 4; ++k) {
      int next = static_cast<int>(rng() % 16);
      while (used[static_cast<std::size_t>(next)]) next = static_cast<int>(rng() % 16);
      used[static_cast<std::size_t>(next)] = true;
      chain.push_back(next);
      std::vector<int> sorted = chain;
      std::sort(sorted.begin(), sorted.end());
      const double cur = subset_delta(phi, sorted);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("irls drives the redundant coordinate to zero") {
  Eigen::MatrixXd entries(2, 3);
  entries << 1, 0, 0, 0, 1, 0;
  Eigen::VectorXd b(2);
  b << 1, 0;
  const RecoveryResult res = irls_lq(from_entries(entries), b, 0.5);
  CHECK(std::abs(res.x_hat(0) - 1.0) < 1e-9);
  CHECK(std::abs(res.x_hat(1)) < 1e-9);
  CHECK(std::abs(res.x_hat(2)) < 1e-9);
  CHECK(res.support == std::vector<int>{0});
  CHECK(res.residual <= 1e-8);
  CHECK(res.converged);
}

TEST_CASE("irls rejects infeasible right-hand sides") {
  Eigen::MatrixXd entries(2, 3);
  entries << 1, 1, 0, 1, 1, 0;  // rank one; third column padded below
  entries(0, 2) = 1;
  entries(1, 2) = 1;
  Eigen::VectorXd b(2);
  b << 1, 2;  // not proportional to (1, 1)
  CHECK_THROWS_AS(irls_lq(from_entries(entries), b, 0.5), std::invalid_argument);
}

TEST_CASE("irls recovers sparse signals and matches the enumeration oracle") {
  const SensingMatrix phi = generate_matrix(20, 40, MatrixGenKind::Gaussian, 7);
  std::mt19937_64 rng(7001);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x_true = Eigen::VectorXd::Zero(40);
    std::vector<int> support;
    while (support.size() < 3) {
      const int idx = static_cast<int>(rng() % 40);
      if (std::find(support.begin(), support.end(), idx) == support.end()) {
        support.push_back(idx);
        x_true(idx) = ((rng() >> 11) * 0x1p-53) * 2.0 - 1.0 + 0.5;  // bounded away from 0
      }
    }
    const Eigen::VectorXd b = phi.entries * x_true;
    const RecoveryResult rec = irls_lq(phi, b, 0.5);
    CHECK((rec.x_hat - x_true).norm() <= 1e-6 * x_true.norm());

    const L0Oracle oracle = l0_search(phi, b, 3);
    REQUIRE(oracle.found);
    CHECK((oracle.solution - x_true).norm() <= 1e-6 * x_true.norm());
    std::vector<int> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    CHECK(oracle.support == sorted);
    CHECK(rec.support == sorted);

    // the l1 route agrees whenever its solution is as sparse as the oracle's
    const RecoveryResult rec1 = irls_lq(phi, b, 1.0);
    if (rec1.support.size() <= 3) CHECK((rec1.x_hat - x_true).norm() <= 1e-5 * x_true.norm());
  }
}

TEST_CASE("irls objective is nonincreasing across stages") {
  const SensingMatrix phi = generate_matrix(12, 30, MatrixGenKind::Gaussian, 19);
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x_true = Eigen::VectorXd::Zero(30);
    for (int s = 0; s < 4; ++s) x_true(static_cast<int>(rng() % 30)) = 1.0 + (rng() % 5);
    const Eigen::VectorXd b = phi.entries * x_true;
    const RecoveryResult rec = irls_lq(phi, b, 0.5);
    for (std::size_t i = 1; i < rec.stage_objectives.size(); ++i)
      CHECK(rec.stage_objectives[i] <=
            rec.stage_objectives[i - 1] * (1.0 + 1e-9) + 1e-9);
    CHECK(rec.residual <= 1e-8 * b.norm());
  }
}

TEST_CASE("null space basis: line, random wide matrix, duplicated row") {
  Eigen::MatrixXd row(1, 2);
  row << 1.0, 1.0;
  const NullSpaceBasis line = null_space_basis(from_entries(row));
  REQUIRE(line.dimension() == 1);
  CHECK(std::abs(std::abs(line.basis(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(line.basis(0, 0) + line.basis(1, 0)) < 1e-12);

  const SensingMatrix wide = generate_matrix(4, 8, MatrixGenKind::Gaussian, 31);
  const NullSpaceBasis nsb = null_space_basis(wide);
  CHECK(nsb.dimension() == 4);
  for (Eigen::Index j = 0; j < nsb.dimension(); ++j) {
    CHECK((wide.entries * nsb.basis.col(j)).norm() <= 1e-10);
    CHECK(std::abs(nsb.basis.col(j).norm() - 1.0) < 1e-12);
  }

  Eigen::MatrixXd dup(3, 6);
  dup.setRandom();
  dup.row(2) = dup.row(0);
  CHECK(null_space_basis(from_entries(dup)).dimension() == 4);  // n - (m-1)
}

TEST_CASE("tau ratio on hand-checked vectors") {
  Eigen::VectorXd h(3);
  h << 2, 1, 1;
  const TauStats a = tau_ratio(h, {0}, 1.0);
  CHECK(std::abs(a.tau - 1.0) < 1e-12);

  Eigen::VectorXd pm(2);
  pm << 1, -1;
  CHECK(std::abs(tau_ratio(pm, {0}, 0.5).tau - 1.0) < 1e-12);

  Eigen::VectorXd three(3);
  three << 0.5, 1.0, 0.3;
  const TauStats b = tau_ratio(three, {0}, 1.0);
  REQUIRE(b.partition.blocks.size() == 3);
  CHECK(b.partition.blocks[1] == std::vector<int>{1});
  CHECK(b.partition.blocks[2] == std::vector<int>{2});
  CHECK(std::abs(b.t_ratio - 1.0 / 1.3) < 1e-5);
  CHECK(b.t_ratio > 0.0);
  CHECK(b.t_ratio <= 1.0);

  // scale invariance
  const TauStats scaled = tau_ratio(3.7 * three, {0}, 0.6);
  CHECK(std::abs(scaled.tau - tau_ratio(three, {0}, 0.6).tau) < 1e-12);

  Eigen::VectorXd on_support(3);
  on_support << 1, 0, 0;
  CHECK_THROWS_AS(tau_ratio(on_support, {0}, 0.5), std::domain_error);
}

TEST_CASE("nsp check: exact verdicts on small null spaces") {
  Eigen::MatrixXd row(1, 2);
  row << 1.0, 1.0;
  const NspCheckResult res = nsp_check(from_entries(row), {0}, 1.0, 100, 1);
  CHECK(res.exact);
  CHECK(std::abs(res.max_tau_found - 1.0) < 1e-12);
  CHECK_FALSE(res.holds_probably);  // b = 1 has two 1-sparse solutions

  Eigen::MatrixXd tall(3, 2);
  tall << 1, 0, 0, 1, 1, 1;
  const NspCheckResult vac = nsp_check(from_entries(tall), {0}, 0.5, 100, 1);
  CHECK(vac.exact);
  CHECK(vac.max_tau_found == 0.0);
  CHECK(vac.holds_probably);
}

TEST_CASE("nsp sampling agrees with recovery on a healthy instance") {
  const SensingMatrix phi = generate_matrix(20, 40, MatrixGenKind::Gaussian, 91);
  const std::vector<int> t0 = {3, 17};
  const NspCheckResult res = nsp_check(phi, t0, 0.5, 10000, 5);
  CHECK(res.holds_probably);
  CHECK(res.max_tau_found < 1.0);

  std::mt19937_64 rng(92);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x_true = Eigen::VectorXd::Zero(40);
    for (int idx : t0) x_true(idx) = ((rng() >> 11) * 0x1p-53) + 0.5;
    const Eigen::VectorXd b = phi.entries * x_true;
    const RecoveryResult rec = irls_lq(phi, b, 0.5);
    CHECK((rec.x_hat - x_true).norm() <= 1e-6 * x_true.norm());
  }
}

TEST_CASE("block bound audit never flags the deterministic inequalities") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 30);
    const int k = 1 + static_cast<int>(rng() % 4);
    const double q = 0.05 + 0.9 * ((rng() >> 11) * 0x1p-53);
    Eigen::VectorXd h(n);
    for (int i = 0; i < n; ++i) h(i) = 2.0 * ((rng() >> 11) * 0x1p-53) - 1.0;
    std::vector<int> t0;
    const int support = 1 + static_cast<int>(rng() % k);
    while (static_cast<int>(t0.size()) < support) {
      const int idx = static_cast<int>(rng() % n);
      if (std::find(t0.begin(), t0.end(), idx) == t0.end()) t0.push_back(idx);
    }
    const BlockBoundReport report = block_bound_audit(h, t0, k, q);
    for (const auto& entry : report.entries) {
      if (entry.applicable) CHECK(entry.holds);
    }
    CHECK_FALSE(report.any_flagged);
  }
}

TEST_CASE("block bound audit: empty tail is trivially satisfied") {
  Eigen::VectorXd h(4);
  h << 1.0, 0.5, 0.0, 0.0;  // only T0 = {0} and T1 = {1} carry mass
  const BlockBoundReport report = block_bound_audit(h, {0}, 1, 0.5);
  CHECK(report.entries[0].lhs == 0.0);
  CHECK_FALSE(report.any_flagged);
}

TEST_CASE("block bound audit with an exact isometry estimate on null vectors") {
  std::mt19937_64 seed_gen(43);
  for (int trial = 0; trial < 5; ++trial) {
    const SensingMatrix phi = generate_matrix(8, 12, MatrixGenKind::Gaussian, seed_gen());
    const int k = 2;
    const double delta2k = ric_exact(phi, 2 * k).value;
    const NullSpaceBasis nsb = null_space_basis(phi);
    REQUIRE(nsb.dimension() > 0);
    const Eigen::VectorXd h = nsb.basis.col(0);
    const BlockBoundReport report = block_bound_audit(h, {0, 1}, k, 0.5, delta2k, &phi);
    bool saw_isometry = false;
    for (const auto& entry : report.entries) {
      if (entry.name == "gram_upper" || entry.name == "isometry_lower") {
        CHECK(entry.applicable);
        CHECK(entry.holds);
        saw_isometry = true;
      }
    }
    CHECK(saw_isometry);
    CHECK_FALSE(report.any_flagged);
  }
}

TEST_CASE("phase transition: easy and hard regimes, determinism") {
  const auto easy = phase_transition(32, 64, {1}, {0.5}, 20, 1000, 2);
  REQUIRE(easy.size() == 1);
  CHECK(easy[0].success_count == easy[0].trials);

  const auto hard = phase_transition(8, 16, {8}, {0.5}, 10, 1000, 2);
  CHECK(hard[0].success_count < hard[0].trials / 2);

  const auto again = phase_transition(32, 64, {1}, {0.5}, 20, 1000, 4);
  CHECK(again[0].success_count == easy[0].success_count);
}
