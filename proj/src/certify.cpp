#include "ricq/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "ricq/core.hpp"

namespace ricq {

namespace {

constexpr std::uint64_t kNoIndex = std::numeric_limits<std::uint64_t>::max();

struct FloatOps {
  using S = double;
  static S lift(double x) { return x; }
  static S lift_log(double log_value) { return log_value; }
  static double upper(S x) { return x; }
};

struct IntervalOps {
  using S = IntervalScalar;
  static S lift(double x) { return IntervalScalar(x); }
  static S lift_log(double log_value) {
    // log_value is round-to-nearest; the outward nudge restores an enclosure.
    return IntervalScalar::outward(log_value, log_value);
  }
  static double upper(const S& x) { return x.upper(); }
};

std::vector<double> build_axis(double lo, double hi, double step, const char* who) {
  if (!(step > 0.0)) throw std::invalid_argument(std::string(who) + ": step must be > 0");
  if (!(lo <= hi)) throw std::invalid_argument(std::string(who) + ": empty range");
  if (lo == hi) return {lo, hi};
  long n = static_cast<long>(std::ceil((hi - lo) / step - 1e-9));
  if (n < 1) n = 1;
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::min(lo + i * step, hi);
  g.back() = hi;
  return g;
}

struct ScanResult {
  double worst_bound = -std::numeric_limits<double>::infinity();
  std::uint64_t worst_index = kNoIndex;
  Cell worst_cell{};
  std::uint64_t cells = 0;
  std::uint64_t witness_index = kNoIndex;
  Witness witness{};
  std::uint64_t inconclusive_index = kNoIndex;

  void note_leaf(double ub, const Cell& c, std::uint64_t index) {
    if (ub > worst_bound || (ub == worst_bound && index < worst_index)) {
      worst_bound = ub;
      worst_index = index;
      worst_cell = c;
    }
  }

  void merge(const ScanResult& o) {
    cells += o.cells;
    if (o.worst_index != kNoIndex) note_leaf(o.worst_bound, o.worst_cell, o.worst_index);
    if (o.witness_index < witness_index) {
      witness_index = o.witness_index;
      witness = o.witness;
    }
    inconclusive_index = std::min(inconclusive_index, o.inconclusive_index);
  }
};

template <class Ops>
typename Ops::S corner_sum(const Cell& c, double delta) {
  using S = typename Ops::S;
  const S d = Ops::lift(delta);
  const S qlo = Ops::lift(c.q_lo);
  const S qhi = Ops::lift(c.q_hi);
  const S plo = detail::pq_eval(qlo, c.q_lo == 1.0);
  const S phi = detail::pq_eval(qhi, c.q_hi == 1.0);
  const bool zlo = (c.t_lo == 0.0);
  const bool zhi = (c.t_hi == 0.0);
  const S ltlo = zlo ? S(0) : Ops::lift_log(std::log(c.t_lo));
  const S lthi = zhi ? S(0) : Ops::lift_log(std::log(c.t_hi));
  const auto at_lo_lo = detail::r_components_eval(Ops::lift(c.t_lo), ltlo, zlo, qlo, d, plo);
  const auto at_hi_hi = detail::r_components_eval(Ops::lift(c.t_hi), lthi, zhi, qhi, d, phi);
  const auto at_lo_hi = detail::r_components_eval(Ops::lift(c.t_lo), ltlo, zlo, qhi, d, phi);
  return at_lo_lo.r1 + at_hi_hi.r2 + at_lo_hi.r3;
}

template <class Ops>
double corner_bound(const Cell& c, double delta) {
  return Ops::upper(corner_sum<Ops>(c, delta));
}

// Witness probing and adaptive quartering of a cell whose bound reached 1.
// Probe order and recursion order are fixed, so the first witness within a
// top-level cell is deterministic.
template <class Ops>
void handle_failing(const Cell& c, double ub, std::uint64_t index, int level, int budget,
                    double delta, ScanResult& s) {
  const double tm = 0.5 * (c.t_lo + c.t_hi);
  const double qm = 0.5 * (c.q_lo + c.q_hi);
  const double pts[5][2] = {{c.t_lo, c.q_lo}, {c.t_hi, c.q_lo}, {c.t_lo, c.q_hi},
                            {c.t_hi, c.q_hi}, {tm, qm}};
  for (const auto& pt : pts) {
    const double rv = r(pt[0], pt[1], delta);
    if (rv >= 1.0) {
      s.note_leaf(ub, c, index);
      if (index < s.witness_index) {
        s.witness_index = index;
        s.witness = {pt[0], pt[1], rv};
      }
      return;
    }
  }
  if (level >= budget || (c.t_hi - c.t_lo <= 0.0 && c.q_hi - c.q_lo <= 0.0)) {
    s.note_leaf(ub, c, index);
    s.inconclusive_index = std::min(s.inconclusive_index, index);
    return;
  }
  const Cell kids[4] = {{c.t_lo, tm, c.q_lo, qm},
                        {tm, c.t_hi, c.q_lo, qm},
                        {c.t_lo, tm, qm, c.q_hi},
                        {tm, c.t_hi, qm, c.q_hi}};
  for (const Cell& k : kids) {
    const double kb = corner_bound<Ops>(k, delta);
    ++s.cells;
    if (kb < 1.0)
      s.note_leaf(kb, k, index);
    else
      handle_failing<Ops>(k, kb, index, level + 1, budget, delta, s);
  }
}

template <class Ops>
struct ComponentRow {
  std::vector<typename Ops::S> r1, r2, r3;
};

template <class Ops>
void compute_row(const std::vector<double>& ts, const std::vector<double>& lts, double qv,
                 double delta, ComponentRow<Ops>& out) {
  using S = typename Ops::S;
  const S q = Ops::lift(qv);
  const S d = Ops::lift(delta);
  const S p = detail::pq_eval(q, qv == 1.0);
  const std::size_t n = ts.size();
  out.r1.resize(n);
  out.r2.resize(n);
  out.r3.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool z = (ts[i] == 0.0);
    const auto parts = detail::r_components_eval(Ops::lift(ts[i]),
                                                 z ? S(0) : Ops::lift_log(lts[i]), z, q, d, p);
    out.r1[i] = parts.r1;
    out.r2[i] = parts.r2;
    out.r3[i] = parts.r3;
  }
}

// Rows are evaluated once per worker chunk; corner sums reuse them, so each
// corner costs a single exp.  Chunks are merged in index order, which makes
// the result independent of the worker count.
template <class Ops>
ScanResult scan_partition(const PartitionSpec& ps, double delta, int refine_budget,
                          std::uint64_t index_offset, int workers) {
  const std::vector<double> ts = build_axis(ps.t_lo, ps.t_hi, ps.t_step, "verify_region");
  const std::vector<double> qs = build_axis(ps.q_lo, ps.q_hi, ps.q_step, "verify_region");
  const std::size_t nt = ts.size() - 1;
  const std::size_t nq = qs.size() - 1;
  std::vector<double> lts(ts.size(), 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i) lts[i] = ts[i] > 0.0 ? std::log(ts[i]) : 0.0;

  const int nworkers = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(std::max(workers, 1)), nq));
  std::vector<ScanResult> locals(static_cast<std::size_t>(nworkers));

  auto run_chunk = [&](int w) {
    const std::size_t j0 = nq * static_cast<std::size_t>(w) / nworkers;
    const std::size_t j1 = nq * (static_cast<std::size_t>(w) + 1) / nworkers;
    if (j0 >= j1) return;
    ScanResult& local = locals[static_cast<std::size_t>(w)];
    ComponentRow<Ops> row_lo, row_hi;
    compute_row<Ops>(ts, lts, qs[j0], delta, row_lo);
    for (std::size_t j = j0; j < j1; ++j) {
      compute_row<Ops>(ts, lts, qs[j + 1], delta, row_hi);
      for (std::size_t i = 0; i < nt; ++i) {
        const auto bound = row_lo.r1[i] + row_hi.r2[i + 1] + row_hi.r3[i];
        const double ub = Ops::upper(bound);
        ++local.cells;
        const std::uint64_t index = index_offset + static_cast<std::uint64_t>(j) * nt + i;
        const Cell c{ts[i], ts[i + 1], qs[j], qs[j + 1]};
        if (ub < 1.0)
          local.note_leaf(ub, c, index);
        else
          handle_failing<Ops>(c, ub, index, 0, refine_budget, delta, local);
      }
      std::swap(row_lo, row_hi);
    }
  };

  if (nworkers == 1) {
    run_chunk(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nworkers));
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(run_chunk, w);
    for (auto& th : pool) th.join();
  }

  ScanResult merged;
  for (const auto& local : locals) merged.merge(local);
  return merged;
}

std::uint64_t top_cell_count(const PartitionSpec& ps) {
  const auto ts = build_axis(ps.t_lo, ps.t_hi, ps.t_step, "verify_region");
  const auto qs = build_axis(ps.q_lo, ps.q_hi, ps.q_step, "verify_region");
  return static_cast<std::uint64_t>(ts.size() - 1) * (qs.size() - 1);
}

void validate_partition(const PartitionSpec& ps) {
  if (!(ps.t_step > 0.0 && ps.q_step > 0.0))
    throw std::invalid_argument("partition: steps must be > 0");
  if (!(ps.t_lo >= 0.0 && ps.t_lo <= ps.t_hi && ps.t_hi <= 1.0))
    throw std::invalid_argument("partition: t-range must satisfy 0 <= t_lo <= t_hi <= 1");
  if (!(ps.q_lo > 0.0 && ps.q_lo <= ps.q_hi && ps.q_hi <= 1.0))
    throw std::invalid_argument("partition: q-range must satisfy 0 < q_lo <= q_hi <= 1");
}

// Clip the t-range at the upper enclosure of 1/(2-delta); beyond it the
// large-t argument covers the claim and the corner bound's hypothesis fails.
PartitionSpec clip_partition(const PartitionSpec& ps, double delta) {
  validate_partition(ps);
  const ClipRange cr = t_clip_range(delta);
  PartitionSpec out = ps;
  if (ps.t_lo > cr.hi)
    throw std::invalid_argument(
        "partition: region lies entirely beyond t = 1/(2-delta) = " + std::to_string(cr.hi) +
        "; that range is covered by the large-t argument, not the mesh");
  out.t_hi = std::min(ps.t_hi, cr.hi);
  return out;
}

Certificate assemble(Verdict fallback_certified, double delta,
                     std::vector<PartitionSpec> partitions, ArithmeticMode mode,
                     const ScanResult& s, double seconds) {
  Certificate cert;
  cert.delta = delta;
  cert.partitions = std::move(partitions);
  cert.cells_checked = s.cells;
  cert.mode = mode;
  cert.duration_seconds = seconds;
  if (s.worst_index != kNoIndex) {
    cert.worst_bound = s.worst_bound;
    cert.worst_cell = s.worst_cell;
  }
  if (s.witness_index != kNoIndex) {
    cert.verdict = Verdict::Refuted;
    cert.witness = s.witness;
  } else if (s.inconclusive_index != kNoIndex) {
    cert.verdict = Verdict::Inconclusive;
  } else {
    cert.verdict = fallback_certified;
  }
  return cert;
}

ScanResult scan_all(const std::vector<PartitionSpec>& clipped, double delta,
                    ArithmeticMode mode, int refine_budget, int workers) {
  ScanResult merged;
  std::uint64_t offset = 0;
  for (const PartitionSpec& ps : clipped) {
    ScanResult part = (mode == ArithmeticMode::Float)
                          ? scan_partition<FloatOps>(ps, delta, refine_budget, offset, workers)
                          : scan_partition<IntervalOps>(ps, delta, refine_budget, offset, workers);
    merged.merge(part);
    offset += top_cell_count(ps);
  }
  return merged;
}

// Corner bound for G(q) = ln((1-p_q)/(2-q))/(1-q) + q/(2-q) + 2 p_q/(2-q)
// over [a, b] in (0, 0.3].  p_sup_at_a stands in for p at the left corner;
// passing 1 makes the cell valid with an open left end at q = 0.
double small_q_G_bound(double a, double b, double p_sup_at_a) {
  const double p_b = pq(b);
  return std::log((1.0 - p_b) / (2.0 - b)) / (1.0 - a) + b / (2.0 - b) +
         2.0 * p_sup_at_a / (2.0 - b);
}

// The small-q estimate premise: -q ln(q/2) / ((1-p_q)(2-q)) < 1, the
// rearranged form of the upper estimate on p_q.
bool small_q_premise_holds(double q) {
  return -q * std::log(q / 2.0) / ((1.0 - pq(q)) * (2.0 - q)) < 1.0;
}

// Certifies B strictly decreasing on (0, q_max]: one analytic cell covers
// (0, min(0.3, q_max)] (the left corner uses the supremum p -> 1), then a
// 0.01 mesh of derivative corner bounds covers the rest.
bool boundary_decreasing_from_zero(double q_max) {
  if (!(q_max > 0.0 && q_max <= 0.99)) return false;
  const double b0 = std::min(0.3, q_max);
  if (!(small_q_G_bound(0.0, b0, 1.0) < 0.0)) return false;
  if (!small_q_premise_holds(b0)) return false;
  if (q_max > 0.3) {
    const auto cells = build_axis(0.3, q_max, 0.01, "boundary");
    for (std::size_t i = 0; i + 1 < cells.size(); ++i)
      if (!(boundary_B_derivative_bound(cells[i], cells[i + 1]) < 0.0)) return false;
  }
  return true;
}

struct DriverRegions {
  ClipRange clip;
  double b_lower_qmax = 0.0;
};

// Region composition behind the q <= q_max claim.  Throws if any piece of
// (0, 1] x (0, q_max] would be left uncovered.
DriverRegions check_theorem7_composition(double delta, double q_max,
                                         const std::vector<PartitionSpec>& partitions) {
  if (!(delta > 0.0 && delta <= 0.5))
    throw std::domain_error("theorem7_driver: requires 0 < delta <= 1/2 (monotonicity in "
                            "delta reduces smaller delta to this case)");
  if (!(q_max > 0.0 && q_max < 1.0))
    throw std::domain_error("theorem7_driver: q_max must lie in (0, 1)");
  DriverRegions regions;
  regions.clip = t_clip_range(delta);
  if (!large_t_region_check(delta))
    throw std::runtime_error("theorem7_driver: large-t region probe failed");
  regions.b_lower_qmax = small_t_region_bound(q_max);
  if (q_max <= 0.17) {
    if (!(boundary_B_interval(q_max).lower() > regions.clip.hi))
      throw std::runtime_error("theorem7_driver: B(q_max) bound does not reach 1/(2-delta)");
    return regions;  // exclusions cover everything; no mesh required
  }
  if (!(boundary_B_interval(0.17).lower() > regions.clip.hi))
    throw std::runtime_error(
        "theorem7_driver: gap at q <= 0.17: certified B(0.17) bound does not exceed "
        "1/(2-delta)");
  if (partitions.empty())
    throw std::invalid_argument("theorem7_driver: no partitions cover the mesh region");
  std::vector<PartitionSpec> sorted = partitions;
  std::sort(sorted.begin(), sorted.end(),
            [](const PartitionSpec& a, const PartitionSpec& b) { return a.q_lo < b.q_lo; });
  if (sorted.front().q_lo > 0.17)
    throw std::invalid_argument("theorem7_driver: gap below q = " +
                                std::to_string(sorted.front().q_lo));
  double covered_to = sorted.front().q_lo;
  for (const PartitionSpec& ps : sorted) {
    if (ps.q_lo > covered_to)
      throw std::invalid_argument("theorem7_driver: q-gap at [" + std::to_string(covered_to) +
                                  ", " + std::to_string(ps.q_lo) + "]");
    covered_to = std::max(covered_to, ps.q_hi);
    if (ps.t_lo > regions.b_lower_qmax)
      throw std::invalid_argument(
          "theorem7_driver: t-gap: partition starts at " + std::to_string(ps.t_lo) +
          " above the certified boundary bound " + std::to_string(regions.b_lower_qmax));
    if (ps.t_hi < regions.clip.hi)
      throw std::invalid_argument("theorem7_driver: t-gap: partition ends at " +
                                  std::to_string(ps.t_hi) + " short of 1/(2-delta)");
  }
  if (covered_to < q_max)
    throw std::invalid_argument("theorem7_driver: q-gap above " + std::to_string(covered_to));
  return regions;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ClipRange t_clip_range(double delta) {
  require_delta(delta, "t_clip_range");
  const IntervalScalar inv = IntervalScalar(1.0) / (IntervalScalar(2.0) - IntervalScalar(delta));
  return {inv.lower(), inv.upper()};
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RIC_CERTIFY_WORKERS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed > 0) return static_cast<int>(parsed);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

double cell_upper_bound(const Cell& cell, double delta, ArithmeticMode mode) {
  require_delta(delta, "cell_upper_bound");
  if (!(cell.t_lo >= 0.0 && cell.t_lo <= cell.t_hi && cell.t_hi <= 1.0))
    throw std::domain_error("cell_upper_bound: need 0 <= t_lo <= t_hi <= 1");
  if (!(cell.q_lo > 0.0 && cell.q_lo <= cell.q_hi && cell.q_hi <= 1.0))
    throw std::domain_error("cell_upper_bound: need 0 < q_lo <= q_hi <= 1");
  const ClipRange cr = t_clip_range(delta);
  if (cell.t_hi > cr.hi)
    throw std::domain_error(
        "cell_upper_bound: t_hi = " + std::to_string(cell.t_hi) + " exceeds 1/(2-delta) = " +
        std::to_string(cr.hi) +
        "; the q-monotonicity of r2+r3 behind the corner choice requires t <= 1/(2-delta)");
  return mode == ArithmeticMode::Float ? corner_bound<FloatOps>(cell, delta)
                                       : corner_bound<IntervalOps>(cell, delta);
}

IntervalScalar cell_bound_enclosure(const Cell& cell, double delta) {
  cell_upper_bound(cell, delta, ArithmeticMode::Float);  // reuse the validation
  return corner_sum<IntervalOps>(cell, delta);
}

Certificate verify_region(const PartitionSpec& spec, double delta, ArithmeticMode mode,
                          int refine_budget, int workers) {
  return verify_partitions({spec}, delta, mode, refine_budget, workers);
}

Certificate verify_partitions(const std::vector<PartitionSpec>& partitions, double delta,
                              ArithmeticMode mode, int refine_budget, int workers) {
  require_delta(delta, "verify_partitions");
  if (refine_budget < 0) throw std::invalid_argument("verify_partitions: negative budget");
  const auto start = std::chrono::steady_clock::now();
  std::vector<PartitionSpec> clipped;
  clipped.reserve(partitions.size());
  for (const PartitionSpec& ps : partitions) clipped.push_back(clip_partition(ps, delta));
  const ScanResult s = scan_all(clipped, delta, mode, refine_budget, resolve_workers(workers));
  return assemble(Verdict::Certified, delta, std::move(clipped), mode, s,
                  elapsed_seconds(start));
}

bool large_t_region_check(double delta, int t_grid, int q_grid) {
  require_delta(delta, "large_t_region_check");
  if (delta > 0.5)
    throw std::domain_error("large_t_region_check: the argument requires delta <= 1/2");
  if (t_grid < 1 || q_grid < 1)
    throw std::invalid_argument("large_t_region_check: grids must be positive");
  const double lo = 1.0 / (2.0 - delta);
  for (int j = 1; j <= t_grid; ++j) {
    const double t = lo + (1.0 - lo) * j / t_grid;
    for (int i = 1; i <= q_grid; ++i) {
      const double q = static_cast<double>(i) / (q_grid + 1);
      const double u = std::exp(std::log(t) / q);
      const double a = (pq(q) - 1.0) * u;
      const double third = (1.0 / t - 2.0 + delta) * u * u;
      if (!(third <= 0.0)) return false;
      if (!(a * (2.0 + a) < 0.0)) return false;
      // the strict r < 2 delta follows from the negative middle term; in
      // floats the tiny terms can round away, so the sanity check is non-strict
      if (!(r(t, q, delta) <= 2.0 * delta && 2.0 * delta <= 1.0)) return false;
    }
  }
  return true;
}

bool verify_boundary_decreasing(double q_lo, double q_hi, double step) {
  if (!(q_lo > 0.0 && q_lo < q_hi && q_hi <= 0.99))
    throw std::domain_error(
        "verify_boundary_decreasing: requires 0 < q_lo < q_hi <= 0.99 (the derivative "
        "corner bounds are established only up to 0.99)");
  if (!(step > 0.0)) throw std::invalid_argument("verify_boundary_decreasing: step must be > 0");
  if (q_lo < 0.3) {
    const auto cells = build_axis(q_lo, std::min(q_hi, 0.3), step, "boundary");
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      if (!small_q_premise_holds(cells[i]) || !small_q_premise_holds(cells[i + 1])) return false;
      if (!(small_q_G_bound(cells[i], cells[i + 1], pq(cells[i])) < 0.0)) return false;
    }
  }
  if (q_hi > 0.3) {
    const auto cells = build_axis(std::max(q_lo, 0.3), q_hi, step, "boundary");
    for (std::size_t i = 0; i + 1 < cells.size(); ++i)
      if (!(boundary_B_derivative_bound(cells[i], cells[i + 1]) < 0.0)) return false;
  }
  return true;
}

double small_t_region_bound(double q_max) {
  if (!(q_max > 0.0 && q_max < 1.0))
    throw std::domain_error("small_t_region_bound: q_max must lie in (0, 1)");
  if (q_max > 0.99)
    throw std::domain_error(
        "small_t_region_bound: boundary monotonicity is certified only up to q = 0.99");
  if (!boundary_decreasing_from_zero(q_max))
    throw std::runtime_error(
        "small_t_region_bound: boundary monotonicity not certified on (0, " +
        std::to_string(q_max) + "]");
  return boundary_B_interval(q_max).lower();
}

std::vector<PartitionSpec> theorem7_default_partitions(double delta, double q_max) {
  const ClipRange cr = t_clip_range(delta);
  const double ell = small_t_region_bound(q_max);
  const double t0 = std::min(0.0104, ell);
  std::vector<PartitionSpec> parts;
  if (q_max <= 0.17) return parts;
  const double q1_hi = std::max(q_max - 9e-4, 0.17);
  const double q2_hi = std::max(q_max - 1e-5, 0.17);
  if (q1_hi > 0.17) parts.push_back({t0, cr.hi, 0.17, q1_hi, 1e-4, 1e-4});
  if (q2_hi > q1_hi) parts.push_back({t0, cr.hi, q1_hi, q2_hi, 1e-5, 1e-5});
  if (q_max > q2_hi) parts.push_back({t0, cr.hi, q2_hi, q_max, 1e-6, 1e-6});
  return parts;
}

Certificate theorem7_driver(double delta, double q_max, ArithmeticMode mode,
                            const std::vector<PartitionSpec>* custom_partitions,
                            int refine_budget, int workers) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<PartitionSpec> partitions =
      custom_partitions ? *custom_partitions : theorem7_default_partitions(delta, q_max);
  check_theorem7_composition(delta, q_max, partitions);
  std::vector<PartitionSpec> clipped;
  clipped.reserve(partitions.size());
  for (const PartitionSpec& ps : partitions) clipped.push_back(clip_partition(ps, delta));
  const ScanResult s = scan_all(clipped, delta, mode, refine_budget, resolve_workers(workers));
  return assemble(Verdict::Certified, delta, std::move(clipped), mode, s,
                  elapsed_seconds(start));
}

Certificate theorem9_driver(double delta, ArithmeticMode mode, int refine_budget,
                            int workers) {
  const auto start = std::chrono::steady_clock::now();
  if (!(delta > 0.0 && delta <= 0.5))
    throw std::domain_error(
        "theorem9_driver: requires 0 < delta <= 1/2; values above 0.4931 run but are "
        "expected to refute near q = 1");
  const double q_inner = 0.9181;
  std::vector<PartitionSpec> partitions = theorem7_default_partitions(delta, q_inner);
  check_theorem7_composition(delta, q_inner, partitions);
  const ClipRange cr = t_clip_range(delta);
  partitions.push_back({0.0, cr.hi, q_inner, 0.9992, 1e-4, 1e-4});
  partitions.push_back({0.0, cr.hi, 0.9992, 1.0, 1e-5, 1e-5});
  std::vector<PartitionSpec> clipped;
  clipped.reserve(partitions.size());
  for (const PartitionSpec& ps : partitions) clipped.push_back(clip_partition(ps, delta));
  const ScanResult s = scan_all(clipped, delta, mode, refine_budget, resolve_workers(workers));
  return assemble(Verdict::Certified, delta, std::move(clipped), mode, s,
                  elapsed_seconds(start));
}

double search_qmax(double delta, double precision, ArithmeticMode mode, int workers) {
  if (!(delta > 0.0 && delta <= 0.5))
    throw std::domain_error("search_qmax: requires 0 < delta <= 1/2");
  if (!(precision >= 1e-5))
    throw std::domain_error("search_qmax: precision must be >= 1e-5");
  const auto certified = [&](double q) {
    return theorem7_driver(delta, q, mode, nullptr, kDefaultRefineBudget, workers).verdict ==
           Verdict::Certified;
  };
  const double cap = 0.99;  // boundary certification limit
  if (certified(cap)) return cap;
  double lo = 0.5;
  if (!certified(lo)) {
    lo = 0.17;
    if (!certified(lo)) throw std::runtime_error("search_qmax: no certifiable q found");
  }
  double hi = cap;
  while (hi - lo > precision) {
    const double mid = 0.5 * (lo + hi);
    if (certified(mid))
      lo = mid;
    else
      hi = mid;
  }
  for (int guard = 0; guard < 100 && lo + precision <= cap && certified(lo + precision);
       ++guard)
    lo += precision;
  return lo;
}

}  // namespace ricq
