#pragma once

#include <vector>

#include "ricq/cells.hpp"
#include "ricq/interval.hpp"

// Certified mesh verification of r(t, q, delta) < 1 over rectangles, using
// coordinate-monotone corner bounds, region-splitting drivers, boundary
// monotonicity certification, and an optional interval arithmetic mode.

namespace ricq {

// Enclosure of 1/(2 - delta), the t beyond which the large-t argument takes
// over and at or below which the corner bound's monotonicity hypothesis holds.
struct ClipRange {
  double lo = 0.0;
  double hi = 0.0;
};
ClipRange t_clip_range(double delta);

// Upper bound for r over the whole cell:
//   r1(t_lo, q_lo) + r2(t_hi, q_hi) + r3(t_lo, q_hi),
// each summand evaluated at its maximizing corner (r1 is nonincreasing in t
// and q; r2 + r3 is nondecreasing in q for t <= 1/(2-delta), with r2
// nondecreasing and r3 nonincreasing in t).  In interval mode the result is
// the upper endpoint of an outward-rounded enclosure of the corner sum.
// Throws if t_hi exceeds 1/(2-delta), the hypothesis behind the q-corner.
double cell_upper_bound(const Cell& cell, double delta, ArithmeticMode mode);

// The outward-rounded enclosure behind the interval-mode bound; its upper
// endpoint is what cell_upper_bound returns in that mode.
IntervalScalar cell_bound_enclosure(const Cell& cell, double delta);

inline constexpr int kDefaultRefineBudget = 3;

// Resolve worker count: explicit value > 0 wins, then RIC_CERTIFY_WORKERS,
// then hardware concurrency.
int resolve_workers(int requested = 0);

// Scan every cell of the gridded region.  Cells whose bound reaches 1 are
// quartered up to refine_budget extra levels; a refined cell that still
// fails is probed at its corners and center for a float witness r >= 1.
// Certified: all leaf bounds < 1.  Refuted: a witness was found.
// Inconclusive: budget exhausted on some cell without a witness.
// The t-range is clipped at 1/(2-delta); a region lying entirely beyond it
// is an error.  Deterministic for fixed spec/mode/budget, any worker count.
Certificate verify_region(const PartitionSpec& spec, double delta, ArithmeticMode mode,
                          int refine_budget = kDefaultRefineBudget, int workers = 0);

// Multi-partition variant; partitions are scanned in order and merged into
// one certificate.
Certificate verify_partitions(const std::vector<PartitionSpec>& partitions, double delta,
                              ArithmeticMode mode, int refine_budget = kDefaultRefineBudget,
                              int workers = 0);

// Numerically replays, on a probe grid, the chain giving r < 1 for all
// t in (1/(2-delta), 1] and q in (0, 1) whenever delta <= 1/2:
// the third term of r is nonpositive there and the middle term is negative,
// so r < 2 delta <= 1.  Throws if delta > 1/2.
bool large_t_region_check(double delta, int t_grid = 100, int q_grid = 100);

// Certifies that B is strictly decreasing on [q_lo, q_hi] (q_hi <= 0.99).
// Cells in (0, 0.3] use the corner bound of
//   G(q) = ln((1-p_q)/(2-q))/(1-q) + q/(2-q) + 2 p_q/(2-q),
// whose negativity implies the derivative factor is negative once the
// small-q estimate gives -q ln(q/2) / ((1-p_q)(2-q)) < 1; cells in
// [0.3, 0.99] use boundary_B_derivative_bound.
bool verify_boundary_decreasing(double q_lo, double q_hi, double step = 0.01);

// Certified lower bound on B over (0, q_max]: monotonicity of B is
// certified from 0 to q_max (single analytic cell on (0, 0.3], then a 0.01
// mesh), and the lower endpoint of an interval enclosure of B(q_max) is
// returned.  Throws if the certification fails or q_max > 0.99.
double small_t_region_bound(double q_max);

// The partition family used by the q <= q_max driver: three q-strips with
// steps 1e-4 / 1e-5 / 1e-6, the finer strips covering the last 9e-4 of the
// q-range.  t spans [min(0.0104, B-bound), 1/(2-delta)].
std::vector<PartitionSpec> theorem7_default_partitions(double delta, double q_max);

// Certificate for: r(t, q, delta) < 1 for all q in (0, q_max], t in (0, 1].
// Composition: monotonicity in delta reduces the claim to the given
// delta <= 1/2; the large-t region is covered analytically; t below the
// certified B(q_max) bound (and every t for q <= 0.17) is covered by the
// decreasing boundary; the remaining rectangle is meshed.  Rejects any
// partition set that leaves a gap.
Certificate theorem7_driver(double delta, double q_max, ArithmeticMode mode,
                            const std::vector<PartitionSpec>* custom_partitions = nullptr,
                            int refine_budget = kDefaultRefineBudget, int workers = 0);

// Certificate for: r(t, q, delta) < 1 for all q in (0, 1], t in (0, 1].
// Runs the q <= 0.9181 driver, then meshes [0, 1/(2-delta)] x [0.9181, 1]
// with two partitions (1e-4 steps up to q = 0.9992, then 1e-5 steps).
// Intended for delta <= 0.4931; larger delta still runs and reports
// honestly (the q = 1 parabola reaches 1 once delta exceeds q1_threshold).
Certificate theorem9_driver(double delta, ArithmeticMode mode,
                            int refine_budget = kDefaultRefineBudget, int workers = 0);

// Largest q* (up to `precision`, capped at 0.99 by the boundary
// certification) such that theorem7_driver certifies (delta, q*).
double search_qmax(double delta, double precision, ArithmeticMode mode = ArithmeticMode::Float,
                   int workers = 0);

}  // namespace ricq
