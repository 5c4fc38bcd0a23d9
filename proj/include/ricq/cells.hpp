#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ricq {

inline constexpr const char* kToolVersion = "ricq 1.0.0";

enum class ArithmeticMode { Float, Interval };

inline const char* to_string(ArithmeticMode m) {
  return m == ArithmeticMode::Float ? "float" : "interval";
}

enum class Verdict { Certified, Refuted, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::Refuted: return "refuted";
    default: return "inconclusive";
  }
}

// One rectangle [t_lo, t_hi] x [q_lo, q_hi].  Degenerate (zero-width) sides
// are allowed; bounds on such a cell collapse to point evaluations.
struct Cell {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;
};

// A gridded rectangle.  Steps need not divide the ranges exactly; trailing
// partial cells are verified like full ones, never dropped.
struct PartitionSpec {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;
  double t_step = 0.0;
  double q_step = 0.0;
};

// A sampled point with r >= 1 under float evaluation.
struct Witness {
  double t = 0.0;
  double q = 0.0;
  double r_value = 0.0;
};

// Machine-readable verdict of a verification run.  worst_bound is the
// maximum over all leaf-cell bounds and is reproducible for a fixed spec,
// mode and refinement budget, independent of worker count.
struct Certificate {
  Verdict verdict = Verdict::Inconclusive;
  double delta = 0.0;
  std::vector<PartitionSpec> partitions;
  std::uint64_t cells_checked = 0;
  double worst_bound = 0.0;
  Cell worst_cell;
  ArithmeticMode mode = ArithmeticMode::Float;
  double duration_seconds = 0.0;  // run metadata; not part of the serialized form
  std::string tool_version = kToolVersion;
  std::optional<Witness> witness;  // present iff verdict == Refuted
};

}  // namespace ricq
