#pragma once

#include <string>
#include <vector>

#include "ricq/cells.hpp"
#include "ricq/certify.hpp"
#include "ricq/recovery.hpp"

// File formats: certificate JSON (schema "certificate_v1"), verification job
// configs, the matrix container (a JSON header line followed by CSV rows),
// and experiment CSV.  Numbers in machine formats carry 17 significant
// digits, so files are byte-reproducible for identical runs.

namespace ricq {

// %.17g formatting.
std::string format_g17(double x);

// Deterministic serialization; duration is run metadata and is not written,
// which keeps byte-identity across repeated runs.
std::string certificate_to_json(const Certificate& cert);

// Throws std::invalid_argument when the document does not follow
// certificate_v1 (missing/unknown keys, wrong types, unknown verdict/mode).
void validate_certificate_json(const std::string& text);

struct JobConfig {
  double delta = 0.0;
  double q_max = 0.9181;
  ArithmeticMode mode = ArithmeticMode::Float;
  std::vector<PartitionSpec> partitions;  // empty: use the driver defaults
  int refine_budget = kDefaultRefineBudget;
  int workers = 0;
};

// Strict parse: unknown keys are rejected, numeric fields are validated
// against the engine preconditions.
JobConfig parse_job_config(const std::string& text);

void save_matrix(const std::string& path, const SensingMatrix& phi);
SensingMatrix load_matrix(const std::string& path);

std::string experiment_csv(const std::vector<PhaseTransitionRow>& rows);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ricq
