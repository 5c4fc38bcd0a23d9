#include "ricq/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ricq {

namespace {

using nlohmann::json;

void append_partition(std::string& out, const PartitionSpec& ps, const char* indent) {
  out += indent;
  out += "{\"t_lo\": " + format_g17(ps.t_lo) + ", \"t_hi\": " + format_g17(ps.t_hi) +
         ", \"q_lo\": " + format_g17(ps.q_lo) + ", \"q_hi\": " + format_g17(ps.q_hi) +
         ", \"t_step\": " + format_g17(ps.t_step) + ", \"q_step\": " + format_g17(ps.q_step) +
         "}";
}

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::invalid_argument(std::string("config: missing numeric field '") + key + "'");
  return j[key].get<double>();
}

}  // namespace

std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string certificate_to_json(const Certificate& cert) {
  std::string out;
  out += "{\n";
  out += "  \"schema\": \"certificate_v1\",\n";
  out += "  \"tool_version\": \"" + cert.tool_version + "\",\n";
  out += std::string("  \"verdict\": \"") + to_string(cert.verdict) + "\",\n";
  out += "  \"delta\": " + format_g17(cert.delta) + ",\n";
  out += std::string("  \"mode\": \"") + to_string(cert.mode) + "\",\n";
  out += "  \"cells_checked\": " + std::to_string(cert.cells_checked) + ",\n";
  out += "  \"worst_bound\": " + format_g17(cert.worst_bound) + ",\n";
  out += "  \"worst_cell\": {\"t_lo\": " + format_g17(cert.worst_cell.t_lo) +
         ", \"t_hi\": " + format_g17(cert.worst_cell.t_hi) +
         ", \"q_lo\": " + format_g17(cert.worst_cell.q_lo) +
         ", \"q_hi\": " + format_g17(cert.worst_cell.q_hi) + "},\n";
  out += "  \"partitions\": [";
  for (std::size_t i = 0; i < cert.partitions.size(); ++i) {
    out += (i == 0 ? "\n" : ",\n");
    append_partition(out, cert.partitions[i], "    ");
  }
  out += cert.partitions.empty() ? "]" : "\n  ]";
  if (cert.witness.has_value()) {
    out += ",\n  \"witness\": {\"t\": " + format_g17(cert.witness->t) +
           ", \"q\": " + format_g17(cert.witness->q) +
           ", \"r\": " + format_g17(cert.witness->r_value) + "}";
  }
  out += "\n}\n";
  return out;
}

void validate_certificate_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("certificate: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("certificate: not a JSON object");
  const std::vector<std::string> required = {"schema",        "tool_version", "verdict",
                                             "delta",         "mode",         "cells_checked",
                                             "worst_bound",   "worst_cell",   "partitions"};
  for (const auto& key : required)
    if (!j.contains(key))
      throw std::invalid_argument("certificate: missing field '" + key + "'");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(required.begin(), required.end(), key) == required.end() &&
        key != "witness")
      throw std::invalid_argument("certificate: unknown field '" + key + "'");
  }
  if (j["schema"].get<std::string>() != "certificate_v1")
    throw std::invalid_argument("certificate: unsupported schema");
  const std::string verdict = j["verdict"].get<std::string>();
  if (verdict != "certified" && verdict != "refuted" && verdict != "inconclusive")
    throw std::invalid_argument("certificate: unknown verdict '" + verdict + "'");
  const std::string mode = j["mode"].get<std::string>();
  if (mode != "float" && mode != "interval")
    throw std::invalid_argument("certificate: unknown mode '" + mode + "'");
  if (!j["delta"].is_number() || !j["worst_bound"].is_number() ||
      !j["cells_checked"].is_number_unsigned())
    throw std::invalid_argument("certificate: malformed numeric fields");
  for (const char* key : {"t_lo", "t_hi", "q_lo", "q_hi"})
    if (!j["worst_cell"].contains(key) || !j["worst_cell"][key].is_number())
      throw std::invalid_argument("certificate: malformed worst_cell");
  if (!j["partitions"].is_array())
    throw std::invalid_argument("certificate: partitions must be an array");
  for (const auto& ps : j["partitions"])
    for (const char* key : {"t_lo", "t_hi", "q_lo", "q_hi", "t_step", "q_step"})
      if (!ps.contains(key) || !ps[key].is_number())
        throw std::invalid_argument("certificate: malformed partition entry");
  if (verdict == "refuted" && !j.contains("witness"))
    throw std::invalid_argument("certificate: refuted verdict requires a witness");
  if (j.contains("witness"))
    for (const char* key : {"t", "q", "r"})
      if (!j["witness"].contains(key) || !j["witness"][key].is_number())
        throw std::invalid_argument("certificate: malformed witness");
}

JobConfig parse_job_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: not a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    static const std::vector<std::string> known = {"delta",      "q_max",         "mode",
                                                   "partitions", "refine_budget", "workers"};
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  JobConfig cfg;
  cfg.delta = require_number(j, "delta");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw std::invalid_argument("config: delta must lie in (0, 1)");
  if (j.contains("q_max")) {
    cfg.q_max = require_number(j, "q_max");
    if (!(cfg.q_max > 0.0 && cfg.q_max < 1.0))
      throw std::invalid_argument("config: q_max must lie in (0, 1)");
  }
  if (j.contains("mode")) {
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "float")
      cfg.mode = ArithmeticMode::Float;
    else if (mode == "interval")
      cfg.mode = ArithmeticMode::Interval;
    else
      throw std::invalid_argument("config: mode must be 'float' or 'interval'");
  }
  if (j.contains("refine_budget")) {
    if (!j["refine_budget"].is_number_integer() || j["refine_budget"].get<int>() < 0)
      throw std::invalid_argument("config: refine_budget must be a nonnegative integer");
    cfg.refine_budget = j["refine_budget"].get<int>();
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer() || j["workers"].get<int>() < 0)
      throw std::invalid_argument("config: workers must be a nonnegative integer");
    cfg.workers = j["workers"].get<int>();
  }
  if (j.contains("partitions")) {
    if (!j["partitions"].is_array())
      throw std::invalid_argument("config: partitions must be an array");
    for (const auto& entry : j["partitions"]) {
      if (!entry.is_object()) throw std::invalid_argument("config: malformed partition");
      for (const auto& [key, value] : entry.items()) {
        (void)value;
        static const std::vector<std::string> fields = {"t_lo",   "t_hi",   "q_lo",
                                                        "q_hi",   "t_step", "q_step"};
        if (std::find(fields.begin(), fields.end(), key) == fields.end())
          throw std::invalid_argument("config: unknown partition key '" + key + "'");
      }
      PartitionSpec ps;
      ps.t_lo = require_number(entry, "t_lo");
      ps.t_hi = require_number(entry, "t_hi");
      ps.q_lo = require_number(entry, "q_lo");
      ps.q_hi = require_number(entry, "q_hi");
      ps.t_step = require_number(entry, "t_step");
      ps.q_step = require_number(entry, "q_step");
      if (!(ps.t_step > 0.0 && ps.q_step > 0.0))
        throw std::invalid_argument("config: partition steps must be positive");
      if (!(ps.t_lo >= 0.0 && ps.t_lo <= ps.t_hi && ps.t_hi <= 1.0))
        throw std::invalid_argument("config: partition t-range invalid");
      if (!(ps.q_lo > 0.0 && ps.q_lo <= ps.q_hi && ps.q_hi <= 1.0))
        throw std::invalid_argument("config: partition q-range invalid");
      cfg.partitions.push_back(ps);
    }
  }
  return cfg;
}

void save_matrix(const std::string& path, const SensingMatrix& phi) {
  std::string out = "{\"m\": " + std::to_string(phi.rows()) +
                    ", \"n\": " + std::to_string(phi.cols()) + "}\n";
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    for (Eigen::Index j = 0; j < phi.cols(); ++j) {
      if (j > 0) out += ",";
      out += format_g17(phi.entries(i, j));
    }
    out += "\n";
  }
  write_text_file(path, out);
}

SensingMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("load_matrix: empty file");
  json j;
  try {
    j = json::parse(header);
  } catch (const json::parse_error&) {
    throw std::runtime_error("load_matrix: first line must be a JSON header {\"m\":..,\"n\":..}");
  }
  if (!j.contains("m") || !j.contains("n"))
    throw std::runtime_error("load_matrix: header missing m or n");
  const Eigen::Index m = j["m"].get<Eigen::Index>();
  const Eigen::Index n = j["n"].get<Eigen::Index>();
  if (m <= 0 || n <= 0) throw std::runtime_error("load_matrix: nonpositive dimensions");
  SensingMatrix phi;
  phi.gen = {MatrixGenKind::File, 0};
  phi.entries.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_matrix: missing row");
    std::stringstream ss(line);
    std::string tok;
    for (Eigen::Index jj = 0; jj < n; ++jj) {
      if (!std::getline(ss, tok, ','))
        throw std::runtime_error("load_matrix: short row");
      phi.entries(i, jj) = std::stod(tok);
      if (!std::isfinite(phi.entries(i, jj)))
        throw std::runtime_error("load_matrix: non-finite entry");
    }
  }
  for (Eigen::Index jj = 0; jj < n; ++jj)
    if (phi.entries.col(jj).norm() == 0.0)
      throw std::runtime_error("load_matrix: column " + std::to_string(jj) +
                               " is identically zero");
  return phi;
}

std::string experiment_csv(const std::vector<PhaseTransitionRow>& rows) {
  std::string out = "k,q,success_count,trials\n";
  for (const auto& row : rows)
    out += std::to_string(row.k) + "," + format_g17(row.q) + "," +
           std::to_string(row.success_count) + "," + std::to_string(row.trials) + "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ricq
