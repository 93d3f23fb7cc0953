#pragma once

// Suite orchestration and report emission.  Every check records the computed
// value, the expected value, and where the expected value comes from:
//   "closed-form: <formula>"  a stated formula evaluated at q,
//   "identity"                a definitional or algebraic identity,
//   "oracle: <name>"          an independent computation of the same quantity.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "theta10/analysis.hpp"
#include "theta10/sympgrp.hpp"

namespace theta10 {

struct RunConfig {
  int q = 3;
  std::vector<std::string> suites = {"all"};
  std::string out;  // JSON report path; empty means stdout only
  std::string csv;  // theta10 character table path
  std::uint64_t seed = 1;
  int jobs = 1;
  bool allow_big = false;
  bool timing = false;
};

struct CheckRecord {
  std::string name;
  nlohmann::ordered_json computed;
  nlohmann::ordered_json expected;
  std::string provenance;
  bool pass = false;
};

struct SuiteReport {
  std::string name;
  std::vector<CheckRecord> checks;
  bool skipped = false;
  std::string skip_reason;
  nlohmann::ordered_json data;  // suite-specific attachments, e.g. a deduction transcript
  double wall_seconds = 0;
  bool pass() const;
};

struct RunReport {
  int q = 0;
  std::string convention_header;
  std::vector<SuiteReport> suites;
  bool pass() const;
  nlohmann::ordered_json to_json(const RunConfig& config) const;
};

/// Suite names in execution order.
const std::vector<std::string>& suite_names();
/// Validates q and the suite list, expands "all", and orders suites.
RunConfig normalize(RunConfig config);
/// True for odd prime powers supported by the field tables (q <= 13).
bool supported_q(int q);

RunReport run(const RunConfig& config);

/// Character table CSV: 16 matrix entries (F_p coordinates joined by ':' when
/// q is not prime), class size, word length, exact value as JSON, decimal value.
void emit_character_table(std::ostream& os, const SpGroup& g, const ClassPartition& classes, const CharRow& row);
void emit_character_table(const std::string& path, const SpGroup& g, const ClassPartition& classes, const CharRow& row);

/// Subgroup table CSV: 16 matrix entries and BFS word length per element.
void export_subgroup_csv(std::ostream& os, const SpGroup& g, const GroupTable& table);
/// Class table CSV: 16 entries of the representative, class size, word length.
void export_class_csv(std::ostream& os, const SpGroup& g, const ClassPartition& classes);

std::string matrix_csv_fields(const SpGroup& g, const SpMat& m);

}  // namespace theta10
