#pragma once

// Acceptance suite: numbered criteria, each a list of tolerance checks plus
// an optional wall-clock budget. Timings are kept out of the JSON details so
// reports stay reproducible for a fixed seed.

#include "qspace/report.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qspace::acceptance {

struct SuiteOptions {
  std::uint64_t seed = 7;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<report::CheckRecord> checks;
  report::Json details = report::Json::object();
  double seconds = 0.0;
  std::optional<double> time_limit;  ///< seconds

  bool checks_pass() const;
  bool within_time() const { return !time_limit || seconds < *time_limit; }
  bool pass() const { return checks_pass() && within_time(); }
};

CriterionResult algebra_axioms(const SuiteOptions& options);          // 1
CriterionResult contraction_limit(const SuiteOptions& options);       // 2
CriterionResult group_law(const SuiteOptions& options);               // 3
CriterionResult overlap_formula(const SuiteOptions& options);         // 4
CriterionResult matrix_elements(const SuiteOptions& options);         // 5
CriterionResult representation_consistency(const SuiteOptions& options);  // 6
CriterionResult operator_realization(const SuiteOptions& options);    // 7
CriterionResult contraction_sweep(const SuiteOptions& options);       // 8
CriterionResult eigenvalue_emergence(const SuiteOptions& options);    // 9
CriterionResult star_algebra(const SuiteOptions& options);            // 10
CriterionResult projective_flow(const SuiteOptions& options);         // 11

struct CriterionEntry {
  int id;
  std::function<CriterionResult(const SuiteOptions&)> run;
};

/// Criteria 1..11 in order.
const std::vector<CriterionEntry>& criteria();

/// Runs one entry and records its wall-clock time.
CriterionResult run_timed(const CriterionEntry& entry, const SuiteOptions& options);

}  // namespace qspace::acceptance
