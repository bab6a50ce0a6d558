#pragma once

#include "qspace/report.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qspace::cli {

/// Bad flags, unreadable inputs or guard violations. Exit status 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flags every subcommand accepts.
struct CommonOptions {
  std::uint64_t seed = 7;
  std::string backend = "fock";
  std::optional<int> cutoff;
  int modes = 1;
  std::vector<std::string> k_values;
  std::vector<std::string> hbar_values;
  std::vector<std::string> tolerance_overrides;  ///< KEY=VALUE
};

struct CommandResult {
  report::Report report;
  std::optional<report::CsvTable> csv;
  std::vector<std::string> console;  ///< printed after the summary line
};

/// Named tolerances with defaults; overrides must name a known key.
class Tolerances {
 public:
  Tolerances(std::map<std::string, double> defaults, const std::vector<std::string>& overrides);
  double operator[](const std::string& key) const;
  report::Json to_json() const;

 private:
  std::map<std::string, double> values_;
};

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Inline JSON text, or "@path" to read a file (its digest goes into `manifest`).
nlohmann::json read_json_argument(const std::string& text, report::Manifest& manifest);

struct AlgebraVerifyArgs {
  std::string builtin = "HR3";
  std::string table_file;
  std::vector<std::string> eps{"0", "1/64", "1/16", "1/4", "1"};
};

struct AlgebraContractArgs {
  std::string builtin = "HR3";
};

struct CosetComposeArgs {
  std::string left = R"({"p": 0.5, "x": -1.0, "theta": 0.25})";
  std::string right = R"({"p": -1.5, "x": 0.75})";
  std::string kind = "phase";
  int samples = 0;
};

struct CoherentOverlapArgs {
  std::string bra = R"({"p": 0, "x": 2})";
  std::string ket = R"({"p": 0, "x": 0})";
  double grid_extent = 12.0;
  int grid_points = 256;
};

struct ContractSweepArgs {
  std::vector<std::string> pairs;
  std::string policy = "scale-with-k";
  double fock_k_max = 4.0;
};

struct StarBracketArgs {
  std::string f;
  std::string g;
  std::optional<int> dimension;
};

struct StarLimitSweepArgs {
  std::string f = "x^3";
  std::string g = "p^3";
  std::optional<int> dimension;
};

struct FlowCheckArgs {
  std::string label = R"({"p": 0.5, "x": 1.0})";
  double t_final = 10.0;
  double dt = 1e-3;
};

CommandResult algebra_verify(const CommonOptions& common, const AlgebraVerifyArgs& args);
CommandResult algebra_contract(const CommonOptions& common, const AlgebraContractArgs& args);
CommandResult coset_compose(const CommonOptions& common, const CosetComposeArgs& args);
CommandResult coherent_overlap(const CommonOptions& common, const CoherentOverlapArgs& args);
CommandResult contract_sweep(const CommonOptions& common, const ContractSweepArgs& args);
CommandResult star_bracket(const CommonOptions& common, const StarBracketArgs& args);
CommandResult star_limit_sweep(const CommonOptions& common, const StarLimitSweepArgs& args);
CommandResult flow_check(const CommonOptions& common, const FlowCheckArgs& args);
/// Acceptance criteria 1-11 without wall-clock data.
CommandResult run_all(const CommonOptions& common);

}  // namespace qspace::cli
