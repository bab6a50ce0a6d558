#pragma once

// Check records, run manifests and their JSON/CSV serialization.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qspace::report {

using Json = nlohmann::ordered_json;

/// 17 significant digits ("%.17g"); non-finite values become "nan"/"inf"/"-inf".
std::string format_double(double v);

struct CheckRecord {
  std::string check_id;
  std::string paper_eq;  ///< descriptive relation tag, or "plumbing"
  double measured = 0.0;
  double predicted = 0.0;
  double abs_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// abs_err = |measured - predicted|, pass iff abs_err <= tolerance (NaN fails).
CheckRecord make_check(std::string check_id, std::string paper_eq, double measured, double predicted,
                       double tolerance);

struct Manifest {
  std::string command;
  Json parameters = Json::object();
  std::vector<std::pair<std::string, std::string>> input_digests;  ///< path, sha256 hex
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;
};

struct Report {
  Manifest manifest;
  std::vector<CheckRecord> checks;
  Json details = Json::object();

  bool all_pass() const;
  Json to_json() const;
};

/// Deterministic pretty printer: insertion-ordered keys, doubles via format_double.
std::string dump(const Json& j, int indent = 2);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 quoting where needed, '\n' line ends.
std::string to_csv(const CsvTable& table);

/// Writes `content`, creating parent directories; throws std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& content);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace qspace::report
