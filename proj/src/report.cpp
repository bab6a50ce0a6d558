#include "qspace/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace qspace::report {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CheckRecord make_check(std::string check_id, std::string paper_eq, double measured, double predicted,
                       double tolerance) {
  CheckRecord r;
  r.check_id = std::move(check_id);
  r.paper_eq = std::move(paper_eq);
  r.measured = measured;
  r.predicted = predicted;
  r.abs_err = std::abs(measured - predicted);
  r.tolerance = tolerance;
  r.pass = r.abs_err <= tolerance;
  return r;
}

bool Report::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

Json Report::to_json() const {
  Json inputs = Json::array();
  for (const auto& [path, digest] : manifest.input_digests) inputs.push_back({{"path", path}, {"sha256", digest}});
  Json checks_json = Json::array();
  std::size_t passed = 0;
  for (const auto& c : checks) {
    checks_json.push_back({{"check_id", c.check_id},
                           {"paper_eq", c.paper_eq},
                           {"measured", c.measured},
                           {"predicted", c.predicted},
                           {"abs_err", c.abs_err},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass}});
    if (c.pass) ++passed;
  }
  Json out;
  out["manifest"] = {{"command", manifest.command},
                     {"version", manifest.version},
                     {"seed", manifest.seed},
                     {"parameters", manifest.parameters},
                     {"inputs", inputs},
                     {"timestamp", manifest.timestamp}};
  out["checks"] = checks_json;
  out["summary"] = {{"count", checks.size()},
                    {"passed", passed},
                    {"failed", checks.size() - passed},
                    {"all_pass", all_pass()}};
  out["details"] = details;
  return out;
}

namespace {

void write_value(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write_value(out, it.value(), indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_value(out, j[i], indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write_value(out, j[i], indent, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "\"" + format_double(v) + "\"";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  write_value(out, j, indent, 0);
  out += '\n';
  return out;
}

std::string to_csv(const CsvTable& table) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  auto line = [&field](const std::vector<std::string>& cells) {
    std::string l;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) l += ',';
      l += field(cells[i]);
    }
    return l + "\n";
  };
  std::string out = line(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::invalid_argument("CSV row width differs from the header");
    out += line(row);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out.flush()) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace qspace::report
