// End-to-end runs of the qspace_cli binary, one or more per subcommand.

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("qspace_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run cli(const std::string& args, const std::string& out_name) {
  const std::string cmd = std::string(QSPACE_CLI_PATH) + " --out '" + (scratch() / out_name).string() + "' " + args +
                          " 2>/dev/null";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const std::string& out_name, const std::string& command) {
  return json::parse(slurp(scratch() / out_name / (command + ".json")));
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') quoted = !quoted;
      else if (c == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else cell += c;
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const json* find_check(const json& report, const std::string& id) {
  for (const auto& c : report["checks"])
    if (c["check_id"] == id) return &c;
  return nullptr;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("algebra-verify") {
  const auto r = cli("algebra-verify --builtin HR3", "verify");
  CHECK(r.status == 0);
  const auto j = load("verify", "algebra-verify");
  CHECK(j["details"]["jacobi_max"] == 0.0);
  CHECK(j["summary"]["all_pass"] == true);
  CHECK(j["manifest"]["command"] == "algebra-verify");
  for (const auto& c : j["checks"]) CHECK(c["paper_eq"] == "algebra-brackets");

  // A table whose rotation brackets carry the opposite sign fails Jacobi: exit 1.
  const auto shipped = cli("algebra-contract --k 2", "contract_for_table");
  REQUIRE(shipped.status == 0);
  json limit = load("contract_for_table", "algebra-contract")["details"]["limit_algebra"];
  for (auto& b : limit["brackets"]) {
    const std::string a = b["a"], c = b["b"];
    if (a[0] == 'J' && c[0] == 'J')
      for (auto& t : b["terms"]) t["coeff"] = -t["coeff"].get<double>();
  }
  const fs::path path = scratch() / "flipped.json";
  std::ofstream(path) << limit.dump();
  const auto bad = cli("algebra-verify --table '" + path.string() + "'", "verify_bad");
  CHECK(bad.status == 1);
  const auto jb = load("verify_bad", "algebra-verify");
  CHECK(jb["details"]["jacobi_max"].get<double>() > 0.5);
  REQUIRE(jb["manifest"]["inputs"].size() == 1);
  CHECK(jb["manifest"]["inputs"][0]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("algebra-contract") {
  const auto r = cli("algebra-contract --k 1,2,10", "contract");
  CHECK(r.status == 0);
  const auto j = load("contract", "algebra-contract");
  const auto* c = find_check(j, "k10.central_coupling");
  REQUIRE(c);
  CHECK((*c)["measured"].get<double>() == doctest::Approx(0.01));
  CHECK(find_check(j, "limit.position_momentum_bracket"));
  CHECK(cli("algebra-contract --k 0.5", "contract_bad").status == 2);
}

TEST_CASE("coset-compose") {
  const auto r = cli("coset-compose --left '{\"p\": 1}' --right '{\"x\": 1}' --samples 50", "compose");
  CHECK(r.status == 0);
  const auto j = load("compose", "coset-compose");
  CHECK(j["details"]["formula_label"]["theta"] == 0.5);
  CHECK(j["details"]["product_label"]["theta"] == 0.5);
  CHECK(j["summary"]["count"] == 3);
  CHECK(cli("coset-compose --kind config --left '{\"x\": [1, 2, 3], \"theta\": 0.5}'", "compose_cfg").status == 0);
  CHECK(cli("coset-compose --left '{\"p\": }'", "compose_bad").status == 2);
}

TEST_CASE("coherent-overlap on both backends") {
  const auto fock = cli("coherent-overlap --bra '{\"x\": 2}' --ket '{\"x\": 0}'", "overlap");
  CHECK(fock.status == 0);
  const auto j = load("overlap", "coherent-overlap");
  CHECK(j["details"]["numeric"]["re"].get<double>() == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(j["details"]["closed_form_abs"].get<double>() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  const auto grid = cli("coherent-overlap --backend grid --bra '{\"x\": 2}' --ket '{\"x\": 0}'", "overlap_grid");
  CHECK(grid.status == 0);
  const auto jg = load("overlap_grid", "coherent-overlap");
  CHECK(jg["details"]["numeric"]["re"].get<double>() == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));

  const auto three = cli("coherent-overlap --modes 3 --bra '{\"p\": [0.5, 0, 1], \"x\": [1, -1, 0]}'", "overlap3");
  CHECK(three.status == 0);

  const fs::path label = scratch() / "label.json";
  std::ofstream(label) << "{\"p\": 0.5, \"x\": -1}\n";
  CHECK(cli("coherent-overlap --bra @" + label.string(), "overlap_file").status == 0);
  const auto jf = load("overlap_file", "coherent-overlap");
  CHECK(jf["manifest"]["inputs"][0]["sha256"] == "7088129460833360ab8185ad75f2690be9784484cf1495fd0650c42579863120");
}

TEST_CASE("guard violations exit 2 with a diagnostic report") {
  const auto r = cli("coherent-overlap --cutoff 8 --bra '{\"x\": 3}'", "guard");
  CHECK(r.status == 2);
  const auto j = load("guard", "coherent-overlap");
  CHECK(j["details"]["required_cutoff"] == 18);
  CHECK(j["summary"]["all_pass"] == false);

  const auto sweep = cli("contract-sweep --policy fixed --cutoff 16 --k 1,4", "guard_sweep");
  CHECK(sweep.status == 2);
  CHECK(load("guard_sweep", "contract-sweep")["details"]["guard_violations"].size() == 1);
}

TEST_CASE("contract-sweep") {
  const auto r = cli("contract-sweep --pair 'dx=1,dp=0' --k 1,2,4", "sweep");
  CHECK(r.status == 0);
  const auto rows = csv_rows(scratch() / "sweep" / "contract-sweep.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "k");
  CHECK(rows[0][5] == "predicted_abs");
  const double expected[] = {std::exp(-0.25), std::exp(-1.0), std::exp(-4.0)};
  for (int i = 0; i < 3; ++i) {
    CHECK(std::stod(rows[i + 1][5]) == doctest::Approx(expected[i]).epsilon(1e-15));
    CHECK(std::stod(rows[i + 1][3]) == doctest::Approx(expected[i]).epsilon(1e-6));
  }

  const auto two = cli("contract-sweep --pair 'dx=1,dp=0' --pair 'x=0.5,dx=0.5,dp=0.5' --hbar 1,0.25,0.0625,0.015625",
                       "sweep2");
  CHECK(two.status == 0);
  CHECK(csv_rows(scratch() / "sweep2" / "contract-sweep.csv").size() == 1 + 2 * 4);
  const auto j = load("sweep2", "contract-sweep");
  CHECK(j["details"]["slopes"][1]["predicted"] == -0.125);

  CHECK(cli("contract-sweep --k 1,2 --hbar 1", "sweep_bad").status == 2);
  CHECK(cli("contract-sweep --k 2,1", "sweep_bad2").status == 2);
}

TEST_CASE("star-bracket") {
  const auto r = cli("star-bracket --f 'x^3' --g 'p^3' --hbar 1/10", "bracket");
  CHECK(r.status == 0);
  CHECK(r.out.find("9*x^2*p^2 - 3/2*hbar^2") != std::string::npos);
  CHECK(r.out.find("9*x^2*p^2 - 3/200") != std::string::npos);
  const auto j = load("bracket", "star-bracket");
  CHECK(j["details"]["correction"] == "-3/2*hbar^2");
  CHECK(j["details"]["correction_at_hbar"] == "-3/200");

  CHECK(cli("star-bracket --f 'x1 p2' --g 'p1 x2'", "bracket3").status == 0);
  CHECK(cli("star-bracket --f 'x^' --g p", "bracket_bad").status == 2);
  CHECK(cli("star-bracket --f x --g p --hbar 0", "bracket_zero").status == 2);
}

TEST_CASE("star-limit-sweep") {
  const auto r = cli("star-limit-sweep", "limit");
  CHECK(r.status == 0);
  const auto j = load("limit", "star-limit-sweep");
  CHECK(j["details"]["bracket_slope"].get<double>() == doctest::Approx(2.0));
  const auto rows = csv_rows(scratch() / "limit" / "star-limit-sweep.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"hbar", "bracket_deviation", "product_deviation"});

  CHECK(cli("star-limit-sweep --f 'x^2' --g 'p^2' --hbar 0.5,0.1", "limit_quadratic").status == 0);
  CHECK(cli("star-limit-sweep --hbar 0.01,0.1", "limit_bad").status == 2);
}

TEST_CASE("flow-check") {
  CHECK(cli("flow-check", "flow").status == 0);
  const auto j = load("flow", "flow-check");
  CHECK(j["details"]["steps"] == 10000);
  // Zero tolerance on the norm drift turns the run red without touching anything else.
  CHECK(cli("flow-check --tolerance norm=0", "flow_strict").status == 1);
  CHECK(cli("flow-check --tolerance nrom=1", "flow_typo").status == 2);
  CHECK(cli("flow-check --modes 3", "flow_modes").status == 2);
}

TEST_CASE("usage errors") {
  CHECK(cli("", "usage").status == 2);
  CHECK(cli("bogus", "usage").status == 2);
  CHECK(cli("all --backend pencil", "usage").status == 2);
  CHECK(cli("--help", "usage").status == 0);
}

TEST_CASE("config files are read and digested") {
  const fs::path cfg = scratch() / "run.toml";
  std::ofstream(cfg) << "seed = 11\n";
  CHECK(cli("--config '" + cfg.string() + "' coset-compose --samples 5", "config").status == 0);
  const auto j = load("config", "coset-compose");
  CHECK(j["manifest"]["seed"] == 11);
  CHECK(j["manifest"]["inputs"][0]["path"] == cfg.string());
}

TEST_CASE("all is reproducible") {
  const auto a = cli("all --seed 7", "all_a");
  const auto b = cli("all --seed 7", "all_b");
  CHECK(a.status == 0);
  CHECK(b.status == 0);
  auto strip = [](const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
      if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
    return out;
  };
  CHECK(strip(slurp(scratch() / "all_a" / "all.json")) == strip(slurp(scratch() / "all_b" / "all.json")));
  const auto j = load("all_a", "all");
  CHECK(j["details"]["criteria"].size() == 11);
  for (const auto& c : j["checks"]) CHECK(!c["paper_eq"].get<std::string>().empty());
}

}  // TEST_SUITE
