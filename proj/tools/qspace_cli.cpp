// qspace_cli: batch front end. Every subcommand writes <out>/<command>.json
// (plus <command>.csv for sweeps) and exits 0 when every check passes, 1 when
// a check fails and 2 on bad input or a truncation-guard violation.

#include "cli_commands.hpp"

#include "qspace/hilbert.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>

namespace {

using qspace::cli::CommandResult;
using qspace::report::Json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

void write_outputs(const std::filesystem::path& out_dir, const std::string& command, CommandResult& result) {
  auto& m = result.report.manifest;
  m.command = command;
  m.version = QSPACE_VERSION;
  m.timestamp = qspace::report::utc_timestamp();
  qspace::report::write_text(out_dir / (command + ".json"), qspace::report::dump(result.report.to_json()));
  if (result.csv) qspace::report::write_text(out_dir / (command + ".csv"), qspace::report::to_csv(*result.csv));
}

/// Report for a run that could not be carried out; the single failing check
/// keeps the summary honest.
CommandResult diagnostic(const std::string& what, std::optional<int> required_cutoff) {
  CommandResult r;
  r.report.checks.push_back(qspace::report::make_check("input_accepted", "plumbing", 1.0, 0.0, 0.0));
  r.report.details = {{"error", what}};
  if (required_cutoff) r.report.details["required_cutoff"] = *required_cutoff;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent-state representation and contraction toolkit for H_R(3)"};
  app.set_version_flag("--version", std::string(QSPACE_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = "reports";
  qspace::cli::CommonOptions common;
  int cutoff = 0;
  auto* config = app.set_config("--config", "", "TOML/INI file with flag values; command-line flags win");
  app.add_option("--out", out_dir, "Directory for reports")->capture_default_str();
  app.add_option("--seed", common.seed, "Seed for randomized checks")->capture_default_str();
  app.add_option("--backend", common.backend, "Hilbert-space backend")
      ->check(CLI::IsMember({"fock", "grid"}))
      ->capture_default_str();
  auto* cutoff_opt = app.add_option("--cutoff", cutoff, "Per-mode Fock cutoff")->check(CLI::Range(2, 4096));
  app.add_option("--modes", common.modes, "Number of oscillator modes")
      ->check(CLI::IsMember({1, 3}))
      ->capture_default_str();
  app.add_option("--k", common.k_values, "Contraction parameters, comma separated")->delimiter(',');
  app.add_option("--hbar", common.hbar_values, "hbar values, comma separated")->delimiter(',');
  app.add_option("--tolerance", common.tolerance_overrides, "Tolerance override KEY=VALUE (repeatable)");

  std::function<CommandResult()> run;
  auto bind = [&run](CLI::App* sub, auto fn) { sub->callback([&run, fn] { run = fn; }); };

  qspace::cli::AlgebraVerifyArgs verify;
  auto* s_verify = app.add_subcommand("algebra-verify", "Antisymmetry and Jacobi identity of a bracket table");
  auto* builtin_opt = s_verify->add_option("--builtin", verify.builtin, "HR3 or HR3_with_H")
                          ->check(CLI::IsMember({"HR3", "HR3_with_H"}))
                          ->capture_default_str();
  s_verify->add_option("--table", verify.table_file, "JSON bracket table")->check(CLI::ExistingFile)->excludes(builtin_opt);
  s_verify->add_option("--eps", verify.eps, "eps samples, comma separated")->delimiter(',');
  bind(s_verify, [&] { return qspace::cli::algebra_verify(common, verify); });

  qspace::cli::AlgebraContractArgs contract;
  auto* s_contract = app.add_subcommand("algebra-contract", "Rescaled brackets and the k -> infinity limit");
  s_contract->add_option("--builtin", contract.builtin, "HR3 or HR3_with_H")
      ->check(CLI::IsMember({"HR3", "HR3_with_H"}))
      ->capture_default_str();
  bind(s_contract, [&] { return qspace::cli::algebra_contract(common, contract); });

  qspace::cli::CosetComposeArgs compose;
  auto* s_compose = app.add_subcommand("coset-compose", "Matrix product of two Weyl elements vs. the group law");
  s_compose->add_option("--left", compose.left, "Label JSON {p, x, theta} or @file")->capture_default_str();
  s_compose->add_option("--right", compose.right, "Label JSON {p, x, theta} or @file")->capture_default_str();
  s_compose->add_option("--kind", compose.kind, "Coset realization")
      ->check(CLI::IsMember({"phase", "config"}))
      ->capture_default_str();
  s_compose->add_option("--samples", compose.samples, "Additional random pairs")->capture_default_str();
  bind(s_compose, [&] { return qspace::cli::coset_compose(common, compose); });

  qspace::cli::CoherentOverlapArgs overlap;
  auto* s_overlap = app.add_subcommand("coherent-overlap", "Coherent-state overlap and matrix elements");
  s_overlap->add_option("--bra", overlap.bra, "Label JSON or @file")->capture_default_str();
  s_overlap->add_option("--ket", overlap.ket, "Label JSON or @file")->capture_default_str();
  s_overlap->add_option("--grid-extent", overlap.grid_extent, "Grid half-width")->capture_default_str();
  s_overlap->add_option("--grid-points", overlap.grid_points, "Grid points (even)")->capture_default_str();
  bind(s_overlap, [&] { return qspace::cli::coherent_overlap(common, overlap); });

  qspace::cli::ContractSweepArgs sweep;
  auto* s_sweep = app.add_subcommand("contract-sweep", "Overlap decay of relabeled coherent states over k");
  s_sweep->add_option("--pair", sweep.pairs, "Label pair such as \"dx=1,dp=0\" (repeatable)");
  s_sweep->add_option("--policy", sweep.policy, "Cutoff policy")
      ->check(CLI::IsMember({"fixed", "scale-with-k"}))
      ->capture_default_str();
  s_sweep->add_option("--fock-k-max", sweep.fock_k_max, "Largest k computed numerically")->capture_default_str();
  bind(s_sweep, [&] { return qspace::cli::contract_sweep(common, sweep); });

  qspace::cli::StarBracketArgs bracket;
  auto* s_bracket = app.add_subcommand("star-bracket", "Exact Moyal bracket of two polynomials");
  s_bracket->add_option("--f", bracket.f, "Polynomial in x, p (or x1..x3, p1..p3)")->required();
  s_bracket->add_option("--g", bracket.g, "Polynomial")->required();
  s_bracket->add_option("--dim", bracket.dimension, "Phase-space dimension")->check(CLI::IsMember({1, 3}));
  bind(s_bracket, [&] { return qspace::cli::star_bracket(common, bracket); });

  qspace::cli::StarLimitSweepArgs limit;
  auto* s_limit = app.add_subcommand("star-limit-sweep", "Moyal minus Poisson deviation as hbar shrinks");
  s_limit->add_option("--f", limit.f, "Polynomial")->capture_default_str();
  s_limit->add_option("--g", limit.g, "Polynomial")->capture_default_str();
  s_limit->add_option("--dim", limit.dimension, "Phase-space dimension")->check(CLI::IsMember({1, 3}));
  bind(s_limit, [&] { return qspace::cli::star_limit_sweep(common, limit); });

  qspace::cli::FlowCheckArgs flow;
  auto* s_flow = app.add_subcommand("flow-check", "Schroedinger flow vs. Hamilton's equations on coefficients");
  s_flow->add_option("--label", flow.label, "Initial coherent label JSON or @file")->capture_default_str();
  s_flow->add_option("--t-final", flow.t_final, "Integration time")->capture_default_str();
  s_flow->add_option("--dt", flow.dt, "Step size")->capture_default_str();
  bind(s_flow, [&] { return qspace::cli::flow_check(common, flow); });

  auto* s_all = app.add_subcommand("all", "Acceptance criteria 1-11");
  bind(s_all, [&] { return qspace::cli::run_all(common); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }
  if (cutoff_opt->count()) common.cutoff = cutoff;

  const std::string command = app.get_subcommands().front()->get_name();
  CommandResult result;
  int status = kExitPass;
  try {
    result = run();
    if (config->count()) {
      const auto path = config->as<std::string>();
      result.report.manifest.input_digests.insert(result.report.manifest.input_digests.begin(),
                                                  {path, qspace::cli::sha256_file(path)});
    }
    result.report.manifest.seed = common.seed;
    status = result.report.all_pass() ? kExitPass : kExitFail;
    for (const auto& c : result.report.checks)
      if (c.check_id.ends_with(".truncation_guard")) status = kExitInput;
  } catch (const qspace::hilbert::TruncationGuardError& e) {
    std::cerr << "error: " << e.what() << " (required cutoff " << e.required_cutoff() << ")\n";
    result = diagnostic(e.what(), e.required_cutoff());
    status = kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    result = diagnostic(e.what(), std::nullopt);
    status = kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    result = diagnostic(e.what(), std::nullopt);
    status = kExitInput;
  }
  result.report.manifest.seed = common.seed;

  try {
    write_outputs(out_dir, command, result);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  const auto& checks = result.report.checks;
  const auto passed = std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  std::cout << command << ": " << passed << "/" << checks.size() << " checks passed -> "
            << (std::filesystem::path(out_dir) / (command + ".json")).string() << "\n";
  for (const auto& c : checks)
    if (!c.pass)
      std::cout << "  FAIL " << c.check_id << " measured=" << qspace::report::format_double(c.measured)
                << " predicted=" << qspace::report::format_double(c.predicted)
                << " tolerance=" << qspace::report::format_double(c.tolerance) << "\n";
  for (const auto& line : result.console) std::cout << line << "\n";
  return status;
}
