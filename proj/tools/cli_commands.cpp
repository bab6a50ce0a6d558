#include "cli_commands.hpp"

#include "qspace/acceptance.hpp"
#include "qspace/contraction_lab.hpp"
#include "qspace/coset_rep.hpp"
#include "qspace/hilbert.hpp"
#include "qspace/lie_core.hpp"
#include "qspace/star_product.hpp"

#include <openssl/evp.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

namespace qspace::cli {

using report::Json;
using report::make_check;

namespace {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

double to_double(const star::Rational& q) { return q.convert_to<double>(); }

std::vector<double> parse_number_list(const std::vector<std::string>& tokens, const char* flag) {
  std::vector<double> out;
  for (const auto& t : tokens) {
    try {
      out.push_back(to_double(star::parse_rational(t)));
    } catch (const std::exception&) {
      throw InputError(std::string(flag) + ": '" + t + "' is not a number");
    }
  }
  return out;
}

std::vector<star::Rational> parse_rational_list(const std::vector<std::string>& tokens, const char* flag) {
  std::vector<star::Rational> out;
  for (const auto& t : tokens) {
    try {
      out.push_back(star::parse_rational(t));
    } catch (const std::exception&) {
      throw InputError(std::string(flag) + ": '" + t + "' is not an exact number");
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void require_modes(int modes) {
  if (modes != 1 && modes != 3) throw InputError("--modes must be 1 or 3");
}

void add_digest(report::Manifest& manifest, const std::string& path) {
  manifest.input_digests.emplace_back(path, sha256_file(path));
}

}  // namespace

Tolerances::Tolerances(std::map<std::string, double> defaults, const std::vector<std::string>& overrides)
    : values_(std::move(defaults)) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw InputError("--tolerance expects KEY=VALUE, got '" + o + "'");
    const std::string key = o.substr(0, eq);
    auto it = values_.find(key);
    if (it == values_.end()) {
      std::string known;
      for (const auto& [k, v] : values_) known += (known.empty() ? "" : ", ") + k;
      throw InputError("unknown tolerance key '" + key + "' (known: " + (known.empty() ? "none" : known) + ")");
    }
    double value = 0.0;
    try {
      value = to_double(star::parse_rational(o.substr(eq + 1)));
    } catch (const std::exception&) {
      throw InputError("tolerance '" + key + "' needs a numeric value");
    }
    if (!(value >= 0.0)) throw InputError("tolerance '" + key + "' must be non-negative");
    it->second = value;
  }
}

double Tolerances::operator[](const std::string& key) const { return values_.at(key); }

Json Tolerances::to_json() const {
  Json j = Json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

std::string sha256_file(const std::string& path) {
  const std::string bytes = read_file(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1)
    throw std::runtime_error("SHA-256 failed for '" + path + "'");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

nlohmann::json read_json_argument(const std::string& text, report::Manifest& manifest) {
  std::string source = text;
  if (!text.empty() && text[0] == '@') {
    const std::string path = text.substr(1);
    source = read_file(path);
    add_digest(manifest, path);
  }
  try {
    return nlohmann::json::parse(source);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed JSON argument '" + text + "': " + e.what());
  }
}

// ---------------------------------------------------------------- algebra

CommandResult algebra_verify(const CommonOptions& common, const AlgebraVerifyArgs& args) {
  CommandResult out;
  auto& r = out.report;
  const Tolerances tol({{"jacobi", 1e-12}}, common.tolerance_overrides);
  const auto eps = parse_number_list(args.eps, "--eps");
  if (eps.empty()) throw InputError("--eps needs at least one value");

  lie::StructureConstantTable table = [&] {
    if (args.table_file.empty()) {
      // The builtin tables carry no eps; verify their rescaled form so every eps sample matters.
      return lie::standard_contraction(lie::build_standard_algebra(args.builtin)).symbolic();
    }
    add_digest(r.manifest, args.table_file);
    try {
      return lie::table_from_json(nlohmann::json::parse(read_file(args.table_file)));
    } catch (const nlohmann::json::exception& e) {
      throw InputError("malformed table '" + args.table_file + "': " + e.what());
    }
  }();

  const auto v = lie::verify_algebra(table, eps);
  const double symbolic = lie::symbolic_jacobi_max(table);
  r.checks.push_back(make_check("antisymmetry", "algebra-brackets", v.antisymmetry_max, 0.0, 0.0));
  r.checks.push_back(make_check("jacobi", "algebra-brackets", v.jacobi_max, 0.0, tol["jacobi"]));
  r.checks.push_back(make_check("jacobi_symbolic", "algebra-brackets", symbolic, 0.0, tol["jacobi"]));

  r.manifest.parameters = {{"builtin", args.table_file.empty() ? Json(args.builtin) : Json(nullptr)},
                           {"table", args.table_file.empty() ? Json(nullptr) : Json(args.table_file)},
                           {"eps", eps},
                           {"tolerances", tol.to_json()}};
  Json names = Json::array();
  for (const auto& g : table.generators()) names.push_back(g.name);
  r.details = {{"algebra", table.name()},
               {"generators", names},
               {"antisymmetry_max", v.antisymmetry_max},
               {"jacobi_max", v.jacobi_max},
               {"jacobi_symbolic_max", symbolic},
               {"eps_samples", eps}};
  return out;
}

CommandResult algebra_contract(const CommonOptions& common, const AlgebraContractArgs& args) {
  CommandResult out;
  auto& r = out.report;
  const Tolerances tol({{"coupling", 1e-15}, {"jacobi", 1e-12}}, common.tolerance_overrides);
  const auto ks = common.k_values.empty() ? std::vector<double>{1, 2, 4, 8, 16}
                                          : parse_number_list(common.k_values, "--k");
  for (double k : ks)
    if (!(k >= 1.0)) throw InputError("--k values must be >= 1");

  const auto base = lie::build_standard_algebra(args.builtin);
  const auto family = lie::standard_contraction(base);
  const auto limit = lie::limit_algebra(family);
  const auto central = limit.index_of("I");

  double xp = 0.0, central_terms = 0.0, rotation_change = 0.0;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      for (const auto& t : limit.entry(limit.index_of("X" + std::to_string(i) + "^c"),
                                       limit.index_of("P" + std::to_string(j) + "^c")))
        xp = std::max(xp, std::abs(t.coefficient));
  for (std::size_t a = 0; a < limit.dimension(); ++a)
    for (std::size_t b = 0; b < limit.dimension(); ++b)
      for (const auto& t : limit.entry(a, b))
        if (t.generator == central) central_terms += 1.0;
  const auto fl = limit.dense_at(0.0);
  const auto fb = base.dense_at(0.0);
  for (const char* name : {"J23", "J31", "J12"}) {
    const auto a = limit.index_of(name);
    rotation_change = std::max(rotation_change, (fl[a] - fb[a]).cwiseAbs().maxCoeff());
  }
  r.checks.push_back(make_check("limit.position_momentum_bracket", "contraction-limit", xp, 0.0, 0.0));
  r.checks.push_back(make_check("limit.central_absent", "contraction-limit", central_terms, 0.0, 0.0));
  r.checks.push_back(make_check("limit.rotation_brackets_unchanged", "contraction-limit", rotation_change, 0.0, 0.0));
  r.checks.push_back(make_check("limit.jacobi", "contraction-limit", lie::symbolic_jacobi_max(limit), 0.0, 0.0));

  Json per_k = Json::array();
  for (double k : ks) {
    const auto at = lie::apply_contraction(family, k);
    double coupling = 0.0;
    for (const auto& t : at.entry(at.index_of("X1^c"), at.index_of("P1^c")))
      if (t.generator == at.index_of("I")) coupling = t.coefficient;
    const double jacobi = lie::verify_algebra(at, {0.0}).jacobi_max;
    const std::string id = "k" + short_number(k);
    r.checks.push_back(make_check(id + ".central_coupling", "contraction-limit", coupling, 1.0 / (k * k), tol["coupling"]));
    r.checks.push_back(make_check(id + ".jacobi", "algebra-brackets", jacobi, 0.0, tol["jacobi"]));
    per_k.push_back({{"k", k}, {"central_coupling", coupling}, {"jacobi_max", jacobi}});
  }

  r.manifest.parameters = {{"builtin", args.builtin}, {"k", ks}, {"tolerances", tol.to_json()}};
  r.details = {{"per_k", per_k}, {"limit_algebra", lie::to_json(limit)}};
  return out;
}

// ---------------------------------------------------------------- coset

CommandResult coset_compose(const CommonOptions& common, const CosetComposeArgs& args) {
  CommandResult out;
  auto& r = out.report;
  const Tolerances tol({{"group_law", 1e-10}}, common.tolerance_overrides);
  const auto kind = coset::parse_coset_kind(args.kind);
  if (args.samples < 0) throw InputError("--samples must be non-negative");
  const WeylLabel left = weyl_label_from_json(read_json_argument(args.left, r.manifest));
  const WeylLabel right = weyl_label_from_json(read_json_argument(args.right, r.manifest));

  const auto c = coset::compose(coset::group_element(kind, left), coset::group_element(kind, right));
  r.checks.push_back(make_check("matrix_vs_group_law", "weyl-group-law", c.max_abs_diff, 0.0, tol["group_law"]));
  if (c.product_label && c.formula_label)
    r.checks.push_back(make_check("label_vs_group_law", "weyl-group-law",
                                  max_abs_diff(*c.product_label, *c.formula_label), 0.0, tol["group_law"]));

  Json random_json = nullptr;
  if (args.samples > 0) {
    std::mt19937_64 rng(common.seed);
    std::uniform_real_distribution<double> coord(-2.0, 2.0), angle(-std::numbers::pi, std::numbers::pi);
    auto draw = [&] {
      WeylLabel w;
      for (int i = 0; i < 3; ++i) {
        w.p[i] = coord(rng);
        w.x[i] = coord(rng);
      }
      w.theta = angle(rng);
      return w;
    };
    double worst = 0.0;
    for (int s = 0; s < args.samples; ++s) {
      const WeylLabel a = draw(), b = draw();
      worst = std::max(worst, coset::compose(coset::group_element(kind, a), coset::group_element(kind, b)).max_abs_diff);
    }
    r.checks.push_back(make_check("random_pairs.max_abs_diff", "weyl-group-law", worst, 0.0, tol["group_law"]));
    random_json = {{"samples", args.samples}, {"max_abs_diff", worst}};
  }

  Json rows = Json::array();
  for (Eigen::Index i = 0; i < c.product.entries.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < c.product.entries.cols(); ++j) row.push_back(c.product.entries(i, j));
    rows.push_back(row);
  }
  r.manifest.parameters = {{"kind", args.kind},
                           {"left", to_json(left)},
                           {"right", to_json(right)},
                           {"samples", args.samples},
                           {"tolerances", tol.to_json()}};
  r.details = {{"product_matrix", rows},
               {"product_label", c.product_label ? Json(to_json(*c.product_label)) : Json(nullptr)},
               {"formula_label", c.formula_label ? Json(to_json(*c.formula_label)) : Json(nullptr)},
               {"random", random_json}};
  return out;
}

// ---------------------------------------------------------------- coherent states

CommandResult coherent_overlap(const CommonOptions& common, const CoherentOverlapArgs& args) {
  CommandResult out;
  auto& r = out.report;
  require_modes(common.modes);
  const double default_overlap_tol = common.modes == 1 ? 1e-8 : 1e-6;
  const Tolerances tol({{"overlap", default_overlap_tol}, {"matrix_element", default_overlap_tol}},
                       common.tolerance_overrides);
  const auto backend = hilbert::parse_backend(common.backend);
  const WeylLabel bra = weyl_label_from_json(read_json_argument(args.bra, r.manifest));
  const WeylLabel ket = weyl_label_from_json(read_json_argument(args.ket, r.manifest));
  const int cutoff = common.cutoff.value_or(common.modes == 1 ? 64 : 16);

  r.manifest.parameters = {{"bra", to_json(bra)},   {"ket", to_json(ket)},
                           {"backend", common.backend}, {"modes", common.modes},
                           {"cutoff", cutoff},       {"tolerances", tol.to_json()}};
  const hilbert::Complex closed = hilbert::overlap_closed_form(bra, ket);
  r.details["closed_form"] = complex_json(closed);
  r.details["closed_form_abs"] = std::abs(closed);

  if (backend == hilbert::Backend::fock) {
    const hilbert::FockSpace space(common.modes, cutoff);
    const auto sb = hilbert::coherent_state(space, bra);
    const auto sk = hilbert::coherent_state(space, ket);
    const hilbert::Complex numeric = hilbert::overlap(sb, sk);
    r.checks.push_back(make_check("overlap.relative_error", "coherent-overlap",
                                  std::abs(numeric - closed) / std::abs(closed), 0.0, tol["overlap"]));
    Json elements = Json::array();
    for (int mode = 0; mode < common.modes; ++mode)
      for (auto kind : {hilbert::ObservableKind::position, hilbert::ObservableKind::momentum}) {
        const auto me = hilbert::matrix_element(space, {kind, mode}, sb, sk);
        const std::string name =
            std::string(kind == hilbert::ObservableKind::position ? "X" : "P") + std::to_string(mode + 1);
        r.checks.push_back(make_check("matrix_element." + name + ".relative_error", "coherent-matrix-elements",
                                      me.relative_error.value_or(std::nan("")), 0.0, tol["matrix_element"]));
        elements.push_back({{"observable", name},
                            {"numeric", complex_json(me.numeric)},
                            {"closed_form", me.closed_form ? complex_json(*me.closed_form) : Json(nullptr)}});
      }
    r.details["numeric"] = complex_json(numeric);
    r.details["truncation_tail"] = {{"bra", sb.truncation_tail}, {"ket", sk.truncation_tail}};
    r.details["matrix_elements"] = elements;
  } else {
    if (common.modes != 1) throw InputError("the grid backend is one-dimensional; use --modes 1");
    const hilbert::GridSpace grid(args.grid_extent, args.grid_points);
    const auto sb = hilbert::grid_coherent_state(grid, bra.p[0], bra.x[0], bra.theta);
    const auto sk = hilbert::grid_coherent_state(grid, ket.p[0], ket.x[0], ket.theta);
    const hilbert::Complex numeric = hilbert::overlap(sb, sk);
    r.checks.push_back(make_check("overlap.relative_error", "coherent-overlap",
                                  std::abs(numeric - closed) / std::abs(closed), 0.0, tol["overlap"]));
    const auto cv = hilbert::cross_validate_backends(hilbert::FockSpace(1, cutoff), grid, bra, ket);
    r.checks.push_back(make_check("fock_vs_grid", "coherent-overlap", cv.difference, 0.0, cv.tolerance));
    r.manifest.parameters["grid_extent"] = args.grid_extent;
    r.manifest.parameters["grid_points"] = args.grid_points;
    r.details["numeric"] = complex_json(numeric);
    r.details["fock"] = complex_json(cv.fock);
    r.details["truncation_tail"] = {{"bra", sb.truncation_tail}, {"ket", sk.truncation_tail}};
  }
  return out;
}

// ---------------------------------------------------------------- contraction

CommandResult contract_sweep(const CommonOptions& common, const ContractSweepArgs& args) {
  CommandResult out;
  auto& r = out.report;
  const Tolerances tol({{"closed_form", 1e-12}, {"fock", 1e-4}, {"slope_relative", 0.01}},
                       common.tolerance_overrides);
  if (!common.k_values.empty() && !common.hbar_values.empty()) throw InputError("give either --k or --hbar, not both");

  contraction::ContractionRunConfig config;
  if (!common.k_values.empty()) config.k_values = parse_number_list(common.k_values, "--k");
  if (!common.hbar_values.empty()) {
    config.k_values.clear();
    for (double h : parse_number_list(common.hbar_values, "--hbar")) config.k_values.push_back(contraction::k_from_hbar(h));
  }
  config.policy = contraction::parse_cutoff_policy(args.policy);
  config.fixed_cutoff = common.cutoff.value_or(64);
  config.modes = common.modes;
  config.fock_k_max = args.fock_k_max;
  const auto specs = args.pairs.empty() ? std::vector<std::string>{"dx=1,dp=0"} : args.pairs;
  for (const auto& s : specs) config.pairs.push_back(contraction::parse_label_pair(s, s));
  config.validate();

  const auto records = contraction::overlap_decay_sweep(config);

  report::CsvTable csv;
  csv.header = {"k", "hbar", "pair_id", "overlap_abs", "overlap_phase", "predicted_abs", "predicted_phase",
                "abs_err", "phase_err", "backend", "cutoff"};
  bool guard_violation = false;
  Json guard_records = Json::array();
  for (const auto& rec : records) {
    csv.rows.push_back({report::format_double(rec.k), report::format_double(rec.hbar), rec.pair_id,
                        report::format_double(rec.overlap_abs), report::format_double(rec.overlap_phase),
                        report::format_double(rec.predicted_abs), report::format_double(rec.predicted_phase),
                        report::format_double(rec.abs_err), report::format_double(rec.phase_err), rec.backend,
                        std::to_string(rec.cutoff)});
    const std::string id = rec.pair_id + ".k" + short_number(rec.k);
    r.checks.push_back(make_check(id + ".closed_form_abs", "contraction-overlap-decay", std::abs(rec.closed_form),
                                  rec.predicted_abs, tol["closed_form"]));
    if (rec.numeric) {
      r.checks.push_back(make_check(id + ".fock_abs", "contraction-overlap-decay", std::abs(*rec.numeric),
                                    rec.predicted_abs, tol["fock"]));
      r.checks.push_back(make_check(id + ".fock_phase", "contraction-overlap-decay", rec.phase_err, 0.0, tol["fock"]));
    }
    if (rec.guard_error) {
      guard_violation = true;
      r.checks.push_back(make_check(id + ".truncation_guard", "plumbing", 1.0, 0.0, 0.0));
      guard_records.push_back({{"pair_id", rec.pair_id}, {"k", rec.k}, {"error", *rec.guard_error}});
    }
  }

  Json slopes = Json::array();
  for (const auto& pair : config.pairs) {
    std::vector<double> ks, values;
    for (const auto& rec : records)
      if (rec.pair_id == pair.id) {
        ks.push_back(rec.k);
        values.push_back(rec.overlap_abs);
      }
    const double distance2 = (pair.bra.x - pair.ket.x).squaredNorm() + (pair.bra.p - pair.ket.p).squaredNorm();
    const double predicted = -distance2 / 4.0;
    if (ks.size() >= 2) {
      const double slope = contraction::log_slope_against_k_squared(ks, values);
      const double allowance = predicted == 0.0 ? 1e-12 : tol["slope_relative"] * std::abs(predicted);
      r.checks.push_back(make_check(pair.id + ".log_slope", "contraction-overlap-decay", slope, predicted, allowance));
      slopes.push_back({{"pair_id", pair.id}, {"slope", slope}, {"predicted", predicted}});
    }
  }

  Json pairs_json = Json::array();
  for (const auto& pair : config.pairs)
    pairs_json.push_back({{"id", pair.id}, {"bra", to_json(pair.bra)}, {"ket", to_json(pair.ket)}});
  r.manifest.parameters = {{"k", config.k_values},
                           {"pairs", pairs_json},
                           {"policy", args.policy},
                           {"fixed_cutoff", config.fixed_cutoff},
                           {"modes", config.modes},
                           {"fock_k_max", config.fock_k_max},
                           {"tolerances", tol.to_json()}};
  r.details = {{"rows", records.size()}, {"slopes", slopes}, {"guard_violations", guard_records}};
  out.csv = std::move(csv);
  if (guard_violation) out.console.push_back("truncation guard violated; see details.guard_violations");
  return out;
}

// ---------------------------------------------------------------- star product

namespace {

std::pair<star::PhasePolynomial, star::PhasePolynomial> parse_pair(const std::string& f, const std::string& g,
                                                                   std::optional<int> dimension) {
  if (dimension && *dimension != 1 && *dimension != 3) throw InputError("--dim must be 1 or 3");
  auto pf = star::parse_polynomial(f, dimension);
  auto pg = star::parse_polynomial(g, dimension);
  if (pf.dimension() != pg.dimension()) {
    pf = star::parse_polynomial(f, 3);
    pg = star::parse_polynomial(g, 3);
  }
  return {pf, pg};
}

int odd_hbar_terms(const star::PhasePolynomial& poly) {
  int count = 0;
  for (const auto& [m, c] : poly.terms())
    if (m.hbar % 2 != 0) ++count;
  return count;
}

}  // namespace

CommandResult star_bracket(const CommonOptions& common, const StarBracketArgs& args) {
  CommandResult out;
  auto& r = out.report;
  const Tolerances tol({}, common.tolerance_overrides);
  if (args.f.empty() || args.g.empty()) throw InputError("star-bracket needs --f and --g");
  if (common.hbar_values.size() > 1) throw InputError("star-bracket takes a single --hbar value");
  const auto [f, g] = parse_pair(args.f, args.g, args.dimension);

  const auto series = star::moyal_bracket_series(f, g);
  const auto reversed = star::moyal_bracket_series(g, f);
  const auto poisson = star::poisson_bracket(f, g);
  const auto correction = series - poisson;
  r.checks.push_back(make_check("classical_limit", "moyal-bracket-limit",
                                (series.substitute_hbar(star::Rational(0)) - poisson).coefficient_norm(0.0), 0.0, 0.0));
  r.checks.push_back(make_check("antisymmetry", "moyal-star-product", (series + reversed).coefficient_norm(0.0), 0.0, 0.0));
  r.checks.push_back(make_check("correction.odd_hbar_terms", "moyal-bracket-limit", odd_hbar_terms(correction), 0.0, 0.0));

  const std::string fs = f.to_string(), gs = g.to_string();
  out.console.push_back("{" + fs + ", " + gs + "}_moyal = " + series.to_string());
  r.details = {{"f", fs},
               {"g", gs},
               {"dimension", f.dimension()},
               {"star_product", star::star_series(f, g).to_string()},
               {"moyal_bracket", series.to_string()},
               {"poisson_bracket", poisson.to_string()},
               {"correction", correction.to_string()}};
  r.manifest.parameters = {{"f", args.f}, {"g", args.g}, {"dimension", f.dimension()}, {"hbar", nullptr}};

  if (!common.hbar_values.empty()) {
    const auto h = parse_rational_list(common.hbar_values, "--hbar").front();
    const star::StarContext ctx{f.dimension(), h};
    const auto numeric = star::moyal_bracket(ctx, f, g);
    const auto substituted = series.substitute_hbar(h);
    r.checks.push_back(make_check("numeric_hbar_matches_series", "moyal-star-product",
                                  (numeric - substituted).coefficient_norm(0.0), 0.0, 0.0));
    const std::string hs = star::to_string(h);
    out.console.push_back("{" + fs + ", " + gs + "}_moyal at hbar=" + hs + " = " + numeric.to_string());
    r.details["hbar"] = hs;
    r.details["moyal_bracket_at_hbar"] = numeric.to_string();
    r.details["correction_at_hbar"] = (numeric - poisson).to_string();
    r.manifest.parameters["hbar"] = hs;
  }
  out.console.push_back("{" + fs + ", " + gs + "}_poisson = " + poisson.to_string());
  r.manifest.parameters["tolerances"] = tol.to_json();
  return out;
}

CommandResult star_limit_sweep(const CommonOptions& common, const StarLimitSweepArgs& args) {
  CommandResult out;
  auto& r = out.report;
  const Tolerances tol({{"slope", 0.05}}, common.tolerance_overrides);
  const auto [f, g] = parse_pair(args.f, args.g, args.dimension);
  const auto hbars = common.hbar_values.empty()
                         ? std::vector<star::Rational>{star::Rational(1, 10), star::Rational(1, 100), star::Rational(1, 1000)}
                         : parse_rational_list(common.hbar_values, "--hbar");
  const auto sweep = star::classical_limit_sweep(f, g, hbars);

  report::CsvTable csv;
  csv.header = {"hbar", "bracket_deviation", "product_deviation"};
  Json hbar_json = Json::array();
  double largest = 0.0;
  for (const auto& rec : sweep.records) {
    csv.rows.push_back({report::format_double(to_double(rec.hbar)), report::format_double(rec.bracket_deviation),
                        report::format_double(rec.product_deviation)});
    hbar_json.push_back(star::to_string(rec.hbar));
    largest = std::max(largest, rec.bracket_deviation);
  }
  if (sweep.bracket_slope)
    r.checks.push_back(make_check("bracket_slope", "moyal-bracket-limit", *sweep.bracket_slope, 2.0, tol["slope"]));
  else
    r.checks.push_back(make_check("bracket_deviation", "moyal-bracket-limit", largest, 0.0, 0.0));
  int bad_powers = 0;
  for (int power : sweep.correction_powers)
    if (power < 2 || power % 2 != 0) ++bad_powers;
  r.checks.push_back(make_check("correction_powers_even", "moyal-bracket-limit", bad_powers, 0.0, 0.0));

  r.manifest.parameters = {{"f", args.f}, {"g", args.g}, {"hbar", hbar_json}, {"tolerances", tol.to_json()}};
  r.details = {{"bracket_slope", sweep.bracket_slope ? Json(*sweep.bracket_slope) : Json(nullptr)},
               {"product_slope", sweep.product_slope ? Json(*sweep.product_slope) : Json(nullptr)},
               {"correction_powers", sweep.correction_powers},
               {"correction", (star::moyal_bracket_series(f, g) - star::poisson_bracket(f, g)).to_string()}};
  out.csv = std::move(csv);
  return out;
}

// ---------------------------------------------------------------- projective flow

CommandResult flow_check(const CommonOptions& common, const FlowCheckArgs& args) {
  CommandResult out;
  auto& r = out.report;
  const Tolerances tol({{"trajectory", 1e-6}, {"norm", 1e-8}, {"step_halving", 1e-6}, {"propagator", 1e-6},
                        {"hamilton_factor", 1e-12}},
                       common.tolerance_overrides);
  if (common.modes != 1) throw InputError("flow-check runs a single oscillator; use --modes 1");
  const int cutoff = common.cutoff.value_or(32);
  const WeylLabel label = weyl_label_from_json(read_json_argument(args.label, r.manifest));
  const hilbert::FockSpace space(1, cutoff);
  const Eigen::MatrixXcd h = hilbert::harmonic_hamiltonian(space);
  const auto initial = hilbert::coherent_state(space, label).coefficients;
  const auto flow = hilbert::projective_flow_check(h, initial, args.t_final, args.dt);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const Eigen::VectorXcd phases =
      (eig.eigenvalues().cast<hilbert::Complex>() * hilbert::Complex(0.0, -args.t_final)).array().exp().matrix();
  const Eigen::VectorXcd exact = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint() * initial;

  r.checks.push_back(make_check("trajectory_deviation", "projective-hamilton-flow", flow.max_trajectory_deviation, 0.0,
                                tol["trajectory"]));
  r.checks.push_back(make_check("norm_drift", "projective-hamilton-flow", flow.norm_drift, 0.0, tol["norm"]));
  r.checks.push_back(make_check("step_halving", "projective-hamilton-flow", flow.step_halving_error, 0.0,
                                tol["step_halving"]));
  r.checks.push_back(make_check("final_state_vs_spectral_propagator", "projective-hamilton-flow",
                                (flow.final_state - exact).cwiseAbs().maxCoeff(), 0.0, tol["propagator"]));
  r.checks.push_back(make_check("hamilton_factor", "projective-hamilton-flow",
                                hilbert::calibrate_hamilton_factor(h, initial), hilbert::kHamiltonFactor,
                                tol["hamilton_factor"]));
  r.manifest.parameters = {{"label", to_json(label)},
                           {"cutoff", cutoff},
                           {"t_final", args.t_final},
                           {"dt", args.dt},
                           {"tolerances", tol.to_json()}};
  r.details = {{"steps", flow.steps}, {"energy_drift", flow.energy_drift}};
  return out;
}

// ---------------------------------------------------------------- acceptance

CommandResult run_all(const CommonOptions& common) {
  CommandResult out;
  auto& r = out.report;
  const Tolerances tol({}, common.tolerance_overrides);
  acceptance::SuiteOptions options;
  options.seed = common.seed;
  Json criteria = Json::array();
  for (const auto& entry : acceptance::criteria()) {
    const auto result = entry.run(options);
    for (auto check : result.checks) {
      check.check_id = "c" + std::to_string(result.id) + "." + check.check_id;
      r.checks.push_back(std::move(check));
    }
    criteria.push_back(
        {{"id", result.id}, {"title", result.title}, {"pass", result.checks_pass()}, {"details", result.details}});
    out.console.push_back("criterion " + std::to_string(result.id) + " (" + result.title +
                          "): " + (result.checks_pass() ? "PASS" : "FAIL"));
  }
  r.manifest.parameters = {{"criteria", criteria.size()}};
  r.details = {{"criteria", criteria}};
  return out;
}

}  // namespace qspace::cli
