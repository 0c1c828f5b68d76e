#include "cli.hpp"

#include "cscb/elliptic.hpp"
#include "cscb/fiber_geometry.hpp"
#include "cscb/join_solver.hpp"
#include "cscb/yamabe.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace cscb::cli {

using nlohmann::json;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Verify: return "verify";
    case Command::Families: return "families";
    case Command::Count: return "count";
    case Command::Thresholds: return "thresholds";
  }
  return "verify";
}

std::string_view to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

std::map<std::string, double> default_tolerances() {
  return {
      {"identity", 1e-12},      {"derivative-identity", 1e-10},
      {"parameter", 1e-10},          {"residual", 1e-8},
      {"boundary", 1e-10},      {"conservation", 1e-11},
      {"match", 1e-9},          {"recheck", 1e-7},
  };
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput("config line " + std::to_string(lineno) +
                         ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Parameter access

class Params {
 public:
  explicit Params(const RunConfig& cfg) : cfg_(cfg) {}

  bool has(const std::string& name) const { return cfg_.params.count(name) > 0; }

  double real(const std::string& name) const {
    const auto it = cfg_.params.find(name);
    if (it == cfg_.params.end()) throw InvalidInput("missing required parameter --" + name);
    if (!std::isfinite(it->second)) throw InvalidInput("parameter --" + name + " must be finite");
    return it->second;
  }
  double real(const std::string& name, double fallback) const {
    return has(name) ? real(name) : fallback;
  }
  int integer(const std::string& name) const {
    const double v = real(name);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      throw InvalidInput("parameter --" + name + " must be an integer");
    }
    return static_cast<int>(v);
  }
  int integer(const std::string& name, int fallback) const {
    return has(name) ? integer(name) : fallback;
  }
  double tol(const std::string& name) const {
    const auto it = cfg_.tolerances.find(name);
    if (it != cfg_.tolerances.end()) return it->second;
    return default_tolerances().at(name);
  }

 private:
  const RunConfig& cfg_;
};

json base_report(const RunConfig& cfg) {
  json params = json::object();
  for (const auto& [k, v] : cfg.params) params[k] = v;
  params["seed"] = cfg.seed;
  params["format"] = std::string(to_string(cfg.format));
  if (cfg.command == Command::Count) params["factor"] = cfg.factor;

  json tols = json::object();
  for (const auto& [k, v] : default_tolerances()) {
    const auto it = cfg.tolerances.find(k);
    tols[k] = it != cfg.tolerances.end() ? it->second : v;
  }
  return json{{"schema", std::string(kSchemaVersion)},
              {"command", std::string(to_string(cfg.command))},
              {"params", params},
              {"results", json::object()},
              {"tolerances", tols},
              {"pass", false}};
}

std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string b2s(bool b) { return b ? "true" : "false"; }

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::domain_error& e) {
    throw InvalidInput(e.what());
  } catch (const std::invalid_argument& e) {
    throw InvalidInput(e.what());
  }
}

join::JoinParams join_params(const Params& p) {
  join::JoinParams jp;
  jp.base.m = p.integer("base-dim", 1);
  jp.base.scal = p.real("base-scal", 0.0);
  jp.k1 = p.integer("k1");
  jp.k2 = p.integer("k2");
  jp.a1 = p.real("a1");
  jp.a2 = p.real("a2");
  guarded([&] { jp.validate(); });
  return jp;
}

// ---------------------------------------------------------------------------
// verify

CommandResult cmd_verify(const RunConfig& cfg) {
  const Params p(cfg);
  const join::JoinParams jp = join_params(p);
  const int grid = p.integer("grid", 500);
  const int order = p.integer("boundary-order", 2);
  const int random_points = p.integer("random-points", 0);
  if (grid < 2) throw InvalidInput("--grid must be >= 2");
  if (order < 1 || order > 4) throw InvalidInput("--boundary-order must be in 1..4");
  if (random_points < 0) throw InvalidInput("--random-points must be >= 0");
  if (p.has("modulus") && p.has("modulus-sq")) {
    throw InvalidInput("give either --modulus or --modulus-sq, not both");
  }

  std::optional<elliptic::Modulus> k;
  guarded([&] {
    if (p.has("modulus")) k = elliptic::Modulus(p.real("modulus"));
    if (p.has("modulus-sq")) k = elliptic::Modulus::from_squared(p.real("modulus-sq"));
  });

  const join::WarpSolution sol = guarded([&] {
    if (k && k->value() > 0.0) {
      return p.has("gamma") ? join::raw_solution(jp, *k, p.real("gamma"))
                            : join::elliptic_solution(jp, *k);
    }
    return join::round_solution(jp, p.real("gamma", 1.0));
  });

  const join::ResidualReport res = join::verify_residual(jp, sol, grid);
  const geometry::ProfilePair prof = join::build_profiles(sol);
  const geometry::BoundaryReport bc = geometry::check_boundary(
      prof, order, {p.tol("boundary"), 1e-4, 1e-5});
  const join::ConservationReport cons = join::conservation_residuals(sol, grid);
  const double param_res = join::parameter_equation_residual(jp, sol.k, sol.gamma);

  // Seeded interior points on top of the uniform grid.
  double random_dev = 0.0;
  {
    std::mt19937_64 rng(cfg.seed);
    const double lo = geometry::kEndpointFraction * sol.T;
    std::uniform_real_distribution<double> dist(lo, sol.T - lo);
    const geometry::SubmersionConstants c = jp.constants();
    for (int i = 0; i < random_points; ++i) {
      const double t = dist(rng);
      random_dev = std::max(
          random_dev,
          std::abs(geometry::scal_join_total(jp.base, c, prof, t) - sol.scal_total));
    }
  }

  // Elliptic identities at the profile arguments gamma t.
  double pyth = 0.0, dn_id = 0.0, cn_d = 0.0, sn_d = 0.0;
  std::vector<std::vector<std::string>> series;
  {
    const double lo = geometry::kEndpointFraction * sol.T;
    const double k2 = sol.k.squared();
    const geometry::SubmersionConstants c = jp.constants();
    for (int i = 0; i < grid; ++i) {
      const double t = lo + (sol.T - 2.0 * lo) * double(i) / double(grid - 1);
      const auto v = elliptic::jacobi(sol.gamma * t, sol.k);
      const auto d = elliptic::jacobi_derivatives(v, sol.k);
      pyth = std::max(pyth, std::abs(v.cn * v.cn + v.sn * v.sn - 1.0));
      dn_id = std::max(dn_id, std::abs(v.dn * v.dn - (1.0 - k2 * v.sn * v.sn)));
      cn_d = std::max(cn_d, std::abs(d.cn_d1 * d.cn_d1 -
                                     (1.0 - v.cn * v.cn) * (1.0 - k2 + k2 * v.cn * v.cn)));
      sn_d = std::max(sn_d, std::abs(d.sn_d1 * d.sn_d1 -
                                     (1.0 - v.sn * v.sn) * (1.0 - k2 * v.sn * v.sn)));
      const double scal = geometry::scal_join_total(jp.base, c, prof, t);
      series.push_back({format_double(t), format_double(scal),
                        format_double(scal - sol.scal_total)});
    }
  }

  json boundary = json::object();
  for (const auto& cnd : bc.conditions) boundary[cnd.name] = cnd.residual;

  const bool pass = std::abs(param_res) <= p.tol("parameter") &&
                    res.max_deviation <= p.tol("residual") &&
                    random_dev <= p.tol("residual") && bc.passed &&
                    cons.value <= p.tol("conservation") &&
                    cons.derivative <= p.tol("conservation") &&
                    pyth <= p.tol("identity") && dn_id <= p.tol("identity") &&
                    cn_d <= p.tol("derivative-identity") &&
                    sn_d <= p.tol("derivative-identity");

  CommandResult out;
  out.report = base_report(cfg);
  out.report["results"] = {
      {"branch", std::string(join::to_string(sol.family))},
      {"modulus", sol.k.value()},
      {"modulus_sq", sol.k.squared()},
      {"gamma", sol.gamma},
      {"T", sol.T},
      {"R", sol.scal_total},
      {"R_minus_base", sol.scal_total - jp.base.scal},
      {"parameter_residual", param_res},
      {"max_residual", res.max_deviation},
      {"residual_range", {res.min_value, res.max_value}},
      {"random_points_max_residual", random_dev},
      {"boundary_residuals", boundary},
      {"conservation", {{"value", cons.value}, {"derivative", cons.derivative}}},
      {"elliptic_identities",
       {{"cn2_plus_sn2", pyth},
        {"dn2", dn_id},
        {"cn_derivative", cn_d},
        {"sn_derivative", sn_d}}},
  };
  out.report["pass"] = pass;
  out.exit_code = pass ? kPass : kToleranceFailure;
  const std::vector<std::string> header{"t", "scal", "deviation"};
  out.primary = cfg.format == Format::Json ? dump_report(out.report) : csv(header, series);
  if (!cfg.series_path.empty()) {
    out.extra_files.push_back({cfg.series_path, csv(header, series)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// families

json probe_json(const join::LimitProbe& probe) {
  json samples = json::array();
  for (const auto& s : probe.samples) samples.push_back({{"k", s.k}, {"gap", s.gap}});
  return {{"endpoint", probe.endpoint == join::Endpoint::Upper ? "upper" : "lower"},
          {"predicted", std::string(join::to_string(probe.predicted))},
          {"observed", std::string(join::to_string(probe.observed))},
          {"samples", samples}};
}

CommandResult cmd_families(const RunConfig& cfg) {
  const Params p(cfg);
  const join::JoinParams jp = join_params(p);
  const int points = p.integer("points", 50);
  if (points < 2) throw InvalidInput("--points must be >= 2");
  if (cfg.output_path.empty()) {
    throw InvalidInput("families writes one file per family; --out <directory> is required");
  }
  const auto families = guarded([&] {
    return join::family_scan(jp, points, p.real("gamma-min", 0.25),
                             p.real("gamma-max", 4.0));
  });

  CommandResult out;
  out.report = base_report(cfg);
  json fam_json = json::array();
  bool pass = true;
  const std::filesystem::path dir(cfg.output_path);
  for (std::size_t i = 0; i < families.size(); ++i) {
    const join::Family& f = families[i];
    const std::string name = "family_" + std::to_string(i) + "_" +
                             std::string(join::to_string(f.branch)) +
                             (f.swapped ? "_swapped" : "") + ".csv";
    std::vector<std::vector<std::string>> rows;
    double worst_param = 0.0;
    double worst_residual = 0.0;
    for (const auto& r : f.rows) {
      const join::WarpSolution sol =
          f.branch == join::Branch::Flat || f.branch == join::Branch::Case2Round
              ? join::round_solution(f.params, r.gamma)
              : join::elliptic_solution(f.params, elliptic::Modulus(r.k));
      const double residual = join::verify_residual(f.params, sol, 100).max_deviation;
      worst_param = std::max(worst_param, std::abs(r.parameter_residual));
      worst_residual = std::max(worst_residual, residual);
      rows.push_back({std::string(join::to_string(f.branch)), format_double(r.k),
                      format_double(r.gamma), format_double(r.T),
                      format_double(r.scal_total), format_double(residual)});
    }
    out.extra_files.push_back(
        {(dir / name).string(),
         csv({"branch", "k", "gamma", "T", "R", "residual"}, rows)});
    json probes = json::array();
    if (join::is_elliptic(f.branch)) {
      probes.push_back(probe_json(join::limit_probe(f.params, f.branch, join::Endpoint::Upper)));
      probes.push_back(probe_json(join::limit_probe(f.params, f.branch, join::Endpoint::Lower)));
    }
    pass = pass && worst_param <= p.tol("parameter") && worst_residual <= p.tol("residual");
    fam_json.push_back({{"file", name},
                        {"branch", std::string(join::to_string(f.branch))},
                        {"swapped", f.swapped},
                        {"rows", f.rows.size()},
                        {"max_parameter_residual", worst_param},
                        {"max_residual", worst_residual},
                        {"limit_probes", probes}});
  }
  out.report["results"] = {{"family_count", families.size()}, {"families", fam_json}};
  out.report["pass"] = pass;
  out.exit_code = pass ? kPass : kToleranceFailure;
  out.primary = dump_report(out.report);
  return out;
}

// ---------------------------------------------------------------------------
// count

yamabe::YamabeProblem count_problem(const RunConfig& cfg, const Params& p) {
  yamabe::YamabeProblem prob;
  if (p.has("n")) {
    prob = {p.integer("n"), p.real("R"), p.integer("d"), p.real("r", 1.0)};
  } else if (p.has("m") && p.has("k")) {
    const int m = p.integer("m");
    const int k = p.integer("k");
    const double a = p.real("a", 0.0);
    const double r = p.real("r", 1.0);
    const double scal = guarded([&] {
      return geometry::sphere_bundle_scalar({m, double(m) * double(m - 1)}, k, a, r);
    });
    if (cfg.factor == "fiber") {
      prob = {m + k, scal, k, r};
    } else if (cfg.factor == "base") {
      prob = {m + k, scal, m, 1.0};
    } else {
      throw InvalidInput("--factor must be 'fiber' or 'base'");
    }
  } else {
    throw InvalidInput("count needs either --n --R --d --r or --m --k [--a] --r");
  }
  guarded([&] { prob.validate(); });
  return prob;
}

CommandResult cmd_count(const RunConfig& cfg) {
  const Params p(cfg);
  const yamabe::YamabeProblem prob = count_problem(cfg, p);
  yamabe::CountOptions opts;
  opts.alpha_min = p.real("alpha-min", opts.alpha_min);
  opts.alpha_max = p.real("alpha-max", opts.alpha_max);
  opts.n_scan = p.integer("n-scan", opts.n_scan);
  opts.match_tol = p.tol("match");
  const yamabe::CountReport rep =
      guarded([&] { return yamabe::count_radial_solutions(prob, opts); });

  json sols = json::array();
  std::vector<std::vector<std::string>> rows;
  bool residuals_ok = true;
  for (const auto& s : rep.solutions) {
    sols.push_back({{"alpha", s.alpha},
                    {"boundary_residual", s.boundary_residual},
                    {"recheck_residual", s.recheck_residual},
                    {"far_value", s.far_value},
                    {"is_constant", s.is_constant},
                    {"reflection_partner", s.reflection_partner}});
    rows.push_back({format_double(s.alpha), format_double(s.boundary_residual),
                    format_double(s.recheck_residual), format_double(s.far_value),
                    b2s(s.is_constant), std::to_string(s.reflection_partner)});
    residuals_ok = residuals_ok && s.boundary_residual < p.tol("match") &&
                   s.recheck_residual < p.tol("recheck");
  }
  json brackets = json::array();
  for (const auto& [lo, hi] : rep.brackets) brackets.push_back({lo, hi});
  json rejected = json::array();
  for (const auto& [lo, hi] : rep.rejected_brackets) rejected.push_back({lo, hi});

  const yamabe::Predicate uni = yamabe::uniqueness_predicate(prob);
  json results = {
      {"problem", {{"n", prob.n}, {"R", prob.R}, {"d", prob.d}, {"r", prob.r}}},
      {"guaranteed_lower_bound", rep.guaranteed_lower_bound},
      {"count", rep.count},
      {"reflection_collapsed_count", rep.reflection_collapsed_count},
      {"solutions", sols},
      {"scan_range", {rep.scan_range.first, rep.scan_range.second}},
      {"excluded_count", rep.excluded_alphas.size()},
      {"brackets", brackets},
      {"rejected_brackets", rejected},
      {"uniqueness_predicate", {{"holds", uni.holds}, {"margin", uni.margin}}},
  };
  if (p.has("l")) {
    const auto mult = guarded([&] { return yamabe::multiplicity_predicate(prob, p.integer("l")); });
    results["multiplicity_predicate"] = {{"l", p.integer("l")},
                                         {"holds", mult.holds},
                                         {"margin", mult.margin}};
  }
  const bool pass = residuals_ok && rep.count >= rep.guaranteed_lower_bound;

  CommandResult out;
  out.report = base_report(cfg);
  out.report["results"] = results;
  out.report["pass"] = pass;
  out.exit_code = pass ? kPass : kToleranceFailure;
  out.primary = cfg.format == Format::Json
                    ? dump_report(out.report)
                    : csv({"alpha", "boundary_residual", "recheck_residual",
                           "far_value", "is_constant", "reflection_partner"},
                          rows);
  return out;
}

// ---------------------------------------------------------------------------
// thresholds

json pred(const yamabe::Predicate& pr, std::string_view statement) {
  return {{"statement", std::string(statement)}, {"holds", pr.holds}, {"margin", pr.margin}};
}

CommandResult cmd_thresholds(const RunConfig& cfg) {
  const Params p(cfg);
  const int m = p.integer("m");
  const int k = p.integer("k");
  const double r = p.real("r");
  const int l = p.integer("l", 1);
  const double a = p.real("a", 0.0);

  const auto prod = guarded([&] { return yamabe::product_thresholds(m, k, r, l); });
  const auto bund = guarded([&] { return yamabe::bundle_thresholds(m, k, a, r, l); });

  json results = {
      {"product",
       {{"uniqueness_fiber", pred(prod.uniqueness_fiber, "(m-1) r^2 <= k")},
        {"uniqueness_base", pred(prod.uniqueness_base, "(k-1)/r^2 <= m")},
        {"multiplicity_fiber", pred(prod.multiplicity_fiber, "m(m-1) r^2 > l(l+k-1)(m+k-1) - k(k-1)")},
        {"multiplicity_base", pred(prod.multiplicity_base, "k(k-1)/r^2 > l(l+m-1)(m+k-1) - m(m-1)")},
        {"scal", prod.scal}}},
      {"bundle",
       {{"uniqueness_fiber_gradient", pred(bund.uniqueness_fiber_gradient, "-(a^2/m) r^4 + (m-1) r^2 <= k")},
        {"uniqueness_base", pred(bund.uniqueness_base, "-(a^2/k) r^2 + (k-1)/r^2 <= m")},
        {"multiplicity_base", pred(bund.multiplicity_base, "-a^2 r^2 + k(k-1)/r^2 > l(l+m-1)(m+k-1) - m(m-1)")},
        {"scal", bund.scal}}},
  };

  std::vector<std::vector<std::string>> rows;
  auto add_row = [&](std::string name, const yamabe::Predicate& pr) {
    rows.push_back({std::move(name), format_double(r), b2s(pr.holds), format_double(pr.margin)});
  };
  add_row("product.uniqueness_fiber", prod.uniqueness_fiber);
  add_row("product.uniqueness_base", prod.uniqueness_base);
  add_row("product.multiplicity_fiber", prod.multiplicity_fiber);
  add_row("product.multiplicity_base", prod.multiplicity_base);
  add_row("bundle.uniqueness_fiber_gradient", bund.uniqueness_fiber_gradient);
  add_row("bundle.uniqueness_base", bund.uniqueness_base);
  add_row("bundle.multiplicity_base", bund.multiplicity_base);

  if (p.has("r-min") || p.has("r-max")) {
    const double lo = p.real("r-min");
    const double hi = p.real("r-max");
    const int steps = p.integer("r-steps", 100);
    if (!(lo > 0.0 && hi > lo) || steps < 2) {
      throw InvalidInput("sweep needs 0 < --r-min < --r-max and --r-steps >= 2");
    }
    json sweep = json::array();
    json flips = json::array();
    std::optional<bool> prev;
    double prev_r = lo;
    for (int i = 0; i < steps; ++i) {
      const double ri = lo + (hi - lo) * double(i) / double(steps - 1);
      const auto b = yamabe::bundle_thresholds(m, k, a, ri, l);
      sweep.push_back({{"r", ri},
                       {"holds", b.multiplicity_base.holds},
                       {"margin", b.multiplicity_base.margin}});
      rows.push_back({"sweep.bundle.multiplicity_base", format_double(ri),
                      b2s(b.multiplicity_base.holds),
                      format_double(b.multiplicity_base.margin)});
      if (prev && *prev != b.multiplicity_base.holds) flips.push_back({prev_r, ri});
      prev = b.multiplicity_base.holds;
      prev_r = ri;
    }
    results["sweep"] = {{"predicate", "bundle.multiplicity_base"}, {"rows", sweep}, {"flips", flips}};
  }

  CommandResult out;
  out.report = base_report(cfg);
  out.report["results"] = results;
  out.report["pass"] = true;
  out.exit_code = kPass;
  out.primary = cfg.format == Format::Json
                    ? dump_report(out.report)
                    : csv({"predicate", "r", "holds", "margin"}, rows);
  return out;
}

double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InvalidInput("value '" + text + "' for " + key + " is not a number");
  }
  return v;
}

}  // namespace

CommandResult run(const RunConfig& cfg) {
  for (const auto& [name, value] : cfg.tolerances) {
    if (!default_tolerances().count(name)) throw InvalidInput("unknown tolerance --tol-" + name);
    if (!(value > 0.0)) throw InvalidInput("tolerance --tol-" + name + " must be > 0");
  }
  switch (cfg.command) {
    case Command::Verify: return cmd_verify(cfg);
    case Command::Families: return cmd_families(cfg);
    case Command::Count: return cmd_count(cfg);
    case Command::Thresholds: return cmd_thresholds(cfg);
  }
  throw InvalidInput("unknown command");
}

RunConfig config_from_report(const json& report) {
  RunConfig cfg;
  const std::string cmd = report.at("command").get<std::string>();
  if (cmd == "verify") cfg.command = Command::Verify;
  else if (cmd == "families") cfg.command = Command::Families;
  else if (cmd == "count") cfg.command = Command::Count;
  else if (cmd == "thresholds") cfg.command = Command::Thresholds;
  else throw InvalidInput("unknown command '" + cmd + "' in report");
  for (const auto& [key, value] : report.at("params").items()) {
    if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "format") cfg.format = value.get<std::string>() == "csv" ? Format::Csv : Format::Json;
    else if (key == "factor") cfg.factor = value.get<std::string>();
    else cfg.params[key] = value.get<double>();
  }
  for (const auto& [key, value] : report.at("tolerances").items()) {
    cfg.tolerances[key] = value.get<double>();
  }
  return cfg;
}

namespace {

struct Subcommand {
  Command command;
  CLI::App* app;
  std::vector<std::string> names;
};

const std::vector<std::string>& verify_params() {
  static const std::vector<std::string> v{
      "k1", "k2", "a1", "a2", "base-scal", "base-dim", "modulus", "modulus-sq",
      "gamma", "grid", "boundary-order", "random-points"};
  return v;
}
const std::vector<std::string>& families_params() {
  static const std::vector<std::string> v{"k1", "k2", "a1", "a2", "base-scal",
                                          "base-dim", "points", "gamma-min", "gamma-max"};
  return v;
}
const std::vector<std::string>& count_params() {
  static const std::vector<std::string> v{"n", "R", "d", "r", "m", "k", "a", "l",
                                          "alpha-min", "alpha-max", "n-scan"};
  return v;
}
const std::vector<std::string>& threshold_params() {
  static const std::vector<std::string> v{"m", "k", "r", "l", "a", "r-min", "r-max", "r-steps"};
  return v;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Constant scalar curvature connection metrics on sphere bundles"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::map<std::string, std::optional<double>> values;
  std::map<std::string, std::optional<double>> tol_values;
  std::string config_path, out_path, series_path, format = "json", factor = "fiber";
  std::optional<std::uint64_t> seed;

  std::vector<Subcommand> subs{
      {Command::Verify, app.add_subcommand("verify", "Build a solution and verify its scalar curvature"), verify_params()},
      {Command::Families, app.add_subcommand("families", "Tabulate the one-parameter families"), families_params()},
      {Command::Count, app.add_subcommand("count", "Count radial solutions of the reduced Yamabe equation"), count_params()},
      {Command::Thresholds, app.add_subcommand("thresholds", "Evaluate the uniqueness/multiplicity predicates"), threshold_params()},
  };
  for (auto& s : subs) {
    for (const auto& name : s.names) {
      s.app->add_option("--" + name, values[name]);
    }
    s.app->add_option("--config", config_path, "Flat key=value file; its entries override flags");
    s.app->add_option("--out", out_path, "Output path (directory for families)");
    s.app->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    s.app->add_option("--seed", seed, "Seed for randomized sample points");
    for (const auto& [name, _] : default_tolerances()) {
      s.app->add_option("--tol-" + name, tol_values[name]);
    }
  }
  subs[0].app->add_option("--series", series_path, "Write the (t, scal) series CSV here");
  subs[2].app->add_option("--factor", factor, "fiber or base (bundle form)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidInput;
  }

  try {
    RunConfig cfg;
    const Subcommand* active = nullptr;
    for (const auto& s : subs) {
      if (s.app->parsed()) active = &s;
    }
    cfg.command = active->command;
    for (const auto& name : active->names) {
      if (values[name]) cfg.params[name] = *values[name];
    }
    for (const auto& [name, v] : tol_values) {
      if (v) cfg.tolerances[name] = *v;
    }
    if (seed) cfg.seed = *seed;

    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InvalidInput("cannot open config file " + config_path);
      for (const auto& [key, text] : read_key_values(in)) {
        if (key == "out") out_path = text;
        else if (key == "series") series_path = text;
        else if (key == "format") format = text;
        else if (key == "factor") factor = text;
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_number(key, text));
        else if (key.rfind("tol-", 0) == 0) cfg.tolerances[key.substr(4)] = parse_number(key, text);
        else if (std::find(active->names.begin(), active->names.end(), key) != active->names.end())
          cfg.params[key] = parse_number(key, text);
        else throw InvalidInput("unknown config key '" + key + "' for " +
                                std::string(to_string(cfg.command)));
      }
    }
    if (format != "json" && format != "csv") throw InvalidInput("--format must be json or csv");
    cfg.format = format == "csv" ? Format::Csv : Format::Json;
    cfg.output_path = out_path;
    cfg.series_path = series_path;
    cfg.factor = factor;

    const CommandResult res = run(cfg);
    if (cfg.command == Command::Families) {
      std::filesystem::create_directories(cfg.output_path);
      std::ofstream(std::filesystem::path(cfg.output_path) / "summary.json") << res.primary;
      out << res.primary;
    } else if (cfg.output_path.empty()) {
      out << res.primary;
    } else {
      std::ofstream f(cfg.output_path, std::ios::binary);
      if (!f) throw InvalidInput("cannot write " + cfg.output_path);
      f << res.primary;
    }
    for (const auto& file : res.extra_files) {
      std::ofstream f(file.path, std::ios::binary);
      if (!f) throw InvalidInput("cannot write " + file.path);
      f << file.contents;
    }
    if (res.exit_code != kPass) err << "tolerance check failed\n";
    return res.exit_code;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
}

}  // namespace cscb::cli
