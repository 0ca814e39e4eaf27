#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hjm/aggregation.hpp"
#include "hjm/cli.hpp"
#include "hjm/duality.hpp"
#include "hjm/elasticity.hpp"
#include "hjm/moment.hpp"
#include "hjm/tiling.hpp"

namespace hjm {

using nlohmann::json;

const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> c{"estimate-elasticity", "check-moment", "tiling",
                                          "duality-verify", "aggregate", "k-stable"};
  return c;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return 2;
    case ErrorKind::degenerate: return 3;
    case ErrorKind::numeric: return 4;
    case ErrorKind::capability: return 2;
  }
  return 1;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open " + path);
  return {std::istreambuf_iterator<char>(f), {}};
}

json triple_json(const Triple& t) { return json::array({t[0] + 1, t[1] + 1, t[2] + 1}); }

json spectra_json(const std::vector<Spectrum>& s) {
  json a = json::array();
  for (const auto& sp : s) a.push_back(sp.str());
  return a;
}

json measure_json(const DiscreteMeasure& m) {
  json a = json::array();
  for (const auto& at : m.atoms) a.push_back({{"x", at.x}, {"mass", at.mass}, {"radius", at.smoothing_radius}});
  return a;
}

json moment_json(const MomentProblemReport& r) {
  json j{{"rho", r.rho},
         {"branch", to_string(r.family.branch)},
         {"solvable", r.solvable},
         {"spectra_count", r.spectra_count},
         {"cone_size", r.cone_size},
         {"spectra", spectra_json(r.spectra)},
         {"exact_arithmetic", r.membership.exact},
         {"notes", r.notes}};
  if (r.witness) {
    j["witness"] = measure_json(*r.witness);
    j["witness_residual"] = r.witness_residual;
  }
  if (!r.certificate.empty()) {
    j["certificate"] = r.certificate;
    j["certificate_margin"] = r.membership.certificate_margin;
  }
  return j;
}

double need_rho(const RunConfig& c) {
  require(c.rho.has_value(), c.command + " needs --rho");
  return *c.rho;
}

struct Diagram {
  LineFamily family;
  SweepResult sweep;
  RhombicTiling tiling;
  std::optional<Snake> highlight;
  OutputOrder order;
};

Diagram diagram(const std::vector<TimeSeriesRecord>& series, double rho) {
  Diagram d;
  d.family = transform_coordinates(rho, NormalizedPrices::from_series(series));
  d.sweep = sweep(d.family);
  const int T = static_cast<int>(series.size());
  d.tiling = build_tiling(d.sweep, T);
  const Vec y = outputs_of(series);
  d.order = output_order(y);
  if (!d.order.tie) d.highlight = snake_of_permutation(to_renumbered(d.order.lambda, d.sweep.order), T);
  return d;
}

void maybe_svg(const RunConfig& c, const Diagram& d) {
  if (c.svg_path.empty()) return;
  SvgInput in{&d.family, &d.sweep, &d.tiling, d.highlight};
  write_atomic(c.svg_path, render_svg(in));
}

json cmd_estimate(const RunConfig& c, std::vector<std::string>& warnings) {
  const auto series = ingest_csv(c.input_path);
  const ElasticityReport rep = estimate_elasticity(series);
  json roots = json::array();
  for (const auto& r : rep.critical.roots)
    roots.push_back({{"rho", r.rho}, {"triple", triple_json(r.triple)}, {"boundary", r.boundary}});
  json intervals = json::array();
  for (const auto& iv : rep.intervals) {
    intervals.push_back({{"lo", iv.lo},
                         {"hi", iv.hi},
                         {"lo_closed", iv.lo_closed},
                         {"solvable", iv.solvable},
                         {"probe_rho", iv.probe_rho},
                         {"probe_attempts", iv.probe_attempts},
                         {"sigma_lo", iv.sigma_lo},
                         {"sigma_hi", iv.sigma_hi},
                         {"cone_size", iv.report.cone_size}});
  }
  warnings.insert(warnings.end(), rep.warnings.begin(), rep.warnings.end());
  return {{"T", series.size()}, {"critical_rhos", roots}, {"r_max", rep.critical.r_max},
          {"intervals", intervals}};
}

json cmd_check_moment(const RunConfig& c, std::vector<std::string>& warnings) {
  const auto series = ingest_csv(c.input_path);
  const double rho = need_rho(c);
  const MomentProblemReport rep = moment_solvable(series, rho);
  json j = moment_json(rep);
  if (!c.svg_path.empty()) {
    const Diagram d = diagram(series, rho);
    warnings.insert(warnings.end(), d.sweep.warnings.begin(), d.sweep.warnings.end());
    maybe_svg(c, d);
  }
  return j;
}

json cmd_tiling(const RunConfig& c, std::vector<std::string>& warnings) {
  const auto series = ingest_csv(c.input_path);
  const double rho = need_rho(c);
  const Diagram d = diagram(series, rho);
  warnings.insert(warnings.end(), d.sweep.warnings.begin(), d.sweep.warnings.end());
  json flips = json::array();
  for (const auto& v : flippable_vertices(d.tiling)) flips.push_back(json::array({v[0], v[1]}));
  std::vector<int> renum = d.sweep.order;
  for (auto& v : renum) ++v;
  json perms = json::array();
  for (const auto& p : renumbered_permutations(d.sweep)) perms.push_back(p);
  json j{{"T", series.size()},
         {"branch", to_string(d.family.branch)},
         {"word", d.sweep.word.str()},
         {"rhombi", d.tiling.rhombi.size()},
         {"snakes", d.tiling.snakes.size()},
         {"sector_permutations", perms},
         {"renumbering", renum},
         {"sigma", sigma_order(d.family)},
         {"flippable_vertices", flips},
         {"output_order_tie", d.order.tie}};
  if (d.highlight) {
    j["output_order"] = d.order.lambda;
    j["snake_in_tiling"] = snake_in_tiling(d.tiling, *d.highlight);
    j["snake_in_region"] = snake_in_region(d.tiling, *d.highlight);
  }
  maybe_svg(c, d);
  return j;
}

json cmd_duality(const RunConfig& c, const json& in) {
  const double tol = c.tol.value_or(1e-4);
  CobbDouglasParams cd;
  cd.C = in.value("C", 1.0);
  cd.alpha1 = in.value("alpha1", 1.0);
  cd.alpha2 = in.value("alpha2", 1.0);
  cd.validate();
  const double r = in.value("r", -1.0);
  CesProductionParams ces;
  ces.rho = in.value("ces_rho", 1.0);
  ces.gamma = in.value("ces_gamma", 0.5);
  ces.alpha1 = in.value("ces_alpha1", 1.0);
  ces.alpha2 = in.value("ces_alpha2", 1.0);
  ces.validate();
  std::vector<Vec2> prices{{1, 1}, {2, 1}, {1, 2}, {0.5, 3}, {3, 0.5}};
  if (in.contains("prices")) prices = in.at("prices").get<std::vector<Vec2>>();
  const double p0 = in.value("p0", 1.0);

  auto rows = [&](auto closed, const Density& phi, const UnitCost& h) {
    json a = json::array();
    bool ok = true;
    for (const auto& p : prices) {
      const double cf = closed(p);
      const QuadratureResult q = numeric_profit(phi, h, p, p0, {tol * 1e-2});
      const double rel = std::abs(q.value - cf) / std::abs(cf);
      ok = ok && rel <= tol;
      a.push_back({{"p", p}, {"closed_form", cf}, {"quadrature", q.value}, {"rel_error", rel}});
    }
    return std::pair{a, ok};
  };
  auto [cd_rows, cd_ok] = rows([&](Vec2 p) { return profit_cobb_douglas(cd, p[0], p[1], p0); },
                               [&](double x1, double x2) { return capacity_density_cd(cd, r, x1, x2); },
                               unit_cost_r(r));
  json out{{"tolerance", tol},
           {"p0", p0},
           {"cobb_douglas", {{"C", cd.C}, {"alpha", {cd.alpha1, cd.alpha2}}, {"r", r}, {"rows", cd_rows},
                             {"pass", cd_ok}}}};
  if (ces.rho > 0.0) {
    auto [ces_rows, ces_ok] = rows([&](Vec2 p) { return profit_ces(ces, p[0], p[1], p0); },
                                   [&](double x1, double x2) { return capacity_density_ces(ces, x1, x2); },
                                   unit_cost_r(ces.r()));
    out["ces"] = {{"rho", ces.rho}, {"gamma", ces.gamma}, {"alpha", {ces.alpha1, ces.alpha2}},
                  {"rows", ces_rows}, {"pass", ces_ok}};
  }
  return out;
}

Vec2 vec2(const json& j) {
  const auto v = j.get<std::vector<double>>();
  require(v.size() == 2, "expected a 2-vector");
  return {v[0], v[1]};
}

Demand demand_of(const json& j) {
  const std::string kind = j.value("kind", "leontief");
  if (kind == "leontief") return Demand::leontief();
  if (kind == "identity") return Demand::identity();
  if (kind == "ces") {
    require(j.contains("rho"), "ces demand needs rho");
    return Demand::ces(j.at("rho").get<double>());
  }
  fail(ErrorKind::validation, "unknown demand kind '" + kind + "'");
}

json cmd_aggregate(const json& in) {
  std::vector<Industry> inds;
  for (const auto& ij : in.at("industries")) {
    Industry ind;
    ind.id = ij.value("id", std::to_string(inds.size() + 1));
    for (const auto& aj : ij.at("atoms"))
      ind.measure.atoms.push_back(Atom{aj.at("x").get<Vec>(), aj.at("mass").get<double>(), 0.0});
    inds.push_back(std::move(ind));
  }
  const Demand dem = demand_of(in.value("demand", json::object()));
  const Vec s = in.at("s").get<Vec>();
  const double p0 = in.at("p0").get<double>();
  const AggregateResult r = aggregate_profit_numeric(inds, dem, s, p0);
  json out{{"demand", dem.name()},
           {"value", r.value},
           {"q", r.q},
           {"constraint_gap", r.constraint_gap},
           {"stationarity", r.stationarity},
           {"converged", r.converged},
           {"starts", r.starts},
           {"notes", r.notes}};
  if (in.contains("complementary")) {
    const auto& cj = in.at("complementary");
    const auto cr = aggregate_profit_complementary(cj.at("k0"), vec2(cj.at("z")), cj.at("k1"), vec2(cj.at("y1")),
                                                   cj.at("k2"), vec2(cj.at("y2")), vec2(in.at("s")), p0);
    out["complementary"] = {{"value", cr.value}, {"pi1", cr.pi1}, {"pi2", cr.pi2}, {"in_K1", cr.in_K1},
                            {"in_K2", cr.in_K2}};
  }
  return out;
}

json cmd_k_stable(const json& in) {
  const auto X = in.at("X").get<std::vector<Vec>>();
  const auto Y = in.at("Y").get<std::vector<Vec>>();
  std::vector<std::size_t> gamma(X.size());
  if (in.contains("gamma")) {
    gamma = in.at("gamma").get<std::vector<std::size_t>>();
  } else {
    for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] = i;
  }
  const auto K = in.at("K").get<std::vector<Vec>>();
  const KStableResult r = k_stable_check(X, Y, gamma, K);
  json out{{"stable", r.stable}};
  if (r.violating) {
    out["violating_pair"] = json::array({r.violating->first, r.violating->second});
    out["criterion"] = r.criterion;
  }
  return out;
}

json parse_json_input(const std::string& text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::validation, path + ": malformed JSON: " + e.what());
  }
}

}  // namespace

RunOutcome run(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  json& rep = out.report;
  rep["schema"] = kJsonSchema;
  rep["version"] = kVersion;
  rep["command"] = c.command;
  rep["seed"] = c.seed;
  json opts = json::object();
  if (c.rho) opts["rho"] = *c.rho;
  if (c.tol) opts["tol"] = *c.tol;
  rep["options"] = opts;
  std::vector<std::string> warnings;
  try {
    const auto& cmds = cli_commands();
    require(std::find(cmds.begin(), cmds.end(), c.command) != cmds.end(), "unknown command '" + c.command + "'");
    std::string input;
    if (!c.input_path.empty()) input = read_file(c.input_path);
    rep["inputs_digest"] = "fnv1a:" + fnv1a_hex(input);
    if (c.command == "estimate-elasticity") {
      rep["results"] = cmd_estimate(c, warnings);
    } else if (c.command == "check-moment") {
      rep["results"] = cmd_check_moment(c, warnings);
    } else if (c.command == "tiling") {
      rep["results"] = cmd_tiling(c, warnings);
    } else if (c.command == "duality-verify") {
      rep["results"] = cmd_duality(c, input.empty() ? json::object() : parse_json_input(input, c.input_path));
    } else {
      require(!c.input_path.empty(), c.command + " needs a JSON input file");
      const json in = parse_json_input(input, c.input_path);
      try {
        rep["results"] = c.command == "aggregate" ? cmd_aggregate(in) : cmd_k_stable(in);
      } catch (const json::exception& e) {
        fail(ErrorKind::validation, c.input_path + ": " + e.what());
      }
    }
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.kind());
    out.error = e.what();
    rep["error"] = {{"kind", out.exit_code == 3 ? "degenerate" : out.exit_code == 4 ? "numeric" : "validation"},
                    {"message", e.what()}};
  }
  rep["warnings"] = warnings;
  if (c.timing) {
    rep["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  }
  const std::string text = to_json_text(rep);
  if (c.output_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    try {
      write_atomic(c.output_path, text);
    } catch (const Error& e) {
      if (out.exit_code == 0) {
        out.exit_code = exit_code_for(e.kind());
        out.error = e.what();
      }
    }
  }
  return out;
}

}  // namespace hjm
