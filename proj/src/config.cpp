#include "helab/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "helab/errors.hpp"

namespace helab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
  throw Error(ErrorKind::ConfigError, path + ": " + reason);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) fail(path + "." + key, "missing");
  return obj.at(key);
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, double>) return as_double(v, path + "." + key);
    else if constexpr (std::is_same_v<T, int>) return as_int(v, path + "." + key);
    else return v.get<T>();
  } catch (const json::exception& e) {
    fail(path + "." + key, e.what());
  }
}

cplx as_complex(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  fail(path, "expected a number or [re, im]");
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::vector<double> double_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> int_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_int(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

TrigSeries parse_series(const json& v, int n, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  if (v.contains("random")) {
    const json& r = v.at("random");
    const std::string rp = path + ".random";
    const int bandwidth = get_or<int>(r, "bandwidth", 1, rp);
    const int terms = get_or<int>(r, "terms", 4, rp);
    if (bandwidth < 0 || terms < 0) fail(rp, "bandwidth and terms must be non-negative");
    TrigSeries s = random_trig_series(n, bandwidth, terms, get_or<double>(r, "scale", 1.0, rp),
                                      get_or<std::uint64_t>(r, "seed", 1, rp));
    s.constant += get_or<double>(v, "constant", 0.0, path);
    return s;
  }
  TrigSeries s;
  s.constant = get_or<double>(v, "constant", 0.0, path);
  if (v.contains("terms")) {
    const json& terms = v.at("terms");
    if (!terms.is_array()) fail(path + ".terms", "expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tp = path + ".terms[" + std::to_string(i) + "]";
      TrigTerm t;
      t.amplitude = as_double(field(terms[i], "amplitude", tp), tp + ".amplitude");
      const std::string kind = get_or<std::string>(terms[i], "kind", "cos", tp);
      if (kind != "cos" && kind != "sin") fail(tp + ".kind", "expected cos or sin");
      t.kind = kind == "cos" ? TrigTerm::Kind::Cos : TrigTerm::Kind::Sin;
      t.wave = int_list(field(terms[i], "wave", tp), tp + ".wave");
      if (static_cast<int>(t.wave.size()) != 2 * n)
        fail(tp + ".wave", "needs " + std::to_string(2 * n) + " entries");
      s.terms.push_back(std::move(t));
    }
  }
  return s;
}

json series_json(const TrigSeries& s) {
  json terms = json::array();
  for (const auto& t : s.terms)
    terms.push_back({{"amplitude", t.amplitude},
                     {"kind", t.kind == TrigTerm::Kind::Cos ? "cos" : "sin"},
                     {"wave", t.wave}});
  return {{"constant", s.constant}, {"terms", terms}};
}

std::vector<LineConfig> parse_lines(const json& v, int n, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of lines");
  std::vector<LineConfig> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string lp = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_object()) fail(lp, "expected an object");
    LineConfig line;
    if (v[i].contains("class")) {
      line.class_diagonal = double_list(v[i].at("class"), lp + ".class");
      if (static_cast<int>(line.class_diagonal.size()) != n)
        fail(lp + ".class", "needs " + std::to_string(n) + " entries");
    }
    if (v[i].contains("weight")) line.weight = parse_series(v[i].at("weight"), n, lp + ".weight");
    out.push_back(std::move(line));
  }
  return out;
}

json lines_json(const std::vector<LineConfig>& lines) {
  json out = json::array();
  for (const auto& l : lines) {
    json j = json::object();
    if (!l.class_diagonal.empty()) j["class"] = l.class_diagonal;
    if (l.weight) j["weight"] = series_json(*l.weight);
    out.push_back(j);
  }
  return out;
}

BundleConfig parse_bundle(const json& v, int n, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  BundleConfig b;
  b.kind = get_or<std::string>(v, "kind", "line", path);
  if (b.kind == "line" || b.kind == "direct_sum") {
    b.lines = parse_lines(field(v, "lines", path), n, path + ".lines");
    if (b.kind == "line" && b.lines.size() != 1) fail(path + ".lines", "a line has exactly one entry");
  } else if (b.kind == "extension") {
    b.sub = parse_lines(field(v, "sub", path), n, path + ".sub");
    b.quotient = parse_lines(field(v, "quotient", path), n, path + ".quotient");
    const json& bs = field(v, "beta_star", path);
    const std::string bp = path + ".beta_star";
    if (!bs.is_array() || bs.size() != b.sub.size()) fail(bp, "needs one row per sub line");
    for (std::size_t a = 0; a < bs.size(); ++a) {
      if (!bs[a].is_array() || bs[a].size() != b.quotient.size())
        fail(bp, "needs one column per quotient line");
      std::vector<std::vector<cplx>> row;
      for (std::size_t c = 0; c < bs[a].size(); ++c) {
        const std::string ep = bp + "[" + std::to_string(a) + "][" + std::to_string(c) + "]";
        if (!bs[a][c].is_array() || static_cast<int>(bs[a][c].size()) != n)
          fail(ep, "needs " + std::to_string(n) + " dzbar coefficients");
        std::vector<cplx> coeffs;
        for (std::size_t j = 0; j < bs[a][c].size(); ++j)
          coeffs.push_back(as_complex(bs[a][c][j], ep + "[" + std::to_string(j) + "]"));
        row.push_back(std::move(coeffs));
      }
      b.beta_star.push_back(std::move(row));
    }
  } else {
    fail(path + ".kind", "expected line, direct_sum or extension");
  }
  if (v.contains("conformal_weight"))
    b.conformal_weight = parse_series(v.at("conformal_weight"), n, path + ".conformal_weight");
  return b;
}

json bundle_json(const BundleConfig& b) {
  json j = {{"kind", b.kind}};
  if (b.kind == "extension") {
    j["sub"] = lines_json(b.sub);
    j["quotient"] = lines_json(b.quotient);
    json bs = json::array();
    for (const auto& row : b.beta_star) {
      json r = json::array();
      for (const auto& entry : row) {
        json e = json::array();
        for (cplx z : entry) e.push_back(complex_json(z));
        r.push_back(e);
      }
      bs.push_back(r);
    }
    j["beta_star"] = bs;
  } else {
    j["lines"] = lines_json(b.lines);
  }
  if (b.conformal_weight) j["conformal_weight"] = series_json(*b.conformal_weight);
  return j;
}

std::vector<std::string> bundle_refs(const ScenarioConfig& s) {
  std::vector<std::string> refs;
  for (const char* key : {"bundles"})
    if (s.params.contains(key) && s.params.at(key).is_array())
      for (const auto& v : s.params.at(key))
        if (v.is_string()) refs.push_back(v.get<std::string>());
  for (const char* key : {"e", "f", "extension", "split"})
    if (s.params.contains(key) && s.params.at(key).is_string())
      refs.push_back(s.params.at(key).get<std::string>());
  return refs;
}

PQForm class_form(const std::vector<double>& diag, int n) {
  PQForm c(n, 1, 1);
  for (int j = 0; j < static_cast<int>(diag.size()); ++j) c += diag[j] * i_dz_dzbar(n, j, j);
  return c;
}

LineBundleData line_data(const LineConfig& l, const TorusGrid& grid) {
  LineBundleData d{class_form(l.class_diagonal, grid.n), std::nullopt};
  if (l.weight) d.weight = l.weight->sample(grid);
  return d;
}

}  // namespace

const std::vector<std::string>& registered_scenarios() {
  static const std::vector<std::string> names = {
      "adjoint_defect_suite", "kernel_and_decompose",    "he_rescale_line",
      "slope_link",           "vanishing_identity",      "bundle_factor_suite",
      "degree_gauge_invariance", "exact_sequence_suite", "classical_reduction",
      "kl_demo",              "pointwise_lemma_suite",   "convergence_sweep"};
  return names;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 4) fail("$.n", "must lie in [1, 4]");
  if (cfg.m < 1 || cfg.m > cfg.n) fail("$.m", "must satisfy 1 <= m <= n");
  try {
    (void)TorusGrid::make(cfg.n, cfg.points_per_axis);
  } catch (const Error& e) {
    fail("$.points_per_axis", e.what());
  }
  if (!cfg.omega_diagonal.empty()) {
    if (static_cast<int>(cfg.omega_diagonal.size()) != cfg.n) fail("$.omega.diagonal", "needs n entries");
    for (double g : cfg.omega_diagonal)
      if (!(g > 0.0)) fail("$.omega.diagonal", "entries must be positive");
  }
  if (!(cfg.tol_scale > 0.0)) fail("$.tol_scale", "must be positive");
  const auto& names = registered_scenarios();
  for (std::size_t i = 0; i < cfg.scenarios.size(); ++i) {
    const auto& s = cfg.scenarios[i];
    const std::string sp = "$.scenarios[" + std::to_string(i) + "]";
    if (std::find(names.begin(), names.end(), s.name) == names.end()) {
      std::string list;
      for (const auto& nm : names) list += (list.empty() ? "" : ", ") + nm;
      fail(sp + ".name", "unknown scenario '" + s.name + "'; registered: " + list);
    }
    for (const auto& ref : bundle_refs(s))
      if (!cfg.bundles.count(ref)) fail(sp + ".params", "undefined bundle '" + ref + "'");
  }
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("$", "expected an object");
  RunConfig cfg;
  cfg.n = get_or<int>(doc, "n", cfg.n, "$");
  cfg.m = get_or<int>(doc, "m", cfg.m, "$");
  cfg.points_per_axis = get_or<int>(doc, "points_per_axis", cfg.points_per_axis, "$");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) fail("$.seed", "expected a non-negative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (cfg.n < 1 || cfg.n > 4) fail("$.n", "must lie in [1, 4]");
  if (cfg.m < 1 || cfg.m > cfg.n) fail("$.m", "must satisfy 1 <= m <= n");
  const int n = cfg.n;

  if (doc.contains("omega")) {
    const json& o = doc.at("omega");
    if (o.contains("diagonal")) cfg.omega_diagonal = double_list(o.at("diagonal"), "$.omega.diagonal");
  }

  if (doc.contains("omega_test")) {
    const json& t = doc.at("omega_test");
    const std::string tp = "$.omega_test";
    cfg.omega_test.mode = get_or<std::string>(t, "mode", "constant", tp);
    cfg.omega_test.epsilon = get_or<double>(t, "epsilon", 1.0, tp);
    if (t.contains("base_diagonal")) {
      cfg.omega_test.base_diagonal = double_list(t.at("base_diagonal"), tp + ".base_diagonal");
      if (cfg.m != n - 1 || static_cast<int>(cfg.omega_test.base_diagonal.size()) != n)
        fail(tp + ".base_diagonal", "only for m = n - 1, with n entries");
    }
    if (cfg.omega_test.mode == "kahler_power") {
      cfg.omega_test.potential = parse_series(field(t, "potential", tp), n, tp + ".potential");
    } else if (cfg.omega_test.mode == "ddbar_closed_perturbation") {
      const json& terms = field(t, "perturbation", tp);
      if (!terms.is_array()) fail(tp + ".perturbation", "expected an array");
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string pp = tp + ".perturbation[" + std::to_string(i) + "]";
        FormTerm ft;
        ft.holomorphic = int_list(terms[i].value("holomorphic", json::array()), pp + ".holomorphic");
        ft.antiholomorphic =
            int_list(terms[i].value("antiholomorphic", json::array()), pp + ".antiholomorphic");
        ft.profile = parse_series(field(terms[i], "profile", pp), n, pp + ".profile");
        if (terms[i].contains("scale")) ft.scale = as_complex(terms[i].at("scale"), pp + ".scale");
        cfg.omega_test.perturbation.push_back(std::move(ft));
      }
    } else if (cfg.omega_test.mode != "constant") {
      fail(tp + ".mode", "expected constant, kahler_power or ddbar_closed_perturbation");
    }
  } else {
    cfg.omega_test = TestFormConfig{};
    cfg.omega_test.mode = "constant";
  }

  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    auto& tol = cfg.tolerances;
    tol.tol_closed = get_or<double>(t, "tol_closed", tol.tol_closed, "$.tolerances");
    tol.tol_we = get_or<double>(t, "tol_we", tol.tol_we, "$.tolerances");
    tol.solver_residual = get_or<double>(t, "solver_residual", tol.solver_residual, "$.tolerances");
    tol.positivity_delta = get_or<double>(t, "positivity_delta", tol.positivity_delta, "$.tolerances");
    if (!(tol.solver_residual > 0.0)) fail("$.tolerances.solver_residual", "must be positive");
  }

  if (doc.contains("bundles")) {
    const json& b = doc.at("bundles");
    if (!b.is_object()) fail("$.bundles", "expected an object keyed by bundle name");
    for (const auto& [name, spec] : b.items())
      cfg.bundles[name] = parse_bundle(spec, n, "$.bundles." + name);
  }

  if (doc.contains("scenarios")) {
    const json& s = doc.at("scenarios");
    if (!s.is_array()) fail("$.scenarios", "expected an array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string sp = "$.scenarios[" + std::to_string(i) + "]";
      ScenarioConfig sc;
      if (s[i].is_string()) {
        sc.name = s[i].get<std::string>();
      } else {
        const json& nm = field(s[i], "name", sp);
        if (!nm.is_string()) fail(sp + ".name", "expected a string");
        sc.name = nm.get<std::string>();
        if (s[i].contains("params")) {
          if (!s[i].at("params").is_object()) fail(sp + ".params", "expected an object");
          sc.params = s[i].at("params");
        }
      }
      cfg.scenarios.push_back(std::move(sc));
    }
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    cfg.out = get_or<std::string>(o, "json", cfg.out, "$.output");
    cfg.csv_dir = get_or<std::string>(o, "csv_dir", cfg.csv_dir, "$.output");
  }
  cfg.record_timings = get_or<bool>(doc, "record_timings", false, "$");
  cfg.tol_scale = get_or<double>(doc, "tol_scale", 1.0, "$");
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, path + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  json doc = {{"n", cfg.n}, {"m", cfg.m}, {"points_per_axis", cfg.points_per_axis}, {"seed", cfg.seed}};
  doc["omega"] = json::object();
  if (!cfg.omega_diagonal.empty()) doc["omega"]["diagonal"] = cfg.omega_diagonal;

  json t = {{"mode", cfg.omega_test.mode}, {"epsilon", cfg.omega_test.epsilon}};
  if (!cfg.omega_test.base_diagonal.empty()) t["base_diagonal"] = cfg.omega_test.base_diagonal;
  if (cfg.omega_test.mode == "kahler_power") t["potential"] = series_json(cfg.omega_test.potential);
  if (cfg.omega_test.mode == "ddbar_closed_perturbation") {
    json terms = json::array();
    for (const auto& ft : cfg.omega_test.perturbation)
      terms.push_back({{"holomorphic", ft.holomorphic},
                       {"antiholomorphic", ft.antiholomorphic},
                       {"profile", series_json(ft.profile)},
                       {"scale", complex_json(ft.scale)}});
    t["perturbation"] = terms;
  }
  doc["omega_test"] = t;

  const auto& tol = cfg.tolerances;
  doc["tolerances"] = {{"tol_closed", tol.tol_closed},
                       {"tol_we", tol.tol_we},
                       {"solver_residual", tol.solver_residual},
                       {"positivity_delta", tol.positivity_delta}};
  doc["bundles"] = json::object();
  for (const auto& [name, b] : cfg.bundles) doc["bundles"][name] = bundle_json(b);
  doc["scenarios"] = json::array();
  for (const auto& s : cfg.scenarios) doc["scenarios"].push_back({{"name", s.name}, {"params", s.params}});
  doc["output"] = {{"json", cfg.out}, {"csv_dir", cfg.csv_dir}};
  doc["record_timings"] = cfg.record_timings;
  doc["tol_scale"] = cfg.tol_scale;
  return doc;
}

RunConfig default_config() {
  static const char* text = R"({
  "n": 2, "m": 1, "points_per_axis": 16, "seed": 20240611,
  "omega": {"diagonal": [1, 1]},
  "omega_test": {
    "mode": "ddbar_closed_perturbation", "epsilon": 1.0,
    "perturbation": [
      {"antiholomorphic": [0],
       "profile": {"terms": [{"amplitude": 0.02, "kind": "cos", "wave": [0, 0, 1, 0]}]}}
    ]
  },
  "bundles": {
    "line_weighted": {"kind": "line", "lines": [
      {"weight": {"terms": [{"amplitude": 0.3, "kind": "cos", "wave": [1, 0, 0, 0]}]}}]},
    "line_12": {"kind": "line", "lines": [{"class": [1, 2]}]},
    "line_01": {"kind": "line", "lines": [{"class": [0, 1]}]},
    "line_12_weighted": {"kind": "line", "lines": [
      {"class": [1, 2], "weight": {"terms": [{"amplitude": 0.2, "kind": "sin", "wave": [0, 0, 0, 1]}]}}]},
    "sum_12_21": {"kind": "direct_sum", "lines": [{"class": [1, 2]}, {"class": [2, 1]}]},
    "sum_12_01": {"kind": "direct_sum", "lines": [{"class": [1, 2]}, {"class": [0, 1]}]},
    "extension_flat": {"kind": "extension", "sub": [{}], "quotient": [{}],
                       "beta_star": [[[0.5, 0]]]},
    "extension_split": {"kind": "extension", "sub": [{}], "quotient": [{}],
                        "beta_star": [[[0, 0]]]}
  },
  "scenarios": [
    {"name": "adjoint_defect_suite", "params": {"pairs": 20, "bandwidth": 2, "terms": 16}},
    {"name": "kernel_and_decompose", "params": {"samples": 5, "bandwidth": 2, "terms": 8}},
    {"name": "he_rescale_line", "params": {"bundles": ["line_weighted", "line_12"], "expected_c": [0, 3]}},
    {"name": "slope_link", "params": {
      "bundles": ["line_12", "line_01", "line_weighted", "line_12_weighted", "sum_12_21"],
      "closed_form": {"bundle": "line_12", "lambda": 3, "mu": 12, "vol": 4}}},
    {"name": "vanishing_identity", "params": {"weights": 10, "rank": 2, "bandwidth": 1, "terms": 4, "amplitude": 0.05}},
    {"name": "bundle_factor_suite", "params": {"e": "sum_12_21", "f": "line_01"}},
    {"name": "degree_gauge_invariance", "params": {
      "bundles": ["line_12", "line_01"], "expected_degrees": [12, 4],
      "rescalings": 10, "bandwidth": 2, "terms": 6, "amplitude": 0.5}},
    {"name": "exact_sequence_suite", "params": {"extension": "extension_flat", "split": "extension_split", "random_betas": 10}},
    {"name": "classical_reduction", "params": {"bundles": ["line_12", "line_weighted", "sum_12_21", "sum_12_01"], "samples": 5}},
    {"name": "kl_demo", "params": {}},
    {"name": "pointwise_lemma_suite", "params": {"draws": 1000}},
    {"name": "convergence_sweep", "params": {"grids": [4, 8, 16]}}
  ],
  "output": {"json": "report.json", "csv_dir": ""}
})";
  return parse_config(json::parse(text));
}

TorusGrid make_grid(const RunConfig& cfg, int points_per_axis) {
  return TorusGrid::make(cfg.n, points_per_axis);
}

FormField make_omega(const RunConfig& cfg, const TorusGrid& grid) {
  if (cfg.omega_diagonal.empty()) return flat_kahler_form(grid);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(cfg.n, cfg.n);
  for (int j = 0; j < cfg.n; ++j) g(j, j) = cfg.omega_diagonal[j];
  return constant_kahler_form(grid, g);
}

TestFormSpec make_test_form_spec(const RunConfig& cfg) {
  TestFormSpec spec;
  const auto& t = cfg.omega_test;
  if (t.mode == "kahler_power") spec.mode = TestFormSpec::Mode::KahlerPower;
  else if (t.mode == "ddbar_closed_perturbation") spec.mode = TestFormSpec::Mode::DdbarClosedPerturbation;
  else spec.mode = TestFormSpec::Mode::Constant;
  if (!t.base_diagonal.empty()) spec.base = class_form(t.base_diagonal, cfg.n);
  spec.potential = t.potential;
  spec.perturbation = t.perturbation;
  spec.epsilon = t.epsilon;
  return spec;
}

GeometryTolerances make_geometry_tolerances(const RunConfig& cfg) {
  GeometryTolerances tol;
  tol.tol_closed = cfg.tolerances.tol_closed;
  tol.positivity_delta = cfg.tolerances.positivity_delta;
  tol.seed = cfg.seed;
  return tol;
}

BundleSpec build_bundle(const BundleConfig& b, const TorusGrid& grid) {
  BundleSpec spec;
  if (b.kind == "extension") {
    std::vector<LineBundleData> sub, quotient;
    for (const auto& l : b.sub) sub.push_back(line_data(l, grid));
    for (const auto& l : b.quotient) quotient.push_back(line_data(l, grid));
    const int s = static_cast<int>(sub.size()), q = static_cast<int>(quotient.size());
    MatrixFormField beta_star(grid, s, q, 0, 1);
    for (int a = 0; a < s; ++a)
      for (int c = 0; c < q; ++c)
        beta_star(a, c) = FormField(grid, form_from_one_form_coeffs(grid.n, b.beta_star[a][c], true));
    auto part = [](std::vector<LineBundleData> lines) {
      return lines.size() == 1 ? BundleSpec::line(std::move(lines.front()))
                               : BundleSpec::direct_sum(std::move(lines));
    };
    spec = BundleSpec::extension(part(std::move(sub)), part(std::move(quotient)), std::move(beta_star));
  } else {
    std::vector<LineBundleData> lines;
    for (const auto& l : b.lines) lines.push_back(line_data(l, grid));
    spec = b.kind == "line" ? BundleSpec::line(std::move(lines.front()))
                            : BundleSpec::direct_sum(std::move(lines));
  }
  if (b.conformal_weight) spec.conformal_weight = b.conformal_weight->sample(grid);
  return spec;
}

}  // namespace helab
