#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "helab/bundles.hpp"
#include "helab/geometry.hpp"

namespace helab {

struct LineConfig {
  std::vector<double> class_diagonal;  // C = Σ c_j i dz_j ^ dzbar_j; empty means 0
  std::optional<TrigSeries> weight;
};

struct BundleConfig {
  std::string kind = "line";  // line | direct_sum | extension
  std::vector<LineConfig> lines;
  std::vector<LineConfig> sub, quotient;
  /// Constant (0,1)-coefficients of β*, s x q entries of length n each.
  std::vector<std::vector<std::vector<cplx>>> beta_star;
  std::optional<TrigSeries> conformal_weight;
};

struct TestFormConfig {
  std::string mode = "ddbar_closed_perturbation";  // constant | kahler_power | ddbar_closed_perturbation
  std::vector<double> base_diagonal;  // optional diagonal base for m = n - 1
  TrigSeries potential;
  std::vector<FormTerm> perturbation;
  double epsilon = 1.0;
};

struct ToleranceConfig {
  double tol_closed = 1e-10;
  double tol_we = 1e-9;
  double solver_residual = 1e-9;
  double positivity_delta = 1e-10;
};

struct ScenarioConfig {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

struct RunConfig {
  int n = 2;
  int m = 1;
  int points_per_axis = 16;
  std::uint64_t seed = 20240611;
  std::vector<double> omega_diagonal;  // ω = i Σ g_j dz_j ^ dzbar_j, default all ones
  TestFormConfig omega_test;
  ToleranceConfig tolerances;
  std::map<std::string, BundleConfig> bundles;
  std::vector<ScenarioConfig> scenarios;
  std::string out = "report.json";
  std::string csv_dir;
  bool record_timings = false;
  double tol_scale = 1.0;
};

/// Names accepted in the "scenarios" list.
const std::vector<std::string>& registered_scenarios();

/// Throws ConfigError with the offending JSON path.
RunConfig parse_config(const nlohmann::json& doc);
/// Throws IoError or ConfigError.
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

/// n = 2, m = 1, N = 16 with the perturbation-mode test form and every
/// registered scenario.
RunConfig default_config();

/// Re-checks invariants after command-line overrides. Throws ConfigError.
void validate_config(const RunConfig& cfg);

TorusGrid make_grid(const RunConfig& cfg, int points_per_axis);
FormField make_omega(const RunConfig& cfg, const TorusGrid& grid);
TestFormSpec make_test_form_spec(const RunConfig& cfg);
GeometryTolerances make_geometry_tolerances(const RunConfig& cfg);
BundleSpec build_bundle(const BundleConfig& b, const TorusGrid& grid);

}  // namespace helab
