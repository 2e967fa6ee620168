// Batch front-end: run verification scenarios and write the JSON report and
// convergence CSVs. Exit codes: 0 all pass, 1 a check failed, 2 config/IO error.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "helab/config.hpp"
#include "helab/errors.hpp"
#include "helab/scenarios.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hermite-Einstein calculus lab on flat tori"};
  std::string config_path, out, csv_dir;
  std::vector<std::string> scenarios;
  int grid = 0;
  std::uint64_t seed = 0;
  double tol_scale = 0.0;
  bool list = false, dump_default = false;
  app.add_option("--config", config_path, "JSON run configuration (defaults built in)");
  app.add_option("--scenario", scenarios, "Run only the named scenario (repeatable)");
  app.add_option("--grid", grid, "Points per real axis")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
  app.add_option("--out", out, "JSON report path");
  app.add_option("--csv-dir", csv_dir, "Directory for convergence sweep CSVs");
  app.add_option("--tol-scale", tol_scale, "Multiply every check tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--list", list, "List registered scenarios and exit");
  app.add_flag("--print-default-config", dump_default, "Print the built-in configuration and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list) {
      for (const auto& name : helab::registered_scenarios()) std::cout << name << "\n";
      return 0;
    }
    helab::RunConfig cfg = config_path.empty() ? helab::default_config() : helab::load_config(config_path);
    if (dump_default) {
      std::cout << helab::to_json(cfg).dump(2) << "\n";
      return 0;
    }
    if (grid) cfg.points_per_axis = grid;
    if (*seed_opt) cfg.seed = seed;
    if (!out.empty()) cfg.out = out;
    if (!csv_dir.empty()) cfg.csv_dir = csv_dir;
    if (tol_scale > 0.0) cfg.tol_scale = tol_scale;
    helab::validate_config(cfg);

    const helab::VerificationReport report = helab::run_scenarios(cfg, scenarios);
    helab::write_json_report(report, cfg.out);
    if (!cfg.csv_dir.empty()) helab::write_sweep_csvs(report, cfg.csv_dir);

    for (const auto& c : report.checks)
      std::printf("%s  %-58s residual %.3e  tol %.1e\n", c.passed ? "pass" : "FAIL", c.name.c_str(),
                  c.residual, c.tolerance);
    std::printf("%d passed, %d failed; report written to %s\n", report.passed(), report.failed(),
                cfg.out.c_str());
    return report.failed() == 0 ? 0 : 1;
  } catch (const helab::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
