#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helab/config.hpp"
#include "helab/errors.hpp"
#include "helab/report.hpp"
#include "helab/scenarios.hpp"

using namespace helab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / ("helab_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

std::string error_text(const std::function<void()>& f, ErrorKind expected) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.kind() == expected);
    return e.what();
  }
  FAIL("no exception");
  return {};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HELAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("default configuration") {
  const RunConfig cfg = default_config();
  CHECK(cfg.n == 2);
  CHECK(cfg.m == 1);
  CHECK(cfg.points_per_axis == 16);
  CHECK(registered_scenarios().size() == 12);
  CHECK(cfg.scenarios.size() == registered_scenarios().size());
  CHECK_NOTHROW(validate_config(cfg));

  // JSON round trip reproduces the same document.
  const json doc = to_json(cfg);
  CHECK(to_json(parse_config(doc)) == doc);
}

TEST_CASE("configuration errors") {
  json doc = to_json(default_config());
  doc["m"] = 3;
  error_text([&] { parse_config(doc); }, ErrorKind::ConfigError);

  doc = to_json(default_config());
  doc["scenarios"].push_back({{"name", "no_such_scenario"}});
  const std::string msg = error_text([&] { parse_config(doc); }, ErrorKind::ConfigError);
  CHECK(msg.find("no_such_scenario") != std::string::npos);
  CHECK(msg.find("kl_demo") != std::string::npos);

  doc = to_json(default_config());
  doc["points_per_axis"] = "sixteen";
  const std::string path_msg = error_text([&] { parse_config(doc); }, ErrorKind::ConfigError);
  CHECK(path_msg.find("points_per_axis") != std::string::npos);

  RunConfig cfg = default_config();
  cfg.points_per_axis = 7;
  error_text([&] { validate_config(cfg); }, ErrorKind::ConfigError);

  error_text([&] { load_config("/nonexistent/helab.json"); }, ErrorKind::IoError);
  error_text([&] { run_scenarios(default_config(), {"bogus"}); }, ErrorKind::ConfigError);
}

TEST_CASE("bundles from configuration") {
  const RunConfig cfg = default_config();
  const TorusGrid g = make_grid(cfg, 8);
  REQUIRE(cfg.bundles.count("extension_flat"));
  const BundleSpec ext = build_bundle(cfg.bundles.at("extension_flat"), g);
  CHECK(ext.kind == BundleSpec::Kind::Extension);
  CHECK(ext.rank() == 2);
  const BundleSpec sum = build_bundle(cfg.bundles.at("sum_12_21"), g);
  CHECK(sum.rank() == 2);
  const FormField omega = make_omega(cfg, g);
  CHECK(std::abs(omega.at(0).coeff(1, 1) - kI) < 1e-15);
}

TEST_CASE("check records and ordering") {
  CHECK(make_check("a", "x", 1e-9, 1e-8, "d").passed);
  CHECK(make_check("a", "x", 1e-8, 1e-8, "d").passed);
  CHECK_FALSE(make_check("a", "x", 2e-8, 1e-8, "d").passed);
  CHECK_FALSE(make_check("a", "x", std::nan(""), 1e-8, "d").passed);

  VerificationReport r;
  r.checks = {make_check("one", "", 0.0, 1.0, ""), make_check("two", "", 2.0, 1.0, ""),
              make_check("three", "", 0.5, 1.0, ""), make_check("four", "", INFINITY, 1.0, "")};
  CHECK(r.passed() == 2);
  CHECK(r.failed() == 2);
  r.order_failures_first();
  CHECK(r.checks[0].name == "two");
  CHECK(r.checks[1].name == "four");
  CHECK(r.checks[2].name == "one");
  CHECK(r.checks[3].name == "three");
}

TEST_CASE("FNV-1a digests") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("report JSON and sweep CSVs") {
  const fs::path dir = scratch_dir();
  VerificationReport r;
  r.checks = {make_check("s/ok", "anchor", 1e-12, 1e-10, "00ff", "fine"),
              make_check("s/bad", "anchor", INFINITY, 1e-10, "00ff", "error")};
  r.sweeps = {{"apply_P", {{"convergence_sweep", 4, 1e-3, 0.0}, {"convergence_sweep", 8, 1e-9, 0.0},
                           {"convergence_sweep", 16, 1e-15, 0.0}}}};
  const fs::path out = dir / "report.json";
  write_json_report(r, out.string());
  const VerificationReport back = report_from_json(json::parse(slurp(out)));
  REQUIRE(back.checks.size() == 2);
  CHECK(back.checks[0].name == "s/ok");
  CHECK(back.checks[0].residual == 1e-12);
  CHECK(back.checks[0].passed);
  CHECK(std::isinf(back.checks[1].residual));
  CHECK_FALSE(back.checks[1].passed);
  REQUIRE(back.sweeps.size() == 1);
  CHECK(back.sweeps[0].rows.size() == 3);

  const auto files = write_sweep_csvs(r, dir.string());
  REQUIRE(files.size() == 1);
  CHECK(fs::path(files[0]).filename() == "convergence_sweep_apply_P.csv");
  std::istringstream csv(slurp(files[0]));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "scenario,N,residual,runtime_ms");
  CHECK(lines[1].rfind("convergence_sweep,4,", 0) == 0);

  error_text([&] { write_json_report(r, (dir / "missing" / "r.json").string()); }, ErrorKind::IoError);
  fs::remove_all(dir);
}

TEST_CASE("scenario subset and convergence sweep") {
  RunConfig cfg = default_config();
  const VerificationReport r = run_scenarios(cfg, {"pointwise_lemma_suite", "convergence_sweep"});
  CHECK(r.failed() == 0);
  CHECK(r.passed() > 0);
  for (const auto& c : r.checks) {
    INFO(c.name, " ", c.residual, " ", c.tolerance);
    CHECK((c.name.rfind("pointwise_lemma_suite/", 0) == 0 || c.name.rfind("convergence_sweep/", 0) == 0));
    CHECK(c.inputs_digest.size() == 16);
  }
  REQUIRE_FALSE(r.sweeps.empty());
  for (const auto& s : r.sweeps) {
    REQUIRE(s.rows.size() == 3);
    CHECK(s.rows[0].points_per_axis == 4);
    CHECK(s.rows[2].points_per_axis == 16);
    for (std::size_t k = 1; k < s.rows.size(); ++k)
      CHECK(s.rows[k].residual <= std::max(s.rows[k - 1].residual, 1e-12));
  }

  // Same seed, same digests.
  const VerificationReport again = run_scenarios(cfg, {"pointwise_lemma_suite"});
  CHECK(again.checks.front().inputs_digest == r.checks.front().inputs_digest);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch_dir();
  CHECK(run_cli("--list") == 0);
  CHECK(run_cli("--print-default-config") == 0);
  CHECK(run_cli("--config " + (dir / "absent.json").string()) == 2);
  {
    std::ofstream(dir / "broken.json") << "{ not json";
  }
  CHECK(run_cli("--config " + (dir / "broken.json").string()) == 2);
  {
    json doc = to_json(default_config());
    doc["m"] = 5;
    std::ofstream(dir / "m_too_big.json") << doc.dump();
  }
  CHECK(run_cli("--config " + (dir / "m_too_big.json").string()) == 2);
  CHECK(run_cli("--grid 7 --scenario kl_demo") == 2);
  CHECK(run_cli("--no-such-flag") == 2);

  const fs::path ok = dir / "ok.json";
  CHECK(run_cli("--scenario pointwise_lemma_suite --out " + ok.string()) == 0);
  const json good = json::parse(slurp(ok));
  CHECK(good["summary"]["failed"] == 0);

  // Shrinking every tolerance makes checks with nonzero residuals fail.
  const fs::path bad = dir / "bad.json";
  CHECK(run_cli("--scenario pointwise_lemma_suite --tol-scale 1e-30 --out " + bad.string()) == 1);
  const json doc = json::parse(slurp(bad));
  REQUIRE(doc["checks"].size() > 1);
  CHECK(doc["checks"][0]["status"] == "fail");
  bool seen_pass = false;
  for (const auto& c : doc["checks"]) {
    if (c["status"] == "pass") seen_pass = true;
    if (seen_pass) CHECK(c["status"] == "pass");  // failures first
  }

  const fs::path csv = dir / "csv";
  fs::create_directories(csv);
  CHECK(run_cli("--scenario convergence_sweep --out " + (dir / "sweep.json").string() + " --csv-dir " +
                csv.string()) == 0);
  CHECK(fs::exists(csv / "convergence_sweep_apply_P.csv"));
  fs::remove_all(dir);
}
