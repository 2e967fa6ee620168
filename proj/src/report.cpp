#include "helab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helab/errors.hpp"

namespace helab {

using nlohmann::json;

int VerificationReport::passed() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.passed; }));
}

int VerificationReport::failed() const { return static_cast<int>(checks.size()) - passed(); }

void VerificationReport::order_failures_first() {
  std::stable_partition(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; });
}

CheckRecord make_check(std::string name, std::string anchor, double residual, double tolerance,
                       std::string digest, std::string detail) {
  CheckRecord c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.residual = residual;
  c.tolerance = tolerance;
  c.passed = residual <= tolerance;
  c.inputs_digest = std::move(digest);
  c.detail = std::move(detail);
  return c;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

namespace {

// JSON has no infinity or NaN; keep them as strings so the report parses back.
json number_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double number_from(const json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string s = v.get<std::string>();
  if (s == "nan") return NAN;
  return s == "inf" ? INFINITY : -INFINITY;
}

}  // namespace

json to_json(const CheckRecord& c) {
  return {{"name", c.name},
          {"anchor", c.anchor},
          {"status", c.passed ? "pass" : "fail"},
          {"residual", number_json(c.residual)},
          {"tolerance", number_json(c.tolerance)},
          {"runtime_ms", c.runtime_ms},
          {"inputs_digest", c.inputs_digest},
          {"detail", c.detail}};
}

json to_json(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  json sweeps = json::array();
  for (const auto& s : r.sweeps) {
    json rows = json::array();
    for (const auto& row : s.rows)
      rows.push_back({{"scenario", row.scenario},
                      {"N", row.points_per_axis},
                      {"residual", number_json(row.residual)},
                      {"runtime_ms", row.runtime_ms}});
    sweeps.push_back({{"tracked", s.tracked}, {"rows", rows}});
  }
  return {{"summary", {{"total", r.checks.size()}, {"passed", r.passed()}, {"failed", r.failed()}}},
          {"checks", checks},
          {"sweeps", sweeps},
          {"config", r.config}};
}

VerificationReport report_from_json(const json& doc) {
  VerificationReport r;
  try {
    for (const auto& c : doc.at("checks")) {
      CheckRecord rec;
      rec.name = c.at("name").get<std::string>();
      rec.anchor = c.at("anchor").get<std::string>();
      rec.passed = c.at("status").get<std::string>() == "pass";
      rec.residual = number_from(c.at("residual"));
      rec.tolerance = number_from(c.at("tolerance"));
      rec.runtime_ms = c.at("runtime_ms").get<double>();
      rec.inputs_digest = c.at("inputs_digest").get<std::string>();
      rec.detail = c.at("detail").get<std::string>();
      r.checks.push_back(std::move(rec));
    }
    for (const auto& s : doc.at("sweeps")) {
      Sweep sw;
      sw.tracked = s.at("tracked").get<std::string>();
      for (const auto& row : s.at("rows"))
        sw.rows.push_back({row.at("scenario").get<std::string>(), row.at("N").get<int>(),
                           number_from(row.at("residual")), row.at("runtime_ms").get<double>()});
      r.sweeps.push_back(std::move(sw));
    }
    r.config = doc.at("config");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed report: ") + e.what());
  }
  return r;
}

void write_json_report(const VerificationReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << to_json(r).dump(2) << "\n";
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

std::vector<std::string> write_sweep_csvs(const VerificationReport& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  for (const auto& s : r.sweeps) {
    const std::string path = (std::filesystem::path(dir) / ("convergence_sweep_" + s.tracked + ".csv")).string();
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
    out << "scenario,N,residual,runtime_ms\n";
    char buf[64];
    for (const auto& row : s.rows) {
      std::snprintf(buf, sizeof buf, "%.17g", row.residual);
      out << row.scenario << "," << row.points_per_axis << "," << buf << "," << row.runtime_ms << "\n";
    }
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
    written.push_back(path);
  }
  return written;
}

}  // namespace helab
