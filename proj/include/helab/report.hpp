#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace helab {

struct CheckRecord {
  std::string name;
  std::string anchor;
  bool passed = false;  // residual <= tolerance
  double residual = 0.0;
  double tolerance = 0.0;
  double runtime_ms = 0.0;
  std::string inputs_digest;
  std::string detail;
};

struct SweepRow {
  std::string scenario;
  int points_per_axis = 0;
  double residual = 0.0;
  double runtime_ms = 0.0;
};

struct Sweep {
  std::string tracked;
  std::vector<SweepRow> rows;
};

struct VerificationReport {
  std::vector<CheckRecord> checks;
  std::vector<Sweep> sweeps;
  nlohmann::json config = nlohmann::json::object();

  int passed() const;
  int failed() const;
  /// Failed checks first, each group in insertion order.
  void order_failures_first();
};

/// Status is derived from residual and tolerance; NaN residuals fail.
CheckRecord make_check(std::string name, std::string anchor, double residual, double tolerance,
                       std::string digest, std::string detail = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
/// fnv1a as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

nlohmann::json to_json(const CheckRecord& c);
nlohmann::json to_json(const VerificationReport& r);
VerificationReport report_from_json(const nlohmann::json& doc);

/// Throws IoError.
void write_json_report(const VerificationReport& r, const std::string& path);
/// One convergence_sweep_<tracked>.csv per sweep. Throws IoError.
std::vector<std::string> write_sweep_csvs(const VerificationReport& r, const std::string& dir);

}  // namespace helab
