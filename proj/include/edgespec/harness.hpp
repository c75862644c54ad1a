#pragma once

// Verification suites and their machine-readable reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace edgespec::harness {

enum class Suite { bessel, schur, model, parametrix, gb, scales, witt, all };
enum class OutputFormat { json, csv };

// ConfigError for an unknown name.
Suite parse_suite(const std::string& name);
std::string to_string(Suite s);
OutputFormat parse_format(const std::string& name);

inline constexpr std::uint64_t kDefaultSeed = 20240607;

struct RunConfig {
  int grid_n = 400;
  double x_min = 1e-4;
  double x_max = 1e3;
  int y_modes = 32;
  int fiber_modes = 16;
  double delta_min = 0.05;
  double gap = 1.0;
  double tol_factor = 1.0;
  std::uint64_t seed = kDefaultSeed;
  OutputFormat output_format = OutputFormat::json;
  std::optional<double> nu;
  std::optional<double> beta;
  std::optional<std::vector<double>> spectrum;

  // ConfigError on out-of-range values.
  void validate() const;
  // The given spectrum, or fiber_modes values +-(1.6 + 0.9 j).
  std::vector<double> fiber_spectrum() const;
};

// EDGESPEC_SEED, when set to an unsigned integer, replaces config.seed.
void apply_env_overrides(RunConfig& config);

struct CheckRecord {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  double measured = 0.0;
  std::optional<double> bound;
  bool pass = false;
  std::int64_t runtime_ms = 0;

  // "k=v;k=v" in key order, lists space separated.
  std::string param_string() const;
  nlohmann::json to_json() const;
  static CheckRecord from_json(const nlohmann::json& j);
};

// Records sorted by (check, param_string).
std::vector<CheckRecord> run_suite(Suite suite, const RunConfig& config);

// PreconditionError for an empty list. JSON: array of records. CSV: header
// check,param_string,measured,bound,pass,runtime_ms; reals with 12
// significant digits; LF line endings.
std::string emit(const std::vector<CheckRecord>& records, OutputFormat format);

std::vector<CheckRecord> parse_json_records(const std::string& text);

// 0 if every record passes, 1 otherwise.
int exit_status(const std::vector<CheckRecord>& records);

}  // namespace edgespec::harness
