#pragma once

#include "verify.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace gradjump {

// A fully parsed scenario: system, control, query points and tolerance
// overrides. `drift` mirrors system.has_drift().
struct Scenario {
  int schema_version = 1;
  std::string name = "scenario";
  std::uint64_t seed = 42;
  double horizon = 1.0;
  VectorFieldSystem system;
  std::optional<AdmissibleControl> control;
  std::vector<VectorXd> lambda_queries;
  std::vector<VectorXd> x_queries;
  Tolerances tol;
  bool drift = false;
  int threads = 1;
  nlohmann::ordered_json system_json;  // as parsed, for round-trip output

  const AdmissibleControl& u() const { return *control; }
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& sc);

// Command runners shared by the C API and the CLI. Each writes its outputs
// (CSV per query plus report.json) into out_dir and returns the process exit
// code: 0 ok, 1 gate or verdict failure, 2 config error, 3 numeric error.
int run_command(const Scenario& sc, const std::string& out_dir);
int invert_command(const Scenario& sc, const std::string& out_dir);
int verify_command(const Scenario& sc, const std::string& out_dir);

// 17-significant-digit decimal formatting used by every CSV writer
std::string format_double(double v);

}  // namespace gradjump
