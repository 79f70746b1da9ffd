#include "scenario.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace gradjump;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scenario_dir() {
  if (const char* env = std::getenv("GRADJUMP_SCENARIO_DIR")) return env;
  return "scenarios";
}

// translation plus dilation: [g1, g2] = g1
const char* kCustomSystem = R"({
  "schema_version": 1,
  "name": "custom_affine",
  "horizon": 0.5,
  "system": {
    "dimension": 2,
    "center": [0.0, 0.0],
    "radius": 0.5,
    "box": [0.5, 0.5],
    "fields": [
      [[{"c": 1.0, "e": [0, 0]}], []],
      [[{"c": 1.0, "e": [1, 0]}], [{"c": 1.0, "e": [0, 1]}]]
    ],
    "structure_constants": [{"k": 1, "i": 1, "j": 2, "value": 1.0},
                            {"k": 1, "i": 2, "j": 1, "value": -1.0}]
  },
  "control": {
    "breakpoints": [0.0, 0.5],
    "k1": 0.0,
    "channels": [
      {"shape": {"kind": "constant"}, "pieces": [[0.0, 0.1, 0.0, 0.0]]},
      {"shape": {"kind": "constant"}, "pieces": [[0.0, 0.05, 0.0, 0.0]]}
    ]
  }
})";

}  // namespace

TEST_CASE("builtin scenario files load and round-trip byte for byte") {
  for (const char* name : {"translations_smoke", "heisenberg_jump", "scaled_rotations",
                           "commuting_drift", "shear_drift"}) {
    const std::string path = scenario_dir() + "/" + name + ".json";
    const Scenario sc = load_scenario(path);
    const std::string once = serialize_scenario(sc);
    const std::string twice = serialize_scenario(parse_scenario(once));
    CHECK(once == twice);
  }
}

TEST_CASE("parsing a known scenario fills in every piece") {
  const Scenario sc = load_scenario(scenario_dir() + "/translations_smoke.json");
  CHECK(sc.name == "translations_smoke");
  CHECK(sc.horizon == 1.0);
  CHECK(sc.system.count == 2);
  CHECK_FALSE(sc.drift);
  REQUIRE(sc.control.has_value());
  CHECK(sc.u().breakpoints().size() == 3);
  CHECK(sc.u().eval(1.0, VectorXd::Zero(2))[0] == doctest::Approx(0.06).epsilon(1e-15));
  REQUIRE(sc.lambda_queries.size() >= 1);
}

TEST_CASE("custom polynomial systems parse with explicit structure constants") {
  const Scenario sc = parse_scenario(kCustomSystem);
  CHECK(sc.system.dim == 2);
  CHECK(sc.system.count == 2);
  const VectorXd x = Eigen::Vector2d(0.3, -0.2);
  CHECK(sc.system.fields[0](x)[0] == 1.0);
  CHECK(sc.system.fields[1](x)[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(sc.system.fields[1](x)[1] == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(sc.system.gamma(0, 0, 1) == 1.0);
  CHECK(involution_residual(sc.system, sample_ball(sc.system, 20, 2.0, 5)) < 1e-12);
}

TEST_CASE("omitted structure constants are fitted from brackets") {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(kCustomSystem);
  j["system"].erase("structure_constants");
  const Scenario sc = parse_scenario(j.dump());
  CHECK(sc.system.gamma(0, 0, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sc.system.gamma(0, 1, 0) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("parse failures carry a line number") {
  const std::string broken = "{\n  \"schema_version\": 1,\n  \"name\": oops\n}";
  try {
    parse_scenario(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("structural problems are rejected with specific messages") {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(kCustomSystem);

  SUBCASE("wrong schema version") {
    j["schema_version"] = 99;
    CHECK_THROWS_AS(parse_scenario(j.dump()), ParseError);
  }
  SUBCASE("missing system") {
    j.erase("system");
    CHECK_THROWS_AS(parse_scenario(j.dump()), ParseError);
  }
  SUBCASE("query dimension mismatch") {
    j["queries"]["lambda"] = {{0.1, 0.2, 0.3}};
    CHECK_THROWS_AS(parse_scenario(j.dump()), ParseError);
  }
  SUBCASE("jump declaration that does not match the pieces") {
    j["control"]["breakpoints"] = {0.0, 0.25, 0.5};
    j["control"]["channels"][0]["pieces"] = {{0.0, 0.1, 0.0, 0.0}, {0.1, 0.0, 0.0, 0.0}};
    j["control"]["channels"][1]["pieces"] = {{0.0, 0.05, 0.0, 0.0}, {0.0, 0.05, 0.0, 0.0}};
    j["control"]["jumps"] = {{0.5, 0.0}};
    CHECK_THROWS_AS(parse_scenario(j.dump()), ParseError);
    j["control"]["jumps"] = {{0.075, 0.0}};
    CHECK_NOTHROW(parse_scenario(j.dump()));
  }
  SUBCASE("tolerance overrides land in the struct") {
    j["tolerances"]["grid_cells"] = 25;
    j["tolerances"]["tol_scale"] = 2.0;
    const Scenario sc = parse_scenario(j.dump());
    CHECK(sc.tol.grid_cells == 25);
    CHECK(sc.tol.tol_scale == 2.0);
    CHECK(serialize_scenario(sc).find("grid_cells") != std::string::npos);
  }
}

TEST_CASE("run command writes a passing deterministic report") {
  Scenario sc = load_scenario(scenario_dir() + "/translations_smoke.json");
  REQUIRE(run_command(sc, "scenario_run_a") == 0);
  REQUIRE(run_command(sc, "scenario_run_b") == 0);
  CHECK(read_file("scenario_run_a/report.json") == read_file("scenario_run_b/report.json"));

  const auto rep = nlohmann::ordered_json::parse(read_file("scenario_run_a/report.json"));
  CHECK(rep.at("pass").get<bool>());
  CHECK(rep.at("command") == "run");
  CHECK(rep.at("queries").size() == sc.lambda_queries.size());
  const std::string csv = read_file("scenario_run_a/trajectory_0.csv");
  CHECK(csv.rfind("t,x1,x2,jump,residual", 0) == 0);
}

TEST_CASE("invert command reports the contraction gate refusal") {
  const Scenario sc = load_scenario(scenario_dir() + "/contraction_gate_fail.json");
  CHECK(invert_command(sc, "scenario_gate_fail") == 1);
  const auto rep = nlohmann::ordered_json::parse(read_file("scenario_gate_fail/report.json"));
  CHECK_FALSE(rep.at("pass").get<bool>());
  const auto& failed = rep.at("failed_gates");
  CHECK(std::find(failed.begin(), failed.end(), "contraction_gate") != failed.end());
  CHECK(rep.at("constants").at("rho").get<double>() == doctest::Approx(0.72).epsilon(1e-12));
}

TEST_CASE("verify command reports all identities on a quiet system") {
  const Scenario sc = load_scenario(scenario_dir() + "/translations_smoke.json");
  REQUIRE(verify_command(sc, "scenario_verify") == 0);
  const auto rep = nlohmann::ordered_json::parse(read_file("scenario_verify/report.json"));
  CHECK(rep.at("pass").get<bool>());
  REQUIRE(rep.at("identities").size() == 4);
  for (const auto& iden : rep.at("identities")) CHECK(iden.at("pass").get<bool>());
}
