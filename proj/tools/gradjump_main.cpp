// Command line front end. Everything substantive lives behind the C API so
// the CLI stays a thin argument parser.
#include <gradjump.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

struct CommonArgs {
  std::string config;
  std::string out = "out";
  int threads = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol_scale = 0.0;
  bool tol_scale_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("-c,--config", a.config, "scenario config (JSON)")->required();
  cmd->add_option("-o,--out", a.out, "output directory (default: out)");
  cmd->add_option("-j,--threads", a.threads, "worker threads for query batches")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "override the config seed")
      ->each([&a](const std::string&) { a.seed_set = true; });
  cmd->add_option("--tol-scale", a.tol_scale,
                  "multiply verdict thresholds (not integrator tolerances)")
      ->each([&a](const std::string&) { a.tol_scale_set = true; });
}

int dispatch(const CommonArgs& a, gj_status (*fn)(const gj_scenario*, const char*)) {
  gj_scenario* sc = nullptr;
  gj_status st = gj_scenario_open(a.config.c_str(), &sc);
  if (st != GJ_OK) {
    std::fprintf(stderr, "error: %s\n", gj_last_error());
    return st;
  }
  gj_scenario_set_threads(sc, a.threads);
  if (a.seed_set) gj_scenario_set_seed(sc, a.seed);
  if (a.tol_scale_set) {
    st = gj_scenario_set_tol_scale(sc, a.tol_scale);
    if (st != GJ_OK) {
      std::fprintf(stderr, "error: %s\n", gj_last_error());
      gj_scenario_close(sc);
      return GJ_PARSE_ERROR;
    }
  }
  st = fn(sc, a.out.c_str());
  if (st != GJ_OK) std::fprintf(stderr, "error: %s\n", gj_last_error());
  std::printf("%s: %s (report in %s/report.json)\n", a.config.c_str(),
              st == GJ_OK ? "ok" : "failed", a.out.c_str());
  gj_scenario_close(sc);
  return st;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradjump: composed gradient flows with jump controls"};
  app.set_version_flag("--version", gj_version());
  app.require_subcommand(1);

  CommonArgs run_args, invert_args, verify_args;
  CLI::App* run = app.add_subcommand(
      "run", "simulate the flow for each lambda query and write trajectories");
  add_common(run, run_args);
  CLI::App* invert = app.add_subcommand(
      "invert", "recover the starting point for each x query over the time grid");
  add_common(invert, invert_args);
  CLI::App* verify = app.add_subcommand(
      "verify", "check the flow and inverse against their defining identities");
  add_common(verify, verify_args);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return dispatch(run_args, gj_run);
  if (invert->parsed()) return dispatch(invert_args, gj_invert);
  return dispatch(verify_args, gj_verify);
}
