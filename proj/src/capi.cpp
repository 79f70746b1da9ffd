#include "gradjump.h"

#include "scenario.hpp"

#include <string>

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

gj_status status_from_code(int code) {
  switch (code) {
    case 0: return GJ_OK;
    case 1:
      set_error("a gate or identity check failed (details in report.json)");
      return GJ_GATE_FAILURE;
    case 2: return GJ_PARSE_ERROR;
    default: return GJ_NUMERIC_ERROR;
  }
}

template <typename Fn>
gj_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const gradjump::ParseError& e) {
    set_error(e.what());
    return GJ_PARSE_ERROR;
  } catch (const gradjump::ValidationError& e) {
    set_error(e.what());
    return GJ_PARSE_ERROR;
  } catch (const gradjump::GateError& e) {
    set_error(e.what());
    return GJ_GATE_FAILURE;
  } catch (const gradjump::NumericError& e) {
    set_error(e.what());
    return GJ_NUMERIC_ERROR;
  } catch (const std::exception& e) {
    set_error(e.what());
    return GJ_NUMERIC_ERROR;
  }
}

}  // namespace

struct gj_scenario {
  gradjump::Scenario sc;
};

extern "C" {

const char* gj_version(void) { return "1.0.0"; }

const char* gj_last_error(void) { return g_last_error.c_str(); }

gj_status gj_scenario_open(const char* path, gj_scenario** out) {
  if (!path || !out) {
    set_error("null argument");
    return GJ_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&] {
    auto* h = new gj_scenario{gradjump::load_scenario(path)};
    *out = h;
    g_last_error.clear();
    return GJ_OK;
  });
}

gj_status gj_scenario_parse(const char* json_text, gj_scenario** out) {
  if (!json_text || !out) {
    set_error("null argument");
    return GJ_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&] {
    auto* h = new gj_scenario{gradjump::parse_scenario(json_text)};
    *out = h;
    g_last_error.clear();
    return GJ_OK;
  });
}

void gj_scenario_close(gj_scenario* sc) { delete sc; }

gj_status gj_scenario_set_seed(gj_scenario* sc, uint64_t seed) {
  if (!sc) {
    set_error("null handle");
    return GJ_INVALID_ARGUMENT;
  }
  sc->sc.seed = seed;
  return GJ_OK;
}

gj_status gj_scenario_set_threads(gj_scenario* sc, int threads) {
  if (!sc || threads < 1) {
    set_error(sc ? "threads must be >= 1" : "null handle");
    return GJ_INVALID_ARGUMENT;
  }
  sc->sc.threads = threads;
  return GJ_OK;
}

gj_status gj_scenario_set_tol_scale(gj_scenario* sc, double scale) {
  if (!sc || !(scale > 0.0)) {
    set_error(sc ? "tol scale must be positive" : "null handle");
    return GJ_INVALID_ARGUMENT;
  }
  sc->sc.tol.tol_scale = scale;
  return GJ_OK;
}

int gj_scenario_dimension(const gj_scenario* sc) { return sc ? sc->sc.system.dim : -1; }

int gj_scenario_field_count(const gj_scenario* sc) { return sc ? sc->sc.system.count : -1; }

gj_status gj_run(const gj_scenario* sc, const char* out_dir) {
  if (!sc || !out_dir) {
    set_error("null argument");
    return GJ_INVALID_ARGUMENT;
  }
  return guarded([&] { return status_from_code(gradjump::run_command(sc->sc, out_dir)); });
}

gj_status gj_invert(const gj_scenario* sc, const char* out_dir) {
  if (!sc || !out_dir) {
    set_error("null argument");
    return GJ_INVALID_ARGUMENT;
  }
  return guarded([&] { return status_from_code(gradjump::invert_command(sc->sc, out_dir)); });
}

gj_status gj_verify(const gj_scenario* sc, const char* out_dir) {
  if (!sc || !out_dir) {
    set_error("null argument");
    return GJ_INVALID_ARGUMENT;
  }
  return guarded([&] { return status_from_code(gradjump::verify_command(sc->sc, out_dir)); });
}

gj_status gj_evolve_point(const gj_scenario* sc, double t, const double* lambda,
                          double* x_out) {
  if (!sc || !lambda || !x_out) {
    set_error("null argument");
    return GJ_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto& s = sc->sc;
    if (t < 0.0 || t > s.horizon) {
      set_error("t outside [0, horizon]");
      return GJ_PARSE_ERROR;
    }
    const Eigen::Map<const gradjump::VectorXd> lam(lambda, s.system.dim);
    const gradjump::VectorXd x =
        gradjump::evolve_point(s.system, s.u(), t, lam, s.drift, false, s.tol);
    Eigen::Map<gradjump::VectorXd>(x_out, s.system.dim) = x;
    g_last_error.clear();
    return GJ_OK;
  });
}

gj_status gj_invert_point(const gj_scenario* sc, double t, const double* x,
                          double* lambda_out) {
  if (!sc || !x || !lambda_out) {
    set_error("null argument");
    return GJ_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto& s = sc->sc;
    if (t < 0.0 || t > s.horizon) {
      set_error("t outside [0, horizon]");
      return GJ_PARSE_ERROR;
    }
    const gradjump::ContractionConstants cc =
        gradjump::estimate_constants(s.system, s.u(), s.drift, s.seed, s.tol);
    if (!cc.gate_ok) {
      set_error("contraction gate refused: rho = " + gradjump::format_double(cc.rho));
      return GJ_GATE_FAILURE;
    }
    const Eigen::Map<const gradjump::VectorXd> xv(x, s.system.dim);
    const gradjump::VectorXd lam =
        gradjump::solve_inverse_at(s.system, s.u(), t, xv, s.drift, t > 0.0, s.tol);
    Eigen::Map<gradjump::VectorXd>(lambda_out, s.system.dim) = lam;
    g_last_error.clear();
    return GJ_OK;
  });
}

}  // extern "C"
