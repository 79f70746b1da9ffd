#include "scenario.hpp"

#include "quasirandom.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace gradjump {

using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError("config error at " + where + ": " + what);
}

double need_number(const ordered_json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) fail(where, "missing numeric field '" + key + "'");
  return j[key].get<double>();
}

VectorXd as_vector(const ordered_json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(where, "expected an array of numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

ordered_json vector_to_json(const VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::vector<PolyComponent> poly_field_from_json(const ordered_json& j, int dim,
                                                const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    fail(where, "a polynomial field needs one component list per coordinate");
  std::vector<PolyComponent> comps(dim);
  for (int c = 0; c < dim; ++c) {
    for (const auto& term : j[c]) {
      PolyTerm t;
      t.coeff = need_number(term, "c", where);
      if (!term.contains("e")) fail(where, "polynomial term needs exponents 'e'");
      const VectorXd e = as_vector(term["e"], where);
      if (e.size() != dim) fail(where, "exponent tuple length must equal the dimension");
      t.exponents.resize(dim);
      for (int d = 0; d < dim; ++d) {
        if (e[d] < 0 || e[d] != std::floor(e[d])) fail(where, "exponents must be nonnegative integers");
        t.exponents[d] = static_cast<int>(e[d]);
      }
      comps[c].push_back(std::move(t));
    }
  }
  return comps;
}

VectorFieldSystem system_from_json(const ordered_json& j) {
  VectorFieldSystem f;
  if (j.contains("builtin")) {
    f = make_builtin(j["builtin"].get<std::string>());
    const ordered_json params = j.value("params", ordered_json::object());
    const std::string name = j["builtin"].get<std::string>();
    if (name == "scaled_rotations" && (params.contains("sigma") || params.contains("omega")))
      f = builtin_scaled_rotations(params.value("sigma", 0.3), params.value("omega", 0.3));
    if (name == "commuting_drift" && params.contains("drift"))
      f = builtin_commuting_drift(as_vector(params["drift"], "system.params.drift"));
    if (name == "shear_drift" && params.contains("kappa"))
      f = builtin_shear_drift(params["kappa"].get<double>());
  } else if (j.contains("fields")) {
    if (!j.contains("dimension")) fail("system", "custom systems need 'dimension'");
    f.dim = j["dimension"].get<int>();
    if (!j["fields"].is_array() || j["fields"].empty())
      fail("system.fields", "need at least one field");
    f.count = static_cast<int>(j["fields"].size());
    for (int i = 0; i < f.count; ++i)
      f.fields.push_back(VectorField::polynomial(
          f.dim, poly_field_from_json(j["fields"][i], f.dim, "system.fields")));
    if (j.contains("drift_field"))
      f.drift = VectorField::polynomial(
          f.dim, poly_field_from_json(j["drift_field"], f.dim, "system.drift_field"));
    f.structure.assign(static_cast<size_t>(f.count) * f.count * f.count, 0.0);
    f.name = "custom";
  } else {
    fail("system", "need either 'builtin' or 'fields'");
  }

  if (j.contains("center")) f.center = as_vector(j["center"], "system.center");
  if (j.contains("radius")) f.radius = j["radius"].get<double>();
  if (j.contains("box")) f.box = as_vector(j["box"], "system.box");

  const bool custom = !j.contains("builtin");
  if (custom) {
    if (j.contains("structure_constants")) {
      for (const auto& e : j["structure_constants"]) {
        const int k = e.value("k", 0), i = e.value("i", 0), jj = e.value("j", 0);
        if (k < 1 || k > f.count || i < 1 || i > f.count || jj < 1 || jj > f.count)
          fail("system.structure_constants", "indices are 1-based field indices");
        f.gamma(k - 1, i - 1, jj - 1) = need_number(e, "value", "system.structure_constants");
      }
    } else {
      const StructureFit fit = fit_structure_constants(f, sample_ball(f, 32, 3.0, 7));
      if (fit.residual > Tolerances{}.fit_threshold)
        fail("system", "structure constants not given and the bracket fit residual " +
                           format_double(fit.residual) + " exceeds the threshold");
      f.structure = fit.structure;
      if (f.has_drift()) f.drift_constants = fit.drift_constants;
    }
    if (j.contains("drift_constants")) {
      MatrixXd dc = MatrixXd::Zero(f.count, f.count);
      for (const auto& e : j["drift_constants"]) {
        const int k = e.value("k", 0), i = e.value("i", 0);
        if (k < 1 || k > f.count || i < 1 || i > f.count)
          fail("system.drift_constants", "indices are 1-based field indices");
        dc(k - 1, i - 1) = need_number(e, "value", "system.drift_constants");
      }
      f.drift_constants = dc;
    }
  }
  f.check_consistent();
  return f;
}

AdmissibleControl control_from_json(const ordered_json& j, double horizon, int field_count,
                                    const VectorFieldSystem& f) {
  if (!j.contains("breakpoints")) fail("control", "missing 'breakpoints'");
  const VectorXd bp = as_vector(j["breakpoints"], "control.breakpoints");
  std::vector<double> breakpoints(bp.data(), bp.data() + bp.size());
  const double k1 = need_number(j, "k1", "control");

  if (!j.contains("channels") || !j["channels"].is_array())
    fail("control", "missing 'channels'");
  if (static_cast<int>(j["channels"].size()) != field_count)
    fail("control.channels", "need exactly one channel per field");

  std::vector<AdmissibleControl::Channel> channels;
  for (const auto& cj : j["channels"]) {
    AdmissibleControl::Channel ch;
    const ordered_json shape = cj.value("shape", ordered_json{{"kind", "constant"}});
    const std::string kind = shape.value("kind", "constant");
    if (kind == "constant") {
      ch.shape = Shape::constant();
    } else if (kind == "radial") {
      VectorXd c = shape.contains("center") ? as_vector(shape["center"], "control.shape.center")
                                            : f.center;
      ch.shape = Shape::radial(std::move(c), shape.value("width", 4.0));
    } else {
      fail("control.channels.shape", "unknown kind '" + kind + "'");
    }
    if (!cj.contains("pieces")) fail("control.channels", "missing 'pieces'");
    for (const auto& pj : cj["pieces"]) {
      const VectorXd c = as_vector(pj, "control.channels.pieces");
      if (c.size() != 4) fail("control.channels.pieces", "each piece is 4 cubic coefficients");
      Cubic q;
      for (int d = 0; d < 4; ++d) q.c[d] = c[d];
      ch.pieces.push_back(q);
    }
    channels.push_back(std::move(ch));
  }

  AdmissibleControl u(horizon, std::move(breakpoints), std::move(channels), k1);

  if (j.contains("jumps")) {
    // optional declaration checked against the coefficient-implied jumps
    const auto& decl = j["jumps"];
    const int interior = static_cast<int>(u.breakpoints().size()) - 2;
    if (static_cast<int>(decl.size()) != interior)
      fail("control.jumps", "need one entry per interior breakpoint");
    for (int k = 0; k < interior; ++k) {
      const VectorXd want = as_vector(decl[k], "control.jumps");
      const VectorXd have = u.coefficient_jump(k + 1);
      if ((want - have).cwiseAbs().maxCoeff() > 1e-12)
        fail("control.jumps", "declared jump disagrees with the piece coefficients");
    }
  }
  return u;
}

void tolerances_from_json(const ordered_json& j, Tolerances& tol) {
  auto num = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = j[key].get<double>();
  };
  auto integer = [&](const char* key, int& slot) {
    if (j.contains(key)) slot = j[key].get<int>();
  };
  num("ode_rtol", tol.ode_rtol);
  num("ode_atol", tol.ode_atol);
  num("escape_margin", tol.escape_margin);
  num("jac_fd_rel", tol.jac_fd_rel);
  integer("grid_cells", tol.grid_cells);
  integer("quad_nodes", tol.quad_nodes);
  num("involution_threshold", tol.involution_threshold);
  num("fit_threshold", tol.fit_threshold);
  num("hj_z_threshold", tol.hj_z_threshold);
  num("hj_psi_threshold", tol.hj_psi_threshold);
  num("hj_v_rate_bound", tol.hj_v_rate_bound);
  num("p_step_rel", tol.p_step_rel);
  num("fd_time_step", tol.fd_time_step);
  num("fd_space_step", tol.fd_space_step);
  num("fd_lambda_step", tol.fd_lambda_step);
  num("safety_inflation", tol.safety_inflation);
  num("contraction_tol", tol.contraction_tol);
  integer("contraction_max_iter", tol.contraction_max_iter);
  integer("constant_samples", tol.constant_samples);
  integer("c2_samples", tol.c2_samples);
  num("gate_rho_max", tol.gate_rho_max);
  num("roundoff_floor", tol.roundoff_floor);
  integer("z_samples", tol.z_samples);
  integer("gradient_samples", tol.gradient_samples);
  num("tol_scale", tol.tol_scale);
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    // recover the line number from the byte offset for a useful message
    size_t line = 1;
    for (size_t i = 0; i < e.byte && i < json_text.size(); ++i)
      if (json_text[i] == '\n') ++line;
    throw ParseError("invalid JSON at line " + std::to_string(line) + ": " + e.what());
  }

  try {
    Scenario sc;
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
      fail("schema_version", "this build reads schema_version 1");
    sc.schema_version = 1;
    sc.name = j.value("name", std::string("scenario"));
    sc.seed = j.value("seed", static_cast<std::uint64_t>(42));
    sc.horizon = need_number(j, "horizon", "horizon");
    if (sc.horizon <= 0.0) fail("horizon", "must be positive");
    if (!j.contains("system")) fail("system", "missing");
    sc.system = system_from_json(j["system"]);
    sc.system_json = j["system"];
    sc.drift = sc.system.has_drift();
    if (!j.contains("control")) fail("control", "missing");
    sc.control = control_from_json(j["control"], sc.horizon, sc.system.count, sc.system);

    const ordered_json q = j.value("queries", ordered_json::object());
    for (const auto& lam : q.value("lambda", ordered_json::array())) {
      VectorXd v = as_vector(lam, "queries.lambda");
      if (v.size() != sc.system.dim) fail("queries.lambda", "wrong dimension");
      sc.lambda_queries.push_back(std::move(v));
    }
    for (const auto& x : q.value("x", ordered_json::array())) {
      VectorXd v = as_vector(x, "queries.x");
      if (v.size() != sc.system.dim) fail("queries.x", "wrong dimension");
      sc.x_queries.push_back(std::move(v));
    }
    if (j.contains("tolerances")) tolerances_from_json(j["tolerances"], sc.tol);
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config error: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& sc) {
  ordered_json j;
  j["schema_version"] = sc.schema_version;
  j["name"] = sc.name;
  j["seed"] = sc.seed;
  j["horizon"] = sc.horizon;
  j["system"] = sc.system_json;

  ordered_json cj;
  cj["breakpoints"] = vector_to_json(
      Eigen::Map<const VectorXd>(sc.u().breakpoints().data(),
                                 static_cast<int>(sc.u().breakpoints().size())));
  cj["k1"] = sc.u().k1();
  cj["channels"] = ordered_json::array();
  for (int i = 0; i < sc.u().channels(); ++i) {
    const auto& ch = sc.u().channel(i);
    ordered_json c;
    if (ch.shape.kind() == Shape::Kind::Constant) {
      c["shape"] = {{"kind", "constant"}};
    } else {
      c["shape"] = {{"kind", "radial"},
                    {"center", vector_to_json(ch.shape.center())},
                    {"width", ch.shape.width()}};
    }
    c["pieces"] = ordered_json::array();
    for (const auto& piece : ch.pieces) {
      ordered_json p = ordered_json::array();
      for (double coef : piece.c) p.push_back(coef);
      c["pieces"].push_back(p);
    }
    cj["channels"].push_back(c);
  }
  j["control"] = cj;

  ordered_json q;
  q["lambda"] = ordered_json::array();
  for (const auto& lam : sc.lambda_queries) q["lambda"].push_back(vector_to_json(lam));
  q["x"] = ordered_json::array();
  for (const auto& x : sc.x_queries) q["x"].push_back(vector_to_json(x));
  j["queries"] = q;

  // only tolerance fields that differ from the defaults
  const Tolerances d;
  ordered_json tj = ordered_json::object();
  auto diff_num = [&](const char* key, double have, double def) {
    if (have != def) tj[key] = have;
  };
  auto diff_int = [&](const char* key, int have, int def) {
    if (have != def) tj[key] = have;
  };
  diff_num("ode_rtol", sc.tol.ode_rtol, d.ode_rtol);
  diff_num("ode_atol", sc.tol.ode_atol, d.ode_atol);
  diff_num("escape_margin", sc.tol.escape_margin, d.escape_margin);
  diff_num("jac_fd_rel", sc.tol.jac_fd_rel, d.jac_fd_rel);
  diff_int("grid_cells", sc.tol.grid_cells, d.grid_cells);
  diff_int("quad_nodes", sc.tol.quad_nodes, d.quad_nodes);
  diff_num("involution_threshold", sc.tol.involution_threshold, d.involution_threshold);
  diff_num("fit_threshold", sc.tol.fit_threshold, d.fit_threshold);
  diff_num("hj_z_threshold", sc.tol.hj_z_threshold, d.hj_z_threshold);
  diff_num("hj_psi_threshold", sc.tol.hj_psi_threshold, d.hj_psi_threshold);
  diff_num("hj_v_rate_bound", sc.tol.hj_v_rate_bound, d.hj_v_rate_bound);
  diff_num("p_step_rel", sc.tol.p_step_rel, d.p_step_rel);
  diff_num("fd_time_step", sc.tol.fd_time_step, d.fd_time_step);
  diff_num("fd_space_step", sc.tol.fd_space_step, d.fd_space_step);
  diff_num("fd_lambda_step", sc.tol.fd_lambda_step, d.fd_lambda_step);
  diff_num("safety_inflation", sc.tol.safety_inflation, d.safety_inflation);
  diff_num("contraction_tol", sc.tol.contraction_tol, d.contraction_tol);
  diff_int("contraction_max_iter", sc.tol.contraction_max_iter, d.contraction_max_iter);
  diff_int("constant_samples", sc.tol.constant_samples, d.constant_samples);
  diff_int("c2_samples", sc.tol.c2_samples, d.c2_samples);
  diff_num("gate_rho_max", sc.tol.gate_rho_max, d.gate_rho_max);
  diff_num("roundoff_floor", sc.tol.roundoff_floor, d.roundoff_floor);
  diff_int("z_samples", sc.tol.z_samples, d.z_samples);
  diff_int("gradient_samples", sc.tol.gradient_samples, d.gradient_samples);
  diff_num("tol_scale", sc.tol.tol_scale, d.tol_scale);
  if (!tj.empty()) j["tolerances"] = tj;

  return j.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericError("cannot write output file: " + path.string());
  out << content;
}

void parallel_over(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < count; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct GateResults {
  ControlValidation control;
  DisplacementReport displacement;
  double involution = 0.0;
  bool involution_pass = false;
  std::vector<std::string> failed;
  bool pass = true;
};

GateResults run_gates(const Scenario& sc) {
  GateResults g;
  g.control = sc.u().validate(sc.system, 64, sc.seed);
  if (!g.control.pass) {
    g.failed.push_back("control_validation:" + g.control.violated_clause);
    g.pass = false;
  }
  g.displacement = displacement_check(sc.system, sc.horizon, 200, sc.seed, sc.tol);
  if (!g.displacement.pass) {
    g.failed.push_back("displacement_check");
    g.pass = false;
  }
  g.involution = involution_residual(sc.system, sample_ball(sc.system, 100, 3.0, sc.seed));
  g.involution_pass = g.involution <= sc.tol.scaled(sc.tol.involution_threshold);
  if (!g.involution_pass) {
    g.failed.push_back("involution_residual");
    g.pass = false;
  }
  return g;
}

ordered_json gates_to_json(const GateResults& g) {
  ordered_json j;
  j["control_validation"] = {
      {"pass", g.control.pass},
      {"violated_clause", g.control.violated_clause},
      {"range_margin", g.control.range_margin},
      {"lipschitz_margin", g.control.lipschitz_margin},
      {"total_variation", g.control.total_variation}};
  j["displacement"] = {{"pass", g.displacement.pass},
                       {"threshold", g.displacement.threshold},
                       {"worst", g.displacement.worst},
                       {"worst_field", g.displacement.worst_field},
                       {"margin", g.displacement.margin}};
  j["involution"] = {{"pass", g.involution_pass}, {"residual", g.involution}};
  return j;
}

ordered_json report_header(const Scenario& sc, const std::string& command) {
  ordered_json j;
  j["schema_version"] = 1;
  j["command"] = command;
  j["name"] = sc.name;
  j["system"] = sc.system.name;
  j["seed"] = sc.seed;
  j["drift"] = sc.drift;
  return j;
}

int write_failure_report(const std::string& out_dir, ordered_json j, int code,
                         const std::string& error = "") {
  j["pass"] = false;
  if (!error.empty()) j["error"] = error;
  write_file(std::filesystem::path(out_dir) / "report.json", j.dump(2) + "\n");
  return code;
}

std::string trajectory_csv(const VectorFieldSystem& f, const JumpTrajectory& traj,
                           const std::vector<std::vector<double>>& devs) {
  std::string s = "t";
  for (int d = 1; d <= f.dim; ++d) s += ",x" + std::to_string(d);
  s += ",jump,residual\n";
  for (int seg = 0; seg < traj.path.grid.segments(); ++seg) {
    const auto& times = traj.path.grid.seg_times[seg];
    for (size_t j = 0; j < times.size(); ++j) {
      s += format_double(times[j]);
      for (int d = 0; d < f.dim; ++d) s += "," + format_double(traj.values[seg][j][d]);
      const bool jumped = (j == 0 && seg > 0);
      s += jumped ? ",1," : ",0,";
      s += format_double(devs[seg][j]);
      s += "\n";
    }
  }
  return s;
}

std::string alpha_beta_csv(const VectorFieldSystem& f, const StieltjesPath& path) {
  const int m = f.count;
  std::string s = "t";
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) s += ",a" + std::to_string(i) + std::to_string(j);
  for (int i = 1; i <= m; ++i) s += ",b" + std::to_string(i);
  s += ",jump\n";
  for (int seg = 0; seg < path.grid.segments(); ++seg) {
    const auto& times = path.grid.seg_times[seg];
    for (size_t node = 0; node < times.size(); ++node) {
      s += format_double(times[node]);
      const MatrixXd& a = path.alpha[seg][node];
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) s += "," + format_double(a(i, j));
      const VectorXd& b = path.beta[seg][node];
      for (int i = 0; i < m; ++i) s += "," + format_double(b[i]);
      s += (node == 0 && seg > 0) ? ",1\n" : ",0\n";
    }
  }
  return s;
}

std::string psi_csv(const VectorFieldSystem& f, const InversionResult& inv) {
  std::string s = "t";
  for (int d = 1; d <= f.dim; ++d) s += ",psi" + std::to_string(d);
  s += ",iterations,increment_first,increment_last\n";
  for (const auto& seg : inv.nodes) {
    for (const auto& node : seg) {
      s += format_double(node.t);
      for (int d = 0; d < f.dim; ++d) s += "," + format_double(node.psi[d]);
      s += "," + std::to_string(node.iterations);
      s += "," + format_double(node.increments.empty() ? 0.0 : node.increments.front());
      s += "," + format_double(node.increments.empty() ? 0.0 : node.increments.back());
      s += "\n";
    }
  }
  return s;
}

}  // namespace

int run_command(const Scenario& sc, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ordered_json report = report_header(sc, "run");
  const GateResults gates = run_gates(sc);
  report["gates"] = gates_to_json(gates);
  report["failed_gates"] = gates.failed;
  if (!gates.pass) return write_failure_report(out_dir, report, 1);

  const int nq = static_cast<int>(sc.lambda_queries.size());
  std::vector<JumpTrajectory> trajs(nq);
  std::vector<std::vector<std::vector<double>>> devs(nq);
  std::vector<double> residuals(nq, 0.0);
  try {
    parallel_over(nq, sc.threads, [&](int i) {
      trajs[i] = evolve(sc.system, sc.u(), sc.lambda_queries[i], sc.drift, sc.tol);
      residuals[i] = ode_residual(sc.system, trajs[i], &devs[i]);
    });
  } catch (const NumericError& e) {
    return write_failure_report(out_dir, report, 3, e.what());
  }

  report["queries"] = ordered_json::array();
  for (int i = 0; i < nq; ++i) {
    write_file(std::filesystem::path(out_dir) / ("trajectory_" + std::to_string(i) + ".csv"),
               trajectory_csv(sc.system, trajs[i], devs[i]));
    write_file(std::filesystem::path(out_dir) / ("alpha_beta_" + std::to_string(i) + ".csv"),
               alpha_beta_csv(sc.system, trajs[i].path));
    ordered_json q;
    q["lambda"] = vector_to_json(sc.lambda_queries[i]);
    q["end"] = vector_to_json(trajs[i].end());
    q["ode_residual"] = residuals[i];
    q["jumps"] = static_cast<int>(trajs[i].path.jumps.size());
    report["queries"].push_back(q);
  }
  report["pass"] = true;
  write_file(std::filesystem::path(out_dir) / "report.json", report.dump(2) + "\n");
  return 0;
}

int invert_command(const Scenario& sc, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ordered_json report = report_header(sc, "invert");
  const GateResults gates = run_gates(sc);
  report["gates"] = gates_to_json(gates);
  if (!gates.pass) {
    report["failed_gates"] = gates.failed;
    return write_failure_report(out_dir, report, 1);
  }

  const ContractionConstants cc =
      estimate_constants(sc.system, sc.u(), sc.drift, sc.seed, sc.tol);
  report["constants"] = {{"c1", cc.c1}, {"c2", cc.c2}, {"k1", cc.k1},
                         {"rho", cc.rho}, {"gate_ok", cc.gate_ok}};
  if (!cc.gate_ok) {
    auto failed = gates.failed;
    failed.push_back("contraction_gate");
    report["failed_gates"] = failed;
    return write_failure_report(out_dir, report, 1);
  }
  report["failed_gates"] = gates.failed;

  const int nq = static_cast<int>(sc.x_queries.size());
  std::vector<InversionResult> invs(nq);
  std::vector<double> roundtrip(nq, 0.0);
  try {
    parallel_over(nq, sc.threads, [&](int i) {
      invs[i] = solve_inverse(sc.system, sc.u(), sc.x_queries[i], sc.drift, false, sc.seed,
                              sc.tol, &cc);
      // round trip at left limits on a thinned subset of nodes
      double worst = 0.0;
      for (const auto& seg : invs[i].nodes) {
        for (size_t j = 0; j < seg.size(); j += 25) {
          const auto& node = seg[j];
          const VectorXd back = evolve_point(sc.system, sc.u(), node.t, node.psi_left,
                                             sc.drift, node.t > 0.0, sc.tol);
          worst = std::max(worst, (back - sc.x_queries[i]).norm());
        }
      }
      roundtrip[i] = worst;
    });
  } catch (const GateError& e) {
    return write_failure_report(out_dir, report, 1, e.what());
  } catch (const NumericError& e) {
    return write_failure_report(out_dir, report, 3, e.what());
  }

  bool all_ok = true;
  report["queries"] = ordered_json::array();
  for (int i = 0; i < nq; ++i) {
    write_file(std::filesystem::path(out_dir) / ("psi_" + std::to_string(i) + ".csv"),
               psi_csv(sc.system, invs[i]));
    const bool ok = invs[i].converged && roundtrip[i] <= sc.tol.scaled(1e-9);
    all_ok = all_ok && ok;
    ordered_json q;
    q["x"] = vector_to_json(sc.x_queries[i]);
    q["converged"] = invs[i].converged;
    q["roundtrip_max"] = roundtrip[i];
    q["psi_end"] = vector_to_json(invs[i].nodes.back().back().psi);
    q["pass"] = ok;
    report["queries"].push_back(q);
  }
  report["pass"] = all_ok;
  write_file(std::filesystem::path(out_dir) / "report.json", report.dump(2) + "\n");
  return all_ok ? 0 : 1;
}

int verify_command(const Scenario& sc, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ordered_json report = report_header(sc, "verify");
  const GateResults gates = run_gates(sc);
  report["gates"] = gates_to_json(gates);
  report["failed_gates"] = gates.failed;
  if (!gates.pass) return write_failure_report(out_dir, report, 1);

  try {
    const ContractionConstants cc =
        estimate_constants(sc.system, sc.u(), sc.drift, sc.seed, sc.tol);
    report["constants"] = {{"c1", cc.c1}, {"c2", cc.c2}, {"k1", cc.k1},
                           {"rho", cc.rho}, {"gate_ok", cc.gate_ok}};

    // Euler reconstruction under three grid refinements
    ordered_json ode;
    {
      std::vector<VectorXd> lambdas = sc.lambda_queries;
      if (lambdas.empty()) lambdas = {sc.system.center};
      std::vector<int> grids = {sc.tol.grid_cells, 2 * sc.tol.grid_cells,
                                4 * sc.tol.grid_cells};
      std::vector<double> residuals;
      for (int cells : grids) {
        Tolerances t = sc.tol;
        t.grid_cells = cells;
        double worst = 0.0;
        for (const auto& lam : lambdas)
          worst = std::max(worst,
                           ode_residual(sc.system, evolve(sc.system, sc.u(), lam, sc.drift, t)));
        residuals.push_back(worst);
      }
      ode["grids"] = grids;
      ode["residuals"] = residuals;
      bool pass = true;
      ordered_json ratios = ordered_json::array();
      for (size_t i = 0; i + 1 < residuals.size(); ++i) {
        if (residuals[i] <= sc.tol.roundoff_floor || residuals[i + 1] <= 0.0) {
          ratios.push_back(nullptr);
          continue;
        }
        const double r = residuals[i + 1] / residuals[i];
        ratios.push_back(r);
        pass = pass && r >= 0.4 && r <= 0.6;
      }
      ode["ratios"] = ratios;
      ode["pass"] = pass;
      report["ode_residual"] = ode;
    }

    // identity residuals
    std::vector<VectorXd> xs = sc.x_queries;
    if (xs.empty()) {
      HaltonSequence seq(sc.system.dim, sc.seed + 3);
      for (int i = 0; i < 3; ++i)
        xs.push_back(seq.next_in_ball(sc.system.center, 0.9 * sc.system.radius));
    }
    const VectorXd lambda0 =
        sc.lambda_queries.empty() ? sc.system.center : sc.lambda_queries.front();

    std::vector<ResidualReport> reps;
    reps.push_back(hj_residual_z(sc.system, sc.tol.z_samples, sc.seed + 1, sc.tol));
    reps.push_back(hj_jump_residual_V(sc.system, sc.u(), lambda0, xs, sc.drift, sc.tol));
    if (cc.gate_ok) {
      std::vector<double> times;
      const auto& bp = sc.u().breakpoints();
      for (size_t k = 0; k + 1 < bp.size(); ++k)
        for (double frac : {0.25, 0.5, 0.75})
          times.push_back(bp[k] + frac * (bp[k + 1] - bp[k]));
      reps.push_back(hj_residual_psi(sc.system, sc.u(), times, xs, sc.drift, cc, sc.tol));
      reps.push_back(gradient_bound_check(sc.system, sc.u(), sc.drift, cc,
                                          sc.tol.gradient_samples, sc.seed + 2, sc.tol));
    }

    bool all_pass = report["ode_residual"]["pass"].get<bool>();
    report["identities"] = ordered_json::array();
    for (const auto& r : reps) {
      ordered_json ij;
      ij["identity"] = r.identity;
      ij["samples"] = r.samples;
      ij["max_residual"] = r.max_residual;
      ij["threshold"] = r.threshold;
      ij["rate_checked"] = r.rate_checked;
      if (r.rate_checked) ij["rate_estimate"] = r.rate_estimate;
      ij["pass"] = r.pass;
      report["identities"].push_back(ij);
      all_pass = all_pass && r.pass;
    }
    if (!cc.gate_ok) {
      report["identities_skipped"] = "contraction gate failed; psi checks not run";
      all_pass = false;
    }
    report["pass"] = all_pass;
    write_file(std::filesystem::path(out_dir) / "report.json", report.dump(2) + "\n");
    return all_pass ? 0 : 1;
  } catch (const GateError& e) {
    return write_failure_report(out_dir, report, 1, e.what());
  } catch (const NumericError& e) {
    return write_failure_report(out_dir, report, 3, e.what());
  }
}

}  // namespace gradjump
