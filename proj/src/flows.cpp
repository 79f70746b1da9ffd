#include "flows.hpp"

#include "quasirandom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace gradjump {
namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                           11.0 / 84, 0};
constexpr double kB4[7] = {5179.0 / 57600,    0,           7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct AugmentedRhs {
  const VectorField* g;
  int n;
  bool with_jac;

  VectorXd operator()(const VectorXd& s) const {
    if (!with_jac) return (*g)(s);
    VectorXd out(n + n * n);
    const VectorXd y = s.head(n);
    out.head(n) = (*g)(y);
    const MatrixXd dg = g->jacobian(y);
    Eigen::Map<const MatrixXd> j(s.data() + n, n, n);
    Eigen::Map<MatrixXd>(out.data() + n, n, n) = dg * j;
    return out;
  }
};

}  // namespace

FlowPoint flow(const VectorFieldSystem& f, int i, double t, const VectorXd& x,
               bool want_jacobian, const Tolerances& tol) {
  if (i < 0 || i > f.count) throw ValidationError("field index out of range");
  if (i == 0 && !f.drift) throw ValidationError("system has no drift field");
  const VectorField& g = (i == 0) ? *f.drift : f.fields[i - 1];
  const int n = f.dim;

  FlowPoint result;
  if (t == 0.0 || g.is_identically_zero()) {
    result.value = x;
    if (want_jacobian) result.jacobian = MatrixXd::Identity(n, n);
    return result;
  }
  if (const auto v = g.constant_value()) {
    // straight line, so the farthest point from the center is an endpoint
    result.value = x + t * *v;
    if ((result.value - f.center).norm() > f.escape_radius(tol))
      throw DomainEscapeError("flow left the working ball around the center");
    if (want_jacobian) result.jacobian = MatrixXd::Identity(n, n);
    return result;
  }

  AugmentedRhs rhs{&g, n, want_jacobian};
  VectorXd state;
  if (want_jacobian) {
    state.resize(n + n * n);
    state.head(n) = x;
    Eigen::Map<MatrixXd>(state.data() + n, n, n) = MatrixXd::Identity(n, n);
  } else {
    state = x;
  }

  const double escape = f.escape_radius(tol);
  const double dir = (t > 0) ? 1.0 : -1.0;
  double s = 0.0;
  double h = dir * std::min(0.1 * std::abs(t), 0.1);
  long steps = 0;

  std::array<VectorXd, 7> k;
  while (dir * (t - s) > 0.0) {
    if (dir * (s + h) > dir * t) h = t - s;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(s)))
      throw NumericError("step size underflow in flow integration");

    k[0] = rhs(state);
    for (int st = 1; st < 7; ++st) {
      VectorXd y = state;
      for (int l = 0; l < st; ++l)
        if (kA[st][l] != 0.0) y += h * kA[st][l] * k[l];
      k[st] = rhs(y);
    }
    VectorXd y5 = state, y4 = state;
    for (int st = 0; st < 7; ++st) {
      if (kB5[st] != 0.0) y5 += h * kB5[st] * k[st];
      if (kB4[st] != 0.0) y4 += h * kB4[st] * k[st];
    }

    double err = 0.0;
    for (int c = 0; c < state.size(); ++c) {
      const double scale =
          tol.ode_atol + tol.ode_rtol * std::max(std::abs(state[c]), std::abs(y5[c]));
      const double e = (y5[c] - y4[c]) / scale;
      err += e * e;
    }
    err = std::sqrt(err / state.size());

    if (err <= 1.0) {
      s += h;
      state = y5;
      ++steps;
      if ((state.head(n) - f.center).norm() > escape)
        throw DomainEscapeError("flow left the working ball around the center");
      if (steps > 1000000) throw NumericError("flow integration exceeded step budget");
    }
    const double factor =
        (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
  }

  result.value = state.head(n);
  result.steps = steps;
  if (want_jacobian) result.jacobian = Eigen::Map<const MatrixXd>(state.data() + n, n, n);
  return result;
}

FlowPoint compose_flow(const VectorFieldSystem& f, const VectorXd& p, const VectorXd& x,
                       bool want_jacobian, const Tolerances& tol) {
  if (!f.inside_box(p)) throw ValidationError("flow parameter outside the admissible box");
  FlowPoint acc;
  acc.value = x;
  if (want_jacobian) acc.jacobian = MatrixXd::Identity(f.dim, f.dim);
  for (int j = f.count; j >= 1; --j) {
    FlowPoint step = flow(f, j, p[j - 1], acc.value, want_jacobian, tol);
    acc.value = step.value;
    acc.steps += step.steps;
    if (want_jacobian) acc.jacobian = (*step.jacobian) * (*acc.jacobian);
  }
  return acc;
}

FlowPoint inverse_flow(const VectorFieldSystem& f, const VectorXd& p, const VectorXd& x,
                       bool want_jacobian, const Tolerances& tol) {
  if (!f.inside_box(p)) throw ValidationError("flow parameter outside the admissible box");
  FlowPoint acc;
  acc.value = x;
  if (want_jacobian) acc.jacobian = MatrixXd::Identity(f.dim, f.dim);
  for (int j = 1; j <= f.count; ++j) {
    FlowPoint step = flow(f, j, -p[j - 1], acc.value, want_jacobian, tol);
    acc.value = step.value;
    acc.steps += step.steps;
    if (want_jacobian) acc.jacobian = (*step.jacobian) * (*acc.jacobian);
  }
  return acc;
}

DisplacementReport displacement_check(const VectorFieldSystem& f, double horizon,
                                      int samples_per_field, std::uint64_t seed,
                                      const Tolerances& tol) {
  DisplacementReport rep;
  const int divisor = 2 * (f.count + (f.has_drift() ? 1 : 0));
  rep.threshold = f.radius / divisor;

  const int lo = f.has_drift() ? 0 : 1;
  HaltonSequence seq(f.dim + 1, seed);
  for (int i = lo; i <= f.count; ++i) {
    const double a = (i == 0) ? horizon : f.box[i - 1];
    for (int s = 0; s < samples_per_field + 2; ++s) {
      VectorXd x;
      double t;
      if (s < samples_per_field) {
        VectorXd q = seq.next();
        VectorXd y(f.dim);
        for (;;) {  // ball rejection on the leading dim coordinates
          for (int d = 0; d < f.dim; ++d) y[d] = 2.0 * q[d] - 1.0;
          if (y.norm() <= 1.0) break;
          q = seq.next();
        }
        x = f.center + 3.0 * f.radius * y;
        t = (2.0 * q[f.dim] - 1.0) * a;
      } else {
        // box corners: the sup is often attained at |t| = a
        x = f.center;
        t = (s == samples_per_field) ? a : -a;
      }
      double d;
      try {
        d = (flow(f, i, t, x, false, tol).value - x).norm();
      } catch (const DomainEscapeError&) {
        d = std::numeric_limits<double>::infinity();
      }
      if (d > rep.worst) {
        rep.worst = d;
        rep.worst_field = i;
      }
    }
  }
  rep.margin = rep.threshold - rep.worst;
  rep.pass = rep.worst <= rep.threshold;
  return rep;
}

}  // namespace gradjump
