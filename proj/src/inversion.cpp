#include "inversion.hpp"

#include "numeric.hpp"
#include "quasirandom.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace gradjump {

VectorXd contraction_map(const VectorFieldSystem& f, const AdmissibleControl& u, double t,
                         const VectorXd& x, const VectorXd& lambda, bool drift,
                         bool left_limit, const Tolerances& tol) {
  const VectorXd uval =
      (left_limit && t > 0.0) ? u.eval_left(t, lambda) : u.eval(t, lambda);
  if (!drift) return inverse_flow(f, uval, x, false, tol).value;
  const VectorXd pulled = flow(f, 0, -t, x, false, tol).value;
  return inverse_flow(f, uval, pulled, false, tol).value;
}

ContractionConstants estimate_constants(const VectorFieldSystem& f, const AdmissibleControl& u,
                                        bool drift, std::uint64_t seed, const Tolerances& tol) {
  ContractionConstants cc;
  cc.k1 = u.k1();

  // C1: max_i |d_x z(p;x) g_i(x)| over the parameter box and the x-ball
  HaltonSequence seq(f.count + f.dim, seed);
  const double ball = drift ? 2.0 * f.radius : f.radius;
  for (int s = 0; s < tol.constant_samples; ++s) {
    const VectorXd q = seq.next();
    VectorXd p(f.count);
    for (int i = 0; i < f.count; ++i) p[i] = (2.0 * q[i] - 1.0) * f.box[i];
    VectorXd y(f.dim);
    double r2 = 0.0;
    for (int d = 0; d < f.dim; ++d) {
      y[d] = 2.0 * q[f.count + d] - 1.0;
      r2 += y[d] * y[d];
    }
    if (r2 > 1.0) continue;  // quasi-random rejection keeps the stream aligned
    const VectorXd x = f.center + ball * y;
    const MatrixXd dz = *inverse_flow(f, p, x, true, tol).jacobian;
    for (int i = 0; i < f.count; ++i)
      cc.c1 = std::max(cc.c1, (dz * f.fields[i](x)).norm());
  }

  cc.c2 = coordinate_matrix_bound(f, tol.c2_samples, seed + 1);
  cc.rho = tol.safety_inflation * cc.c1 * cc.c2 * cc.k1;
  cc.gate_ok = cc.rho <= tol.gate_rho_max;
  return cc;
}

VectorXd solve_inverse_at(const VectorFieldSystem& f, const AdmissibleControl& u, double t,
                          const VectorXd& x, bool drift, bool left_limit,
                          const Tolerances& tol, int* iterations,
                          std::vector<double>* increments) {
  VectorXd lam = x;
  int it = 0;
  while (it < tol.contraction_max_iter) {
    const VectorXd next = contraction_map(f, u, t, x, lam, drift, left_limit, tol);
    const double inc = (next - lam).norm();
    if (increments) increments->push_back(inc);
    lam = next;
    ++it;
    if (inc <= tol.contraction_tol) break;
  }
  if (iterations) *iterations = it;
  return lam;
}

MatrixXd psi_space_jacobian(const VectorFieldSystem& f, const AdmissibleControl& u, double t,
                            const VectorXd& x, const VectorXd& psi, bool drift,
                            const Tolerances& tol) {
  const int n = f.dim;
  // d_lambda V by central differences around the fixed point
  MatrixXd dlam(n, n);
  for (int c = 0; c < n; ++c) {
    VectorXd lp = psi, lm = psi;
    lp[c] += tol.fd_lambda_step;
    lm[c] -= tol.fd_lambda_step;
    dlam.col(c) = (contraction_map(f, u, t, x, lp, drift, false, tol) -
                   contraction_map(f, u, t, x, lm, drift, false, tol)) /
                  (2.0 * tol.fd_lambda_step);
  }
  // d_x V from the flow Jacobians at the fixed control value
  const VectorXd uval = u.eval(t, psi);
  MatrixXd dxv;
  if (!drift) {
    dxv = *inverse_flow(f, uval, x, true, tol).jacobian;
  } else {
    const FlowPoint pull = flow(f, 0, -t, x, true, tol);
    dxv = *inverse_flow(f, uval, pull.value, true, tol).jacobian * (*pull.jacobian);
  }
  return (MatrixXd::Identity(n, n) - dlam).partialPivLu().solve(dxv);
}

InversionResult solve_inverse(const VectorFieldSystem& f, const AdmissibleControl& u,
                              const VectorXd& x, bool drift, bool want_jacobian,
                              std::uint64_t seed, const Tolerances& tol,
                              const ContractionConstants* constants) {
  InversionResult res;
  res.constants = constants ? *constants : estimate_constants(f, u, drift, seed, tol);
  if (!res.constants.gate_ok)
    throw GateError("contraction gate failed: rho estimate " +
                    std::to_string(res.constants.rho) + " exceeds 1/2");

  if ((x - f.center).norm() > f.radius + 1e-9)
    throw ValidationError("inversion point outside B(center, radius)");
  if (drift) {
    // the pulled-back point must stay inside the enlarged ball from the
    // drift-factorization argument
    const double gamma1 = f.radius * (1.0 + 1.0 / (2.0 * (f.count + 1)));
    const VectorXd pulled = flow(f, 0, -u.horizon(), x, false, tol).value;
    if ((pulled - f.center).norm() > gamma1 + 1e-9)
      throw ValidationError("drift pullback leaves the enlarged inversion ball");
  }

  const PathGrid grid = PathGrid::make(u, tol.grid_cells);
  for (int seg = 0; seg < grid.segments(); ++seg) {
    std::vector<PsiNode> seg_nodes;
    seg_nodes.reserve(grid.seg_times[seg].size());
    for (size_t j = 0; j < grid.seg_times[seg].size(); ++j) {
      const double t = grid.seg_times[seg][j];
      PsiNode node;
      node.t = t;
      const bool left = t > 0.0;
      node.psi_left = solve_inverse_at(f, u, t, x, drift, left, tol, &node.iterations,
                                       &node.increments);
      if (node.iterations >= tol.contraction_max_iter &&
          node.increments.back() > tol.contraction_tol)
        res.converged = false;
      node.psi = (j == 0 && seg > 0)
                     ? contraction_map(f, u, t, x, node.psi_left, drift, false, tol)
                     : node.psi_left;
      if (want_jacobian && !(j == 0 && seg > 0))
        node.dpsi_dx = psi_space_jacobian(f, u, t, x, node.psi, drift, tol);
      seg_nodes.push_back(std::move(node));
    }
    res.nodes.push_back(std::move(seg_nodes));
  }
  return res;
}

}  // namespace gradjump
