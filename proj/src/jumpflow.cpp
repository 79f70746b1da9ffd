#include "jumpflow.hpp"

namespace gradjump {

VectorXd evolve_point(const VectorFieldSystem& f, const AdmissibleControl& u, double t,
                      const VectorXd& lambda, bool drift, bool left_limit,
                      const Tolerances& tol) {
  const VectorXd uval =
      (left_limit && t > 0.0) ? u.eval_left(t, lambda) : u.eval(t, lambda);
  if (!drift) return compose_flow(f, uval, lambda, false, tol).value;
  if (f.drift_constants) {
    // stated order G_0(t) o G(p)
    const VectorXd inner = compose_flow(f, uval, lambda, false, tol).value;
    return flow(f, 0, t, inner, false, tol).value;
  }
  // commuting drift: G(p) o G_0(t)
  const VectorXd moved = flow(f, 0, t, lambda, false, tol).value;
  return compose_flow(f, uval, moved, false, tol).value;
}

JumpTrajectory evolve(const VectorFieldSystem& f, const AdmissibleControl& u,
                      const VectorXd& lambda, bool drift, const Tolerances& tol) {
  JumpTrajectory traj;
  traj.path = integrate_alpha(f, u, lambda, drift, tol);
  traj.lambda = lambda;
  traj.drift = drift;
  for (int seg = 0; seg < traj.path.grid.segments(); ++seg) {
    const auto& times = traj.path.grid.seg_times[seg];
    std::vector<VectorXd> vals;
    vals.reserve(times.size());
    for (size_t j = 0; j < times.size(); ++j) {
      const bool left = (j + 1 == times.size());  // segment end carries the left limit
      vals.push_back(evolve_point(f, u, times[j], lambda, drift, left, tol));
    }
    traj.values.push_back(std::move(vals));
  }
  return traj;
}

double ode_residual(const VectorFieldSystem& f, const JumpTrajectory& traj,
                    std::vector<std::vector<double>>* per_node) {
  double worst = 0.0;
  if (per_node) per_node->clear();
  for (int seg = 0; seg < traj.path.grid.segments(); ++seg) {
    const auto& times = traj.path.grid.seg_times[seg];
    const auto& beta = traj.path.beta[seg];
    // reset with the exact jump map at the segment start
    VectorXd xr = traj.values[seg].front();
    std::vector<double> devs;
    devs.push_back(0.0);
    for (size_t j = 0; j + 1 < times.size(); ++j) {
      VectorXd step = f.frame(xr) * (beta[j + 1] - beta[j]);
      if (traj.drift && f.drift) step += (*f.drift)(xr) * (times[j + 1] - times[j]);
      xr += step;
      const double dev = (xr - traj.values[seg][j + 1]).norm();
      devs.push_back(dev);
      worst = std::max(worst, dev);
    }
    if (per_node) per_node->push_back(std::move(devs));
  }
  return worst;
}

}  // namespace gradjump
