#pragma once

#include "stieltjes.hpp"

namespace gradjump {

// x(t) = G(u(t,lambda))[lambda] on the path grid; with a drift the stated
// order y = G_0(t) o G(u(t,lambda)) is used when drift constants are present,
// and the commuted order G(u) o G_0(t) when the drift commutes with the frame.
struct JumpTrajectory {
  StieltjesPath path;
  std::vector<std::vector<VectorXd>> values;  // [segment][node]
  VectorXd lambda;
  bool drift = false;

  const VectorXd& start() const { return values.front().front(); }
  const VectorXd& end() const { return values.back().back(); }
};

JumpTrajectory evolve(const VectorFieldSystem& f, const AdmissibleControl& u,
                      const VectorXd& lambda, bool drift, const Tolerances& tol = {});

// Explicit-Euler reconstruction of dx = g_0 dt + sum_i g_i(x) d beta_i across
// the stored grid, reset by the exact jump map at breakpoints; returns the max
// deviation from the flow-computed trajectory. First-order in the cell width.
// per_node, when given, receives the deviation at every grid node.
double ode_residual(const VectorFieldSystem& f, const JumpTrajectory& traj,
                    std::vector<std::vector<double>>* per_node = nullptr);

// single evaluation without building a whole trajectory
VectorXd evolve_point(const VectorFieldSystem& f, const AdmissibleControl& u, double t,
                      const VectorXd& lambda, bool drift, bool left_limit = false,
                      const Tolerances& tol = {});

}  // namespace gradjump
