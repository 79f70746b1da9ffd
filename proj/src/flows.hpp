#pragma once

#include "fields.hpp"

namespace gradjump {

struct FlowPoint {
  VectorXd value;
  std::optional<MatrixXd> jacobian;  // d value / d x0
  long steps = 0;
};

// Time-t flow of field index i (0 = drift, 1..m = g_i) from x. Adaptive
// embedded Runge-Kutta 5(4) at the tolerances in tol; integrates the
// variational equation J' = Dg(y) J alongside when want_jacobian is set.
// Throws DomainEscapeError when the trajectory leaves the inflated working
// ball and NumericError on step-size underflow.
FlowPoint flow(const VectorFieldSystem& f, int i, double t, const VectorXd& x,
               bool want_jacobian = false, const Tolerances& tol = {});

// G(p)[x] = G_1(t_1) o ... o G_m(t_m) [x]  (index m applied first)
FlowPoint compose_flow(const VectorFieldSystem& f, const VectorXd& p, const VectorXd& x,
                       bool want_jacobian = false, const Tolerances& tol = {});

// H(p)[x] = G_m(-t_m) o ... o G_1(-t_1) [x]; exact inverse of compose_flow
FlowPoint inverse_flow(const VectorFieldSystem& f, const VectorXd& p, const VectorXd& x,
                       bool want_jacobian = false, const Tolerances& tol = {});

struct DisplacementReport {
  bool pass = false;
  double threshold = 0.0;       // gamma/(2m), or gamma/(2(m+1)) with a drift
  double worst = 0.0;           // largest sampled |G_i(t)[x] - x|
  int worst_field = 0;          // 0 = drift
  double margin = 0.0;          // threshold - worst
};

// Samples quasi-random (x, t_i) in B(x*,3*gamma) x [-a_i,a_i] (t in [-T,T]
// for the drift) plus the box corners, and checks the small-displacement
// bounds every other guarantee rests on.
DisplacementReport displacement_check(const VectorFieldSystem& f, double horizon = 1.0,
                                      int samples_per_field = 200, std::uint64_t seed = 42,
                                      const Tolerances& tol = {});

}  // namespace gradjump
