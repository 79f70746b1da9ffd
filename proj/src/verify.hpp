#pragma once

#include "inversion.hpp"

namespace gradjump {

struct ResidualReport {
  std::string identity;
  int samples = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
  double rate_estimate = 0.0;  // coarse-to-fine ratio where a refinement ran
  bool rate_checked = false;
  bool pass = false;
};

// Stationary identity d_p z(p;x) + d_x z(p;x) {g_i(x)} A(p) = 0 over
// quasi-random (p,x); d_p z by central differences with step p_step_rel*a_i.
ResidualReport hj_residual_z(const VectorFieldSystem& f, int samples, std::uint64_t seed,
                             const Tolerances& tol = {});

// Integrated transport identity for V^u(t,x;lambda) across each continuity
// interval: V(t_b) - V(t_a) + int [d_x V](g_0(x) dt + sum_i g_i(x) d beta_i)
// = 0 with the trapezoid rule on the stored grid, plus exact jump relations at
// breakpoints. Runs at the configured grid and at half the cell width and
// reports the decay ratio.
ResidualReport hj_jump_residual_V(const VectorFieldSystem& f, const AdmissibleControl& u,
                                  const VectorXd& lambda, const std::vector<VectorXd>& xs,
                                  bool drift, const Tolerances& tol = {});

// Quasilinear form at interior times: d_t psi + d_x psi [g_0(x) + sum_i
// g_i(x) d_t beta_i(t, psi(t,x))] = 0, with psi derivatives by central
// differences of the fixed-point solve.
ResidualReport hj_residual_psi(const VectorFieldSystem& f, const AdmissibleControl& u,
                               const std::vector<double>& times,
                               const std::vector<VectorXd>& xs, bool drift,
                               const ContractionConstants& constants,
                               const Tolerances& tol = {});

// |d_lambda V^u(t,x;lambda)| <= safety * C1 * C2 * K1 over sampled
// (t, x, lambda); spectral norm of the central-difference Jacobian.
ResidualReport gradient_bound_check(const VectorFieldSystem& f, const AdmissibleControl& u,
                                    bool drift, const ContractionConstants& constants,
                                    int samples, std::uint64_t seed,
                                    const Tolerances& tol = {});

}  // namespace gradjump
