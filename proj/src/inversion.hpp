#pragma once

#include "jumpflow.hpp"

namespace gradjump {

// V^u(t,x;lambda) = H(u(t,lambda))[x], the contraction whose fixed point
// inverts the jump flow; with a drift, x is first pulled back through
// G_0(-t). left_limit switches the control to u(t-,lambda).
VectorXd contraction_map(const VectorFieldSystem& f, const AdmissibleControl& u, double t,
                         const VectorXd& x, const VectorXd& lambda, bool drift,
                         bool left_limit = false, const Tolerances& tol = {});

struct ContractionConstants {
  double c1 = 0.0;   // max |d_x z(p;x) g_i(x)|
  double c2 = 0.0;   // max |A(p)| spectral
  double k1 = 0.0;   // declared control Lipschitz constant
  double rho = 0.0;  // safety * c1 * c2 * k1
  bool gate_ok = false;
};

ContractionConstants estimate_constants(const VectorFieldSystem& f, const AdmissibleControl& u,
                                        bool drift, std::uint64_t seed = 42,
                                        const Tolerances& tol = {});

struct PsiNode {
  double t = 0.0;
  VectorXd psi_left;   // fixed point of the left-limit map
  VectorXd psi;        // one push through the jump, equal to psi_left inside intervals
  int iterations = 0;
  std::vector<double> increments;  // |lambda_{k+1} - lambda_k| per iteration
  std::optional<MatrixXd> dpsi_dx;
};

struct InversionResult {
  std::vector<std::vector<PsiNode>> nodes;  // [segment][node]
  ContractionConstants constants;
  bool converged = true;
};

// Fixed-point solve lambda = V^u(t-,x;lambda) at every grid time, restarted
// from lambda_0 = x, followed by the single jump push for the right value.
// Throws GateError unless rho <= 1/2; want_jacobian adds the resolvent-form
// d psi/d x at interior nodes. Pass precomputed constants when solving for
// many x against the same system and control.
InversionResult solve_inverse(const VectorFieldSystem& f, const AdmissibleControl& u,
                              const VectorXd& x, bool drift, bool want_jacobian = false,
                              std::uint64_t seed = 42, const Tolerances& tol = {},
                              const ContractionConstants* constants = nullptr);

// single-time variant used by the residual checks; iterates the map at time t
// (left limit when left_limit is set) and returns the fixed point
VectorXd solve_inverse_at(const VectorFieldSystem& f, const AdmissibleControl& u, double t,
                          const VectorXd& x, bool drift, bool left_limit = false,
                          const Tolerances& tol = {}, int* iterations = nullptr,
                          std::vector<double>* increments = nullptr);

// d psi/d x = [I - d_lambda V]^{-1} d_x V at (t,x), lambda the fixed point
MatrixXd psi_space_jacobian(const VectorFieldSystem& f, const AdmissibleControl& u, double t,
                            const VectorXd& x, const VectorXd& psi, bool drift,
                            const Tolerances& tol = {});

}  // namespace gradjump
