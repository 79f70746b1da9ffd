#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace gradjump {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Error taxonomy. Configuration problems (bad JSON, ill-formed control or
// system data) are ParseError/ValidationError; anything that goes wrong while
// integrating is a NumericError or one of its subclasses. Gate refusals
// (contraction constant too large, displacement bound violated when a solve
// requires it) are GateError.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainEscapeError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateFrameError : public NumericError {
 public:
  using NumericError::NumericError;
};

class GateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every finite-difference step, grid density and pass/fail threshold lives
// here so scenarios can override them in one place. `tol_scale` multiplies
// thresholds only, never steps or grids.
struct Tolerances {
  double ode_rtol = 1e-10;
  double ode_atol = 1e-12;
  double escape_margin = 0.10;        // working ball inflated to 3*gamma*(1+margin)
  double jac_fd_rel = 1e-6;           // h = jac_fd_rel*(1+|x|) fallback Jacobians
  int grid_cells = 200;               // cells per continuity interval
  int quad_nodes = 16;                // Gauss-Legendre nodes per cell
  double involution_threshold = 1e-8;
  double fit_threshold = 1e-8;
  double hj_z_threshold = 1e-4;
  double hj_psi_threshold = 1e-3;
  double hj_v_rate_bound = 0.55;      // integrated jump form must at least halve
  double p_step_rel = 1e-3;           // flow-parameter FD step, times box half-width
  double fd_time_step = 1e-5;
  double fd_space_step = 1e-5;
  double fd_lambda_step = 1e-5;
  double safety_inflation = 1.2;      // applied to C1*C2*K1 before the rho gate
  double contraction_tol = 1e-12;
  int contraction_max_iter = 60;
  int constant_samples = 1024;        // (p,x) pairs for C1
  int c2_samples = 10000;             // p grid for C2
  double gate_rho_max = 0.5;
  double roundoff_floor = 1e-9;       // rate assertions skipped below this
  int z_samples = 50;
  int gradient_samples = 200;
  double tol_scale = 1.0;

  double scaled(double threshold) const { return threshold * tol_scale; }
};

}  // namespace gradjump
