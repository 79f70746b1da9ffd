#pragma once

#include "algebra.hpp"
#include "controls.hpp"

namespace gradjump {

// Node times covering [0,T], refined inside each continuity interval of the
// control. Segment k spans [t_k, t_{k+1}]; values stored at a segment's last
// node are limits from the left, values at the first node include the jump.
struct PathGrid {
  std::vector<std::vector<double>> seg_times;

  static PathGrid make(const AdmissibleControl& u, int cells_per_interval);
  int segments() const { return static_cast<int>(seg_times.size()); }
};

struct PathJump {
  int breakpoint = 0;  // interior breakpoint index into control breakpoints
  double t = 0.0;
  MatrixXd dalpha;
  VectorXd dbeta;
};

// alpha_ij(t,lambda) = int_0^t b_j^i(u_1(s-),..,u_{j-1}(s-)) d_s u_j(s,lambda)
// accumulated per grid node, with beta_i = sum_j alpha_ij. In the drift case
// the integrand column also takes s itself as first argument.
struct StieltjesPath {
  PathGrid grid;
  std::vector<std::vector<MatrixXd>> alpha;  // [segment][node], m x m
  std::vector<std::vector<VectorXd>> beta;   // [segment][node], m
  std::vector<PathJump> jumps;
  VectorXd lambda;
  bool drift = false;

  const MatrixXd& alpha_end() const { return alpha.back().back(); }
  const VectorXd& beta_end() const { return beta.back().back(); }
};

StieltjesPath integrate_alpha(const VectorFieldSystem& f, const AdmissibleControl& u,
                              const VectorXd& lambda, bool drift,
                              const Tolerances& tol = {});

// d/dt beta_i(t,lambda) = sum_j b_j^i(u(t-,lambda)) * d/dt u_j(t,lambda),
// analytic in t away from breakpoints.
VectorXd beta_derivative(const VectorFieldSystem& f, const AdmissibleControl& u, double t,
                         const VectorXd& lambda, bool drift);

}  // namespace gradjump
