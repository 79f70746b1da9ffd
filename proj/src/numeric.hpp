#pragma once

#include "types.hpp"

#include <functional>
#include <vector>

namespace gradjump {

// Largest singular value by 20 power-iteration sweeps on M^T M with a fixed
// deterministic start vector.
double spectral_norm(const MatrixXd& m);

// Central-difference Jacobian of f at x with per-component step h.
MatrixXd fd_jacobian(const std::function<VectorXd(const VectorXd&)>& f,
                     const VectorXd& x, double h);

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
// iteration on the Legendre recurrence.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int order);
};

// exp(M) v. Uses the exact truncated series when M is nilpotent (powers hit
// exact zero within dim steps), otherwise Pade scaling-and-squaring.
MatrixXd matrix_exponential(const MatrixXd& m);

}  // namespace gradjump
