#pragma once

#include "flows.hpp"

namespace gradjump {

// Coordinate matrix of the composed flow: column j of A(p) collects the frame
// coefficients of d/dt_j G(p)[x] at the moved point,
//   b_j = exp(-t_1 ad_1) ... exp(-t_{j-1} ad_{j-1}) e_j,
// so b_1 = e_1 and column j depends only on t_1..t_{j-1}. A(0) = I.
MatrixXd build_A(const VectorFieldSystem& f, const VectorXd& p);

// Drift-extended (m+1)x(m+1) version: first row and column are e_1, and the
// trailing block's column i is b_i(t, t_1..t_{i-1}) with the extra left factor
// exp(-t ad_0). Reduces to diag(1, A(p)) when the drift commutes.
MatrixXd build_V(const VectorFieldSystem& f, double t, const VectorXd& p);

// Column j of the trailing block of V (or of A when the system has no drift
// constants), the integrand slot for the Stieltjes forms.
VectorXd coefficient_column(const VectorFieldSystem& f, double s, const VectorXd& p, int j);

// Independent check of build_A: differentiate G(p)[x] in t_j by central
// differences and solve the frame system at the moved point for the
// coefficients. Throws DegenerateFrameError when the frame is singular there.
VectorXd oracle_column(const VectorFieldSystem& f, const VectorXd& p, const VectorXd& x, int j,
                       const Tolerances& tol = {});

// max |A(p)| (spectral norm) over a quasi-random grid of the parameter box
double coordinate_matrix_bound(const VectorFieldSystem& f, int samples, std::uint64_t seed);

}  // namespace gradjump
