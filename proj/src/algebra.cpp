#include "algebra.hpp"

#include "numeric.hpp"
#include "quasirandom.hpp"

#include <Eigen/Dense>

namespace gradjump {

MatrixXd build_A(const VectorFieldSystem& f, const VectorXd& p) {
  const int m = f.count;
  MatrixXd a = MatrixXd::Identity(m, m);
  MatrixXd left = MatrixXd::Identity(m, m);
  for (int j = 1; j < m; ++j) {
    left = left * matrix_exponential(-p[j - 1] * f.adjoint(j - 1));
    a.col(j) = left.col(j);
  }
  return a;
}

MatrixXd build_V(const VectorFieldSystem& f, double t, const VectorXd& p) {
  const int m = f.count;
  MatrixXd v = MatrixXd::Zero(m + 1, m + 1);
  v(0, 0) = 1.0;
  MatrixXd left = matrix_exponential(-t * f.drift_adjoint());
  for (int j = 1; j <= m; ++j) {
    if (j > 1) left = left * matrix_exponential(-p[j - 2] * f.adjoint(j - 2));
    v.block(1, j, m, 1) = left.col(j - 1);
  }
  return v;
}

VectorXd coefficient_column(const VectorFieldSystem& f, double s, const VectorXd& p, int j) {
  if (j < 1 || j > f.count) throw ValidationError("column index must be in 1..m");
  if (f.has_drift()) {
    const MatrixXd v = build_V(f, s, p);
    return v.block(1, j, f.count, 1);
  }
  return build_A(f, p).col(j - 1);
}

VectorXd oracle_column(const VectorFieldSystem& f, const VectorXd& p, const VectorXd& x, int j,
                       const Tolerances& tol) {
  if (j < 1 || j > f.count) throw ValidationError("column index must be in 1..m");
  const double h = tol.p_step_rel * f.box[j - 1];
  VectorXd pp = p, pm = p;
  pp[j - 1] += h;
  pm[j - 1] -= h;
  const VectorXd dj =
      (compose_flow(f, pp, x, false, tol).value - compose_flow(f, pm, x, false, tol).value) /
      (2.0 * h);
  const MatrixXd g = f.frame(compose_flow(f, p, x, false, tol).value);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(g);
  qr.setThreshold(1e-10);
  if (qr.rank() < f.count)
    throw DegenerateFrameError("frame is singular at the composed-flow point");
  return qr.solve(dj);
}

double coordinate_matrix_bound(const VectorFieldSystem& f, int samples, std::uint64_t seed) {
  HaltonSequence seq(f.count, seed);
  double bound = 0.0;
  for (int s = 0; s < samples; ++s) {
    const VectorXd p = seq.next_in_box(-f.box, f.box);
    bound = std::max(bound, spectral_norm(build_A(f, p)));
  }
  return bound;
}

}  // namespace gradjump
