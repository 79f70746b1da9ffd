#include "numeric.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace gradjump {

double spectral_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const MatrixXd mtm = m.transpose() * m;
  VectorXd v = VectorXd::Ones(mtm.cols()).normalized();
  for (int k = 0; k < 20; ++k) {
    VectorXd w = mtm * v;
    double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
  }
  return std::sqrt(v.dot(mtm * v));
}

MatrixXd fd_jacobian(const std::function<VectorXd(const VectorXd&)>& f,
                     const VectorXd& x, double h) {
  const int n = static_cast<int>(x.size());
  MatrixXd j;
  for (int c = 0; c < n; ++c) {
    VectorXd xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    VectorXd d = (f(xp) - f(xm)) / (2.0 * h);
    if (c == 0) j.resize(d.size(), n);
    j.col(c) = d;
  }
  return j;
}

GaussLegendre::GaussLegendre(int order) {
  nodes.resize(order);
  weights.resize(order);
  const int mhalf = (order + 1) / 2;
  for (int i = 0; i < mhalf; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < order; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[order - 1 - i] = weights[i];
  }
}

MatrixXd matrix_exponential(const MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  // nilpotency probe with exact arithmetic on the stored entries
  MatrixXd power = MatrixXd::Identity(n, n);
  std::vector<MatrixXd> terms;
  bool nilpotent = false;
  for (int k = 1; k <= n; ++k) {
    power = power * m;
    if (power.cwiseAbs().maxCoeff() == 0.0) {
      nilpotent = true;
      break;
    }
    terms.push_back(power);
  }
  if (nilpotent) {
    MatrixXd e = MatrixXd::Identity(n, n);
    double fact = 1.0;
    for (size_t k = 0; k < terms.size(); ++k) {
      fact *= static_cast<double>(k + 1);
      e += terms[k] / fact;
    }
    return e;
  }
  return m.exp();
}

}  // namespace gradjump
