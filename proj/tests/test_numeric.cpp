#include "numeric.hpp"

#include <doctest.h>

#include <cmath>

using namespace gradjump;

TEST_CASE("spectral norm of simple matrices") {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  CHECK(spectral_norm(d) == doctest::Approx(3.0).epsilon(1e-12));

  MatrixXd n = MatrixXd::Zero(2, 2);
  n(0, 1) = 2.0;
  CHECK(spectral_norm(n) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK(spectral_norm(MatrixXd::Identity(5, 5)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("finite difference jacobian matches the analytic one") {
  auto f = [](const VectorXd& x) {
    VectorXd y(2);
    y[0] = x[0] * x[0];
    y[1] = x[0] * x[1];
    return y;
  };
  const VectorXd x = Eigen::Vector2d(2.0, 3.0);
  const MatrixXd j = fd_jacobian(f, x, 1e-6);
  CHECK(j(0, 0) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(j(0, 1) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(j(1, 0) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(j(1, 1) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  const GaussLegendre gl(16);
  double total_weight = 0.0;
  double x2 = 0.0;
  double x30 = 0.0;
  for (int i = 0; i < 16; ++i) {
    total_weight += gl.weights[i];
    x2 += gl.weights[i] * gl.nodes[i] * gl.nodes[i];
    x30 += gl.weights[i] * std::pow(gl.nodes[i], 30);
  }
  CHECK(total_weight == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  // a 16-point rule is exact through degree 31
  CHECK(x30 == doctest::Approx(2.0 / 31.0).epsilon(1e-13));
}

TEST_CASE("matrix exponential on nilpotent, diagonal and rotation generators") {
  MatrixXd n = MatrixXd::Zero(2, 2);
  n(0, 1) = 1.0;
  const MatrixXd en = matrix_exponential(n);
  CHECK(en(0, 0) == 1.0);
  CHECK(en(0, 1) == 1.0);
  CHECK(en(1, 0) == 0.0);
  CHECK(en(1, 1) == 1.0);

  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = std::log(2.0);
  const MatrixXd ed = matrix_exponential(d);
  CHECK(ed(0, 0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(ed(1, 1) == doctest::Approx(1.0).epsilon(1e-13));

  MatrixXd r = MatrixXd::Zero(2, 2);
  const double half_pi = std::acos(0.0);
  r(0, 1) = -half_pi;
  r(1, 0) = half_pi;
  const MatrixXd er = matrix_exponential(r);
  CHECK(er(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(er(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(er(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(er(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
}
