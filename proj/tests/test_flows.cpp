#include "flows.hpp"
#include "quasirandom.hpp"

#include <doctest.h>

#include <cmath>

using namespace gradjump;

TEST_CASE("single flows of the builtin fields match their closed forms") {
  SUBCASE("translation moves along the axis") {
    const VectorFieldSystem f = builtin_translations();
    const FlowPoint fp = flow(f, 1, 0.07, Eigen::Vector2d(0.2, -0.1), true);
    CHECK(fp.value[0] == doctest::Approx(0.27).epsilon(1e-14));
    CHECK(fp.value[1] == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK((*fp.jacobian - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("heisenberg shear accumulates the first coordinate") {
    const VectorFieldSystem f = builtin_heisenberg();
    const FlowPoint fp = flow(f, 2, 0.4, Eigen::Vector3d(0.5, 0.0, 0.0), true);
    CHECK(fp.value[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fp.value[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(fp.value[2] == doctest::Approx(0.2).epsilon(1e-12));
    // d/dx of (x1, x2+t, x3+x1 t)
    CHECK((*fp.jacobian)(2, 0) == doctest::Approx(0.4).epsilon(1e-9));
    CHECK((*fp.jacobian)(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((*fp.jacobian)(2, 2) == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("scaled rotation spirals") {
    const VectorFieldSystem f = builtin_scaled_rotations();
    const FlowPoint a = flow(f, 1, 0.1, Eigen::Vector2d(1.0, 0.0), false);
    CHECK(a.value[0] == doctest::Approx(std::exp(0.03)).epsilon(1e-9));
    CHECK(a.value[1] == doctest::Approx(0.0).epsilon(1e-9));
    const FlowPoint b = flow(f, 2, 0.1, Eigen::Vector2d(1.0, 0.0), false);
    CHECK(b.value[0] == doctest::Approx(std::cos(0.03)).epsilon(1e-9));
    CHECK(b.value[1] == doctest::Approx(std::sin(0.03)).epsilon(1e-9));
  }
}

TEST_CASE("zero time and zero fields return the start point unchanged") {
  VectorFieldSystem f = builtin_translations();
  f.drift = VectorField::zero(2);
  const VectorXd x = Eigen::Vector2d(0.123456789, -0.987654321);
  CHECK((flow(f, 1, 0.0, x, false).value - x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((flow(f, 0, 0.8, x, false).value - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("variational jacobian agrees with finite differences") {
  const VectorFieldSystem f = builtin_scaled_rotations();
  const VectorXd x = Eigen::Vector2d(1.1, 0.1);
  const double t = 0.09;
  const FlowPoint fp = flow(f, 1, t, x, true);
  const double h = 1e-6;
  for (int c = 0; c < 2; ++c) {
    VectorXd xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const VectorXd col =
        (flow(f, 1, t, xp, false).value - flow(f, 1, t, xm, false).value) / (2.0 * h);
    CHECK((fp.jacobian->col(c) - col).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("composition applies the highest index first") {
  const VectorFieldSystem f = builtin_heisenberg();
  const VectorXd lambda = Eigen::Vector3d(0.2, 0.1, 0.0);
  const VectorXd p = Eigen::Vector3d(0.05, 0.03, 0.02);
  const VectorXd x = compose_flow(f, p, lambda, false).value;
  CHECK(x[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(0.13).epsilon(1e-12));
  CHECK(x[2] == doctest::Approx(0.02 + 0.2 * 0.03).epsilon(1e-12));
}

TEST_CASE("inverse composition undoes the composition") {
  for (const char* name : {"translations", "heisenberg", "scaled_rotations"}) {
    const VectorFieldSystem f = make_builtin(name);
    HaltonSequence seq(f.count + f.dim, 13);
    for (int s = 0; s < 20; ++s) {
      const VectorXd q = seq.next();
      VectorXd p(f.count);
      for (int i = 0; i < f.count; ++i) p[i] = (2.0 * q[i] - 1.0) * f.box[i];
      VectorXd y(f.dim);
      for (int d = 0; d < f.dim; ++d) y[d] = 2.0 * q[f.count + d] - 1.0;
      if (y.norm() > 1.0) continue;
      const VectorXd lambda = f.center + f.radius * y;
      const VectorXd x = compose_flow(f, p, lambda, false).value;
      const VectorXd back = inverse_flow(f, p, x, false).value;
      CHECK((back - lambda).norm() <= 1e-10);
    }
  }
}

TEST_CASE("composed jacobians chain the per-factor jacobians") {
  const VectorFieldSystem f = builtin_heisenberg();
  const VectorXd lambda = Eigen::Vector3d(0.1, -0.2, 0.3);
  const VectorXd p = Eigen::Vector3d(0.06, 0.03, -0.05);
  const FlowPoint fp = compose_flow(f, p, lambda, true);
  // d/dlambda of (l1+p1, l2+p2, l3+p3+l1 p2)
  MatrixXd expect = MatrixXd::Identity(3, 3);
  expect(2, 0) = 0.03;
  CHECK((*fp.jacobian - expect).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("parameters outside the admissible box are rejected") {
  const VectorFieldSystem f = builtin_translations();
  const VectorXd p = Eigen::Vector2d(0.2, 0.0);
  CHECK_THROWS_AS(compose_flow(f, p, VectorXd::Zero(2), false), ValidationError);
  CHECK_THROWS_AS(inverse_flow(f, p, VectorXd::Zero(2), false), ValidationError);
}

TEST_CASE("leaving the working ball raises a domain escape error") {
  const VectorFieldSystem f = builtin_translations();
  CHECK_THROWS_AS(flow(f, 1, 5.0, VectorXd::Zero(2), false), DomainEscapeError);
  const VectorFieldSystem r = builtin_scaled_rotations();
  CHECK_THROWS_AS(flow(r, 1, 6.0, Eigen::Vector2d(1.0, 0.0), false), DomainEscapeError);
}

TEST_CASE("field index bounds are enforced") {
  const VectorFieldSystem f = builtin_translations();
  CHECK_THROWS_AS(flow(f, 3, 0.01, VectorXd::Zero(2), false), ValidationError);
  CHECK_THROWS_AS(flow(f, 0, 0.01, VectorXd::Zero(2), false), ValidationError);
}
