#include "controls.hpp"

#include <doctest.h>

#include <cmath>

using namespace gradjump;

namespace {

Cubic cubic(double c0, double c1, double c2 = 0.0, double c3 = 0.0) {
  Cubic q;
  q.c = {c0, c1, c2, c3};
  return q;
}

// two channels on [0, 0.5) u [0.5, 1]: the first jumps by -0.02 at 0.5,
// the second is continuous
AdmissibleControl smoke_control() {
  AdmissibleControl::Channel ch1{Shape::constant(), {cubic(0.0, 0.08), cubic(-0.02, 0.08)}};
  AdmissibleControl::Channel ch2{Shape::constant(), {cubic(0.0, 0.0, 0.05), cubic(0.0, 0.0, 0.05)}};
  return AdmissibleControl(1.0, {0.0, 0.5, 1.0}, {ch1, ch2}, 0.0);
}

}  // namespace

TEST_CASE("piecewise evaluation is right-continuous with left limits") {
  const AdmissibleControl u = smoke_control();
  const VectorXd lambda = VectorXd::Zero(2);

  const VectorXd at0 = u.eval(0.0, lambda);
  CHECK(at0.cwiseAbs().maxCoeff() == 0.0);

  const VectorXd left = u.eval_left(0.5, lambda);
  CHECK(left[0] == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(left[1] == doctest::Approx(0.0125).epsilon(1e-14));

  const VectorXd right = u.eval(0.5, lambda);
  CHECK(right[0] == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(right[1] == doctest::Approx(0.0125).epsilon(1e-14));

  const VectorXd jump = u.jump(1, lambda);
  CHECK(jump[0] == doctest::Approx(-0.02).epsilon(1e-14));
  CHECK(jump[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(u.jumps_at(1));

  CHECK(u.eval(1.0, lambda)[0] == doctest::Approx(0.06).epsilon(1e-14));
  CHECK_THROWS_AS(u.eval_left(0.0, lambda), ValidationError);
}

TEST_CASE("time derivative works inside intervals and refuses breakpoints") {
  const AdmissibleControl u = smoke_control();
  const VectorXd lambda = VectorXd::Zero(2);
  const VectorXd d = u.time_derivative(0.25, lambda);
  CHECK(d[0] == doctest::Approx(0.08).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(0.025).epsilon(1e-14));
  CHECK_THROWS_AS(u.time_derivative(0.5, lambda), ValidationError);
}

TEST_CASE("construction validates the breakpoint grid and the start value") {
  AdmissibleControl::Channel ch{Shape::constant(), {cubic(0.0, 0.1)}};
  CHECK_THROWS_AS(AdmissibleControl(1.0, {0.0, 0.4}, {ch}, 0.0), ValidationError);
  CHECK_THROWS_AS(AdmissibleControl(1.0, {0.1, 1.0}, {ch}, 0.0), ValidationError);
  CHECK_THROWS_AS(AdmissibleControl(1.0, {0.0, 0.6, 0.5, 1.0},
                                    {AdmissibleControl::Channel{
                                        Shape::constant(),
                                        {cubic(0.0, 0.1), cubic(0.0, 0.1), cubic(0.0, 0.1)}}},
                                    0.0),
                  ValidationError);
  // nonzero value at t = 0
  AdmissibleControl::Channel bad{Shape::constant(), {cubic(0.05, 0.1)}};
  CHECK_THROWS_AS(AdmissibleControl(1.0, {0.0, 1.0}, {bad}, 0.0), ValidationError);
  // piece count must match interval count
  AdmissibleControl::Channel off{Shape::constant(), {cubic(0.0, 0.1), cubic(0.0, 0.1)}};
  CHECK_THROWS_AS(AdmissibleControl(1.0, {0.0, 1.0}, {off}, 0.0), ValidationError);
}

TEST_CASE("radial shapes are bounded with a unit gradient bound") {
  const Shape s = Shape::radial(Eigen::Vector2d(0.0, 0.0), 4.0);
  CHECK(s(Eigen::Vector2d(0.0, 0.0)) == 0.0);
  CHECK(s(Eigen::Vector2d(1.0, 0.0)) == doctest::Approx(std::tanh(0.25)).epsilon(1e-14));
  CHECK(s.gradient(Eigen::Vector2d(0.0, 0.0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.grad_bound() == 1.0);
  CHECK(s.sup_abs() == 1.0);
  CHECK_THROWS_AS(Shape::radial(Eigen::Vector2d(0.0, 0.0), 1.0), ValidationError);

  // gradient against finite differences
  const VectorXd x = Eigen::Vector2d(0.7, -0.4);
  const VectorXd g = s.gradient(x);
  const double h = 1e-7;
  for (int c = 0; c < 2; ++c) {
    VectorXd xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    CHECK(g[c] == doctest::Approx((s(xp) - s(xm)) / (2.0 * h)).epsilon(1e-6));
  }
}

TEST_CASE("exact variation of cubic pieces uses interior critical points") {
  // 0.04 t - 0.04 t^2 rises to 0.01 at t = 0.5 then falls back to 0
  const Cubic q = cubic(0.0, 0.04, -0.04);
  CHECK(q.sup_abs(0.0, 1.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(q.arc_variation(0.0, 1.0) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(q.arc_variation(0.0, 0.5) == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("admissibility verdict covers range, lipschitz and variation") {
  const VectorFieldSystem f = builtin_translations();

  SUBCASE("the smoke control passes with known margins") {
    const ControlValidation v = smoke_control().validate(f);
    CHECK(v.pass);
    CHECK(v.violated_clause.empty());
    CHECK(v.range_margin == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(v.total_variation[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(v.total_variation[1] == doctest::Approx(0.05).epsilon(1e-12));
  }

  SUBCASE("a channel exceeding its box bound fails the range clause") {
    AdmissibleControl::Channel ch1{Shape::constant(), {cubic(0.0, 0.2)}};
    AdmissibleControl::Channel ch2{Shape::constant(), {cubic(0.0, 0.0)}};
    const AdmissibleControl u(1.0, {0.0, 1.0}, {ch1, ch2}, 0.0);
    const ControlValidation v = u.validate(f);
    CHECK_FALSE(v.pass);
    CHECK(v.violated_clause == "range");
  }

  SUBCASE("a lambda-dependent channel needs a large enough declared constant") {
    VectorFieldSystem wide = builtin_translations();
    wide.box = VectorXd::Constant(2, 0.5);
    AdmissibleControl::Channel ch1{Shape::radial(VectorXd::Zero(2), 4.0), {cubic(0.0, 0.3)}};
    AdmissibleControl::Channel ch2{Shape::constant(), {cubic(0.0, 0.1)}};
    const AdmissibleControl u(1.0, {0.0, 1.0}, {ch1, ch2}, 0.2);
    const ControlValidation v = u.validate(wide);
    CHECK_FALSE(v.pass);
    CHECK(v.violated_clause == "lipschitz");

    const AdmissibleControl ok(1.0, {0.0, 1.0}, {ch1, ch2}, 0.3);
    CHECK(ok.validate(wide).pass);
  }

  SUBCASE("channel count must match the field count") {
    AdmissibleControl::Channel ch{Shape::constant(), {cubic(0.0, 0.05)}};
    const AdmissibleControl u(1.0, {0.0, 1.0}, {ch}, 0.0);
    const ControlValidation v = u.validate(f);
    CHECK_FALSE(v.pass);
    CHECK(v.violated_clause == "channel_count");
  }
}
