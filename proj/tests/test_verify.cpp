#include "verify.hpp"

#include <doctest.h>

using namespace gradjump;

namespace {

Cubic cubic(double c0, double c1, double c2 = 0.0, double c3 = 0.0) {
  Cubic q;
  q.c = {c0, c1, c2, c3};
  return q;
}

AdmissibleControl smoke_control(double k1 = 0.0) {
  AdmissibleControl::Channel ch1{Shape::constant(), {cubic(0.0, 0.08), cubic(-0.02, 0.08)}};
  AdmissibleControl::Channel ch2{Shape::constant(), {cubic(0.0, 0.0, 0.05), cubic(0.0, 0.0, 0.05)}};
  return AdmissibleControl(1.0, {0.0, 0.5, 1.0}, {ch1, ch2}, k1);
}

// quadratic second channel so the trapezoid defect sits above the round-off
// floor and the halving of the integrated form is observable
AdmissibleControl curved_heisenberg_control() {
  AdmissibleControl::Channel ch1{Shape::constant(), {cubic(0.0, 0.05)}};
  AdmissibleControl::Channel ch2{Shape::constant(), {cubic(0.0, 0.0, 0.035)}};
  AdmissibleControl::Channel ch3{Shape::constant(), {cubic(0.0, 0.0)}};
  return AdmissibleControl(1.0, {0.0, 1.0}, {ch1, ch2, ch3}, 0.0);
}

AdmissibleControl radial_heisenberg_control() {
  const Shape bump = Shape::radial(Eigen::Vector3d(0.3, 0.0, 0.0), 4.0);
  AdmissibleControl::Channel ch1{bump, {cubic(0.0, 0.05), cubic(0.0, 0.03)}};
  AdmissibleControl::Channel ch2{Shape::constant(), {cubic(0.0, 0.02), cubic(0.0, 0.02)}};
  AdmissibleControl::Channel ch3{Shape::constant(),
                                 {cubic(0.0, 0.04, -0.04), cubic(0.004, 0.01)}};
  return AdmissibleControl(1.0, {0.0, 0.4, 1.0}, {ch1, ch2, ch3}, 0.1);
}

}  // namespace

TEST_CASE("stationary identity holds to round-off on a flat frame") {
  const ResidualReport rep = hj_residual_z(builtin_translations(), 50, 43);
  CHECK(rep.samples == 50);
  CHECK(rep.threshold == 1e-4);
  CHECK(rep.max_residual < 1e-10);
  CHECK(rep.pass);
  CHECK_FALSE(rep.rate_checked);
}

TEST_CASE("stationary identity on curved frames stays within threshold") {
  CHECK(hj_residual_z(builtin_heisenberg(), 50, 7).pass);
  const ResidualReport rot = hj_residual_z(builtin_scaled_rotations(), 50, 7);
  CHECK(rot.pass);
  CHECK(rot.max_residual < 1e-6);
}

TEST_CASE("integrated transport form vanishes for straight-line flows") {
  const VectorFieldSystem f = builtin_translations();
  const std::vector<VectorXd> xs{Eigen::Vector2d(0.1, 0.05), Eigen::Vector2d(-0.2, 0.1)};
  const ResidualReport rep =
      hj_jump_residual_V(f, smoke_control(), VectorXd::Zero(2), xs, false);
  CHECK(rep.max_residual < 1e-12);
  CHECK_FALSE(rep.rate_checked);
  CHECK(rep.pass);
}

TEST_CASE("integrated transport defect halves under grid doubling") {
  const VectorFieldSystem f = builtin_heisenberg();
  const std::vector<VectorXd> xs{Eigen::Vector3d(0.1, 0.0, -0.05)};
  const ResidualReport rep =
      hj_jump_residual_V(f, curved_heisenberg_control(), VectorXd::Zero(3), xs, false);
  CHECK(rep.max_residual > 1e-9);
  CHECK(rep.max_residual < 1e-7);
  REQUIRE(rep.rate_checked);
  CHECK(rep.rate_estimate > 0.2);
  CHECK(rep.rate_estimate < 0.3);
  CHECK(rep.pass);
}

TEST_CASE("transport form tolerates a commuting drift") {
  const VectorFieldSystem f = builtin_commuting_drift({});
  const std::vector<VectorXd> xs{Eigen::Vector2d(0.1, 0.3)};
  const ResidualReport rep =
      hj_jump_residual_V(f, smoke_control(), VectorXd::Zero(2), xs, true);
  CHECK(rep.max_residual < 1e-12);
  CHECK(rep.pass);
}

TEST_CASE("quasilinear residual is flat-frame exact away from breakpoints") {
  const VectorFieldSystem f = builtin_translations();
  const AdmissibleControl u = smoke_control();
  const ContractionConstants cc = estimate_constants(f, u, false);
  const std::vector<VectorXd> xs{Eigen::Vector2d(0.1, 0.05), Eigen::Vector2d(-0.3, 0.2)};
  const ResidualReport rep = hj_residual_psi(f, u, {0.25, 0.75, 0.9}, xs, false, cc);
  CHECK(rep.samples == 6);
  CHECK(rep.max_residual < 1e-10);
  CHECK(rep.pass);
}

TEST_CASE("quasilinear residual holds for a shaped control on heisenberg") {
  const VectorFieldSystem f = builtin_heisenberg();
  const AdmissibleControl u = radial_heisenberg_control();
  const ContractionConstants cc = estimate_constants(f, u, false);
  REQUIRE(cc.gate_ok);
  const std::vector<VectorXd> xs{Eigen::Vector3d(0.1, 0.0, -0.05)};
  const ResidualReport rep = hj_residual_psi(f, u, {0.2, 0.7}, xs, false, cc);
  CHECK(rep.max_residual < 1e-3);
  CHECK(rep.pass);
}

TEST_CASE("quasilinear residual refuses to run past a failed gate") {
  ContractionConstants cc;
  cc.gate_ok = false;
  cc.rho = 0.72;
  const std::vector<VectorXd> xs{Eigen::Vector2d(0.1, 0.05)};
  CHECK_THROWS_AS(
      hj_residual_psi(builtin_translations(), smoke_control(0.6), {0.25}, xs, false, cc),
      GateError);
}

TEST_CASE("parameter gradient of a rigid control is numerically zero") {
  const VectorFieldSystem f = builtin_translations();
  const AdmissibleControl u = smoke_control();
  const ContractionConstants cc = estimate_constants(f, u, false);
  const ResidualReport rep = gradient_bound_check(f, u, false, cc, 200, 44);
  CHECK(rep.threshold == 1e-7);
  CHECK(rep.max_residual == 0.0);
  CHECK(rep.pass);
}

TEST_CASE("parameter gradient stays under the contraction budget") {
  const VectorFieldSystem f = builtin_heisenberg();
  const AdmissibleControl u = radial_heisenberg_control();
  const ContractionConstants cc = estimate_constants(f, u, false);
  const ResidualReport rep = gradient_bound_check(f, u, false, cc, 200, 44);
  CHECK(rep.threshold == doctest::Approx(cc.rho).epsilon(1e-15));
  CHECK(rep.max_residual < cc.rho);
  CHECK(rep.pass);
}
