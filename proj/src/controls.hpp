#pragma once

#include "fields.hpp"

#include <array>
#include <vector>

namespace gradjump {

// Bounded smooth lambda-shape phi with sup|phi| <= 1. Validation uses the
// registered conservative gradient bound (0 for constant, 1 for radial), not
// the tighter width-dependent value.
class Shape {
 public:
  enum class Kind { Constant, Radial };

  static Shape constant();
  // phi(lambda) = tanh(|lambda - center|^2 / width); width >= 1.25 keeps the
  // true gradient sup below 1
  static Shape radial(VectorXd center, double width);

  double operator()(const VectorXd& lambda) const;
  VectorXd gradient(const VectorXd& lambda) const;
  double sup_abs() const { return 1.0; }
  double grad_bound() const { return kind_ == Kind::Constant ? 0.0 : 1.0; }
  Kind kind() const { return kind_; }
  const VectorXd& center() const { return center_; }
  double width() const { return width_; }

 private:
  Kind kind_ = Kind::Constant;
  VectorXd center_;
  double width_ = 0.0;
};

// c0 + c1 t + c2 t^2 + c3 t^3 in absolute time
struct Cubic {
  std::array<double, 4> c{0, 0, 0, 0};

  double eval(double t) const { return ((c[3] * t + c[2]) * t + c[1]) * t + c[0]; }
  double deriv(double t) const { return (3.0 * c[3] * t + 2.0 * c[2]) * t + c[1]; }
  double sup_abs(double t0, double t1) const;        // exact via critical points
  double arc_variation(double t0, double t1) const;  // integral of |c'|, exact
};

struct ControlValidation {
  bool pass = true;
  std::string violated_clause;  // "range", "lipschitz", "zero_at_origin"
  double range_margin = 0.0;    // min over channels of a_i - sup|u_i|
  double lipschitz_margin = 0.0;
  std::vector<double> total_variation;  // per channel, bound over lambda
};

// Admissible control u(t,lambda), channel i = c_i(t) * phi_i(lambda) with
// piecewise-cubic c_i on the breakpoint intervals. Right-continuous at
// breakpoints; jumps are the coefficient mismatches there. u(.,lambda) starts
// at 0 and never jumps at t = 0.
class AdmissibleControl {
 public:
  struct Channel {
    Shape shape;
    std::vector<Cubic> pieces;  // one per interval [t_k, t_{k+1})
  };

  AdmissibleControl(double horizon, std::vector<double> breakpoints,
                    std::vector<Channel> channels, double k1);

  int channels() const { return static_cast<int>(channels_.size()); }
  double horizon() const { return horizon_; }
  double k1() const { return k1_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const Channel& channel(int i) const { return channels_[i]; }

  VectorXd eval(double t, const VectorXd& lambda) const;
  // limit from the left; errors at t = 0
  VectorXd eval_left(double t, const VectorXd& lambda) const;
  // d/dt u(t,lambda) inside a continuity interval; errors at breakpoints
  VectorXd time_derivative(double t, const VectorXd& lambda) const;
  // coefficient jump c_k(t_k) - c_{k-1}(t_k) per channel at interior breakpoint k
  VectorXd coefficient_jump(int k) const;
  VectorXd jump(int k, const VectorXd& lambda) const;
  bool jumps_at(int k) const { return coefficient_jump(k).cwiseAbs().maxCoeff() > 0.0; }
  int interval_of(double t) const;  // right-continuous piece index

  ControlValidation validate(const VectorFieldSystem& f, int grid_points = 64,
                             std::uint64_t seed = 42) const;

 private:
  double horizon_;
  std::vector<double> breakpoints_;
  std::vector<Channel> channels_;
  double k1_;
};

}  // namespace gradjump
