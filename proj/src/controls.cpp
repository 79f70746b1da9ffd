#include "controls.hpp"

#include "quasirandom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gradjump {

Shape Shape::constant() { return Shape{}; }

Shape Shape::radial(VectorXd center, double width) {
  if (width < 1.25) throw ValidationError("radial shape width must be at least 1.25");
  Shape s;
  s.kind_ = Kind::Radial;
  s.center_ = std::move(center);
  s.width_ = width;
  return s;
}

double Shape::operator()(const VectorXd& lambda) const {
  if (kind_ == Kind::Constant) return 1.0;
  return std::tanh((lambda - center_).squaredNorm() / width_);
}

VectorXd Shape::gradient(const VectorXd& lambda) const {
  if (kind_ == Kind::Constant) return VectorXd::Zero(lambda.size());
  const VectorXd d = lambda - center_;
  const double r2 = d.squaredNorm() / width_;
  const double sech = 1.0 / std::cosh(r2);
  return (2.0 * sech * sech / width_) * d;
}

namespace {

// real roots of the derivative, i.e. candidates interior to [t0,t1]
void critical_points(const Cubic& q, double t0, double t1, std::vector<double>& out) {
  out.clear();
  const double a = 3.0 * q.c[3], b = 2.0 * q.c[2], c = q.c[1];
  if (a == 0.0) {
    if (b != 0.0) out.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      out.push_back((-b + sq) / (2.0 * a));
      out.push_back((-b - sq) / (2.0 * a));
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [&](double r) { return r <= t0 || r >= t1; }),
            out.end());
  std::sort(out.begin(), out.end());
}

}  // namespace

double Cubic::sup_abs(double t0, double t1) const {
  std::vector<double> crit;
  critical_points(*this, t0, t1, crit);
  double s = std::max(std::abs(eval(t0)), std::abs(eval(t1)));
  for (double r : crit) s = std::max(s, std::abs(eval(r)));
  return s;
}

double Cubic::arc_variation(double t0, double t1) const {
  std::vector<double> crit;
  critical_points(*this, t0, t1, crit);
  double tv = 0.0;
  double prev_t = t0;
  for (double r : crit) {
    tv += std::abs(eval(r) - eval(prev_t));
    prev_t = r;
  }
  tv += std::abs(eval(t1) - eval(prev_t));
  return tv;
}

AdmissibleControl::AdmissibleControl(double horizon, std::vector<double> breakpoints,
                                     std::vector<Channel> channels, double k1)
    : horizon_(horizon),
      breakpoints_(std::move(breakpoints)),
      channels_(std::move(channels)),
      k1_(k1) {
  if (horizon_ <= 0.0) throw ValidationError("control horizon must be positive");
  if (breakpoints_.size() < 2 || breakpoints_.front() != 0.0 ||
      breakpoints_.back() != horizon_)
    throw ValidationError("breakpoints must run from 0 to the horizon");
  for (size_t k = 1; k < breakpoints_.size(); ++k)
    if (breakpoints_[k] <= breakpoints_[k - 1])
      throw ValidationError("breakpoints must be strictly increasing");
  if (channels_.empty()) throw ValidationError("control needs at least one channel");
  if (k1_ < 0.0) throw ValidationError("declared Lipschitz constant must be nonnegative");
  const size_t intervals = breakpoints_.size() - 1;
  for (const auto& ch : channels_) {
    if (ch.pieces.size() != intervals)
      throw ValidationError("each channel needs one piece per breakpoint interval");
    if (ch.pieces.front().eval(0.0) != 0.0)
      throw ValidationError("control must vanish at t = 0");
  }
}

int AdmissibleControl::interval_of(double t) const {
  if (t < 0.0 || t > horizon_ + 1e-12) throw ValidationError("time outside [0, T]");
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  int k = static_cast<int>(it - breakpoints_.begin()) - 1;
  return std::min(k, static_cast<int>(breakpoints_.size()) - 2);
}

VectorXd AdmissibleControl::eval(double t, const VectorXd& lambda) const {
  const int k = interval_of(t);
  VectorXd u(channels());
  for (int i = 0; i < channels(); ++i)
    u[i] = channels_[i].pieces[k].eval(t) * channels_[i].shape(lambda);
  return u;
}

VectorXd AdmissibleControl::eval_left(double t, const VectorXd& lambda) const {
  if (t <= 0.0) throw ValidationError("left limit undefined at t = 0");
  if (t > horizon_ + 1e-12) throw ValidationError("time outside (0, T]");
  // the piece in force just before t; at a breakpoint that is the previous one
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
  int k;
  if (it != breakpoints_.end() && *it == t)
    k = static_cast<int>(it - breakpoints_.begin()) - 1;
  else
    k = interval_of(t);
  k = std::min(k, static_cast<int>(breakpoints_.size()) - 2);
  VectorXd u(channels());
  for (int i = 0; i < channels(); ++i)
    u[i] = channels_[i].pieces[k].eval(t) * channels_[i].shape(lambda);
  return u;
}

VectorXd AdmissibleControl::time_derivative(double t, const VectorXd& lambda) const {
  for (size_t k = 1; k + 1 < breakpoints_.size(); ++k)
    if (t == breakpoints_[k])
      throw ValidationError("time derivative undefined at a breakpoint");
  const int k = interval_of(t);
  VectorXd du(channels());
  for (int i = 0; i < channels(); ++i)
    du[i] = channels_[i].pieces[k].deriv(t) * channels_[i].shape(lambda);
  return du;
}

VectorXd AdmissibleControl::coefficient_jump(int k) const {
  if (k < 1 || k + 1 >= static_cast<int>(breakpoints_.size()))
    throw ValidationError("jump index must name an interior breakpoint");
  const double tk = breakpoints_[k];
  VectorXd d(channels());
  for (int i = 0; i < channels(); ++i)
    d[i] = channels_[i].pieces[k].eval(tk) - channels_[i].pieces[k - 1].eval(tk);
  return d;
}

VectorXd AdmissibleControl::jump(int k, const VectorXd& lambda) const {
  VectorXd d = coefficient_jump(k);
  for (int i = 0; i < channels(); ++i) d[i] *= channels_[i].shape(lambda);
  return d;
}

ControlValidation AdmissibleControl::validate(const VectorFieldSystem& f, int grid_points,
                                              std::uint64_t seed) const {
  ControlValidation rep;
  if (channels() != f.count) {
    rep.pass = false;
    rep.violated_clause = "channel_count";
    return rep;
  }

  rep.total_variation.resize(channels(), 0.0);
  double sup_coeff_all = 0.0;
  rep.range_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < channels(); ++i) {
    const auto& ch = channels_[i];
    double sup_c = 0.0;
    for (size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
      sup_c = std::max(sup_c, ch.pieces[k].sup_abs(breakpoints_[k], breakpoints_[k + 1]));
      rep.total_variation[i] +=
          ch.pieces[k].arc_variation(breakpoints_[k], breakpoints_[k + 1]) * ch.shape.sup_abs();
    }
    for (size_t k = 1; k + 1 < breakpoints_.size(); ++k)
      rep.total_variation[i] += std::abs(coefficient_jump(static_cast<int>(k))[i]) *
                                ch.shape.sup_abs();
    sup_coeff_all = std::max(sup_coeff_all, sup_c * ch.shape.grad_bound());
    rep.range_margin = std::min(rep.range_margin, f.box[i] - sup_c * ch.shape.sup_abs());
  }
  rep.lipschitz_margin = k1_ - sup_coeff_all;

  if (rep.range_margin < -1e-12) {
    rep.pass = false;
    rep.violated_clause = "range";
    return rep;
  }
  if (rep.lipschitz_margin < -1e-12) {
    rep.pass = false;
    rep.violated_clause = "lipschitz";
    return rep;
  }

  // grid confirmation of the analytic bounds
  HaltonSequence seq(f.dim, seed);
  std::vector<VectorXd> lambdas;
  for (int s = 0; s < 8; ++s) lambdas.push_back(seq.next_in_ball(f.center, 2.0 * f.radius));
  for (int gridpt = 0; gridpt <= grid_points; ++gridpt) {
    const double t = horizon_ * gridpt / grid_points;
    for (const VectorXd& lam : lambdas) {
      const VectorXd u = eval(t, lam);
      for (int i = 0; i < channels(); ++i) {
        if (std::abs(u[i]) > f.box[i] + 1e-12) {
          rep.pass = false;
          rep.violated_clause = "range";
          return rep;
        }
        const double grad =
            std::abs(channels_[i].pieces[interval_of(t)].eval(t)) *
            channels_[i].shape.gradient(lam).norm();
        if (grad > k1_ + 1e-12) {
          rep.pass = false;
          rep.violated_clause = "lipschitz";
          return rep;
        }
      }
    }
  }
  return rep;
}

}  // namespace gradjump
