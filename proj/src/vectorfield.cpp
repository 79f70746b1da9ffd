#include "vectorfield.hpp"

#include "numeric.hpp"

#include <cmath>

namespace gradjump {
namespace {

double eval_term(const PolyTerm& t, const VectorXd& x) {
  double v = t.coeff;
  for (size_t i = 0; i < t.exponents.size(); ++i) {
    for (int e = 0; e < t.exponents[i]; ++e) v *= x[static_cast<int>(i)];
  }
  return v;
}

double eval_term_derivative(const PolyTerm& t, const VectorXd& x, int wrt) {
  const int e_wrt = t.exponents[wrt];
  if (e_wrt == 0) return 0.0;
  double v = t.coeff * e_wrt;
  for (size_t i = 0; i < t.exponents.size(); ++i) {
    int e = t.exponents[i];
    if (static_cast<int>(i) == wrt) e -= 1;
    for (int k = 0; k < e; ++k) v *= x[static_cast<int>(i)];
  }
  return v;
}

}  // namespace

VectorField VectorField::polynomial(int dim, std::vector<PolyComponent> components) {
  if (static_cast<int>(components.size()) != dim)
    throw ValidationError("polynomial field: component count does not match dimension");
  for (const auto& comp : components)
    for (const auto& term : comp)
      if (static_cast<int>(term.exponents.size()) != dim)
        throw ValidationError("polynomial field: exponent tuple of wrong length");
  VectorField f;
  f.dim_ = dim;
  f.is_poly_ = true;
  f.analytic_ = true;
  f.poly_ = std::move(components);
  return f;
}

VectorField VectorField::callable(int dim, ValueFn fn) {
  VectorField f;
  f.dim_ = dim;
  f.fn_ = std::move(fn);
  return f;
}

VectorField VectorField::callable(int dim, ValueFn fn, JacFn jac) {
  VectorField f;
  f.dim_ = dim;
  f.analytic_ = true;
  f.fn_ = std::move(fn);
  f.jac_ = std::move(jac);
  return f;
}

VectorField VectorField::constant(const VectorXd& v) {
  std::vector<PolyComponent> comps(v.size());
  for (int i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) comps[i].push_back({v[i], std::vector<int>(v.size(), 0)});
  }
  return polynomial(static_cast<int>(v.size()), std::move(comps));
}

VectorField VectorField::zero(int dim) {
  return polynomial(dim, std::vector<PolyComponent>(dim));
}

VectorXd VectorField::operator()(const VectorXd& x) const {
  if (x.size() != dim_) throw ValidationError("field evaluated at a point of wrong dimension");
  if (is_poly_) {
    VectorXd v = VectorXd::Zero(dim_);
    for (int i = 0; i < dim_; ++i)
      for (const auto& term : poly_[i]) v[i] += eval_term(term, x);
    return v;
  }
  return fn_(x);
}

MatrixXd VectorField::jacobian(const VectorXd& x) const {
  if (x.size() != dim_) throw ValidationError("field evaluated at a point of wrong dimension");
  if (is_poly_) {
    MatrixXd j = MatrixXd::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (const auto& term : poly_[i])
        for (int c = 0; c < dim_; ++c) j(i, c) += eval_term_derivative(term, x, c);
    return j;
  }
  if (jac_) return jac_(x);
  const double h = fd_rel * (1.0 + x.norm());
  return fd_jacobian([this](const VectorXd& y) { return fn_(y); }, x, h);
}

bool VectorField::is_identically_zero() const {
  if (!is_poly_) return false;
  for (const auto& comp : poly_)
    for (const auto& term : comp)
      if (term.coeff != 0.0) return false;
  return true;
}

std::optional<VectorXd> VectorField::constant_value() const {
  if (!is_poly_) return std::nullopt;
  VectorXd v = VectorXd::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (const auto& term : poly_[i]) {
      if (term.coeff == 0.0) continue;
      for (int e : term.exponents)
        if (e != 0) return std::nullopt;
      v[i] += term.coeff;
    }
  }
  return v;
}

}  // namespace gradjump
