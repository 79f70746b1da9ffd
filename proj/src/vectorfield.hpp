#pragma once

#include "types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace gradjump {

// One monomial c * prod_i x_i^e_i of a polynomial field component.
struct PolyTerm {
  double coeff = 0.0;
  std::vector<int> exponents;
};

using PolyComponent = std::vector<PolyTerm>;

// A vector field on R^n. Polynomial fields carry analytic Jacobians; opaque
// callables fall back to central differences with h = rel*(1+|x|).
class VectorField {
 public:
  using ValueFn = std::function<VectorXd(const VectorXd&)>;
  using JacFn = std::function<MatrixXd(const VectorXd&)>;

  static VectorField polynomial(int dim, std::vector<PolyComponent> components);
  static VectorField callable(int dim, ValueFn f);
  static VectorField callable(int dim, ValueFn f, JacFn jac);
  static VectorField constant(const VectorXd& v);
  static VectorField zero(int dim);

  VectorXd operator()(const VectorXd& x) const;
  MatrixXd jacobian(const VectorXd& x) const;
  bool has_analytic_jacobian() const { return analytic_; }
  int dim() const { return dim_; }
  bool is_identically_zero() const;
  // the field's value when it does not depend on x, otherwise empty
  std::optional<VectorXd> constant_value() const;
  const std::vector<PolyComponent>* poly() const { return is_poly_ ? &poly_ : nullptr; }

  double fd_rel = 1e-6;

 private:
  VectorField() = default;
  int dim_ = 0;
  bool is_poly_ = false;
  bool analytic_ = false;
  std::vector<PolyComponent> poly_;
  ValueFn fn_;
  JacFn jac_;
};

}  // namespace gradjump
