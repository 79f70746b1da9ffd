#pragma once

#include "vectorfield.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gradjump {

// A family g_1..g_m of vector fields on R^n closed under Lie brackets with
// constant coefficients, [g_i,g_j] = sum_k gamma_k^{ij} g_k, together with the
// working geometry: center x*, radius gamma (balls up to B(x*,3*gamma) are
// used), and the parameter box |p_i| <= a_i. An optional drift field g_0
// either commutes with every g_i (drift_constants absent) or satisfies
// [g_0,g_i] = sum_k gamma_k^i g_k (drift_constants present, entry (k,i)).
struct VectorFieldSystem {
  int dim = 0;    // n
  int count = 0;  // m
  std::vector<VectorField> fields;
  std::optional<VectorField> drift;
  std::vector<double> structure;            // gamma_k^{ij}, layout (k*m+i)*m+j
  std::optional<MatrixXd> drift_constants;  // gamma_k^i at (k,i)
  VectorXd center;
  double radius = 0.0;
  VectorXd box;  // half-widths a_i
  std::string name = "custom";

  double gamma(int k, int i, int j) const { return structure[(k * count + i) * count + j]; }
  double& gamma(int k, int i, int j) { return structure[(k * count + i) * count + j]; }

  // (ad_i)_{k,l} = gamma_k^{il}; ad_0 from the drift constants (zero if absent)
  MatrixXd adjoint(int i) const;
  MatrixXd drift_adjoint() const;

  bool has_drift() const { return drift.has_value(); }
  // frame matrix [g_1(x) ... g_m(x)]
  MatrixXd frame(const VectorXd& x) const;
  bool inside_box(const VectorXd& p, double slack = 1e-9) const;
  double escape_radius(const Tolerances& tol) const {
    return 3.0 * radius * (1.0 + tol.escape_margin);
  }
  void check_consistent() const;
};

VectorFieldSystem builtin_translations();
VectorFieldSystem builtin_heisenberg();
VectorFieldSystem builtin_scaled_rotations(double sigma = 0.3, double omega = 0.3);
VectorFieldSystem builtin_commuting_drift(VectorXd drift_vec = VectorXd());
VectorFieldSystem builtin_shear_drift(double kappa = 0.05);
VectorFieldSystem make_builtin(const std::string& name);

// [g_i, g_j](x) = Dg_j(x) g_i(x) - Dg_i(x) g_j(x); index 0 means the drift.
VectorXd lie_bracket(const VectorFieldSystem& f, int i, int j, const VectorXd& x);

// Max over samples and index pairs of |[g_i,g_j](x) - sum_k gamma_k^{ij} g_k(x)|.
// With a drift present, the drift rows are checked against the drift constants
// (or against zero when they are absent).
double involution_residual(const VectorFieldSystem& f, const std::vector<VectorXd>& samples);

struct StructureFit {
  std::vector<double> structure;
  std::optional<MatrixXd> drift_constants;
  double residual = 0.0;
};

// Least-squares fit of the structure constants from bracket evaluations at the
// samples. Throws DegenerateFrameError when the stacked frame loses rank.
StructureFit fit_structure_constants(const VectorFieldSystem& f,
                                     const std::vector<VectorXd>& samples);

// 100 quasi-random points in B(x*, 3*gamma), seeded.
std::vector<VectorXd> sample_ball(const VectorFieldSystem& f, int count, double radius_factor,
                                  std::uint64_t seed);

}  // namespace gradjump
