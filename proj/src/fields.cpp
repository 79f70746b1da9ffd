#include "fields.hpp"

#include "quasirandom.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace gradjump {

MatrixXd VectorFieldSystem::adjoint(int i) const {
  MatrixXd ad = MatrixXd::Zero(count, count);
  for (int k = 0; k < count; ++k)
    for (int l = 0; l < count; ++l) ad(k, l) = gamma(k, i, l);
  return ad;
}

MatrixXd VectorFieldSystem::drift_adjoint() const {
  if (drift_constants) return *drift_constants;
  return MatrixXd::Zero(count, count);
}

MatrixXd VectorFieldSystem::frame(const VectorXd& x) const {
  MatrixXd g(dim, count);
  for (int i = 0; i < count; ++i) g.col(i) = fields[i](x);
  return g;
}

bool VectorFieldSystem::inside_box(const VectorXd& p, double slack) const {
  if (p.size() != count) return false;
  for (int i = 0; i < count; ++i)
    if (std::abs(p[i]) > box[i] + slack) return false;
  return true;
}

void VectorFieldSystem::check_consistent() const {
  if (count < 1 || dim < 1) throw ValidationError("system needs at least one field");
  if (static_cast<int>(fields.size()) != count)
    throw ValidationError("field count mismatch");
  if (static_cast<int>(structure.size()) != count * count * count)
    throw ValidationError("structure constant tensor has wrong size");
  if (center.size() != dim) throw ValidationError("center has wrong dimension");
  if (box.size() != count) throw ValidationError("box has wrong dimension");
  if (radius <= 0.0) throw ValidationError("radius must be positive");
  for (int i = 0; i < count; ++i)
    if (box[i] <= 0.0) throw ValidationError("box half-widths must be positive");
  if (drift_constants && (drift_constants->rows() != count || drift_constants->cols() != count))
    throw ValidationError("drift constants have wrong shape");
  if (drift_constants && !drift) throw ValidationError("drift constants given without a drift field");
}

namespace {

VectorFieldSystem base_system(int n, int m) {
  VectorFieldSystem f;
  f.dim = n;
  f.count = m;
  f.structure.assign(static_cast<size_t>(m) * m * m, 0.0);
  f.center = VectorXd::Zero(n);
  f.radius = 1.0;
  f.box = VectorXd::Constant(m, 0.1);
  return f;
}

}  // namespace

VectorFieldSystem builtin_translations() {
  VectorFieldSystem f = base_system(2, 2);
  f.name = "translations";
  f.fields.push_back(VectorField::constant(Eigen::Vector2d(1, 0)));
  f.fields.push_back(VectorField::constant(Eigen::Vector2d(0, 1)));
  return f;
}

VectorFieldSystem builtin_heisenberg() {
  VectorFieldSystem f = base_system(3, 3);
  f.name = "heisenberg";
  f.fields.push_back(VectorField::constant(Eigen::Vector3d(1, 0, 0)));
  // g_2 = (0, 1, x_1)
  std::vector<PolyComponent> g2(3);
  g2[1].push_back({1.0, {0, 0, 0}});
  g2[2].push_back({1.0, {1, 0, 0}});
  f.fields.push_back(VectorField::polynomial(3, std::move(g2)));
  f.fields.push_back(VectorField::constant(Eigen::Vector3d(0, 0, 1)));
  f.gamma(2, 0, 1) = 1.0;   // [g_1,g_2] = g_3
  f.gamma(2, 1, 0) = -1.0;
  // |G_2(t)[x]-x| = |t|*sqrt(1+x1^2) <= a_2*sqrt(10) on B(0,3); keep it under
  // gamma/(2m) = 1/6 with some margin
  f.box = Eigen::Vector3d(0.08, 0.04, 0.08);
  return f;
}

VectorFieldSystem builtin_scaled_rotations(double sigma, double omega) {
  VectorFieldSystem f = base_system(2, 2);
  f.name = "scaled_rotations";
  // g_1 = sigma*(x_1, x_2), g_2 = omega*(-x_2, x_1); commuting, frame is
  // nonsingular away from the origin so the ball is centered off it
  std::vector<PolyComponent> g1(2);
  g1[0].push_back({sigma, {1, 0}});
  g1[1].push_back({sigma, {0, 1}});
  f.fields.push_back(VectorField::polynomial(2, std::move(g1)));
  std::vector<PolyComponent> g2(2);
  g2[0].push_back({-omega, {0, 1}});
  g2[1].push_back({omega, {1, 0}});
  f.fields.push_back(VectorField::polynomial(2, std::move(g2)));
  f.center = Eigen::Vector2d(1, 0);
  f.radius = 0.25;
  return f;
}

VectorFieldSystem builtin_commuting_drift(VectorXd drift_vec) {
  VectorFieldSystem f = builtin_translations();
  f.name = "commuting_drift";
  if (drift_vec.size() == 0) drift_vec = Eigen::Vector2d(0, 0.2);
  if (drift_vec.size() != 2) throw ValidationError("commuting_drift expects a 2-vector");
  f.drift = VectorField::constant(drift_vec);
  f.radius = 1.5;  // drift displacement 0.2*T must fit gamma/(2(m+1))
  return f;
}

VectorFieldSystem builtin_shear_drift(double kappa) {
  VectorFieldSystem f = builtin_translations();
  f.name = "shear_drift";
  // g_0 = (0, -kappa*x_1): [g_0,g_1] = kappa*g_2, [g_0,g_2] = 0
  std::vector<PolyComponent> g0(2);
  g0[1].push_back({-kappa, {1, 0}});
  f.drift = VectorField::polynomial(2, std::move(g0));
  MatrixXd dc = MatrixXd::Zero(2, 2);
  dc(1, 0) = kappa;
  f.drift_constants = dc;
  return f;
}

VectorFieldSystem make_builtin(const std::string& name) {
  if (name == "translations") return builtin_translations();
  if (name == "heisenberg") return builtin_heisenberg();
  if (name == "scaled_rotations") return builtin_scaled_rotations();
  if (name == "commuting_drift") return builtin_commuting_drift();
  if (name == "shear_drift") return builtin_shear_drift();
  throw ValidationError("unknown builtin system: " + name);
}

VectorXd lie_bracket(const VectorFieldSystem& f, int i, int j, const VectorXd& x) {
  const VectorField& gi = (i == 0) ? *f.drift : f.fields[i - 1];
  const VectorField& gj = (j == 0) ? *f.drift : f.fields[j - 1];
  return gj.jacobian(x) * gi(x) - gi.jacobian(x) * gj(x);
}

double involution_residual(const VectorFieldSystem& f, const std::vector<VectorXd>& samples) {
  double worst = 0.0;
  for (const VectorXd& x : samples) {
    const MatrixXd g = f.frame(x);
    for (int i = 1; i <= f.count; ++i) {
      for (int j = i + 1; j <= f.count; ++j) {
        VectorXd predicted = VectorXd::Zero(f.dim);
        for (int k = 0; k < f.count; ++k) predicted += f.gamma(k, i - 1, j - 1) * g.col(k);
        worst = std::max(worst, (lie_bracket(f, i, j, x) - predicted).norm());
      }
      if (f.has_drift()) {
        VectorXd predicted = VectorXd::Zero(f.dim);
        if (f.drift_constants)
          for (int k = 0; k < f.count; ++k) predicted += (*f.drift_constants)(k, i - 1) * g.col(k);
        worst = std::max(worst, (lie_bracket(f, 0, i, x) - predicted).norm());
      }
    }
  }
  return worst;
}

namespace {

// solve min_c sum_s |frame(x_s) c - b_s|^2 stacked over samples
VectorXd stacked_least_squares(const VectorFieldSystem& f, const std::vector<VectorXd>& samples,
                               const std::vector<VectorXd>& rhs, double* residual_out) {
  const int s = static_cast<int>(samples.size());
  MatrixXd a(s * f.dim, f.count);
  VectorXd b(s * f.dim);
  for (int k = 0; k < s; ++k) {
    a.block(k * f.dim, 0, f.dim, f.count) = f.frame(samples[k]);
    b.segment(k * f.dim, f.dim) = rhs[k];
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < f.count)
    throw DegenerateFrameError("frame is rank-deficient over the sample cloud");
  VectorXd c = qr.solve(b);
  double worst = 0.0;
  for (int k = 0; k < s; ++k)
    worst = std::max(worst,
                     (a.block(k * f.dim, 0, f.dim, f.count) * c - rhs[k]).norm());
  if (residual_out) *residual_out = std::max(*residual_out, worst);
  return c;
}

}  // namespace

StructureFit fit_structure_constants(const VectorFieldSystem& f,
                                     const std::vector<VectorXd>& samples) {
  if (samples.empty()) throw ValidationError("fit needs sample points");
  StructureFit fit;
  fit.structure.assign(static_cast<size_t>(f.count) * f.count * f.count, 0.0);
  std::vector<VectorXd> rhs(samples.size());
  for (int i = 0; i < f.count; ++i) {
    for (int j = i + 1; j < f.count; ++j) {
      for (size_t s = 0; s < samples.size(); ++s)
        rhs[s] = lie_bracket(f, i + 1, j + 1, samples[s]);
      VectorXd c = stacked_least_squares(f, samples, rhs, &fit.residual);
      for (int k = 0; k < f.count; ++k) {
        fit.structure[(k * f.count + i) * f.count + j] = c[k];
        fit.structure[(k * f.count + j) * f.count + i] = -c[k];
      }
    }
  }
  if (f.has_drift()) {
    MatrixXd dc = MatrixXd::Zero(f.count, f.count);
    for (int i = 0; i < f.count; ++i) {
      for (size_t s = 0; s < samples.size(); ++s)
        rhs[s] = lie_bracket(f, 0, i + 1, samples[s]);
      dc.col(i) = stacked_least_squares(f, samples, rhs, &fit.residual);
    }
    fit.drift_constants = dc;
  }
  return fit;
}

std::vector<VectorXd> sample_ball(const VectorFieldSystem& f, int count, double radius_factor,
                                  std::uint64_t seed) {
  HaltonSequence seq(f.dim, seed);
  std::vector<VectorXd> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i)
    pts.push_back(seq.next_in_ball(f.center, radius_factor * f.radius));
  return pts;
}

}  // namespace gradjump
