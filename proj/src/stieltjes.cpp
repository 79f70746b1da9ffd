#include "stieltjes.hpp"

#include "numeric.hpp"

namespace gradjump {

PathGrid PathGrid::make(const AdmissibleControl& u, int cells_per_interval) {
  if (cells_per_interval < 1) throw ValidationError("grid needs at least one cell");
  PathGrid g;
  const auto& bp = u.breakpoints();
  for (size_t k = 0; k + 1 < bp.size(); ++k) {
    std::vector<double> times(cells_per_interval + 1);
    for (int j = 0; j <= cells_per_interval; ++j) {
      const double a = static_cast<double>(j) / cells_per_interval;
      times[j] = bp[k] + a * (bp[k + 1] - bp[k]);
    }
    times.front() = bp[k];
    times.back() = bp[k + 1];
    g.seg_times.push_back(std::move(times));
  }
  return g;
}

namespace {

// coefficient matrix with columns b_j at control value u(s,lambda)
MatrixXd coefficient_matrix(const VectorFieldSystem& f, double s, const VectorXd& uval,
                            bool drift) {
  if (drift) {
    const MatrixXd v = build_V(f, s, uval);
    return v.block(1, 1, f.count, f.count);
  }
  return build_A(f, uval);
}

}  // namespace

StieltjesPath integrate_alpha(const VectorFieldSystem& f, const AdmissibleControl& u,
                              const VectorXd& lambda, bool drift, const Tolerances& tol) {
  if (drift && !f.has_drift())
    throw ValidationError("drift-form integration needs a drift field");
  if (u.channels() != f.count)
    throw ValidationError("control channel count does not match the system");

  StieltjesPath path;
  path.grid = PathGrid::make(u, tol.grid_cells);
  path.lambda = lambda;
  path.drift = drift;

  const GaussLegendre gl(tol.quad_nodes);
  const int m = f.count;

  MatrixXd acc = MatrixXd::Zero(m, m);
  const auto& bp = u.breakpoints();
  for (int seg = 0; seg < path.grid.segments(); ++seg) {
    const auto& times = path.grid.seg_times[seg];
    std::vector<MatrixXd> seg_alpha;
    std::vector<VectorXd> seg_beta;
    seg_alpha.reserve(times.size());
    seg_beta.reserve(times.size());

    if (seg > 0) {
      // atom at the breakpoint: integrand at the left limit times the jump
      const double tk = times.front();
      const VectorXd uleft = u.eval_left(tk, lambda);
      const MatrixXd b = coefficient_matrix(f, tk, uleft, drift);
      const VectorXd du = u.jump(seg, lambda);
      MatrixXd datom = MatrixXd::Zero(m, m);
      for (int j = 0; j < m; ++j) datom.col(j) = b.col(j) * du[j];
      if (du.cwiseAbs().maxCoeff() > 0.0) {
        PathJump pj;
        pj.breakpoint = seg;
        pj.t = bp[seg];
        pj.dalpha = datom;
        pj.dbeta = datom.rowwise().sum();
        path.jumps.push_back(std::move(pj));
      }
      acc += datom;
    }
    seg_alpha.push_back(acc);
    seg_beta.push_back(acc.rowwise().sum());

    for (size_t cell = 0; cell + 1 < times.size(); ++cell) {
      const double t0 = times[cell], t1 = times[cell + 1];
      const double half = 0.5 * (t1 - t0), mid = 0.5 * (t0 + t1);
      MatrixXd dcell = MatrixXd::Zero(m, m);
      for (int q = 0; q < tol.quad_nodes; ++q) {
        const double s = mid + half * gl.nodes[q];
        const VectorXd uval = u.eval(s, lambda);
        const VectorXd udot = u.time_derivative(s, lambda);
        const MatrixXd b = coefficient_matrix(f, s, uval, drift);
        for (int j = 0; j < m; ++j) dcell.col(j) += (gl.weights[q] * half * udot[j]) * b.col(j);
      }
      acc += dcell;
      seg_alpha.push_back(acc);
      seg_beta.push_back(acc.rowwise().sum());
    }
    path.alpha.push_back(std::move(seg_alpha));
    path.beta.push_back(std::move(seg_beta));
  }
  return path;
}

VectorXd beta_derivative(const VectorFieldSystem& f, const AdmissibleControl& u, double t,
                         const VectorXd& lambda, bool drift) {
  const VectorXd uval = (t == 0.0) ? u.eval(0.0, lambda) : u.eval_left(t, lambda);
  const VectorXd udot = u.time_derivative(t, lambda);
  const MatrixXd b = coefficient_matrix(f, t, uval, drift);
  VectorXd d = VectorXd::Zero(f.count);
  for (int j = 0; j < f.count; ++j) d += b.col(j) * udot[j];
  return d;
}

}  // namespace gradjump
