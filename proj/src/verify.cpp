#include "verify.hpp"

#include "numeric.hpp"
#include "quasirandom.hpp"

#include <cmath>

namespace gradjump {

ResidualReport hj_residual_z(const VectorFieldSystem& f, int samples, std::uint64_t seed,
                             const Tolerances& tol) {
  ResidualReport rep;
  rep.identity = "stationary_z";
  rep.samples = samples;
  rep.threshold = tol.scaled(tol.hj_z_threshold);

  HaltonSequence seq(f.count + f.dim, seed);
  int done = 0;
  while (done < samples) {
    const VectorXd q = seq.next();
    VectorXd p(f.count);
    // shrink so the FD stencil stays inside the box
    const double inset = 1.0 - 2.0 * tol.p_step_rel;
    for (int i = 0; i < f.count; ++i) p[i] = (2.0 * q[i] - 1.0) * f.box[i] * inset;
    VectorXd y(f.dim);
    for (int d = 0; d < f.dim; ++d) y[d] = 2.0 * q[f.count + d] - 1.0;
    if (y.norm() > 1.0) continue;
    const VectorXd x = f.center + f.radius * y;
    ++done;

    // d_p z by central differences, one parameter at a time
    MatrixXd dp(f.dim, f.count);
    for (int j = 0; j < f.count; ++j) {
      const double h = tol.p_step_rel * f.box[j];
      VectorXd pp = p, pm = p;
      pp[j] += h;
      pm[j] -= h;
      dp.col(j) = (inverse_flow(f, pp, x, false, tol).value -
                   inverse_flow(f, pm, x, false, tol).value) /
                  (2.0 * h);
    }
    const MatrixXd dz = *inverse_flow(f, p, x, true, tol).jacobian;
    const MatrixXd residual = dp + dz * f.frame(x) * build_A(f, p);
    rep.max_residual = std::max(rep.max_residual, residual.cwiseAbs().maxCoeff());
  }
  rep.pass = rep.max_residual <= rep.threshold;
  return rep;
}

namespace {

struct VDefect {
  double transport = 0.0;  // worst integrated defect over segments and x
  double jump = 0.0;       // worst breakpoint mismatch vs direct evaluation
};

VDefect integrated_v_defect(const VectorFieldSystem& f, const AdmissibleControl& u,
                            const VectorXd& lambda, const std::vector<VectorXd>& xs,
                            bool drift, const Tolerances& tol) {
  const StieltjesPath path = integrate_alpha(f, u, lambda, drift, tol);
  VDefect out;
  for (const VectorXd& x : xs) {
    VectorXd prev_seg_end;  // V(t_k-, x) from the previous segment
    for (int seg = 0; seg < path.grid.segments(); ++seg) {
      const auto& times = path.grid.seg_times[seg];
      const auto& beta = path.beta[seg];
      // V and d_x V at every node of this segment
      std::vector<VectorXd> v(times.size());
      std::vector<MatrixXd> dv(times.size());
      for (size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        const bool left = (j + 1 == times.size()) && t > 0.0;
        const VectorXd uval = left ? u.eval_left(t, lambda) : u.eval(t, lambda);
        if (!drift) {
          const FlowPoint fp = inverse_flow(f, uval, x, true, tol);
          v[j] = fp.value;
          dv[j] = *fp.jacobian;
        } else {
          const FlowPoint pull = flow(f, 0, -t, x, true, tol);
          const FlowPoint fp = inverse_flow(f, uval, pull.value, true, tol);
          v[j] = fp.value;
          dv[j] = *fp.jacobian * (*pull.jacobian);
        }
      }
      const MatrixXd g = f.frame(x);
      const VectorXd g0 = (drift && f.drift) ? (*f.drift)(x) : VectorXd::Zero(f.dim);
      VectorXd defect = v.back() - v.front();
      for (size_t j = 0; j + 1 < times.size(); ++j) {
        const VectorXd dbeta = beta[j + 1] - beta[j];
        const double dt = times[j + 1] - times[j];
        defect += 0.5 * ((dv[j] + dv[j + 1]) * (g * dbeta + g0 * dt));
      }
      out.transport = std::max(out.transport, defect.norm());

      if (seg > 0) {
        // stored jump against direct left/right evaluation of the map
        const double tk = times.front();
        const VectorXd stored_jump = v.front() - prev_seg_end;
        const VectorXd direct_jump =
            contraction_map(f, u, tk, x, lambda, drift, false, tol) -
            contraction_map(f, u, tk, x, lambda, drift, true, tol);
        out.jump = std::max(out.jump, (stored_jump - direct_jump).norm());
      }
      prev_seg_end = v.back();
    }
  }
  return out;
}

}  // namespace

ResidualReport hj_jump_residual_V(const VectorFieldSystem& f, const AdmissibleControl& u,
                                  const VectorXd& lambda, const std::vector<VectorXd>& xs,
                                  bool drift, const Tolerances& tol) {
  ResidualReport rep;
  rep.identity = "transport_V";
  rep.samples = static_cast<int>(xs.size());

  const VDefect coarse = integrated_v_defect(f, u, lambda, xs, drift, tol);
  Tolerances fine_tol = tol;
  fine_tol.grid_cells = 2 * tol.grid_cells;
  const VDefect fine = integrated_v_defect(f, u, lambda, xs, drift, fine_tol);

  rep.max_residual = coarse.transport;
  rep.threshold = tol.scaled(5e-3);
  rep.pass = coarse.transport <= rep.threshold;
  if (coarse.transport > tol.roundoff_floor && fine.transport > 0.0) {
    rep.rate_checked = true;
    rep.rate_estimate = fine.transport / coarse.transport;
    rep.pass = rep.pass && rep.rate_estimate <= tol.hj_v_rate_bound;
  }
  if (coarse.jump > 0.0 || fine.jump > 0.0) rep.pass = false;
  return rep;
}

ResidualReport hj_residual_psi(const VectorFieldSystem& f, const AdmissibleControl& u,
                               const std::vector<double>& times,
                               const std::vector<VectorXd>& xs, bool drift,
                               const ContractionConstants& constants,
                               const Tolerances& tol) {
  ResidualReport rep;
  rep.identity = "quasilinear_psi";
  rep.threshold = tol.scaled(tol.hj_psi_threshold);
  if (!constants.gate_ok) throw GateError("contraction gate failed before psi residual");

  const double ht = tol.fd_time_step;
  const double hx = tol.fd_space_step;
  for (double t : times) {
    for (const VectorXd& x : xs) {
      ++rep.samples;
      const VectorXd psi = solve_inverse_at(f, u, t, x, drift, true, tol);
      const VectorXd dtpsi = (solve_inverse_at(f, u, t + ht, x, drift, true, tol) -
                              solve_inverse_at(f, u, t - ht, x, drift, true, tol)) /
                             (2.0 * ht);
      MatrixXd dxpsi(f.dim, f.dim);
      for (int c = 0; c < f.dim; ++c) {
        VectorXd xp = x, xm = x;
        xp[c] += hx;
        xm[c] -= hx;
        dxpsi.col(c) = (solve_inverse_at(f, u, t, xp, drift, true, tol) -
                        solve_inverse_at(f, u, t, xm, drift, true, tol)) /
                       (2.0 * hx);
      }
      VectorXd transport = f.frame(x) * beta_derivative(f, u, t, psi, drift);
      if (drift && f.drift) transport += (*f.drift)(x);
      const VectorXd residual = dtpsi + dxpsi * transport;
      rep.max_residual = std::max(rep.max_residual, residual.norm());
    }
  }
  rep.pass = rep.max_residual <= rep.threshold;
  return rep;
}

ResidualReport gradient_bound_check(const VectorFieldSystem& f, const AdmissibleControl& u,
                                    bool drift, const ContractionConstants& constants,
                                    int samples, std::uint64_t seed, const Tolerances& tol) {
  ResidualReport rep;
  rep.identity = "gradient_bound";
  rep.samples = samples;
  rep.threshold = tol.safety_inflation * constants.c1 * constants.c2 * constants.k1;
  if (constants.k1 == 0.0) rep.threshold = tol.scaled(1e-7);  // FD noise only

  HaltonSequence seq(1 + 2 * f.dim, seed);
  int done = 0;
  while (done < samples) {
    const VectorXd q = seq.next();
    const double t = q[0] * u.horizon();
    VectorXd yx(f.dim), yl(f.dim);
    for (int d = 0; d < f.dim; ++d) {
      yx[d] = 2.0 * q[1 + d] - 1.0;
      yl[d] = 2.0 * q[1 + f.dim + d] - 1.0;
    }
    if (yx.norm() > 1.0 || yl.norm() > 1.0) continue;
    const VectorXd x = f.center + f.radius * yx;
    const VectorXd lam = f.center + 2.0 * f.radius * yl;
    ++done;

    MatrixXd dlam(f.dim, f.dim);
    for (int c = 0; c < f.dim; ++c) {
      VectorXd lp = lam, lm = lam;
      lp[c] += tol.fd_lambda_step;
      lm[c] -= tol.fd_lambda_step;
      dlam.col(c) = (contraction_map(f, u, t, x, lp, drift, false, tol) -
                     contraction_map(f, u, t, x, lm, drift, false, tol)) /
                    (2.0 * tol.fd_lambda_step);
    }
    rep.max_residual = std::max(rep.max_residual, spectral_norm(dlam));
  }
  rep.pass = rep.max_residual <= rep.threshold;
  return rep;
}

}  // namespace gradjump
