#include "ves/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>

namespace ves {

double ModelSpec::t_char() const {
  const double R = length_scale;
  const double kappa = elastic.kappa;
  switch (model) {
    case ModelKind::A:
      return mu * R * R / kappa;
    case ModelKind::B:
    case ModelKind::Full:
      return mu_bulk * R * R * R / kappa;
    case ModelKind::C:
      return mu_hat * R * R * R * R / kappa;
  }
  return 1.0;
}

AssembledSystem assemble(const GeneratingCurve& curve, const ModelSpec& spec) {
  const int N = curve.n();
  const DofMap dof(N);
  const GeomCache cache = GeomCache::build(curve, spec.n_gauss);

  AssembledSystem sys;
  sys.energy = bending_energy(cache, spec.elastic);
  sys.volume = enclosed_volume(curve, spec.n_gauss);
  sys.area = surface_area(curve, spec.n_gauss);

  Eigen::VectorXd f_full = nodal_forces(cache, spec.elastic);
  if (spec.pole_force_north != 0.0 || spec.pole_force_south != 0.0)
    f_full += pole_load(N, spec.pole_force_north, spec.pole_force_south);
  sys.f = dof.reduce(f_full);

  sys.D = Eigen::MatrixXd::Zero(dof.n_red(), dof.n_red());
  if (spec.uses_membrane()) sys.D += dof.reduce_matrix(assemble_Dmem(cache, spec.mu));
  if (spec.uses_bulk()) {
    const BemSystem bem = assemble_bem(curve, spec.mu_bulk, spec.bem);
    sys.D += assemble_Dbulk(bem);
  }
  if (spec.model == ModelKind::C)
    sys.D += dof.reduce_matrix(
        assemble_DL2(cache, spec.mu_hat, spec.dl2_tangential_eps));

  std::vector<Eigen::VectorXd> cols;
  if (spec.uses_inext()) {
    const Eigen::MatrixXd Li = inext_block(cache);
    for (int j = 0; j < Li.cols(); ++j) cols.push_back(dof.reduce(Li.col(j)));
  } else if (spec.area_constraint) {
    cols.push_back(dof.reduce(area_row(cache)));
  }
  if (spec.volume_constraint) cols.push_back(dof.reduce(volume_row(cache)));
  if (spec.model == ModelKind::A) cols.push_back(dof.reduce(gauge_row(cache)));

  sys.L.resize(dof.n_red(), static_cast<int>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    sys.L.col(static_cast<int>(j)) = cols[j];
  return sys;
}

SaddleSolution solve_saddle(const AssembledSystem& sys) {
  const int n = static_cast<int>(sys.D.rows());
  const int c = static_cast<int>(sys.L.cols());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + c, n + c);
  K.topLeftCorner(n, n) = sys.D;
  if (c > 0) {
    K.topRightCorner(n, c) = sys.L;
    K.bottomLeftCorner(c, n) = sys.L.transpose();
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + c);
  rhs.head(n) = sys.f;

  SaddleSolution sol;
  bool direct_ok = false;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (lu.isInvertible()) {
    const Eigen::VectorXd x = lu.solve(rhs);
    sol.qdot = x.head(n);
    sol.lambda = x.tail(c);
    const double res1 =
        (sys.D * sol.qdot + sys.L * sol.lambda - sys.f).norm();
    direct_ok = res1 <= 1e-10 * (sys.f.norm() + 1.0);
    if (direct_ok && c > 0) {
      const double res2 = (sys.L.transpose() * sol.qdot).norm();
      direct_ok = res2 <= 1e-10 * (sol.qdot.norm() * sys.L.norm() + 1e-30);
    }
    if (direct_ok) return sol;
  }

  // the constraint gradients degenerate at special shapes (at the sphere
  // the volume direction collapses into the area/inextensibility span);
  // the multipliers are then non-unique, but the velocity is still well
  // defined. Shift the metric by the constraint dyad (which changes
  // nothing on the constraint manifold) and pseudo-invert the multiplier
  // Schur complement.
  if (c == 0)
    throw std::runtime_error(
        "solve_saddle: singular KKT system (a zero-dissipation mode is "
        "left unconstrained by the model configuration)");
  const double shift = std::abs(sys.D.trace()) /
                       std::max(sys.L.squaredNorm(), 1e-300);
  const Eigen::MatrixXd Dreg = sys.D + shift * sys.L * sys.L.transpose();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(Dreg);
  const Eigen::VectorXd vf = ldlt.solve(sys.f);
  const Eigen::MatrixXd Z = ldlt.solve(sys.L);
  Eigen::MatrixXd S = sys.L.transpose() * Z;
  S = 0.5 * (S + S.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  const double cut = 1e-12 * std::max(es.eigenvalues().cwiseAbs().maxCoeff(),
                                      1e-300);
  const Eigen::VectorXd rhs_l = sys.L.transpose() * vf;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(c);
  for (int k = 0; k < c; ++k)
    if (es.eigenvalues()(k) > cut)
      lambda += es.eigenvectors().col(k) *
                (es.eigenvectors().col(k).dot(rhs_l) / es.eigenvalues()(k));
  sol.qdot = vf - Z * lambda;
  sol.lambda = lambda;
  if (!sol.qdot.allFinite())
    throw std::runtime_error(
        "solve_saddle: singular KKT system (a zero-dissipation mode is "
        "left unconstrained by the model configuration)");
  const double res1 =
      (Dreg * sol.qdot + sys.L * sol.lambda - sys.f).norm();
  if (res1 > 1e-9 * (sys.f.norm() + 1.0))
    throw std::runtime_error("solve_saddle: force-balance residual too large");
  // scale the admissible violation by the velocity the same force would
  // drive without constraints: degenerate directions carry no flow
  const double res2 = (sys.L.transpose() * sol.qdot).norm();
  if (res2 > 1e-8 * (sys.L.norm() * (sol.qdot.norm() + vf.norm()) + 1e-30))
    throw std::runtime_error("solve_saddle: constraint residual too large");
  return sol;
}

Eigen::VectorXd reduced_mobility_eigs(const AssembledSystem& sys, int k) {
  const int n = static_cast<int>(sys.D.rows());
  const int c = static_cast<int>(sys.L.cols());
  Eigen::MatrixXd Dreg = sys.D;
  if (c > 0) {
    // columns of L are constraint gradients; adding c L L^T leaves the
    // constrained mobility unchanged while making D invertible
    const double scale =
        sys.D.trace() / std::max(sys.L.squaredNorm(), 1e-300);
    Dreg += scale * sys.L * sys.L.transpose();
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Dreg);
  Eigen::MatrixXd W;
  if (c > 0) {
    const Eigen::MatrixXd Z = ldlt.solve(sys.L);
    const Eigen::MatrixXd S = sys.L.transpose() * Z;
    const Eigen::LDLT<Eigen::MatrixXd> sld(S);
    W = ldlt.solve(Eigen::MatrixXd::Identity(n, n) -
                   sys.L * sld.solve(Z.transpose()));
  } else {
    W = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
  }
  const double res = (Dreg * W.col(0)).norm();
  if (!W.allFinite() || !std::isfinite(res))
    throw std::runtime_error(
        "reduced_mobility_eigs: dissipation matrix singular after gauge "
        "fixing");
  W = 0.5 * (W + W.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
  const int kk = std::min<int>(k, n);
  Eigen::VectorXd top(kk);
  for (int i = 0; i < kk; ++i) top(i) = es.eigenvalues()(n - 1 - i);
  return top;
}

namespace {

int resolve_threads(int n) {
  if (n > 0) return n;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

struct Rhs {
  Eigen::VectorXd qdot;
  double energy = 0.0, volume = 0.0, area = 0.0;
  double dissipation = 0.0, lambda_max = 0.0;
};

class Integrator {
 public:
  Integrator(const GeneratingCurve& curve, const ModelSpec& spec,
             const IntegrateOptions& opts)
      : spec_(spec), opts_(opts), shape_(curve), dof_(curve.n()) {}

  Trajectory run();

 private:
  static constexpr double kGamma = 0.585786437626904951;  // 2 - sqrt(2)

  ModelSpec spec_;
  IntegrateOptions opts_;
  GeneratingCurve shape_;  // carries the current knot vector
  DofMap dof_;
  Trajectory traj_;

  double V0_ = 0.0, S0_ = 0.0, E0_ = 0.0;
  Eigen::MatrixXd jac_;
  bool have_jac_ = false;
  int steps_since_jac_ = 0;
  int steps_since_reparam_ = 0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double lu_w_ = -1.0;
  bool pending_reparam_flag_ = false;

  GeneratingCurve curve_at(const Eigen::VectorXd& q) const {
    GeneratingCurve c = shape_;
    dof_.apply_state(c, q);
    return c;
  }

  Rhs eval(const Eigen::VectorXd& q) const {
    const GeneratingCurve c = curve_at(q);
    const AssembledSystem sys = assemble(c, spec_);
    const SaddleSolution sol = solve_saddle(sys);
    Rhs out;
    out.qdot = sol.qdot;
    out.energy = sys.energy;
    out.volume = sys.volume;
    out.area = sys.area;
    out.dissipation = sol.qdot.dot(sys.D * sol.qdot);
    out.lambda_max =
        sol.lambda.size() > 0 ? sol.lambda.cwiseAbs().maxCoeff() : 0.0;
    return out;
  }

  double wrms(const Eigen::VectorXd& v, const Eigen::VectorXd& qref) const {
    double acc = 0.0;
    for (int i = 0; i < v.size(); ++i) {
      const double sc = spec_.atol + spec_.rtol * std::abs(qref(i));
      const double r = v(i) / sc;
      acc += r * r;
    }
    return std::sqrt(acc / v.size());
  }

  void compute_jacobian(const Eigen::VectorXd& q, const Rhs& f0) {
    const int n = static_cast<int>(q.size());
    jac_.resize(n, n);
    const int n_threads = resolve_threads(spec_.n_threads);
    std::vector<std::future<void>> futures;
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int j = next.fetch_add(1);
        if (j >= n) return;
        const double h =
            1e-7 * std::max(std::abs(q(j)), 1e-2 * spec_.length_scale);
        Eigen::VectorXd qp = q;
        qp(j) += h;
        const Rhs fp = eval(qp);
        jac_.col(j) = (fp.qdot - f0.qdot) / h;
      }
    };
    for (int t = 1; t < n_threads; ++t)
      futures.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& f : futures) f.get();
    have_jac_ = true;
    steps_since_jac_ = 0;
    lu_w_ = -1.0;
  }

  void factorize(double w) {
    if (w == lu_w_) return;
    const int n = static_cast<int>(jac_.rows());
    lu_.compute(Eigen::MatrixXd::Identity(n, n) - w * jac_);
    lu_w_ = w;
  }

  /// Solves x - w F(x) = rhs by Newton; returns false on non-convergence.
  bool newton(double w, const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
              Rhs& fx, const Eigen::VectorXd& qscale) {
    factorize(w);
    for (int it = 0; it < 8; ++it) {
      try {
        fx = eval(x);
      } catch (const DegenerateGeometry&) {
        return false;
      } catch (const IncompatibleVelocity&) {
        return false;
      }
      const Eigen::VectorXd R = x - w * fx.qdot - rhs;
      const Eigen::VectorXd dx = lu_.solve(-R);
      x += dx;
      if (wrms(dx, qscale) < 0.05) {
        try {
          fx = eval(x);
        } catch (const DegenerateGeometry&) {
          return false;
        } catch (const IncompatibleVelocity&) {
          return false;
        }
        return true;
      }
    }
    return false;
  }

  /// Pull the state back onto the (V0, S0) constraint manifold.
  void project_constraints(Eigen::VectorXd& q) const {
    const bool pv = spec_.volume_constraint;
    const bool ps = spec_.uses_inext() || spec_.area_constraint;
    if (!pv && !ps) return;
    for (int it = 0; it < 4; ++it) {
      const GeneratingCurve c = curve_at(q);
      const GeomCache cache = GeomCache::build(c, spec_.n_gauss);
      std::vector<double> res;
      std::vector<Eigen::VectorXd> rows;
      if (pv) {
        res.push_back(enclosed_volume(c, spec_.n_gauss) - V0_);
        rows.push_back(dof_.reduce(volume_row(cache)));
      }
      if (ps) {
        res.push_back(surface_area(c, spec_.n_gauss) - S0_);
        rows.push_back(dof_.reduce(area_row(cache)));
      }
      const int m = static_cast<int>(res.size());
      double rel = 0.0;
      for (int i = 0; i < m; ++i)
        rel = std::max(rel, std::abs(res[i]) /
                                (std::abs(i == 0 && pv ? V0_ : S0_) + 1e-30));
      if (rel < 1e-12) return;
      Eigen::MatrixXd Jc(m, q.size());
      Eigen::VectorXd cv(m);
      for (int i = 0; i < m; ++i) {
        Jc.row(i) = rows[i].transpose();
        cv(i) = res[i];
      }
      const Eigen::MatrixXd JJt = Jc * Jc.transpose();
      q -= Jc.transpose() * JJt.ldlt().solve(cv);
    }
  }

  double speed_ratio() const {
    const auto bp = shape_.kv.breakpoints();
    double amin = std::numeric_limits<double>::infinity(), amax = 0.0;
    for (std::size_t s = 0; s + 1 < bp.size(); ++s)
      for (int i = 0; i < 4; ++i) {
        const double u = bp[s] + (bp[s + 1] - bp[s]) * (i + 0.5) / 4.0;
        double rz[3][2];
        shape_.eval(u, 1, rz);
        const double a = std::hypot(rz[1][0], rz[1][1]);
        amin = std::min(amin, a);
        amax = std::max(amax, a);
      }
    return amax / amin;
  }

  void record_frame(double t, const Eigen::VectorXd& q, const Rhs& f) {
    TrajectoryFrame fr;
    fr.t = t;
    fr.curve = curve_at(q);
    fr.energy = bending_energy(fr.curve, spec_.elastic, spec_.n_gauss);
    fr.volume = enclosed_volume(fr.curve, spec_.n_gauss);
    fr.area = surface_area(fr.curve, spec_.n_gauss);
    fr.dissipation = f.dissipation;
    fr.lambda_max = f.lambda_max;
    fr.reparameterized = pending_reparam_flag_;
    pending_reparam_flag_ = false;
    if (opts_.eig_stride > 0 &&
        static_cast<int>(traj_.frames.size()) % opts_.eig_stride == 0) {
      const AssembledSystem sys = assemble(fr.curve, spec_);
      const Eigen::VectorXd eigs = reduced_mobility_eigs(sys, 3);
      for (int i = 0; i < std::min<int>(3, eigs.size()); ++i)
        fr.mobility_eigs(i) = eigs(i);
      fr.has_eigs = true;
    }
    traj_.frames.push_back(std::move(fr));
  }
};

Trajectory Integrator::run() {
  const double tc = spec_.t_char();
  Eigen::VectorXd q = dof_.state_from_curve(shape_);
  Rhs f0 = eval(q);
  V0_ = f0.volume;
  S0_ = f0.area;
  E0_ = f0.energy;
  double t = 0.0;
  record_frame(t, q, f0);

  auto stationary = [&](const Rhs& f) {
    const double v = f.qdot.norm() / std::sqrt(double(f.qdot.size()));
    return v * tc / spec_.length_scale < spec_.stationarity_tol;
  };
  if (opts_.stop_at_stationary && stationary(f0)) {
    traj_.stationary = true;
    return traj_;
  }

  double dt = opts_.dt_init;
  if (dt <= 0.0) {
    const double w0 = wrms(f0.qdot, q);
    dt = std::clamp(0.01 / std::max(w0, 1e-300), 1e-10 * tc, 1e-2 * tc);
  }
  const double dt_min = 1e-12 * tc;
  const double e_guard = 1e-12 * (std::abs(E0_) + 1.0);

  // TR-BDF2 coefficients
  const double g = kGamma;
  const double C = (-3.0 * g * g + 4.0 * g - 2.0) / (12.0 * (2.0 - g));
  const double c1 = 1.0 / (g * (2.0 - g));
  const double c2 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));

  int consecutive_rejects = 0;
  while (traj_.accepted + traj_.rejected < opts_.max_steps && t < opts_.t_end) {
    dt = std::min(dt, opts_.t_end - t);
    if (dt < dt_min) {
      record_frame(t, q, f0);
      throw StallError("integrate: step size underflow at t = " +
                       std::to_string(t));
    }
    if (!have_jac_) compute_jacobian(q, f0);
    const double w = 0.5 * g * dt;

    bool ok = true;
    Eigen::VectorXd q1 = q + g * dt * f0.qdot;
    Rhs f1, f2;
    ok = newton(w, q + w * f0.qdot, q1, f1, q);
    Eigen::VectorXd q2;
    if (ok) {
      q2 = q1 + ((1.0 - g) / g) * (q1 - q);
      ok = newton(w, c1 * q1 - c2 * q, q2, f2, q);
    }
    if (!ok) {
      if (steps_since_jac_ > 0) {
        compute_jacobian(q, f0);
      } else {
        dt *= 0.25;
        ++traj_.rejected;
      }
      continue;
    }

    // embedded error estimate, filtered through the stage matrix
    Eigen::VectorXd est =
        2.0 * C * dt *
        (f0.qdot / g - f1.qdot / (g * (1.0 - g)) + f2.qdot / (1.0 - g));
    est = lu_.solve(est);
    const double err = wrms(est, q2.cwiseAbs().cwiseMax(q.cwiseAbs()));

    bool accept = err <= 1.0;
    if (accept && f2.energy > f0.energy + e_guard) accept = false;
    if (!accept) {
      ++traj_.rejected;
      if (++consecutive_rejects >= 2 && steps_since_jac_ > 0)
        compute_jacobian(q, f0);
      dt *= std::clamp(0.9 / std::cbrt(std::max(err, 1.0)), 0.1, 0.5);
      continue;
    }

    consecutive_rejects = 0;
    t += dt;
    q = q2;
    project_constraints(q);
    ++traj_.accepted;
    ++steps_since_jac_;
    ++steps_since_reparam_;
    if (steps_since_jac_ > 25) have_jac_ = false;

    // re-evaluate at the projected state; reused as next step's base
    f0 = eval(q);
    record_frame(t, q, f0);

    if (opts_.stop_at_stationary && stationary(f0)) {
      traj_.stationary = true;
      break;
    }

    if (opts_.allow_reparam) {
      const double ratio = speed_ratio();
      if (ratio > 3.0 || (steps_since_reparam_ >= 200 && ratio > 1.5)) {
        bool rep_ok = false;
        GeneratingCurve refit = reparameterize(curve_at(q), &rep_ok);
        if (rep_ok) {
          shape_ = refit;
          q = dof_.state_from_curve(shape_);
          project_constraints(q);
          have_jac_ = false;
          steps_since_reparam_ = 0;
          ++traj_.reparams;
          pending_reparam_flag_ = true;
          f0 = eval(q);
        } else {
          steps_since_reparam_ = 0;  // retry later instead of every step
        }
      }
    }

    dt *= std::clamp(0.9 / std::cbrt(std::max(err, 1e-4)), 0.2, 5.0);
  }
  return traj_;
}

}  // namespace

Trajectory integrate(const GeneratingCurve& curve, const ModelSpec& spec,
                     const IntegrateOptions& options) {
  Integrator integ(curve, spec, options);
  return integ.run();
}

GeneratingCurve reparameterize(const GeneratingCurve& curve, bool* ok) {
  if (ok) *ok = false;
  const int N = curve.n();
  try {
    const auto samples = sample_meridian(curve, 30);
    const double R0 = std::sqrt(surface_area(curve) / (4.0 * M_PI));
    const ElasticParams ep;
    const double e_old = bending_energy(curve, ep);

    // candidate refits: curvature-adapted knots first, then uniform
    // arclength; a geometric (weakly tangential) fit first, then a more
    // isotropic one that keeps the parameterization closer to arclength
    struct Candidate {
      double alpha, weight;
    };
    for (const Candidate cand : {Candidate{-1.0, 1e-3}, Candidate{0.0, 1e-3},
                                 Candidate{0.0, 0.1}}) {
      const KnotVector kv_new = adapted_knots(curve, N, cand.alpha);
      GeneratingCurve out;
      try {
        out = fit_meridian(samples, kv_new, cand.weight);
        out.validate();
      } catch (const std::exception&) {
        continue;
      }

      // geometric distance from each sample to the refit (foot point)
      double dist = 0.0;
      for (const auto& sm : samples) {
        double u = sm.s, rz[3][2];
        for (int nt = 0; nt < 3; ++nt) {
          out.eval(u, 2, rz);
          const double dr = rz[0][0] - sm.r, dz = rz[0][1] - sm.z;
          const double g = dr * rz[1][0] + dz * rz[1][1];
          const double gp = rz[1][0] * rz[1][0] + rz[1][1] * rz[1][1] +
                            dr * rz[2][0] + dz * rz[2][1];
          if (!(gp > 0.0)) break;
          const double un = u - g / gp;
          if (!(un >= 0.0 && un <= 1.0)) break;
          u = un;
        }
        out.eval(u, 0, rz);
        dist = std::max(dist, std::hypot(rz[0][0] - sm.r, rz[0][1] - sm.z));
      }
      if (dist > 1e-5 * R0) continue;

      const auto new_samples = sample_meridian(out, 8);
      double amin = std::numeric_limits<double>::infinity(), amax = 0.0;
      // speed from the arc-length spacing of the refit samples
      for (std::size_t i = 1; i < new_samples.size(); ++i) {
        const double du = new_samples[i].u - new_samples[i - 1].u;
        const double ds = std::hypot(new_samples[i].r - new_samples[i - 1].r,
                                     new_samples[i].z - new_samples[i - 1].z);
        const double a = ds / du;
        amin = std::min(amin, a);
        amax = std::max(amax, a);
      }
      if (amax / amin > 1.5) continue;

      const double e_new = bending_energy(out, ep);
      if (std::abs(e_new - e_old) > 1e-6 * (std::abs(e_old) + 1e-30))
        continue;
      if (ok) *ok = true;
      return out;
    }
    return curve;
  } catch (const std::exception&) {
    return curve;
  }
}

double relaxation_time(const std::vector<std::pair<double, double>>& t_energy,
                       double fraction) {
  if (t_energy.size() < 2)
    throw std::invalid_argument("relaxation_time: need at least two frames");
  const double E0 = t_energy.front().second;
  const double Einf = t_energy.back().second;
  const double dE = E0 - Einf;
  if (!(dE > 0.0)) return t_energy.front().first;
  const double mono_tol = 1e-6 * dE;
  for (std::size_t i = 1; i < t_energy.size(); ++i)
    if (t_energy[i].second > t_energy[i - 1].second + mono_tol)
      throw std::runtime_error("relaxation_time: non-monotone energy data");
  const double target = Einf + (1.0 - fraction) * dE;
  if (t_energy.front().second <= target) return t_energy.front().first;
  for (std::size_t i = 1; i < t_energy.size(); ++i) {
    if (t_energy[i].second > target) continue;
    const double ta = t_energy[i - 1].first, tb = t_energy[i].first;
    const double ea = t_energy[i - 1].second - Einf;
    const double eb = t_energy[i].second - Einf;
    const double et = target - Einf;
    if (ea > 0.0 && eb > 0.0 && et > 0.0)
      return ta + (tb - ta) * std::log(ea / et) / std::log(ea / eb);
    return ta + (tb - ta) * (ea - et) / std::max(ea - eb, 1e-300);
  }
  return t_energy.back().first;
}

double relaxation_time(const Trajectory& traj, double fraction) {
  if (!traj.stationary)
    throw NotConverged("relaxation_time: trajectory did not reach "
                       "stationarity");
  std::vector<std::pair<double, double>> te;
  te.reserve(traj.frames.size());
  for (const auto& fr : traj.frames) te.emplace_back(fr.t, fr.energy);
  return relaxation_time(te, fraction);
}

std::vector<double> normalize_time(
    const std::vector<std::vector<std::pair<double, double>>>& traces,
    double threshold) {
  auto crossing = [&](const std::vector<std::pair<double, double>>& tr) {
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (tr[i].second > threshold) continue;
      if (i == 0) return tr[0].first;
      const double ta = tr[i - 1].first, tb = tr[i].first;
      const double ea = tr[i - 1].second, eb = tr[i].second;
      return ta + (tb - ta) * (ea - threshold) / std::max(ea - eb, 1e-300);
    }
    throw std::runtime_error("normalize_time: threshold never crossed");
  };
  std::vector<double> factors;
  if (traces.empty()) return factors;
  const double ref = crossing(traces.front());
  for (const auto& tr : traces) {
    const double c = crossing(tr);
    factors.push_back(c > 0.0 ? ref / c : 1.0);
  }
  return factors;
}

}  // namespace ves
