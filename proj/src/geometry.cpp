#include "ves/geometry.hpp"

#include <cmath>

namespace ves {

void GeneratingCurve::eval(double u, int max_order, double rz[3][2]) const {
  const BasisEval be = eval_basis(kv, u, max_order);
  for (int k = 0; k <= max_order; ++k) {
    rz[k][0] = 0.0;
    rz[k][1] = 0.0;
    for (int j = 0; j <= kv.degree; ++j) {
      const int I = be.first + j;
      rz[k][0] += be.values[k][j] * r[I];
      rz[k][1] += be.values[k][j] * z[I];
    }
  }
}

void GeneratingCurve::validate(int grid) const {
  kv.validate();
  const int N = n();
  if (static_cast<int>(r.size()) != N || static_cast<int>(z.size()) != N)
    throw std::invalid_argument("GeneratingCurve: control point count");
  const double scale = std::abs(z.back() - z.front()) + 1e-30;
  auto near = [&](double x, double y) { return std::abs(x - y) <= 1e-12 * scale; };
  if (!near(r.front(), 0.0) || !near(r.back(), 0.0) || !near(z[0], z[1]) ||
      !near(z[N - 2], z[N - 1]))
    throw std::invalid_argument("GeneratingCurve: pole symmetry conditions");
  for (int i = 1; i < grid; ++i) {
    const double u = static_cast<double>(i) / grid;
    double rz[3][2];
    eval(u, 0, rz);
    if (!(rz[0][0] > 0.0))
      throw DegenerateGeometry("GeneratingCurve: r <= 0 at interior u");
  }
}

GeomPoint eval_geometry(const GeneratingCurve& curve, double u) {
  double rz[3][2];
  curve.eval(u, 2, rz);
  GeomPoint g;
  g.u = u;
  g.r = rz[0][0];
  g.z = rz[0][1];
  g.rp = rz[1][0];
  g.zp = rz[1][1];
  g.rpp = rz[2][0];
  g.zpp = rz[2][1];
  if (!(g.r > 0.0))
    throw DegenerateGeometry("eval_geometry: r <= 0 at interior u");
  g.a = std::hypot(g.rp, g.zp);
  g.b = -g.rpp * g.zp + g.rp * g.zpp;
  g.t[0] = g.rp / g.a;
  g.t[1] = g.zp / g.a;
  g.n[0] = -g.zp / g.a;
  g.n[1] = g.rp / g.a;
  g.H = (g.b / (g.a * g.a) + g.zp / g.r) / g.a;
  g.K = g.b * g.zp / (std::pow(g.a, 4) * g.r);
  g.dS = 2.0 * M_PI * g.a * g.r;
  return g;
}

PoleLimits eval_pole_limits(const GeneratingCurve& curve) {
  auto limit = [&](double u) {
    double rz[3][2];
    curve.eval(u, 2, rz);
    const double rp = rz[1][0], zpp = rz[2][1];
    if (std::abs(rp) < 1e-14)
      throw DegenerateGeometry("eval_pole_limits: r' vanishes at a pole");
    const double a = std::abs(rp);
    const double b = rp * zpp;  // z' = 0 at the pole
    const double h1 = b / (a * a * a);
    const double h2 = zpp / (a * rp);
    return std::pair<double, double>{h1 + h2, h1 * h2};
  };
  PoleLimits pl{};
  auto s = limit(0.0);
  auto n = limit(1.0);
  pl.H_south = s.first;
  pl.K_south = s.second;
  pl.H_north = n.first;
  pl.K_north = n.second;
  return pl;
}

double surface_integral(const GeneratingCurve& curve,
                        const std::function<double(const GeomPoint&)>& f,
                        int n_gauss) {
  const QuadratureRule base = gauss_legendre(n_gauss);
  const std::vector<double> bp = curve.kv.breakpoints();
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    const QuadratureRule r = base.mapped(bp[s], bp[s + 1]);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const GeomPoint g = eval_geometry(curve, r.nodes[i]);
      const double v = f(g);
      if (!std::isfinite(v))
        throw std::runtime_error("surface_integral: non-finite integrand");
      total += r.weights[i] * v * g.dS;
    }
  }
  return total;
}

double enclosed_volume(const GeneratingCurve& curve, int n_gauss) {
  const QuadratureRule base = gauss_legendre(n_gauss);
  const std::vector<double> bp = curve.kv.breakpoints();
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    const QuadratureRule r = base.mapped(bp[s], bp[s + 1]);
    for (std::size_t i = 0; i < r.size(); ++i) {
      double rz[3][2];
      curve.eval(r.nodes[i], 1, rz);
      total += r.weights[i] * rz[0][0] * rz[0][0] * rz[1][1];
    }
  }
  return M_PI * total;
}

double surface_area(const GeneratingCurve& curve, int n_gauss) {
  return surface_integral(curve, [](const GeomPoint&) { return 1.0; }, n_gauss);
}

double reduced_volume(const GeneratingCurve& curve, int n_gauss) {
  const double V = enclosed_volume(curve, n_gauss);
  const double S = surface_area(curve, n_gauss);
  if (!(S > 0.0)) throw DegenerateGeometry("reduced_volume: S <= 0");
  return 3.0 * std::sqrt(4.0 * M_PI) * V / std::pow(S, 1.5);
}

std::vector<MeridianSample> sample_meridian(const GeneratingCurve& curve,
                                            int samples_per_span) {
  const int n_spans =
      static_cast<int>(curve.kv.breakpoints().size()) - 1;
  const int m = n_spans * samples_per_span + 1;
  std::vector<MeridianSample> out(m);
  double s = 0.0;
  double prev_a = 0.0, prev_u = 0.0;
  for (int i = 0; i < m; ++i) {
    const double u = static_cast<double>(i) / (m - 1);
    double rz[3][2];
    curve.eval(u, 2, rz);
    MeridianSample& q = out[i];
    q.u = u;
    q.r = rz[0][0];
    q.z = rz[0][1];
    const double rp = rz[1][0], zp = rz[1][1];
    const double a = std::hypot(rp, zp);
    q.t[0] = rp / a;
    q.t[1] = zp / a;
    q.n[0] = -zp / a;
    q.n[1] = rp / a;
    const double b = -rz[2][0] * zp + rp * rz[2][1];
    q.kappa_m = b / (a * a * a);
    if (i > 0) s += 0.5 * (prev_a + a) * (u - prev_u);
    q.s = s;
    prev_a = a;
    prev_u = u;
  }
  for (auto& q : out) q.s /= s;
  out.back().s = 1.0;
  return out;
}

KnotVector adapted_knots(const GeneratingCurve& curve, int n_ctrl,
                         double alpha, int samples_per_span) {
  const auto samples = sample_meridian(curve, samples_per_span);
  std::vector<double> s(samples.size()), kappa(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    s[i] = samples[i].s;
    kappa[i] = samples[i].kappa_m;
  }
  return adapted_knots_from_samples(s, kappa, n_ctrl, curve.kv.degree, alpha);
}

GeneratingCurve fit_meridian(const std::vector<MeridianSample>& samples,
                             const KnotVector& kv, double tangential_weight) {
  const int N = kv.n_basis();
  const int m = static_cast<int>(samples.size());
  const int nred = 2 * N - 4;
  if (2 * m < nred)
    throw std::invalid_argument("fit_meridian: too few samples");
  auto zcol = [&](int I) {
    return I <= 1 ? N - 2 : (I >= N - 2 ? 2 * N - 5 : N - 2 + I - 1);
  };
  std::vector<double> par(m);
  for (int i = 0; i < m; ++i) par[i] = samples[i].s;

  const auto solve_fit = [&]() {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * m, nred);
    Eigen::VectorXd b(2 * m);
    for (int i = 0; i < m; ++i) {
      const MeridianSample& sm = samples[i];
      const BasisEval be = eval_basis(kv, par[i], 0);
      for (int j = 0; j <= be.degree; ++j) {
        const int I = be.first + j;
        const double B = be.values[0][j];
        if (I >= 1 && I <= N - 2) {
          A(2 * i, I - 1) += B * sm.n[0];
          A(2 * i + 1, I - 1) += tangential_weight * B * sm.t[0];
        }
        A(2 * i, zcol(I)) += B * sm.n[1];
        A(2 * i + 1, zcol(I)) += tangential_weight * B * sm.t[1];
      }
      b(2 * i) = sm.r * sm.n[0] + sm.z * sm.n[1];
      b(2 * i + 1) = tangential_weight * (sm.r * sm.t[0] + sm.z * sm.t[1]);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < nred)
      throw std::runtime_error("fit_meridian: rank-deficient system");
    const Eigen::VectorXd q = qr.solve(b);
    GeneratingCurve out;
    out.kv = kv;
    DofMap(N).apply_state(out, q);
    return out;
  };

  GeneratingCurve out = solve_fit();
  // parameter correction: the fixed parameter correspondence limits the
  // normal residual to the interpolation error of the correspondence, not
  // of the shape. Foot-point projection of each sample onto the current
  // fit, then refit, reaches the geometric optimum of the basis.
  for (int round = 0; round < 3; ++round) {
    for (int i = 0; i < m; ++i) {
      if (!(par[i] > 0.0 && par[i] < 1.0)) continue;
      double u = par[i];
      for (int nt = 0; nt < 2; ++nt) {
        double rz[3][2];
        out.eval(u, 2, rz);
        const double dr = rz[0][0] - samples[i].r;
        const double dz = rz[0][1] - samples[i].z;
        const double g = dr * rz[1][0] + dz * rz[1][1];
        const double gp = rz[1][0] * rz[1][0] + rz[1][1] * rz[1][1] +
                          dr * rz[2][0] + dz * rz[2][1];
        if (!(gp > 0.0)) break;
        const double un = u - g / gp;
        if (!(un > 0.0 && un < 1.0)) break;
        u = un;
      }
      par[i] = u;
    }
    out = solve_fit();
  }
  return out;
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& q) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n_full());
  for (int i = 1; i <= N - 2; ++i) full(i) = q(i - 1);
  full(N + 0) = full(N + 1) = q(N - 2);
  for (int i = 2; i <= N - 3; ++i) full(N + i) = q(N - 2 + i - 1);
  full(N + N - 2) = full(N + N - 1) = q(2 * N - 5);
  return full;
}

Eigen::VectorXd DofMap::reduce(const Eigen::VectorXd& f_full) const {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n_red());
  for (int i = 1; i <= N - 2; ++i) q(i - 1) = f_full(i);
  q(N - 2) = f_full(N + 0) + f_full(N + 1);
  for (int i = 2; i <= N - 3; ++i) q(N - 2 + i - 1) = f_full(N + i);
  q(2 * N - 5) = f_full(N + N - 2) + f_full(N + N - 1);
  return q;
}

Eigen::VectorXd DofMap::coords(const Eigen::VectorXd& p_full) const {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n_red());
  for (int i = 1; i <= N - 2; ++i) q(i - 1) = p_full(i);
  q(N - 2) = 0.5 * (p_full(N + 0) + p_full(N + 1));
  for (int i = 2; i <= N - 3; ++i) q(N - 2 + i - 1) = p_full(N + i);
  q(2 * N - 5) = 0.5 * (p_full(N + N - 2) + p_full(N + N - 1));
  return q;
}

Eigen::MatrixXd DofMap::reduce_matrix(const Eigen::MatrixXd& full) const {
  // E^T full E done column-wise through expand/reduce index maps
  const int nr = n_red();
  Eigen::MatrixXd half(n_full(), nr);
  for (int j = 0; j < nr; ++j) {
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(nr);
    ej(j) = 1.0;
    half.col(j) = full * expand(ej);
  }
  Eigen::MatrixXd red(nr, nr);
  for (int j = 0; j < nr; ++j) red.col(j) = reduce(half.col(j));
  return red;
}

Eigen::VectorXd DofMap::state_from_curve(const GeneratingCurve& c) const {
  // state uses the expand convention: merged entries are stored once
  Eigen::VectorXd q(n_red());
  for (int i = 1; i <= N - 2; ++i) q(i - 1) = c.r[i];
  q(N - 2) = c.z[0];
  for (int i = 2; i <= N - 3; ++i) q(N - 2 + i - 1) = c.z[i];
  q(2 * N - 5) = c.z[N - 1];
  return q;
}

void DofMap::apply_state(GeneratingCurve& c, const Eigen::VectorXd& q) const {
  const Eigen::VectorXd full = expand(q);
  c.r.assign(N, 0.0);
  c.z.assign(N, 0.0);
  for (int i = 0; i < N; ++i) {
    c.r[i] = full(i);
    c.z[i] = full(N + i);
  }
}

GeomCache GeomCache::build(const GeneratingCurve& curve, int n_gauss) {
  GeomCache cache;
  cache.curve = &curve;
  cache.quad_kv = derived_quadratic(curve.kv);
  const QuadratureRule base = gauss_legendre(n_gauss);
  const std::vector<double> bp = curve.kv.breakpoints();
  cache.spans.resize(bp.size() - 1);
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    const QuadratureRule r = base.mapped(bp[s], bp[s + 1]);
    auto& span = cache.spans[s];
    span.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      span[i].g = eval_geometry(curve, r.nodes[i]);
      span[i].w = r.weights[i];
      span[i].cub = eval_basis(curve.kv, r.nodes[i], 2);
      span[i].quad = eval_basis(cache.quad_kv, r.nodes[i], 1);
    }
  }
  return cache;
}

VelocityAt velocity_at(const GeomCache::QPoint& qp, int N,
                       const Eigen::VectorXd& pdot_full) {
  VelocityAt v{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  for (int j = 0; j <= qp.cub.degree; ++j) {
    const int I = qp.cub.first + j;
    v.rdot += qp.cub.values[0][j] * pdot_full(I);
    v.zdot += qp.cub.values[0][j] * pdot_full(N + I);
    v.rdot_p += qp.cub.values[1][j] * pdot_full(I);
    v.zdot_p += qp.cub.values[1][j] * pdot_full(N + I);
    v.rdot_pp += qp.cub.values[2][j] * pdot_full(I);
    v.zdot_pp += qp.cub.values[2][j] * pdot_full(N + I);
  }
  return v;
}

}  // namespace ves
