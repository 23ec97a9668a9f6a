#include "ves/elastica.hpp"

#include <cmath>

namespace ves {

double bending_energy(const GeomCache& cache, const ElasticParams& p) {
  double E = 0.0;
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const double h = qp.g.H - p.C0;
      E += qp.w * 0.5 * p.kappa * h * h * qp.g.dS;
    }
  return E;
}

double bending_energy(const GeneratingCurve& curve, const ElasticParams& p,
                      int n_gauss) {
  return surface_integral(
      curve,
      [&](const GeomPoint& g) {
        const double h = g.H - p.C0;
        return 0.5 * p.kappa * h * h;
      },
      n_gauss);
}

namespace {

/// Partial derivatives of H wrt (r, r', r'', z', z'') at a point.
struct HPartials {
  double dr, drp, drpp, dzp, dzpp;
};

inline HPartials h_partials(const GeomPoint& g) {
  const double a2 = g.a * g.a;
  const double a3 = a2 * g.a;
  const double a5 = a3 * a2;
  HPartials d;
  d.dr = -g.zp / (g.a * g.r * g.r);
  d.drp = g.zpp / a3 - 3.0 * g.b * g.rp / a5 - g.zp * g.rp / (a3 * g.r);
  d.drpp = -g.zp / a3;
  d.dzp = -g.rpp / a3 - 3.0 * g.b * g.zp / a5 + 1.0 / (g.a * g.r) -
          g.zp * g.zp / (a3 * g.r);
  d.dzpp = g.rp / a3;
  return d;
}

}  // namespace

double energy_release_rate(const GeomCache& cache, const ElasticParams& p,
                           const Eigen::VectorXd& delta_full) {
  const int N = cache.curve->n();
  double G = 0.0;
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const GeomPoint& g = qp.g;
      const VelocityAt v = velocity_at(qp, N, delta_full);
      const HPartials d = h_partials(g);
      const double h = g.H - p.C0;
      const double dH = d.dr * v.rdot + d.drp * v.rdot_p + d.drpp * v.rdot_pp +
                        d.dzp * v.zdot_p + d.dzpp * v.zdot_pp;
      // variation of the area measure: d(a r) = r (r' dr' + z' dz')/a + a dr
      const double dar =
          g.r * (g.rp * v.rdot_p + g.zp * v.zdot_p) / g.a + g.a * v.rdot;
      G -= qp.w * (p.kappa * h * dH * g.dS + M_PI * p.kappa * h * h * dar);
    }
  return G;
}

Eigen::VectorXd nodal_forces(const GeomCache& cache, const ElasticParams& p) {
  const int N = cache.curve->n();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * N);
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const GeomPoint& g = qp.g;
      const HPartials d = h_partials(g);
      const double h = g.H - p.C0;
      const double c1 = p.kappa * h * g.dS;        // weight of dH
      const double c2 = M_PI * p.kappa * h * h;    // weight of d(ar)
      for (int j = 0; j <= qp.cub.degree; ++j) {
        const int I = qp.cub.first + j;
        const double B = qp.cub.values[0][j];
        const double Bp = qp.cub.values[1][j];
        const double Bpp = qp.cub.values[2][j];
        f(I) -= qp.w * (c1 * (d.dr * B + d.drp * Bp + d.drpp * Bpp) +
                        c2 * (g.r * g.rp * Bp / g.a + g.a * B));
        f(N + I) -= qp.w * (c1 * (d.dzp * Bp + d.dzpp * Bpp) +
                            c2 * (g.r * g.zp * Bp / g.a));
      }
    }
  // eliminated pole coefficients carry no force
  f(0) = f(N - 1) = 0.0;
  return f;
}

Eigen::VectorXd pole_load(int n_ctrl, double F_north, double F_south) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * n_ctrl);
  // zdot(1) = zdot_N and zdot(0) = zdot_1 for a clamped basis
  f(2 * n_ctrl - 1) += F_north;
  f(n_ctrl) -= F_south;
  return f;
}

}  // namespace ves
