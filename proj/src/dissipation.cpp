#include "ves/dissipation.hpp"

#include <cmath>
#include <stdexcept>

namespace ves {

double wmem_full(const GeomCache& cache, double mu,
                 const Eigen::VectorXd& pdot_full) {
  const int N = cache.curve->n();
  double W = 0.0;
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const GeomPoint& g = qp.g;
      const VelocityAt v = velocity_at(qp, N, pdot_full);
      double v_t, v_n;
      decompose_velocity(g, v.rdot, v.zdot, v_t, v_n);
      // v_t' = d/du [(r' rdot + z' zdot)/a]
      const double ap = (g.rp * g.rpp + g.zp * g.zpp) / g.a;
      const double v_tp = (g.rpp * v.rdot + g.rp * v.rdot_p +
                           g.zpp * v.zdot + g.zp * v.zdot_p) /
                              g.a -
                          (g.rp * v.rdot + g.zp * v.zdot) * ap / (g.a * g.a);
      const double a2 = g.a * g.a;
      const double a4 = a2 * a2;
      const double ar2 = a2 * g.r * g.r;
      const double m00 = 1.0 / a2;
      const double m11 = (g.rp * g.rp) / ar2;
      const double m22 = g.H * g.H - 2.0 * g.K;
      const double m02 = -g.b / a4;
      const double m12 = -g.zp * g.rp / ar2;
      const double q = m00 * v_tp * v_tp + m11 * v_t * v_t + m22 * v_n * v_n +
                       2.0 * m02 * v_tp * v_n + 2.0 * m12 * v_t * v_n;
      W += qp.w * mu * q * g.dS;
    }
  return W;
}

double wmem_simple(const GeomCache& cache, double mu,
                   const Eigen::VectorXd& pdot_full) {
  const int N = cache.curve->n();
  if (std::abs(pdot_full(0)) > 0.0 || std::abs(pdot_full(N - 1)) > 0.0)
    throw std::invalid_argument("wmem_simple: rdot must vanish at the poles");
  double W = 0.0;
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const VelocityAt v = velocity_at(qp, N, pdot_full);
      const double ratio = v.rdot / qp.g.r;
      W += qp.w * 2.0 * mu * ratio * ratio * qp.g.dS;
    }
  return W;
}

Eigen::MatrixXd assemble_Dmem(const GeomCache& cache, double mu) {
  const int N = cache.curve->n();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const double c = qp.w * mu * 8.0 * M_PI * qp.g.a / qp.g.r;
      for (int j = 0; j <= qp.cub.degree; ++j) {
        const int I = qp.cub.first + j;
        if (I < 1 || I > N - 2) continue;  // pole coefficients eliminated
        for (int l = 0; l <= qp.cub.degree; ++l) {
          const int J = qp.cub.first + l;
          if (J < 1 || J > N - 2) continue;
          D(I, J) += c * qp.cub.values[0][j] * qp.cub.values[0][l];
        }
      }
    }
  return D;
}

Eigen::MatrixXd assemble_DL2(const GeomCache& cache, double mu_hat,
                             double tangential_eps) {
  const int N = cache.curve->n();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const GeomPoint& g = qp.g;
      const double c = qp.w * mu_hat * g.dS;
      // basis-function components along n and t
      for (int j = 0; j <= qp.cub.degree; ++j) {
        const int I = qp.cub.first + j;
        const double B = qp.cub.values[0][j];
        const double nr = g.n[0] * B, nz = g.n[1] * B;
        const double tr = g.t[0] * B, tz = g.t[1] * B;
        for (int l = 0; l <= qp.cub.degree; ++l) {
          const int J = qp.cub.first + l;
          const double C = qp.cub.values[0][l];
          const double nrj = g.n[0] * C, nzj = g.n[1] * C;
          const double trj = g.t[0] * C, tzj = g.t[1] * C;
          D(I, J) += c * (nr * nrj + tangential_eps * tr * trj);
          D(I, N + J) += c * (nr * nzj + tangential_eps * tr * tzj);
          D(N + I, J) += c * (nz * nrj + tangential_eps * tz * trj);
          D(N + I, N + J) += c * (nz * nzj + tangential_eps * tz * tzj);
        }
      }
    }
  return D;
}

}  // namespace ves
