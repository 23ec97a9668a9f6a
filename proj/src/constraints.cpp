#include "ves/constraints.hpp"

#include <cmath>

namespace ves {

Eigen::VectorXd volume_row(const GeomCache& cache) {
  const int N = cache.curve->n();
  Eigen::VectorXd row = Eigen::VectorXd::Zero(2 * N);
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const GeomPoint& g = qp.g;
      const double c = qp.w * 2.0 * M_PI * g.r;
      for (int j = 0; j <= qp.cub.degree; ++j) {
        const int I = qp.cub.first + j;
        const double B = qp.cub.values[0][j];
        row(I) += c * g.zp * B;
        row(N + I) -= c * g.rp * B;
      }
    }
  return row;
}

Eigen::VectorXd area_row(const GeomCache& cache) {
  const int N = cache.curve->n();
  Eigen::VectorXd row = Eigen::VectorXd::Zero(2 * N);
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const GeomPoint& g = qp.g;
      const double c = qp.w * 2.0 * M_PI;
      for (int j = 0; j <= qp.cub.degree; ++j) {
        const int I = qp.cub.first + j;
        const double B = qp.cub.values[0][j];
        const double Bp = qp.cub.values[1][j];
        row(I) += c * (g.r * g.rp * Bp / g.a + g.a * B);
        row(N + I) += c * g.r * g.zp * Bp / g.a;
      }
    }
  return row;
}

Eigen::MatrixXd inext_block(const GeomCache& cache) {
  const int N = cache.curve->n();
  const int M = cache.quad_kv.n_basis();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * N, M);
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const GeomPoint& g = qp.g;
      const double a2 = g.a * g.a;
      for (int j = 0; j <= qp.cub.degree; ++j) {
        const int I = qp.cub.first + j;
        const double B = qp.cub.values[0][j];
        const double Bp = qp.cub.values[1][j];
        // dS cancels the 1/r of B_I/r: regular at the poles
        const double fr =
            -qp.w * (Bp * g.rp / a2 * g.dS + B * 2.0 * M_PI * g.a);
        const double fz = -qp.w * Bp * g.zp / a2 * g.dS;
        for (int l = 0; l <= qp.quad.degree; ++l) {
          const int J = qp.quad.first + l;
          const double Bh = qp.quad.values[0][l];
          L(I, J) += fr * Bh;
          L(N + I, J) += fz * Bh;
        }
      }
    }
  return L;
}

Eigen::VectorXd gauge_row(const GeomCache& cache) {
  const int N = cache.curve->n();
  Eigen::VectorXd row = Eigen::VectorXd::Zero(2 * N);
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const double c = qp.w * qp.g.dS;
      for (int j = 0; j <= qp.cub.degree; ++j)
        row(N + qp.cub.first + j) += c * qp.cub.values[0][j];
    }
  return row;
}

}  // namespace ves
