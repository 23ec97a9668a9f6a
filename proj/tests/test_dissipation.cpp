#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ves/dissipation.hpp"
#include "ves/quadrature.hpp"

using namespace ves;

namespace {

/// Evaluate a full nodal rate field and derivatives at a parameter.
struct RateAt {
  double rdot, zdot, rdot_p, zdot_p;
};

RateAt eval_rate(const GeneratingCurve& c, const Eigen::VectorXd& pdot,
                 double u) {
  const int N = c.n();
  const BasisEval be = eval_basis(c.kv, u, 1);
  RateAt v{0, 0, 0, 0};
  for (int j = 0; j <= be.degree; ++j) {
    const int I = be.first + j;
    v.rdot += be.values[0][j] * pdot(I);
    v.zdot += be.values[0][j] * pdot(N + I);
    v.rdot_p += be.values[1][j] * pdot(I);
    v.zdot_p += be.values[1][j] * pdot(N + I);
  }
  return v;
}

/// The 3x3 membrane dissipation density on (v_t', v_t, v_n).
double full_density(const GeomPoint& g, double v_tp, double v_t, double v_n) {
  const double a2 = g.a * g.a, a4 = a2 * a2, ar2 = a2 * g.r * g.r;
  const double m00 = 1.0 / a2;
  const double m11 = g.rp * g.rp / ar2;
  const double m22 = g.H * g.H - 2.0 * g.K;
  const double m02 = -g.b / a4;
  const double m12 = -g.zp * g.rp / ar2;
  return m00 * v_tp * v_tp + m11 * v_t * v_t + m22 * v_n * v_n +
         2.0 * m02 * v_tp * v_n + 2.0 * m12 * v_t * v_n;
}

}  // namespace

TEST_CASE("membrane dissipation matrix is PSD with rank 2") {
  // the 3x3 density matrix has the axial rigid translation in its kernel
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uni(0.02, 0.98);
  for (int trial = 0; trial < 10; ++trial) {
    const GeneratingCurve c = test::random_curve(rng, 20, 0.05);
    for (int k = 0; k < 10; ++k) {
      const GeomPoint g = eval_geometry(c, uni(rng));
      Eigen::Matrix3d M;
      const double a2 = g.a * g.a, a4 = a2 * a2, ar2 = a2 * g.r * g.r;
      M << 1.0 / a2, 0.0, -g.b / a4,
           0.0, g.rp * g.rp / ar2, -g.zp * g.rp / ar2,
           -g.b / a4, -g.zp * g.rp / ar2, g.H * g.H - 2.0 * g.K;
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
      const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
      CHECK(es.eigenvalues()(0) > -1e-12 * scale);  // PSD
      CHECK(es.eigenvalues()(1) > 1e-12 * scale);   // rank exactly 2
      CHECK(std::abs(es.eigenvalues()(0)) < 1e-10 * scale);
      // null vector: rigid z translation zdot = 1 gives
      // v_t = z'/a, v_t' = (z'/a)', v_n = r'/a
      const double ap = (g.rp * g.rpp + g.zp * g.zpp) / g.a;
      const double v_t = g.zp / g.a;
      const double v_tp = g.zpp / g.a - g.zp * ap / a2;
      const double v_n = g.rp / g.a;
      CHECK(std::abs(full_density(g, v_tp, v_t, v_n)) < 1e-12);
    }
  }
}

TEST_CASE("Lagrangian-gauge inextensibility identity, pointwise") {
  // (1/(ar)) (r v_t)' - H v_n  ==  (r' rdot' + z' zdot')/a^2 + rdot/r
  std::mt19937 rng(32);
  std::uniform_real_distribution<double> uni(0.02, 0.98);
  for (int trial = 0; trial < 20; ++trial) {
    const int N = 20;
    const GeneratingCurve c = test::random_curve(rng, N, 0.05);
    const Eigen::VectorXd pdot = test::random_rate(rng, N);
    for (int k = 0; k < 10; ++k) {
      const double u = uni(rng);
      const GeomPoint g = eval_geometry(c, u);
      const RateAt v = eval_rate(c, pdot, u);
      double v_t, v_n;
      decompose_velocity(g, v.rdot, v.zdot, v_t, v_n);
      const double ap = (g.rp * g.rpp + g.zp * g.zpp) / g.a;
      const double v_tp =
          (g.rpp * v.rdot + g.rp * v.rdot_p + g.zpp * v.zdot +
           g.zp * v.zdot_p) / g.a -
          (g.rp * v.rdot + g.zp * v.zdot) * ap / (g.a * g.a);
      const double lhs =
          (g.rp * v_t + g.r * v_tp) / (g.a * g.r) - g.H * v_n;
      const double rhs =
          (g.rp * v.rdot_p + g.zp * v.zdot_p) / (g.a * g.a) + v.rdot / g.r;
      const double scale =
          std::abs(lhs) + std::abs(rhs) + std::abs(g.H * v_n) + 1.0;
      CHECK(std::abs(lhs - rhs) < 1e-12 * scale);
    }
  }
}

TEST_CASE("full and simple dissipation densities agree on "
          "inextensibility-consistent data") {
  // substituting v_t' = a H v_n - (r'/r) v_t into the 3x3 form collapses
  // it to 2 (rdot/r)^2 pointwise
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> uni(0.02, 0.98);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    const GeneratingCurve c = test::random_curve(rng, 20, 0.05);
    double full_int = 0.0, simple_int = 0.0;
    const GeomCache cache = GeomCache::build(c);
    for (const auto& span : cache.spans)
      for (const auto& qp : span) {
        const GeomPoint& g = qp.g;
        const double v_t = dist(rng), v_n = dist(rng);
        const double v_tp = g.a * g.H * v_n - g.rp / g.r * v_t;
        const double rdot = (g.rp * v_t - g.zp * v_n) / g.a;
        const double q_full = full_density(g, v_tp, v_t, v_n);
        const double q_simple = 2.0 * (rdot / g.r) * (rdot / g.r);
        CHECK(std::abs(q_full - q_simple) <
              1e-10 * (std::abs(q_full) + std::abs(q_simple) + 1.0));
        full_int += qp.w * q_full * g.dS;
        simple_int += qp.w * q_simple * g.dS;
      }
    CHECK(std::abs(full_int - simple_int) <
          1e-10 * (std::abs(full_int) + 1.0));
  }
}

TEST_CASE("wmem_full matches an independent dense quadrature") {
  std::mt19937 rng(34);
  const int N = 20;
  const GeneratingCurve c = test::random_curve(rng, N, 0.05);
  const Eigen::VectorXd pdot = test::random_rate(rng, N);
  // same Gauss order as the reference so only the assembly differs
  const GeomCache cache = GeomCache::build(c, 24);
  const double W = wmem_full(cache, 1.7, pdot);

  const QuadratureRule q = gauss_legendre(24);
  const auto bp = c.kv.breakpoints();
  double Wref = 0.0;
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    const QuadratureRule m = q.mapped(bp[s], bp[s + 1]);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const GeomPoint g = eval_geometry(c, m.nodes[i]);
      const RateAt v = eval_rate(c, pdot, m.nodes[i]);
      double v_t, v_n;
      decompose_velocity(g, v.rdot, v.zdot, v_t, v_n);
      const double ap = (g.rp * g.rpp + g.zp * g.zpp) / g.a;
      const double v_tp =
          (g.rpp * v.rdot + g.rp * v.rdot_p + g.zpp * v.zdot +
           g.zp * v.zdot_p) / g.a -
          (g.rp * v.rdot + g.zp * v.zdot) * ap / (g.a * g.a);
      Wref += m.weights[i] * 1.7 * full_density(g, v_tp, v_t, v_n) * g.dS;
    }
  }
  CHECK(W == doctest::Approx(Wref).epsilon(1e-8));
}

TEST_CASE("wmem_simple matches the Lagrangian-gauge integral") {
  std::mt19937 rng(35);
  const int N = 20;
  const GeneratingCurve c = test::random_curve(rng, N, 0.05);
  const Eigen::VectorXd pdot = test::random_rate(rng, N);
  // same Gauss order as the reference so only the assembly differs
  const GeomCache cache = GeomCache::build(c, 24);
  const double W = wmem_simple(cache, 0.8, pdot);

  double Wref = 0.0;
  const QuadratureRule q = gauss_legendre(24);
  const auto bp = c.kv.breakpoints();
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    const QuadratureRule m = q.mapped(bp[s], bp[s + 1]);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const GeomPoint g = eval_geometry(c, m.nodes[i]);
      const RateAt v = eval_rate(c, pdot, m.nodes[i]);
      Wref += m.weights[i] * 2.0 * 0.8 * (v.rdot / g.r) * (v.rdot / g.r) *
              g.dS;
    }
  }
  CHECK(W == doctest::Approx(Wref).epsilon(1e-8));

  Eigen::VectorXd bad = pdot;
  bad(0) = 0.1;
  CHECK_THROWS_AS(wmem_simple(cache, 1.0, bad), std::invalid_argument);
}

TEST_CASE("membrane dissipation matrix quadratic form") {
  // pdot^T D pdot = 2 W_simple (Rayleigh convention)
  std::mt19937 rng(36);
  const int N = 18;
  const GeneratingCurve c = test::random_curve(rng, N, 0.05);
  const GeomCache cache = GeomCache::build(c);
  const Eigen::MatrixXd D = assemble_Dmem(cache, 1.3);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd pdot = test::random_rate(rng, N);
    const double quad = pdot.dot(D * pdot);
    CHECK(quad ==
          doctest::Approx(2.0 * wmem_simple(cache, 1.3, pdot)).epsilon(1e-11));
  }
  // symmetric positive semidefinite
  CHECK((D - D.transpose()).norm() < 1e-12 * D.norm());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
  CHECK(es.eigenvalues().minCoeff() > -1e-12 * es.eigenvalues().maxCoeff());
}

TEST_CASE("L2 dissipation matrix quadratic form") {
  std::mt19937 rng(37);
  const int N = 18;
  const GeneratingCurve c = test::random_curve(rng, N, 0.05);
  const GeomCache cache = GeomCache::build(c);
  const double eps = 0.05;
  const Eigen::MatrixXd D = assemble_DL2(cache, 2.0, eps);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd pdot = test::random_rate(rng, N);
    double Wref = 0.0;
    for (const auto& span : cache.spans)
      for (const auto& qp : span) {
        const VelocityAt v = velocity_at(qp, N, pdot);
        double v_t, v_n;
        decompose_velocity(qp.g, v.rdot, v.zdot, v_t, v_n);
        Wref += qp.w * 2.0 * (v_n * v_n + eps * v_t * v_t) * qp.g.dS;
      }
    CHECK(pdot.dot(D * pdot) == doctest::Approx(Wref).epsilon(1e-11));
  }
  CHECK((D - D.transpose()).norm() < 1e-12 * D.norm());
}
