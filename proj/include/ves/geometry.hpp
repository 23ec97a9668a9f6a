#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

#include "ves/bspline.hpp"
#include "ves/quadrature.hpp"

namespace ves {

struct DegenerateGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cubic B-spline meridian of an axisymmetric closed surface.
///
/// Control points satisfy r_1 = r_N = 0, z_1 = z_2, z_{N-1} = z_N so the
/// surface of revolution is closed with continuous tangents at the poles.
struct GeneratingCurve {
  KnotVector kv;
  std::vector<double> r;
  std::vector<double> z;

  int n() const { return kv.n_basis(); }

  /// Position and parametric derivatives up to the requested order.
  /// rz[0][*] = (r,z), rz[1][*] = (r',z'), rz[2][*] = (r'',z'').
  void eval(double u, int max_order, double rz[3][2]) const;

  /// Checks the pole symmetry conditions and r > 0 on a fine interior grid.
  void validate(int grid = 512) const;
};

/// Pointwise differential geometry of the surface of revolution.
/// With the curve running from the pole of minimal z (u=0) to maximal z
/// (u=1), n = (-z', r')/a points into the enclosed volume; all signed
/// formulas below follow that convention.
struct GeomPoint {
  double u;
  double r, z;
  double rp, zp, rpp, zpp;  // parametric derivatives
  double a;                 // speed sqrt(r'^2 + z'^2)
  double b;                 // -r'' z' + r' z''
  double t[2], n[2];        // unit tangent / normal in the (r,z) plane
  double H;                 // mean curvature (trace convention: sphere 2/R)
  double K;                 // Gaussian curvature
  double dS;                // area weight 2*pi*a*r per du
};

GeomPoint eval_geometry(const GeneratingCurve& curve, double u);

struct PoleLimits {
  double H_south, K_south;
  double H_north, K_north;
};

/// Curvature limits at u=0 and u=1 via L'Hopital (z'/r -> z''/r').
PoleLimits eval_pole_limits(const GeneratingCurve& curve);

/// Composite Gauss quadrature of f(point) * dS over the surface.
double surface_integral(const GeneratingCurve& curve,
                        const std::function<double(const GeomPoint&)>& f,
                        int n_gauss = 8);

/// V = pi * int r^2 z' du.
double enclosed_volume(const GeneratingCurve& curve, int n_gauss = 8);

double surface_area(const GeneratingCurve& curve, int n_gauss = 8);

/// v = 3 sqrt(4 pi) V / S^(3/2), 1 for a sphere.
double reduced_volume(const GeneratingCurve& curve, int n_gauss = 8);

/// Knot vector in normalized arc length adapted to the meridian curvature
/// of the given curve (density 1 + alpha |kappa_m|; alpha < 0 picks it so
/// the densest region gets ~4x the knot density of the flattest).
KnotVector adapted_knots(const GeneratingCurve& curve, int n_ctrl,
                         double alpha = -1.0, int samples_per_span = 30);

/// Dense samples of a curve: parameter, position, normalized arc length,
/// unit tangent/normal and meridian curvature kappa_m = b/a^3.
struct MeridianSample {
  double u, r, z, s;
  double t[2], n[2];
  double kappa_m;
};
std::vector<MeridianSample> sample_meridian(const GeneratingCurve& curve,
                                            int samples_per_span = 30);

/// Least-squares fit of dense meridian samples (taken at parameter
/// sample.s) with anisotropic weighting: deviations along the sample
/// normal carry weight 1, tangential (correspondence) deviations only
/// tangential_weight. The normal residual then reaches the geometric
/// optimum of the basis instead of the parametric-correspondence limit.
GeneratingCurve fit_meridian(const std::vector<MeridianSample>& samples,
                             const KnotVector& kv,
                             double tangential_weight = 1e-3);

/// Tangential/normal decomposition of a nodal rate at a point.
inline void decompose_velocity(const GeomPoint& g, double rdot, double zdot,
                               double& v_t, double& v_n) {
  v_t = (g.rp * rdot + g.zp * zdot) / g.a;
  v_n = (-g.zp * rdot + g.rp * zdot) / g.a;
}

/// Elimination map between the full nodal vector
/// {r_1..r_N, z_1..z_N} and the reduced vector with the pole symmetry
/// conditions built in: {r_2..r_{N-1}, z_12, z_3..z_{N-2}, z_{N-1,N}}.
struct DofMap {
  int N = 0;

  explicit DofMap(int n_ctrl) : N(n_ctrl) {}

  int n_red() const { return 2 * N - 4; }
  int n_full() const { return 2 * N; }

  Eigen::VectorXd expand(const Eigen::VectorXd& q) const;
  Eigen::VectorXd reduce(const Eigen::VectorXd& f_full) const;
  /// Reduced coordinates of an admissible full vector (left inverse of
  /// expand; merged entries are averaged).
  Eigen::VectorXd coords(const Eigen::VectorXd& p_full) const;
  Eigen::MatrixXd reduce_matrix(const Eigen::MatrixXd& full) const;

  Eigen::VectorXd state_from_curve(const GeneratingCurve& c) const;
  void apply_state(GeneratingCurve& c, const Eigen::VectorXd& q) const;
};

/// Geometry, weights and basis tables at all quadrature points of every
/// knot span; the shared input of every assembly routine.
struct GeomCache {
  struct QPoint {
    GeomPoint g;
    double w;        // du weight
    BasisEval cub;   // cubic basis, derivatives to order 2
    BasisEval quad;  // quadratic multiplier basis, order 1
  };
  const GeneratingCurve* curve = nullptr;
  KnotVector quad_kv;
  std::vector<std::vector<QPoint>> spans;

  static GeomCache build(const GeneratingCurve& curve, int n_gauss = 8);
};

/// Velocity interpolant (rdot, zdot) and parametric derivatives at a cached
/// quadrature point, from a full nodal rate vector.
struct VelocityAt {
  double rdot, zdot, rdot_p, zdot_p, rdot_pp, zdot_pp;
};
VelocityAt velocity_at(const GeomCache::QPoint& qp, int N,
                       const Eigen::VectorXd& pdot_full);

}  // namespace ves
