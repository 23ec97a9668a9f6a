#pragma once

#include <array>
#include <vector>

namespace ves {

/// Clamped knot vector on [0,1] with (degree+1)-fold end knots.
struct KnotVector {
  int degree = 3;
  std::vector<double> knots;

  int n_basis() const { return static_cast<int>(knots.size()) - degree - 1; }

  /// Index i with knots[i] <= u < knots[i+1] (clamped to the last
  /// nonempty span for u = 1).
  int find_span(double u) const;

  /// Unique knot values (span boundaries), including 0 and 1.
  std::vector<double> breakpoints() const;

  /// Throws std::invalid_argument if the clamping/monotonicity invariants
  /// are violated.
  void validate() const;

  bool operator==(const KnotVector&) const = default;
};

/// Nonzero basis values and derivatives at one parameter.
///
/// values[k][j] is the k-th derivative of basis function (first + j),
/// j = 0..degree. Order-0 values sum to 1, derivative rows sum to 0.
struct BasisEval {
  int span = 0;
  int first = 0;
  int degree = 0;
  int max_order = 0;
  std::array<std::array<double, 4>, 3> values{};
};

/// Open (clamped) knot vector with equispaced interior knots.
KnotVector open_knots(int n_ctrl, int degree);

/// Clamped knot vector with the given interior knots.
KnotVector knots_from_interior(const std::vector<double>& interior, int degree);

/// Degree-2 basis obtained from the same knot sequence as a cubic knot
/// vector (first and last knot dropped). Has n_basis = N - 1.
KnotVector derived_quadratic(const KnotVector& cubic);

/// Cox-de Boor evaluation of the degree+1 nonzero basis functions and
/// their derivatives up to max_order (<= 2) at u in [0,1].
BasisEval eval_basis(const KnotVector& kv, double u, int max_order);

/// Symmetry conditions of a closed axisymmetric generating curve in the
/// B-spline representation: r_1 = r_N = 0, z_1 = z_2, z_{N-1} = z_N.
struct CurveFit {
  std::vector<double> r;
  std::vector<double> z;
};

struct FitSample {
  double u;
  double r;
  double z;
};

/// Least-squares fit of (r,z) samples in the given basis, with the pole
/// symmetry conditions imposed exactly by elimination.
/// Throws std::runtime_error on a rank-deficient system.
CurveFit fit_curve(const std::vector<FitSample>& samples, const KnotVector& kv);

/// Interior knots equidistributing rho(s) ds with rho = 1 + alpha*|kappa|,
/// from dense samples of normalized arc length s in [0,1] and meridian
/// curvature kappa. alpha < 0 selects it so the densest region gets about
/// 4x the knot density of the flattest one.
KnotVector adapted_knots_from_samples(const std::vector<double>& s,
                                      const std::vector<double>& kappa,
                                      int n_ctrl, int degree, double alpha);

}  // namespace ves
