#include "ves/bspline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ves {

int KnotVector::find_span(double u) const {
  const int n = n_basis();
  if (u >= knots[n]) return n - 1;
  if (u <= knots[degree]) return degree;
  // binary search in [degree, n)
  int lo = degree, hi = n;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (u < knots[mid])
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> bp;
  for (double k : knots)
    if (bp.empty() || k > bp.back()) bp.push_back(k);
  return bp;
}

void KnotVector::validate() const {
  if (degree < 1) throw std::invalid_argument("KnotVector: degree < 1");
  const int n = n_basis();
  if (n < degree + 1) throw std::invalid_argument("KnotVector: too few knots");
  for (int i = 0; i <= degree; ++i) {
    if (knots[i] != 0.0)
      throw std::invalid_argument("KnotVector: start not clamped at 0");
    if (knots[knots.size() - 1 - i] != 1.0)
      throw std::invalid_argument("KnotVector: end not clamped at 1");
  }
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (knots[i] < knots[i - 1])
      throw std::invalid_argument("KnotVector: knots not non-decreasing");
  for (int i = degree + 1; i < n; ++i)
    if (knots[i] <= 0.0 || knots[i] >= 1.0)
      throw std::invalid_argument("KnotVector: interior knot outside (0,1)");
}

KnotVector open_knots(int n_ctrl, int degree) {
  if (n_ctrl < degree + 1)
    throw std::invalid_argument("open_knots: n_ctrl < degree+1");
  KnotVector kv;
  kv.degree = degree;
  const int n_int = n_ctrl - degree - 1;
  kv.knots.assign(degree + 1, 0.0);
  for (int i = 1; i <= n_int; ++i)
    kv.knots.push_back(static_cast<double>(i) / (n_int + 1));
  kv.knots.insert(kv.knots.end(), degree + 1, 1.0);
  return kv;
}

KnotVector knots_from_interior(const std::vector<double>& interior,
                               int degree) {
  KnotVector kv;
  kv.degree = degree;
  kv.knots.assign(degree + 1, 0.0);
  kv.knots.insert(kv.knots.end(), interior.begin(), interior.end());
  kv.knots.insert(kv.knots.end(), degree + 1, 1.0);
  kv.validate();
  return kv;
}

KnotVector derived_quadratic(const KnotVector& cubic) {
  if (cubic.degree != 3)
    throw std::invalid_argument("derived_quadratic: expects a cubic basis");
  KnotVector kv;
  kv.degree = 2;
  kv.knots.assign(cubic.knots.begin() + 1, cubic.knots.end() - 1);
  return kv;
}

BasisEval eval_basis(const KnotVector& kv, double u, int max_order) {
  if (u < 0.0 || u > 1.0)
    throw std::invalid_argument("eval_basis: u outside [0,1]");
  if (max_order < 0 || max_order > 2)
    throw std::invalid_argument("eval_basis: max_order outside 0..2");
  const int p = kv.degree;
  const int span = kv.find_span(u);

  // Piegl & Tiller, algorithm A2.3.
  double ndu[5][5], left[5], right[5], a[2][5];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - kv.knots[span + 1 - j];
    right[j] = kv.knots[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }

  BasisEval out;
  out.span = span;
  out.first = span - p;
  out.degree = p;
  out.max_order = max_order;
  for (int j = 0; j <= p; ++j) out.values[0][j] = ndu[j][p];

  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= max_order; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      out.values[k][r] = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= max_order; ++k) {
    for (int j = 0; j <= p; ++j) out.values[k][j] *= factor;
    factor *= (p - k);
  }
  return out;
}

CurveFit fit_curve(const std::vector<FitSample>& samples,
                   const KnotVector& kv) {
  kv.validate();
  const int N = kv.n_basis();
  const int m = static_cast<int>(samples.size());
  const int nr = N - 2;  // free r coefficients
  const int nz = N - 2;  // free z coefficients after merging the pole pairs
  if (m < std::max(nr, nz))
    throw std::invalid_argument("fit_curve: fewer samples than coefficients");

  Eigen::MatrixXd Ar = Eigen::MatrixXd::Zero(m, nr);
  Eigen::MatrixXd Az = Eigen::MatrixXd::Zero(m, nz);
  Eigen::VectorXd br(m), bz(m);
  for (int q = 0; q < m; ++q) {
    const BasisEval be = eval_basis(kv, samples[q].u, 0);
    for (int j = 0; j <= kv.degree; ++j) {
      const int I = be.first + j;
      const double B = be.values[0][j];
      if (I >= 1 && I <= N - 2) Ar(q, I - 1) += B;
      // z columns: {0,1} -> 0, I -> I-1 for 2..N-3, {N-2,N-1} -> N-3
      int col = (I <= 1) ? 0 : (I >= N - 2 ? nz - 1 : I - 1);
      Az(q, col) += B;
    }
    br(q) = samples[q].r;
    bz(q) = samples[q].z;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_r(Ar);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_z(Az);
  if (qr_r.rank() < nr || qr_z.rank() < nz)
    throw std::runtime_error("fit_curve: rank-deficient normal system");
  const Eigen::VectorXd cr = qr_r.solve(br);
  const Eigen::VectorXd cz = qr_z.solve(bz);

  CurveFit fit;
  fit.r.assign(N, 0.0);
  fit.z.assign(N, 0.0);
  for (int i = 1; i <= N - 2; ++i) fit.r[i] = cr(i - 1);
  fit.z[0] = fit.z[1] = cz(0);
  for (int i = 2; i <= N - 3; ++i) fit.z[i] = cz(i - 1);
  fit.z[N - 2] = fit.z[N - 1] = cz(nz - 1);
  return fit;
}

KnotVector adapted_knots_from_samples(const std::vector<double>& s,
                                      const std::vector<double>& kappa,
                                      int n_ctrl, int degree, double alpha) {
  if (s.size() != kappa.size() || s.size() < 2)
    throw std::invalid_argument("adapted_knots: bad sample arrays");
  if (n_ctrl < degree + 1)
    throw std::invalid_argument("adapted_knots: n_ctrl < degree+1");
  const std::size_t m = s.size();

  if (alpha < 0.0) {
    double kmin = std::abs(kappa[0]), kmax = kmin;
    for (double k : kappa) {
      kmin = std::min(kmin, std::abs(k));
      kmax = std::max(kmax, std::abs(k));
    }
    // target density ratio ~4 between the most and least curved regions
    if (kmax - 4.0 * kmin > 1e-12 * (kmax + 1.0))
      alpha = 3.0 / (kmax - 4.0 * kmin);
    else
      alpha = (kmax > 1e-12) ? 1.0 / kmax : 0.0;
  }

  // cumulative density integral (trapezoid)
  std::vector<double> F(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) {
    const double rho0 = 1.0 + alpha * std::abs(kappa[i - 1]);
    const double rho1 = 1.0 + alpha * std::abs(kappa[i]);
    F[i] = F[i - 1] + 0.5 * (rho0 + rho1) * (s[i] - s[i - 1]);
  }
  const double Ftot = F.back();

  const int n_int = n_ctrl - degree - 1;
  std::vector<double> interior(n_int);
  std::size_t idx = 0;
  for (int j = 0; j < n_int; ++j) {
    const double target = Ftot * (j + 1) / (n_int + 1);
    while (idx + 2 < m && F[idx + 1] < target) ++idx;
    const double t = (target - F[idx]) / std::max(F[idx + 1] - F[idx], 1e-300);
    interior[j] = s[idx] + t * (s[idx + 1] - s[idx]);
  }
  // enforce strict monotonicity inside (0,1)
  const double eps = 1e-10;
  for (int j = 0; j < n_int; ++j) {
    double lo = (j == 0) ? eps : interior[j - 1] + eps;
    interior[j] = std::clamp(interior[j], lo, 1.0 - eps * (n_int - j));
  }
  return knots_from_interior(interior, degree);
}

}  // namespace ves
