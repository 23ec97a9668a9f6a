#include "ves/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ves {

QuadratureRule QuadratureRule::mapped(double a, double b) const {
  QuadratureRule out;
  const double h = b - a;
  out.nodes.reserve(nodes.size());
  out.weights.reserve(weights.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.nodes.push_back(a + h * nodes[i]);
    out.weights.push_back(h * weights[i]);
  }
  return out;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n, nodes on [-1,1], then map to [0,1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

namespace {

// Dense discretization of the weight -ln(x) on (0,1) for the Stieltjes
// procedure: composite Gauss-Legendre on geometrically shrinking panels.
void log_weight_points(std::vector<double>& x, std::vector<double>& w) {
  const QuadratureRule base = gauss_legendre(30);
  double hi = 1.0;
  for (int k = 0; k < 60; ++k) {
    double lo = hi * 0.5;
    QuadratureRule r = base.mapped(lo, hi);
    for (std::size_t i = 0; i < r.size(); ++i) {
      x.push_back(r.nodes[i]);
      w.push_back(r.weights[i] * (-std::log(r.nodes[i])));
    }
    hi = lo;
  }
}

QuadratureRule build_gauss_log(int n) {
  std::vector<double> x, w;
  log_weight_points(x, w);
  const std::size_t m = x.size();

  // Stieltjes recurrence for monic orthogonal polynomials wrt the weight.
  std::vector<double> alpha(n), beta(n);
  std::vector<double> p_prev(m, 0.0), p_cur(m, 1.0);
  double norm_prev = 0.0;
  double norm_cur = 0.0;
  for (std::size_t i = 0; i < m; ++i) norm_cur += w[i];
  const double mu0 = norm_cur;  // \int_0^1 -ln x dx = 1
  for (int k = 0; k < n; ++k) {
    double xn = 0.0;
    for (std::size_t i = 0; i < m; ++i) xn += w[i] * x[i] * p_cur[i] * p_cur[i];
    alpha[k] = xn / norm_cur;
    beta[k] = (k == 0) ? mu0 : norm_cur / norm_prev;
    if (k + 1 < n || true) {
      std::vector<double> p_next(m);
      for (std::size_t i = 0; i < m; ++i)
        p_next[i] = (x[i] - alpha[k]) * p_cur[i] -
                    (k == 0 ? 0.0 : beta[k]) * p_prev[i];
      p_prev.swap(p_cur);
      p_cur.swap(p_next);
      norm_prev = norm_cur;
      norm_cur = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        norm_cur += w[i] * p_cur[i] * p_cur[i];
    }
  }

  // Golub-Welsch: eigenvalues of the Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    J(k, k) = alpha[k];
    if (k > 0) {
      double b = std::sqrt(beta[k]);
      J(k, k - 1) = b;
      J(k - 1, k) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = es.eigenvalues()(k);
    double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_log(int n) {
  if (n < 1) throw std::invalid_argument("gauss_log: n must be positive");
  static std::map<int, QuadratureRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_log(n)).first;
  return it->second;
}

}  // namespace ves
