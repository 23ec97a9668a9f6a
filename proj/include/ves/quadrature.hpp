#pragma once

#include <vector>

namespace ves {

/// Abscissae/weights of a quadrature rule on a parameter interval.
struct QuadratureRule {
  std::vector<double> nodes;    // in (0,1)
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  /// Map the rule to the interval [a,b].
  QuadratureRule mapped(double a, double b) const;
};

/// n-point Gauss-Legendre rule for \int_0^1 f(x) dx.
QuadratureRule gauss_legendre(int n);

/// n-point Gauss rule for the log-weighted integral \int_0^1 f(x) (-ln x) dx.
/// Nodes cluster near x = 0. Built once via the Stieltjes procedure on a
/// discretized weight and cached per n.
QuadratureRule gauss_log(int n);

}  // namespace ves
