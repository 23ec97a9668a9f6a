#pragma once

#include <cmath>
#include <random>

#include "ves/geometry.hpp"
#include "ves/seeds.hpp"

namespace ves::test {

/// Smooth random closed meridian: a sphere with a small admissible
/// perturbation of the reduced coordinates.
inline GeneratingCurve random_curve(std::mt19937& rng, int n_ctrl = 24,
                                    double amplitude = 0.04) {
  SeedParams sp;
  sp.n_ctrl = n_ctrl;
  const GeneratingCurve base = make_seed("sphere", sp);
  const DofMap dof(n_ctrl);
  const Eigen::VectorXd q0 = dof.state_from_curve(base);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd noise(q0.size());
  for (int i = 0; i < noise.size(); ++i) noise(i) = dist(rng);
  // a large draw can push r through zero; shrink until admissible
  for (double amp = amplitude;; amp *= 0.5) {
    GeneratingCurve curve = base;
    dof.apply_state(curve, q0 + amp * noise);
    try {
      // fine grid: the quadrature reaches u ~ 7e-4, below the default
      // validation resolution
      curve.validate(8192);
      return curve;
    } catch (const std::exception&) {
    }
  }
}

/// Random full nodal rate satisfying the pole symmetry conditions.
inline Eigen::VectorXd random_rate(std::mt19937& rng, int n_ctrl,
                                   double amplitude = 1.0) {
  const DofMap dof(n_ctrl);
  std::normal_distribution<double> dist(0.0, amplitude);
  Eigen::VectorXd q(dof.n_red());
  for (int i = 0; i < q.size(); ++i) q(i) = dist(rng);
  return dof.expand(q);
}

}  // namespace ves::test
