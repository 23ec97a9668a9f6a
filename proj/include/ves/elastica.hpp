#pragma once

#include <Eigen/Dense>

#include "ves/geometry.hpp"

namespace ves {

struct ElasticParams {
  double kappa = 1.0;  // bending modulus
  double C0 = 0.0;     // spontaneous curvature (trace convention)
};

/// Helfrich-Canham bending energy (kappa/2) int (H - C0)^2 dS.
/// The Gaussian term is a topological constant for closed surfaces and is
/// not carried.
double bending_energy(const GeomCache& cache, const ElasticParams& p);
double bending_energy(const GeneratingCurve& curve, const ElasticParams& p,
                      int n_gauss = 8);

/// Energy release rate G = -dPi in the direction of an admissible full
/// nodal variation, from the exact variation of the parametric energy
/// (second-derivative form; no third derivatives of the curve appear).
double energy_release_rate(const GeomCache& cache, const ElasticParams& p,
                           const Eigen::VectorXd& delta_full);

/// Full nodal force vector: f_{Ir} = G[B_I, 0], f_{Iz} = G[0, B_I].
/// Rows belonging to the eliminated pole coefficients are left zero.
Eigen::VectorXd nodal_forces(const GeomCache& cache, const ElasticParams& p);

/// Point force along z at the north pole (u=1), optionally balanced by the
/// opposite force at the south pole. Returns an additive full force vector
/// whose power is F * zdot(1) (- F * zdot(0)).
Eigen::VectorXd pole_load(int n_ctrl, double F_north, double F_south = 0.0);

}  // namespace ves
