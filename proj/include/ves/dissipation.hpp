#pragma once

#include <Eigen/Dense>

#include "ves/geometry.hpp"

namespace ves {

struct ViscosityParams {
  double mu = 0.0;      // membrane (2D) viscosity
  double mu_hat = 0.0;  // L2 mathematical viscosity
};

/// Membrane dissipation in the full 3x3 matrix form acting on
/// (v_t', v_t, v_n). Valid for arbitrary surface velocities.
double wmem_full(const GeomCache& cache, double mu,
                 const Eigen::VectorXd& pdot_full);

/// Lagrangian-gauge form 2 mu int (rdot/r)^2 dS, equal to wmem_full on
/// locally inextensible fields. Requires rdot to vanish at the poles.
double wmem_simple(const GeomCache& cache, double mu,
                   const Eigen::VectorXd& pdot_full);

/// Membrane dissipation matrix: the only nonzero entries are
/// D_{Ir,Jr} = int mu B_I B_J 8 pi a / r du over the interior r rows.
Eigen::MatrixXd assemble_Dmem(const GeomCache& cache, double mu);

/// L2 dissipation matrix from W = int (mu_hat/2) v_n^2 dS. A tangential
/// term eps * int (mu_hat/2) v_t^2 dS can be blended in; it leaves the
/// normal (shape) dynamics untouched and removes the near-null tangential
/// modes of the pure v_n form. eps = 0 gives the plain form.
Eigen::MatrixXd assemble_DL2(const GeomCache& cache, double mu_hat,
                             double tangential_eps = 0.0);

}  // namespace ves
