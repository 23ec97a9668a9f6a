#pragma once

#include <Eigen/Dense>

#include "ves/geometry.hpp"

namespace ves {

/// Complete elliptic integrals K(m), E(m) of parameter m = k^2, by the
/// arithmetic-geometric mean (machine precision).
void comp_ellint_agm(double m, double& K, double& E);

/// 2x2 ring kernel: azimuthal integral of the 3D Stokeslet over a source
/// ring, including the r(source) ring weight. Row/column order is (z, r):
/// entry (i,k) couples the k force component on the ring to the i velocity
/// component at the field ring.
struct RingKernelValue {
  double zz, zr, rz, rr;
};

/// Elliptic-integral evaluation of the ring kernel. Throws
/// std::domain_error for coincident points (the log-singular limit) and
/// std::invalid_argument for source_r <= 0.
RingKernelValue ring_kernel(double field_r, double field_z, double source_r,
                            double source_z);

/// Split form: kernel = reg + logc * ln(m1), with m1 = (d/a)^2 the
/// complementary parameter, which vanishes quadratically at coincidence.
/// Uses the Hastings polynomial decomposition of K and E; accurate to
/// ~1e-8, used only for the singular-span quadrature.
void ring_kernel_split(double field_r, double field_z, double source_r,
                       double source_z, RingKernelValue& reg,
                       RingKernelValue& logc, double& m1);

struct BemOptions {
  int n_gauss = 8;         // per-span Gauss points
  int n_log = 12;          // log-weighted points on the singular span
  int adjacent_subdiv = 4; // graded subdivisions toward a shared corner
};

/// Galerkin single-layer system on the BC-reduced basis.
struct BemSystem {
  GeneratingCurve curve;
  double mu_bulk = 1.0;
  BemOptions options;
  Eigen::MatrixXd A;            // reduced Galerkin single-layer matrix
  Eigen::MatrixXd M;            // reduced mass matrix (identity-blocked)
  Eigen::VectorXd null_dir;     // unit near-null direction of A (normal density)
  Eigen::VectorXd compat_row;   // reduced functional int V.n dS
  double area = 0.0;
  Eigen::LDLT<Eigen::MatrixXd> A_reg;  // factorization of A + rank-one completion
};

struct IncompatibleVelocity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BemSystem assemble_bem(const GeneratingCurve& curve, double mu_bulk,
                       const BemOptions& options = {});

/// Traction jump solving the Galerkin system M V = (1/mu) A dg. Input and
/// output are full nodal vectors; the right-hand side is projected onto the
/// compatible subspace (projection magnitude optionally reported).
Eigen::VectorXd solve_traction(const BemSystem& bem,
                               const Eigen::VectorXd& v_full,
                               double* compat_residual = nullptr);

/// Reduced Dirichlet-to-Neumann dissipation matrix mu M A^{-1} M,
/// symmetrized; A is applied through its factorization, never inverted
/// explicitly.
Eigen::MatrixXd assemble_Dbulk(const BemSystem& bem);

/// Single-layer velocity at an off-surface point (r, z) from a full nodal
/// traction vector. If min_dist_out is given, receives the distance to the
/// nearest quadrature point (caller can flag near-surface evaluations).
Eigen::Vector2d eval_offsurface_velocity(const BemSystem& bem,
                                         const Eigen::VectorXd& dg_full,
                                         double r, double z,
                                         double* min_dist_out = nullptr);

}  // namespace ves
