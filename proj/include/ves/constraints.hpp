#pragma once

#include <Eigen/Dense>

#include "ves/geometry.hpp"

namespace ves {

/// Linear functionals of the full nodal rate vector enforcing the
/// geometric constraints. All rows use the full {r, z} layout; reduction
/// to the BC-eliminated basis is done by the model assembly.

/// dV/dt = row . Pdot (exact variation of V = pi int r^2 z' du).
Eigen::VectorXd volume_row(const GeomCache& cache);

/// dS/dt = row . Pdot (exact variation of S = int 2 pi a r du).
Eigen::VectorXd area_row(const GeomCache& cache);

/// Local inextensibility block, one column per quadratic multiplier basis
/// function: column J is the functional
///   -int (B_I'(r'/a^2) + B_I/r) Bhat_J dS   (r rows)
///   -int  B_I'(z'/a^2) Bhat_J dS            (z rows).
/// Columns sum to minus the area row (partition of unity).
Eigen::MatrixXd inext_block(const GeomCache& cache);

/// Axial gauge functional int zdot dS, removing the rigid translation
/// left free by a membrane-only dissipation.
Eigen::VectorXd gauge_row(const GeomCache& cache);

}  // namespace ves
