#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ves/bulkflow.hpp"
#include "ves/constraints.hpp"
#include "ves/dissipation.hpp"
#include "ves/elastica.hpp"
#include "ves/geometry.hpp"

namespace ves {

enum class ModelKind { A, B, C, Full };

/// A: membrane dissipation + local inextensibility (+ volume, gauge row);
/// B: bulk dissipation + global area (+ volume);
/// C: L2 dissipation + global area (+ volume);
/// Full: membrane + bulk dissipation + local inextensibility (+ volume).
struct ModelSpec {
  ModelKind model = ModelKind::C;
  ElasticParams elastic;
  double mu = 1.0;       // membrane surface viscosity (A, Full)
  double mu_bulk = 1.0;  // ambient viscosity (B, Full)
  double mu_hat = 1.0;   // L2 penalty viscosity (C)
  // blends a small tangential term into the L2 metric; the shape dynamics
  // are unchanged (the minimizer picks v_t = 0) but the discrete system
  // loses its near-null tangential modes
  double dl2_tangential_eps = 0.05;
  bool volume_constraint = true;
  bool area_constraint = true;  // models B and C only
  double pole_force_north = 0.0;
  double pole_force_south = 0.0;
  double rtol = 1e-6;
  double atol = 1e-9;
  int n_gauss = 8;
  BemOptions bem;
  double length_scale = 1.0;  // nominal vesicle radius R0
  double stationarity_tol = 1e-6;
  int n_threads = 0;  // 0: hardware concurrency

  bool uses_membrane() const {
    return model == ModelKind::A || model == ModelKind::Full;
  }
  bool uses_bulk() const {
    return model == ModelKind::B || model == ModelKind::Full;
  }
  bool uses_inext() const { return uses_membrane(); }

  /// Characteristic relaxation time of the dominant mechanism at R0.
  double t_char() const;
};

/// Reduced-space operators at a shape: dissipation metric, constraint
/// columns, generalized force, plus scalar diagnostics.
struct AssembledSystem {
  Eigen::MatrixXd D;
  Eigen::MatrixXd L;
  Eigen::VectorXd f;
  double energy = 0.0, volume = 0.0, area = 0.0;
};

AssembledSystem assemble(const GeneratingCurve& curve, const ModelSpec& spec);

struct SaddleSolution {
  Eigen::VectorXd qdot;
  Eigen::VectorXd lambda;
};

/// Solves [D L; L^T 0] [qdot; lambda] = [f; 0] densely; checks residuals
/// against 1e-10 (||f|| + 1) and throws a model-configuration error on a
/// singular system.
SaddleSolution solve_saddle(const AssembledSystem& sys);

/// Top-k eigenvalues (descending) of the constrained mobility
/// W = D^-1 - D^-1 L (L^T D^-1 L)^-1 L^T D^-1, through factorization
/// solves. Constraint columns added to D as c L L^T regularize a D that is
/// singular off the constraint manifold without changing W.
Eigen::VectorXd reduced_mobility_eigs(const AssembledSystem& sys, int k);

struct TrajectoryFrame {
  double t = 0.0;
  GeneratingCurve curve;
  double energy = 0.0;
  double dissipation = 0.0;  // instantaneous rate qdot^T D qdot
  double volume = 0.0, area = 0.0;
  double lambda_max = 0.0;  // largest |multiplier|
  Eigen::Vector3d mobility_eigs{0.0, 0.0, 0.0};
  bool has_eigs = false;
  bool reparameterized = false;
};

struct Trajectory {
  std::vector<TrajectoryFrame> frames;
  bool stationary = false;
  int accepted = 0, rejected = 0, reparams = 0;
};

struct StallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrateOptions {
  double t_end = 1e30;
  int max_steps = 200000;
  bool stop_at_stationary = true;
  int eig_stride = 0;        // record mobility eigenvalues every k frames
  bool allow_reparam = true;
  double dt_init = 0.0;      // 0: automatic
};

/// Adaptive TR-BDF2 integration of qdot = solve_saddle(assemble(q)) with
/// lazy finite-difference Jacobians, post-step constraint projection,
/// energy-monotonicity safeguarding and curvature-adapted refits.
Trajectory integrate(const GeneratingCurve& curve, const ModelSpec& spec,
                     const IntegrateOptions& options = {});

/// Arc-length reparameterization onto curvature-adapted knots; the refit
/// minimizes the normal (geometric) deviation with a weak tangential pin.
/// On fit failure returns the input unchanged and sets *ok = false.
GeneratingCurve reparameterize(const GeneratingCurve& curve, bool* ok = nullptr);

/// First time at which the excess energy E(t) - E(end) has dropped to
/// (1 - fraction) of E(0) - E(end), by monotone log interpolation.
double relaxation_time(const std::vector<std::pair<double, double>>& t_energy,
                       double fraction = 0.9925);
double relaxation_time(const Trajectory& traj, double fraction = 0.9925);

/// Time-axis scale factors making all traces cross the energy threshold at
/// the instant the first trace does.
std::vector<double> normalize_time(
    const std::vector<std::vector<std::pair<double, double>>>& traces,
    double threshold);

}  // namespace ves
