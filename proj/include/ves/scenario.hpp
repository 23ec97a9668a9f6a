#pragma once

#include <string>
#include <vector>

#include "ves/dynamics.hpp"
#include "ves/io.hpp"
#include "ves/seeds.hpp"

namespace ves {

struct ExperimentConfig {
  std::string scenario = "discocyte";  // discocyte|pearled|tether|stomatocyte
  std::string seed_family;             // empty: scenario default
  double reduced_volume = 0.0;         // 0: scenario default
  double c0_prep = 0.0;                // spontaneous curvature for preparation
  bool c0_prep_set = false;
  double pole_force = 0.0;             // tether hold force (units kappa/R0)
  ModelSpec model;
  double size = 1.0;  // R0
  int n_ctrl = 40;
  std::vector<double> sizes;  // sweep sizes; empty: 7 points in [l/20, 5l]
  std::string out_dir;        // empty: no files written
  unsigned rng_seed = 0;
};

ExperimentConfig config_from_map(const Config& map);

/// Norm of the energy gradient projected onto the constraint tangent
/// space (the stationarity measure of prepare_equilibrium).
double constrained_gradient_norm(const GeneratingCurve& curve,
                                 const ModelSpec& spec);

/// Relaxes the seed under the L2 model with the given spontaneous
/// curvature until the constrained gradient norm drops below
/// 1e-6 kappa / R0. Throws NotConverged on failure.
GeneratingCurve prepare_equilibrium(const GeneratingCurve& seed, double C0,
                                    bool volume_constraint = true,
                                    bool area_constraint = true,
                                    double pole_force = 0.0);

struct ScenarioResult {
  GeneratingCurve prepared;
  Trajectory trajectory;
};

/// Prepares the scenario's equilibrium and runs the configured relaxation;
/// writes frames/snapshots when out_dir is set.
ScenarioResult run_scenario(const ExperimentConfig& config);

struct SweepResult {
  std::vector<SweepRow> rows;
  double exponent_small = 0.0;  // log-log slope over the smallest sizes
  double exponent_large = 0.0;  // ... largest sizes
  double crossover = 0.0;       // size where the two fitted lines intersect
  double ell = 0.0;             // viscosity length mu / mu_bulk
};

/// Relaxation-time sweep over vesicle sizes under the given model (the
/// composite power-law experiment); runs are parallel across sizes.
SweepResult size_sweep(const ExperimentConfig& config);

/// Writes frames CSV, curve snapshots, checkpoint and a plot script.
void emit_outputs(const std::string& out_dir, const std::string& tag,
                  const ScenarioResult& result);
void emit_outputs(const std::string& out_dir, const SweepResult& sweep);

}  // namespace ves
