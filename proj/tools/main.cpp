#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "ves/scenario.hpp"

namespace {

using namespace ves;

/// Shared CLI flags mirrored onto config keys (flags override the file).
struct CommonFlags {
  std::string config_path;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file");
    auto opt = [&](const char* flag, const char* key, const char* help) {
      app->add_option_function<std::string>(
          flag, [this, key](const std::string& v) { overrides[key] = v; },
          help);
    };
    opt("--model", "model", "model kind: A, B, C or full");
    opt("--size", "size", "vesicle radius R0");
    opt("--out", "out_dir", "output directory");
    opt("--tol-rel", "tol_rel", "relative integration tolerance");
    opt("--tol-abs", "tol_abs", "absolute integration tolerance");
    opt("--n-ctrl", "n_ctrl", "number of control points");
    opt("--seed-family", "seed_family", "seed shape family");
    opt("--c0", "c0", "spontaneous curvature for preparation (1/R0 units)");
    opt("--reduced-volume", "reduced_volume", "target reduced volume");
    opt("--threads", "threads", "worker threads for assembly");
    opt("--scenario", "scenario", "scenario name");
    opt("--sizes", "sizes", "comma-separated sweep sizes");
    opt("--mu", "mu", "membrane viscosity");
    opt("--mu-bulk", "mu_bulk", "ambient viscosity");
    opt("--mu-hat", "mu_hat", "L2 viscosity");
    opt("--kappa", "kappa", "bending modulus");
  }

  ExperimentConfig resolve() const {
    Config map;
    if (!config_path.empty()) map = read_config(config_path);
    for (const auto& [k, v] : overrides) map[k] = v;
    return config_from_map(map);
  }
};

int cmd_run(const CommonFlags& flags) {
  ExperimentConfig cfg = flags.resolve();
  if (cfg.out_dir.empty()) cfg.out_dir = "out";
  const ScenarioResult result = run_scenario(cfg);
  const auto& fr = result.trajectory.frames;
  std::printf("scenario %s: %zu frames, t_end = %.6g, energy %.8g -> %.8g\n",
              cfg.scenario.c_str(), fr.size(), fr.back().t,
              fr.front().energy, fr.back().energy);
  std::printf("stationary: %s, accepted %d, rejected %d, reparams %d\n",
              result.trajectory.stationary ? "yes" : "no",
              result.trajectory.accepted, result.trajectory.rejected,
              result.trajectory.reparams);
  if (result.trajectory.stationary)
    std::printf("t_relax(0.9925) = %.6g\n",
                relaxation_time(result.trajectory));
  return 0;
}

int cmd_sweep(const CommonFlags& flags) {
  ExperimentConfig cfg = flags.resolve();
  if (cfg.out_dir.empty()) cfg.out_dir = "out";
  if (cfg.model.model != ModelKind::Full &&
      flags.overrides.find("model") == flags.overrides.end())
    cfg.model.model = ModelKind::Full;
  const SweepResult sweep = size_sweep(cfg);
  std::printf("ell = %.6g\n", sweep.ell);
  for (const auto& row : sweep.rows)
    std::printf("R0 = %10.5g  t_relax = %12.6g  (%s)\n", row.R0, row.t_relax,
                row.regime.c_str());
  std::printf("exponents: small %.4f, large %.4f; crossover %.6g "
              "(ell/2 = %.6g)\n",
              sweep.exponent_small, sweep.exponent_large, sweep.crossover,
              sweep.ell / 2.0);
  return 0;
}

int cmd_validate(const CommonFlags& flags) {
  ExperimentConfig cfg = flags.resolve();
  const int N = cfg.n_ctrl;
  int failures = 0;
  auto report = [&](const char* name, bool ok, double value) {
    std::printf("%-34s %s  (%.3g)\n", name, ok ? "PASS" : "FAIL", value);
    if (!ok) ++failures;
  };

  SeedParams sp;
  sp.n_ctrl = N;
  const GeneratingCurve sphere = make_seed("sphere", sp);

  // Stokes drag of a translating unit sphere: total force 6 pi mu U
  {
    const double mu = 1.0, U = 1.0;
    const BemSystem bem = assemble_bem(sphere, mu);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * N);
    v.tail(N).setConstant(U);
    const Eigen::VectorXd dg = solve_traction(bem, v);
    const GeomCache cache = GeomCache::build(sphere);
    double drag = 0.0;
    for (const auto& span : cache.spans)
      for (const auto& qp : span) {
        double gz = 0.0;
        for (int j = 0; j <= qp.cub.degree; ++j)
          gz += qp.cub.values[0][j] * dg(N + qp.cub.first + j);
        drag += qp.w * gz * qp.g.dS;
      }
    const double rel = std::abs(drag - 6.0 * M_PI * mu * U) / (6.0 * M_PI);
    report("stokes drag 6 pi mu U", rel < 1e-4, rel);
  }

  // energy release rate vs a finite difference of the energy
  {
    SeedParams pp = sp;
    pp.reduced_volume = 0.85;
    GeneratingCurve curve = make_seed("prolate", pp);
    const DofMap dof(N);
    std::mt19937 rng(12345);
    std::normal_distribution<double> dist;
    Eigen::VectorXd dq(dof.n_red());
    for (int i = 0; i < dq.size(); ++i) dq(i) = dist(rng);
    const Eigen::VectorXd delta = dof.expand(dq);
    const ElasticParams ep;
    const GeomCache cache = GeomCache::build(curve);
    const double G = energy_release_rate(cache, ep, delta);
    const double h = 1e-6;
    Eigen::VectorXd q0 = dof.state_from_curve(curve);
    GeneratingCurve cp = curve, cm = curve;
    dof.apply_state(cp, q0 + h * dq);
    dof.apply_state(cm, q0 - h * dq);
    const double fd =
        -(bending_energy(cp, ep) - bending_energy(cm, ep)) / (2.0 * h);
    const double rel = std::abs(G - fd) / (std::abs(fd) + 1e-30);
    report("energy release rate vs FD", rel < 1e-5, rel);
  }

  // local inextensibility columns sum to minus the area variation
  {
    SeedParams pp = sp;
    pp.reduced_volume = 0.8;
    const GeneratingCurve curve = make_seed("dumbbell", pp);
    const GeomCache cache = GeomCache::build(curve);
    const Eigen::VectorXd sum = inext_block(cache).rowwise().sum();
    const Eigen::VectorXd area = area_row(cache);
    const double rel = (sum + area).norm() / area.norm();
    report("inext columns vs area row", rel < 1e-10, rel);
  }

  // full vs Lagrangian-gauge membrane dissipation on a locally
  // inextensible field: v_t from (r v_t)' = a r H v_n, v_t(0) = 0,
  // with v_n balanced so the total area rate (and hence v_t at the
  // second pole) vanishes.
  {
    SeedParams pp = sp;
    pp.reduced_volume = 0.9;
    const GeneratingCurve curve = make_seed("prolate", pp);
    const int M = 4000;
    auto f1 = [](double u) { return std::sin(M_PI * u) * std::cos(2.0 * M_PI * u); };
    auto f2 = [](double u) { return std::sin(M_PI * u); };
    double I1 = 0.0, I2 = 0.0;
    std::vector<GeomPoint> gp(M + 1);
    for (int i = 0; i <= M; ++i) {
      const double u = std::clamp(static_cast<double>(i) / M, 1e-9, 1.0 - 1e-9);
      gp[i] = eval_geometry(curve, u);
      const double w = (i == 0 || i == M) ? 0.5 : 1.0;
      I1 += w * gp[i].a * gp[i].r * gp[i].H * f1(gp[i].u) / M;
      I2 += w * gp[i].a * gp[i].r * gp[i].H * f2(gp[i].u) / M;
    }
    const double c2 = -I1 / I2;
    std::vector<FitSample> samples(M + 1);
    double rvt = 0.0, prev_rhs = 0.0;
    for (int i = 0; i <= M; ++i) {
      const GeomPoint& g = gp[i];
      const double vn = f1(g.u) + c2 * f2(g.u);
      const double rhs = g.a * g.r * g.H * vn;
      if (i > 0) rvt += 0.5 * (rhs + prev_rhs) / M;
      prev_rhs = rhs;
      const double vt = rvt / g.r;
      samples[i] = {g.u, vt * g.t[0] + vn * g.n[0], vt * g.t[1] + vn * g.n[1]};
    }
    const CurveFit fit = fit_curve(samples, curve.kv);
    Eigen::VectorXd pdot(2 * N);
    for (int i = 0; i < N; ++i) {
      pdot(i) = fit.r[i];
      pdot(N + i) = fit.z[i];
    }
    const GeomCache cache = GeomCache::build(curve);
    const double wf = wmem_full(cache, 1.0, pdot);
    const double ws = wmem_simple(cache, 1.0, pdot);
    const double rel = std::abs(wf - ws) / (std::abs(wf) + 1e-30);
    report("membrane dissipation identity", rel < 1e-3, rel);
  }

  std::printf("%s\n", failures == 0 ? "all checks passed" : "CHECKS FAILED");
  return failures == 0 ? 0 : 1;
}

int cmd_inspect(const std::string& path) {
  GeneratingCurve curve;
  double t = -1.0;
  try {
    const Checkpoint cp = read_checkpoint(path);
    curve = cp.curve;
    t = cp.t;
  } catch (const std::exception&) {
    curve = read_curve(path);
  }
  const double V = enclosed_volume(curve);
  const double S = surface_area(curve);
  const ElasticParams ep;
  std::printf("control points: %d, spans: %zu\n", curve.n(),
              curve.kv.breakpoints().size() - 1);
  if (t >= 0.0) std::printf("t = %.8g\n", t);
  std::printf("volume %.8g, area %.8g, reduced volume %.8g\n", V, S,
              reduced_volume(curve));
  std::printf("bending energy %.10g (in units of kappa; sphere = %.10g)\n",
              bending_energy(curve, ep), 8.0 * M_PI);
  const PoleLimits pl = eval_pole_limits(curve);
  std::printf("H at poles: %.6g (south), %.6g (north)\n", pl.H_south,
              pl.H_north);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"axisymmetric vesicle relaxation dynamics"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, validate_flags;
  auto* run = app.add_subcommand("run", "run a single relaxation scenario");
  run_flags.attach(run);
  auto* sweep = app.add_subcommand("sweep", "size sweep for the power law");
  sweep_flags.attach(sweep);
  auto* validate =
      app.add_subcommand("validate", "run the built-in oracle checks");
  validate_flags.attach(validate);
  std::string inspect_path;
  auto* inspect =
      app.add_subcommand("inspect", "print summary of a curve/checkpoint");
  inspect->add_option("path", inspect_path, "curve or checkpoint file")
      ->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_flags);
    if (validate->parsed()) return cmd_validate(validate_flags);
    if (inspect->parsed()) return cmd_inspect(inspect_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
