#include "ves/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

namespace ves {

namespace {

double to_double(const std::string& s) { return std::stod(s); }

ModelKind parse_model(const std::string& s) {
  if (s == "A" || s == "a") return ModelKind::A;
  if (s == "B" || s == "b") return ModelKind::B;
  if (s == "C" || s == "c") return ModelKind::C;
  if (s == "full" || s == "FULL" || s == "Full") return ModelKind::Full;
  throw std::invalid_argument("unknown model kind: " + s);
}

}  // namespace

ExperimentConfig config_from_map(const Config& map) {
  ExperimentConfig cfg;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
  };
  if (auto v = get("scenario")) cfg.scenario = *v;
  if (auto v = get("seed_family")) cfg.seed_family = *v;
  if (auto v = get("reduced_volume")) cfg.reduced_volume = to_double(*v);
  if (auto v = get("c0")) {
    cfg.c0_prep = to_double(*v);
    cfg.c0_prep_set = true;
  }
  if (auto v = get("pole_force")) cfg.pole_force = to_double(*v);
  if (auto v = get("model")) cfg.model.model = parse_model(*v);
  if (auto v = get("kappa")) cfg.model.elastic.kappa = to_double(*v);
  if (auto v = get("mu")) cfg.model.mu = to_double(*v);
  if (auto v = get("mu_bulk")) cfg.model.mu_bulk = to_double(*v);
  if (auto v = get("mu_hat")) cfg.model.mu_hat = to_double(*v);
  if (auto v = get("tol_rel")) cfg.model.rtol = to_double(*v);
  if (auto v = get("tol_abs")) cfg.model.atol = to_double(*v);
  if (auto v = get("threads")) cfg.model.n_threads = std::stoi(*v);
  if (auto v = get("size")) cfg.size = to_double(*v);
  if (auto v = get("n_ctrl")) cfg.n_ctrl = std::stoi(*v);
  if (auto v = get("out_dir")) cfg.out_dir = *v;
  if (auto v = get("rng_seed")) cfg.rng_seed = std::stoul(*v);
  if (auto v = get("sizes")) {
    std::stringstream ss(*v);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.sizes.push_back(to_double(tok));
  }
  return cfg;
}

double constrained_gradient_norm(const GeneratingCurve& curve,
                                 const ModelSpec& spec) {
  const AssembledSystem sys = assemble(curve, spec);
  if (sys.L.cols() == 0) return sys.f.norm();
  const Eigen::MatrixXd G = sys.L.transpose() * sys.L;
  const Eigen::VectorXd proj =
      sys.f - sys.L * G.ldlt().solve(sys.L.transpose() * sys.f);
  return proj.norm();
}

GeneratingCurve prepare_equilibrium(const GeneratingCurve& seed, double C0,
                                    bool volume_constraint,
                                    bool area_constraint, double pole_force) {
  const double R0 = std::sqrt(surface_area(seed) / (4.0 * M_PI));
  ModelSpec spec;
  spec.model = ModelKind::C;
  spec.elastic.C0 = C0;
  spec.mu_hat = 1.0;
  spec.volume_constraint = volume_constraint;
  spec.area_constraint = area_constraint;
  spec.pole_force_north = pole_force;
  spec.pole_force_south = pole_force;
  spec.length_scale = R0;

  const double grad_tol = 1e-6 * spec.elastic.kappa / R0;
  GeneratingCurve curve = seed;
  for (int round = 0; round < 5; ++round) {
    if (constrained_gradient_norm(curve, spec) < grad_tol) return curve;
    IntegrateOptions opts;
    opts.max_steps = 20000;
    const Trajectory traj = integrate(curve, spec, opts);
    curve = traj.frames.back().curve;
    spec.stationarity_tol *= 0.1;
  }
  if (constrained_gradient_norm(curve, spec) < grad_tol) return curve;
  throw NotConverged(
      "prepare_equilibrium: constrained gradient did not reach tolerance");
}

namespace {

struct ScenarioDefaults {
  std::string family;
  double v;
  double c0_prep;      // in units of 1/R0
  double pole_force;   // in units of kappa/R0
  bool release_volume;
};

ScenarioDefaults scenario_defaults(const std::string& name) {
  if (name == "discocyte") return {"oblate", 0.65, 0.0, 0.0, true};
  if (name == "pearled") return {"pearled", 0.80, 4.0, 0.0, false};
  if (name == "tether") return {"prolate", 0.90, 0.0, 30.0, false};
  if (name == "stomatocyte") return {"stomatocyte", 0.62, -2.5, 0.0, false};
  throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace

ScenarioResult run_scenario(const ExperimentConfig& config) {
  const ScenarioDefaults def = scenario_defaults(config.scenario);
  const double R0 = config.size;

  SeedParams sp;
  sp.n_ctrl = config.n_ctrl;
  sp.radius = R0;
  sp.reduced_volume =
      config.reduced_volume > 0.0 ? config.reduced_volume : def.v;
  const std::string family =
      config.seed_family.empty() ? def.family : config.seed_family;
  const GeneratingCurve seed = make_seed(family, sp);

  const double c0 =
      (config.c0_prep_set ? config.c0_prep : def.c0_prep) / R0;
  const double hold =
      (config.pole_force != 0.0 ? config.pole_force : def.pole_force) *
      config.model.elastic.kappa / R0;
  ScenarioResult result;
  result.prepared = prepare_equilibrium(seed, c0, true, true, hold);

  ModelSpec spec = config.model;
  spec.elastic.C0 = 0.0;
  spec.pole_force_north = spec.pole_force_south = 0.0;
  spec.length_scale = R0;
  if (def.release_volume) spec.volume_constraint = false;

  IntegrateOptions opts;
  opts.max_steps = 50000;
  if (spec.model == ModelKind::A) opts.eig_stride = 5;
  result.trajectory = integrate(result.prepared, spec, opts);

  if (!config.out_dir.empty())
    emit_outputs(config.out_dir, config.scenario, result);
  return result;
}

SweepResult size_sweep(const ExperimentConfig& config) {
  SweepResult sweep;
  sweep.ell = config.model.mu / config.model.mu_bulk;
  std::vector<double> sizes = config.sizes;
  if (sizes.empty()) {
    const double lo = sweep.ell / 20.0, hi = 5.0 * sweep.ell;
    for (int i = 0; i < 7; ++i)
      sizes.push_back(lo * std::pow(hi / lo, i / 6.0));
  }
  std::sort(sizes.begin(), sizes.end());

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int inner_threads =
      std::max(1u, hw / std::min<unsigned>(hw, sizes.size()));

  auto run_one = [&](double R) {
    SeedParams sp;
    sp.n_ctrl = config.n_ctrl;
    sp.radius = R;
    sp.reduced_volume =
        config.reduced_volume > 0.0 ? config.reduced_volume : 0.95;
    const GeneratingCurve seed = make_seed("prolate", sp);
    ModelSpec spec = config.model;
    spec.length_scale = R;
    spec.n_threads = inner_threads;
    IntegrateOptions opts;
    opts.max_steps = 50000;
    const Trajectory traj = integrate(seed, spec, opts);
    return relaxation_time(traj);
  };

  std::vector<std::future<double>> futures;
  for (double R : sizes)
    futures.push_back(std::async(std::launch::async, run_one, R));
  std::vector<std::string> failures;
  std::vector<double> times(sizes.size(), 0.0);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    try {
      times[i] = futures[i].get();
    } catch (const std::exception& e) {
      failures.push_back("R0=" + std::to_string(sizes[i]) + ": " + e.what());
    }
  }
  if (!failures.empty()) {
    std::string msg = "size_sweep: runs failed:";
    for (const auto& f : failures) msg += "\n  " + f;
    throw std::runtime_error(msg);
  }

  auto slope = [&](int i, int j) {
    return std::log(times[j] / times[i]) / std::log(sizes[j] / sizes[i]);
  };
  const int n = static_cast<int>(sizes.size());
  sweep.exponent_small = slope(0, 1);
  sweep.exponent_large = slope(n - 2, n - 1);
  // intersect the two fitted lines in log-log space
  const double as = std::log(times[0]) - sweep.exponent_small * std::log(sizes[0]);
  const double al =
      std::log(times[n - 1]) - sweep.exponent_large * std::log(sizes[n - 1]);
  sweep.crossover =
      std::exp((al - as) / (sweep.exponent_small - sweep.exponent_large));

  for (int i = 0; i < n; ++i) {
    SweepRow row;
    row.R0 = sizes[i];
    row.t_relax = times[i];
    row.regime = sizes[i] < sweep.crossover ? "membrane" : "bulk";
    sweep.rows.push_back(row);
  }
  if (!config.out_dir.empty()) emit_outputs(config.out_dir, sweep);
  return sweep;
}

void emit_outputs(const std::string& out_dir, const std::string& tag,
                  const ScenarioResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string base = out_dir + "/" + tag;
  write_frames_csv(base + "_frames.csv", result.trajectory);
  write_curve(base + "_prepared.curve", result.prepared);
  write_curve(base + "_final.curve", result.trajectory.frames.back().curve);
  Checkpoint cp;
  cp.curve = result.trajectory.frames.back().curve;
  cp.t = result.trajectory.frames.back().t;
  cp.spec_hash = tag;
  write_checkpoint(base + "_final.chk", cp);
  std::ofstream plot(base + "_plot.gp");
  plot << "# log-linear energy relaxation plot\n"
       << "set logscale y\n"
       << "set xlabel 't'\n"
       << "set ylabel 'excess energy'\n"
       << "Einf = " << result.trajectory.frames.back().energy << "\n"
       << "plot '" << tag << "_frames.csv' every ::1 using 1:($2-Einf) "
       << "with lines title 'excess energy'\n";
}

void emit_outputs(const std::string& out_dir, const SweepResult& sweep) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_sweep_csv(out_dir + "/sweep.csv", sweep.rows);
  std::ofstream plot(out_dir + "/sweep_plot.gp");
  plot << "# log-log relaxation time vs size with the two fitted power laws\n"
       << "set logscale xy\n"
       << "set xlabel 'R0'\n"
       << "set ylabel 't_relax'\n"
       << "plot 'sweep.csv' every ::1 using 1:2 with points title 'runs'\n";
  std::ofstream summary(out_dir + "/sweep_summary.txt");
  summary << "ell " << sweep.ell << "\n"
          << "exponent_small " << sweep.exponent_small << "\n"
          << "exponent_large " << sweep.exponent_large << "\n"
          << "crossover " << sweep.crossover << "\n";
}

}  // namespace ves
