#include "ves/seeds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Dense>

#include "ves/elastica.hpp"

namespace ves {

namespace {

/// Analytic meridian profile on t in [0,1]: position and derivative.
struct ProfilePoint {
  double r, z, dr, dz;
};
using Profile = std::function<ProfilePoint(double)>;

Profile sphere_profile() {
  return [](double t) {
    const double c = std::cos(M_PI * t), s = std::sin(M_PI * t);
    return ProfilePoint{s, -c, M_PI * c, M_PI * s};
  };
}

Profile spheroid_profile(double aspect) {
  // semi-axes (1, 1, aspect)
  return [aspect](double t) {
    const double c = std::cos(M_PI * t), s = std::sin(M_PI * t);
    return ProfilePoint{s, -aspect * c, M_PI * c, aspect * M_PI * s};
  };
}

Profile dumbbell_profile(int lobes, double amp) {
  return [lobes, amp](double t) {
    const double th = M_PI * t;
    const double c = std::cos(th), s = std::sin(th);
    const double rho = 1.0 + amp * std::cos(lobes * th);
    const double drho = -amp * lobes * std::sin(lobes * th);
    return ProfilePoint{rho * s, -rho * c, M_PI * (drho * s + rho * c),
                        M_PI * (-drho * c + rho * s)};
  };
}

Profile stomatocyte_profile(double depth) {
  return [depth](double t) {
    const double th = M_PI * t;
    const double c = std::cos(th), s = std::sin(th);
    const double w = 0.5 * (1.0 - c);
    return ProfilePoint{s, -c - 2.0 * depth * w * w, M_PI * c,
                        M_PI * s * (1.0 - 2.0 * depth * w)};
  };
}

/// Reduced volume of a profile by dense trapezoid quadrature.
double profile_reduced_volume(const Profile& p, int m = 4000) {
  double V = 0.0, S = 0.0;
  ProfilePoint a = p(0.0);
  for (int i = 1; i <= m; ++i) {
    const ProfilePoint b = p(static_cast<double>(i) / m);
    const double h = 1.0 / m;
    V += 0.5 * h * (a.r * a.r * a.dz + b.r * b.r * b.dz);
    S += 0.5 * h *
         (a.r * std::hypot(a.dr, a.dz) + b.r * std::hypot(b.dr, b.dz));
    a = b;
  }
  V *= M_PI;
  S *= 2.0 * M_PI;
  return 3.0 * std::sqrt(4.0 * M_PI) * V / std::pow(S, 1.5);
}

/// Solves f(x) = target on [lo, hi] where f is monotone decreasing.
double bisect_decreasing(const std::function<double(double)>& f, double lo,
                         double hi, double target, const char* what) {
  double flo = f(lo), fhi = f(hi);
  if (target > flo + 1e-9 || target < fhi - 1e-9)
    throw std::invalid_argument(std::string("make_seed: reduced volume ") +
                                "unattainable for family " + what);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

GeneratingCurve fit_profile(const Profile& p, int n_ctrl) {
  const int m = 1500;
  std::vector<MeridianSample> samples(m + 1);
  double s = 0.0;
  ProfilePoint prev = p(0.0);
  for (int i = 0; i <= m; ++i) {
    const double t = static_cast<double>(i) / m;
    const ProfilePoint q = p(t);
    MeridianSample& out = samples[i];
    out.u = t;
    out.r = q.r;
    out.z = q.z;
    const double a = std::hypot(q.dr, q.dz);
    out.t[0] = q.dr / a;
    out.t[1] = q.dz / a;
    out.n[0] = -q.dz / a;
    out.n[1] = q.dr / a;
    if (i > 0)
      s += 0.5 * (std::hypot(prev.dr, prev.dz) + a) / m;
    out.s = s;
    out.kappa_m = 0.0;
    prev = q;
  }
  for (auto& q : samples) q.s /= s;
  samples.back().s = 1.0;

  GeneratingCurve curve =
      fit_meridian(samples, open_knots(n_ctrl, 3));
  curve.validate();
  return curve;
}

/// Newton descent of the bending energy in reduced coordinates. The
/// least-squares fit carries a sampling-scale position error whose
/// curvature content dominates the energy defect; a few Newton steps move
/// the control points to the discrete energy minimizer, which for the
/// sphere family is the best spline sphere the basis can express. The
/// energy is scale and parameterization invariant, so the (rank-deficient)
/// Hessian is inverted on its positive spectrum only and the size is
/// restored by the caller.
void polish_minimal_energy(GeneratingCurve& curve) {
  const DofMap map(curve.n());
  const ElasticParams ep;
  const int n = 2 * curve.n() - 4;
  const auto reduced_gradient = [&](const GeneratingCurve& c) {
    return Eigen::VectorXd(-map.reduce(nodal_forces(GeomCache::build(c), ep)));
  };
  Eigen::VectorXd q = map.state_from_curve(curve);
  double E = bending_energy(curve, ep);
  const double h = 1e-6;
  for (int it = 0; it < 30; ++it) {
    const Eigen::VectorXd g = reduced_gradient(curve);
    Eigen::MatrixXd H(n, n);
    for (int j = 0; j < n; ++j) {
      GeneratingCurve cp = curve;
      Eigen::VectorXd qj = q;
      qj(j) += h;
      map.apply_state(cp, qj);
      const Eigen::VectorXd gp = reduced_gradient(cp);
      qj(j) = q(j) - h;
      map.apply_state(cp, qj);
      H.col(j) = (gp - reduced_gradient(cp)) / (2.0 * h);
    }
    H = 0.5 * (H + H.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    // keep the soft reparameterization valley (lambda ~ 1e-2) in play and
    // discard only the noise-level spectrum, with a trust-region clamp on
    // the resulting near-singular mode amplitudes
    const double cut = 1e-9 * es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
      if (es.eigenvalues()(k) <= cut) continue;
      double sk = -es.eigenvectors().col(k).dot(g) / es.eigenvalues()(k);
      sk = std::clamp(sk, -0.05, 0.05);
      step += es.eigenvectors().col(k) * sk;
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12; ++ls, alpha *= 0.5) {
      GeneratingCurve trial = curve;
      map.apply_state(trial, q + alpha * step);
      bool valid = true;
      try {
        trial.validate();
      } catch (const std::exception&) {
        valid = false;
      }
      if (!valid) continue;
      const double Et = bending_energy(trial, ep);
      if (Et <= E) {
        const double gain = E - Et;
        curve = trial;
        q += alpha * step;
        E = Et;
        accepted = true;
        if (gain < 1e-12 * std::abs(E)) it = 30;  // converged
        break;
      }
    }
    if (!accepted) break;
  }
}

void scale_to_radius(GeneratingCurve& curve, double radius) {
  const double R = std::sqrt(surface_area(curve) / (4.0 * M_PI));
  const double f = radius / R;
  for (auto& x : curve.r) x *= f;
  for (auto& x : curve.z) x *= f;
}

}  // namespace

GeneratingCurve make_seed(const std::string& family, const SeedParams& p) {
  if (p.n_ctrl < 8)
    throw std::invalid_argument("make_seed: n_ctrl too small");
  if (!(p.radius > 0.0))
    throw std::invalid_argument("make_seed: radius must be positive");

  Profile profile;
  if (family == "sphere") {
    profile = sphere_profile();
  } else if (family == "prolate" || family == "spheroid" ||
             family == "oblate") {
    double aspect = p.aspect;
    if (aspect <= 0.0) {
      auto f = [&](double x) {
        return profile_reduced_volume(
            spheroid_profile(family == "oblate" ? 1.0 / x : x));
      };
      aspect = bisect_decreasing(f, 1.0 + 1e-9, 100.0, p.reduced_volume,
                                 family.c_str());
      if (family == "oblate") aspect = 1.0 / aspect;
    }
    profile = spheroid_profile(aspect);
  } else if (family == "dumbbell" || family == "pearled") {
    double amp = p.amplitude;
    if (amp <= 0.0) {
      auto f = [&](double x) {
        return profile_reduced_volume(dumbbell_profile(p.lobes, x));
      };
      amp = bisect_decreasing(f, 1e-9, 0.6, p.reduced_volume,
                              family.c_str());
    }
    if (amp >= 1.0)
      throw std::invalid_argument("make_seed: modulation amplitude >= 1");
    profile = dumbbell_profile(p.lobes, amp);
  } else if (family == "stomatocyte") {
    double depth = p.invagination;
    if (depth <= 0.0) {
      auto f = [&](double x) {
        return profile_reduced_volume(stomatocyte_profile(x));
      };
      depth = bisect_decreasing(f, 0.55, 0.95, p.reduced_volume,
                                family.c_str());
    }
    profile = stomatocyte_profile(depth);
  } else {
    throw std::invalid_argument("make_seed: unknown family " + family);
  }

  GeneratingCurve curve;
  if (family == "sphere") {
    // deterministic and frequently requested: polish once per basis size
    static std::map<int, GeneratingCurve> cache;
    static std::mutex mtx;
    const std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(p.n_ctrl);
    if (it == cache.end()) {
      curve = fit_profile(profile, p.n_ctrl);
      polish_minimal_energy(curve);
      it = cache.emplace(p.n_ctrl, curve).first;
    }
    curve = it->second;
  } else {
    curve = fit_profile(profile, p.n_ctrl);
  }
  scale_to_radius(curve, p.radius);
  return curve;
}

}  // namespace ves
