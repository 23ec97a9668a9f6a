#include "ves/bulkflow.hpp"

#include <cmath>
#include <limits>

namespace ves {

namespace {

/// AGM iteration; also returns s with E = K (1 - s), which gives
/// cancellation-free access to K - E = K s and friends.
void agm(double m, double& K, double& E, double& s) {
  if (!(m >= 0.0) || m >= 1.0)
    throw std::domain_error("comp_ellint: parameter outside [0,1)");
  double a = 1.0, b = std::sqrt(1.0 - m), c = std::sqrt(m);
  s = 0.5 * c * c;
  double pow2 = 0.5;
  for (int it = 0; it < 60 && c > 1e-18 * a; ++it) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    c = 0.5 * (a - b);
    a = an;
    b = bn;
    pow2 *= 2.0;
    s += pow2 * c * c;
  }
  K = M_PI / (2.0 * a);
  E = K * (1.0 - s);
}

/// Hastings polynomial approximations (max error ~2e-8):
/// K = Ka(m1) - ln(m1) Kb(m1), E = Ea(m1) - ln(m1) Eb(m1).
void hastings_KE(double m1, double& Ka, double& Kb, double& Ea, double& Eb) {
  Ka = 1.38629436112 +
       m1 * (0.09666344259 +
             m1 * (0.03590092383 + m1 * (0.03742563713 + m1 * 0.01451196212)));
  Kb = 0.5 +
       m1 * (0.12498593597 +
             m1 * (0.06880248576 + m1 * (0.03328355346 + m1 * 0.00441787012)));
  Ea = 1.0 +
       m1 * (0.44325141463 +
             m1 * (0.06260601220 + m1 * (0.04757383546 + m1 * 0.01736506451)));
  Eb = m1 * (0.24998368310 +
             m1 * (0.09200180037 + m1 * (0.04069697526 + m1 * 0.00526449639)));
}

struct RingGeom {
  double s0, zh, s1;      // field radius, z0 - z, source radius
  double a, a3, m, m1;    // a^2 = (s0+s1)^2 + zh^2, m = 4 s0 s1 / a^2
};

RingGeom ring_geom(double field_r, double field_z, double source_r,
                   double source_z) {
  if (!(source_r > 0.0))
    throw std::invalid_argument("ring_kernel: source radius must be positive");
  if (field_r < 0.0)
    throw std::invalid_argument("ring_kernel: negative field radius");
  RingGeom g;
  g.s0 = field_r;
  g.s1 = source_r;
  g.zh = field_z - source_z;
  const double sp = g.s0 + g.s1, sm = g.s0 - g.s1;
  const double a2 = sp * sp + g.zh * g.zh;
  const double d2 = sm * sm + g.zh * g.zh;
  g.a = std::sqrt(a2);
  g.a3 = g.a * a2;
  g.m = 4.0 * g.s0 * g.s1 / a2;
  g.m1 = d2 / a2;
  return g;
}

/// Kernel entries from the azimuthal integrals
/// I_{n,p} = int cos^p(t) / |d|^n dt, n in {1,3}, p in {0,1,2}.
RingKernelValue ring_from_I(const RingGeom& g, double I10, double I11,
                            double I30, double I31, double I32) {
  const double c = g.s1 / (8.0 * M_PI);
  RingKernelValue k;
  k.zz = c * (I10 + g.zh * g.zh * I30);
  k.zr = c * g.zh * (g.s0 * I31 - g.s1 * I30);
  k.rz = c * g.zh * (g.s0 * I30 - g.s1 * I31);
  k.rr = c * (I11 + (g.s0 * g.s0 + g.s1 * g.s1) * I31 -
              g.s0 * g.s1 * (I30 + I32));
  return k;
}

}  // namespace

void comp_ellint_agm(double m, double& K, double& E) {
  double s;
  agm(m, K, E, s);
}

RingKernelValue ring_kernel(double field_r, double field_z, double source_r,
                            double source_z) {
  const RingGeom g = ring_geom(field_r, field_z, source_r, source_z);
  if (g.m1 < 1e-28)
    throw std::domain_error("ring_kernel: coincident field and source rings");
  double K, E, s;
  agm(g.m, K, E, s);
  // cancellation-free combinations: K - E = K s, Ebar - K = K (m - s)/m1,
  // Ebar + E - 2K = K (m - 2s + s m)/m1, with Ebar = E/m1
  double s_over_m, ms_over_m, combo_over_m2;
  if (g.m < 1e-8) {
    // s = m/2 + m^2/16 + O(m^3); the quadratic combination tends to 3/8
    s_over_m = 0.5 + g.m / 16.0;
    ms_over_m = 0.5 - g.m / 16.0;
    combo_over_m2 = 0.375;
  } else {
    s_over_m = s / g.m;
    ms_over_m = (g.m - s) / g.m;
    combo_over_m2 = (g.m - 2.0 * s + s * g.m) / (g.m * g.m);
  }
  const double Ebar = E / g.m1;
  const double I10 = 4.0 * K / g.a;
  const double I11 = (4.0 / g.a) * (2.0 * K * s_over_m - K);
  const double I30 = 4.0 * Ebar / g.a3;
  const double I31 = (4.0 / g.a3) * (2.0 * K * ms_over_m / g.m1 - Ebar);
  const double I32 = (4.0 / g.a3) * (4.0 * K * combo_over_m2 / g.m1 -
                                     4.0 * K * ms_over_m / g.m1 + Ebar);
  return ring_from_I(g, I10, I11, I30, I31, I32);
}

namespace {

/// Entries as a linear function of (K, E, Ebar); used for both halves of
/// the Hastings decomposition.
RingKernelValue ring_linear(const RingGeom& g, double K, double E,
                            double Ebar) {
  const double I10 = 4.0 * K / g.a;
  const double I11 = (4.0 / g.a) * (2.0 * (K - E) / g.m - K);
  const double I30 = 4.0 * Ebar / g.a3;
  const double I31 = (4.0 / g.a3) * (2.0 * (Ebar - K) / g.m - Ebar);
  const double I32 =
      (4.0 / g.a3) * (4.0 * (Ebar + E - 2.0 * K) / (g.m * g.m) -
                      4.0 * (Ebar - K) / g.m + Ebar);
  return ring_from_I(g, I10, I11, I30, I31, I32);
}

}  // namespace

void ring_kernel_split(double field_r, double field_z, double source_r,
                       double source_z, RingKernelValue& reg,
                       RingKernelValue& logc, double& m1) {
  const RingGeom g = ring_geom(field_r, field_z, source_r, source_z);
  m1 = g.m1;
  double Ka, Kb, Ea, Eb;
  hastings_KE(g.m1, Ka, Kb, Ea, Eb);
  reg = ring_linear(g, Ka, Ea, Ea / g.m1);
  const RingKernelValue b = ring_linear(g, Kb, Eb, Eb / g.m1);
  logc = {-b.zz, -b.zr, -b.rz, -b.rr};
}

namespace {

struct LinePt {
  double u = 0.0, w = 0.0;  // parameter and du weight
  double r = 0.0, z = 0.0, a = 0.0;
  BasisEval be;
};

LinePt line_point(const GeneratingCurve& curve, double u, double w) {
  LinePt p;
  p.u = u;
  p.w = w;
  double rz[3][2];
  curve.eval(u, 1, rz);
  p.r = rz[0][0];
  p.z = rz[0][1];
  p.a = std::hypot(rz[1][0], rz[1][1]);
  p.be = eval_basis(curve.kv, u, 0);
  return p;
}

/// Gauss points graded toward one end of [x0, x1] by repeated halving.
std::vector<LinePt> graded_points(const GeneratingCurve& curve, double x0,
                                  double x1, bool toward_right, int n_sub,
                                  const QuadratureRule& base) {
  std::vector<double> cuts{0.0};
  for (int k = 1; k < n_sub; ++k) cuts.push_back(1.0 - std::pow(0.5, k));
  cuts.push_back(1.0);
  std::vector<LinePt> pts;
  const double L = x1 - x0;
  for (int k = 0; k < n_sub; ++k) {
    double f0 = cuts[k], f1 = cuts[k + 1];
    if (!toward_right) {
      const double g0 = 1.0 - f1, g1 = 1.0 - f0;
      f0 = g0;
      f1 = g1;
    }
    const QuadratureRule rule = base.mapped(x0 + L * f0, x0 + L * f1);
    for (std::size_t i = 0; i < rule.size(); ++i)
      pts.push_back(line_point(curve, rule.nodes[i], rule.weights[i]));
  }
  return pts;
}

/// Accumulates ker * B_I(u) B_K(v) with the Galerkin surface weights into
/// the full (2N x 2N) matrix; `ker` carries the r(v) ring weight, the
/// outer 2 pi a(u) r(u) and inner a(v) measures are applied here.
void accumulate(Eigen::MatrixXd& A, int N, const LinePt& out,
                const LinePt& in, const RingKernelValue& ker,
                double extra_weight = 1.0) {
  const double W =
      out.w * 2.0 * M_PI * out.a * out.r * in.w * in.a * extra_weight;
  for (int j = 0; j <= out.be.degree; ++j) {
    const int I = out.be.first + j;
    const double cj = W * out.be.values[0][j];
    for (int l = 0; l <= in.be.degree; ++l) {
      const int Kc = in.be.first + l;
      const double c = cj * in.be.values[0][l];
      A(I, Kc) += c * ker.rr;
      A(I, N + Kc) += c * ker.rz;
      A(N + I, Kc) += c * ker.zr;
      A(N + I, N + Kc) += c * ker.zz;
    }
  }
}

}  // namespace

BemSystem assemble_bem(const GeneratingCurve& curve, double mu_bulk,
                       const BemOptions& options) {
  BemSystem bem;
  bem.curve = curve;
  bem.mu_bulk = mu_bulk;
  bem.options = options;

  const int N = curve.n();
  const DofMap dof(N);
  const GeomCache cache = GeomCache::build(curve, options.n_gauss);
  const std::vector<double> bp = curve.kv.breakpoints();
  const int n_spans = static_cast<int>(bp.size()) - 1;

  const QuadratureRule base = gauss_legendre(options.n_gauss);
  const QuadratureRule logrule = gauss_log(options.n_log);

  std::vector<std::vector<LinePt>> pts(n_spans);
  for (int s = 0; s < n_spans; ++s)
    for (const auto& qp : cache.spans[s]) {
      LinePt p;
      p.u = qp.g.u;
      p.w = qp.w;
      p.r = qp.g.r;
      p.z = qp.g.z;
      p.a = qp.g.a;
      p.be = qp.cub;
      pts[s].push_back(p);
    }

  Eigen::MatrixXd A_full = Eigen::MatrixXd::Zero(2 * N, 2 * N);

  // well-separated span pairs: plain tensor Gauss
  for (int s = 0; s < n_spans; ++s)
    for (int t = 0; t < n_spans; ++t) {
      if (std::abs(s - t) <= 1) continue;
      for (const auto& out : pts[s])
        for (const auto& in : pts[t])
          accumulate(A_full, N, out, in,
                     ring_kernel(out.r, out.z, in.r, in.z));
    }

  // adjacent spans: Gauss graded toward the shared corner on both sides
  for (int s = 0; s + 1 < n_spans; ++s) {
    const auto left = graded_points(curve, bp[s], bp[s + 1], true,
                                    options.adjacent_subdiv, base);
    const auto right = graded_points(curve, bp[s + 1], bp[s + 2], false,
                                     options.adjacent_subdiv, base);
    for (const auto& out : left)
      for (const auto& in : right) {
        const RingKernelValue ker = ring_kernel(out.r, out.z, in.r, in.z);
        const RingKernelValue ket = ring_kernel(in.r, in.z, out.r, out.z);
        accumulate(A_full, N, out, in, ker);
        accumulate(A_full, N, in, out, ket);
      }
  }

  // singular spans: log-split of the kernel around each outer node.
  // kernel = reg + logc ln(m1) with ln(m1) = 2 ln|u-v| + ln(m1/(u-v)^2);
  // the smooth part goes through Gauss on each side of u, the 2 ln|u-v|
  // part through a log-weighted rule after factoring out ln(side length).
  for (int s = 0; s < n_spans; ++s) {
    const double x0 = bp[s], x1 = bp[s + 1];
    for (const auto& out : pts[s]) {
      for (int side = 0; side < 2; ++side) {
        const double lo = side == 0 ? x0 : out.u;
        const double hi = side == 0 ? out.u : x1;
        const double L = hi - lo;
        if (L <= 0.0) continue;
        const QuadratureRule inner = base.mapped(lo, hi);
        for (std::size_t i = 0; i < inner.size(); ++i) {
          const LinePt in =
              line_point(curve, inner.nodes[i], inner.weights[i]);
          RingKernelValue reg, logc;
          double m1;
          ring_kernel_split(out.r, out.z, in.r, in.z, reg, logc, m1);
          const double du = out.u - in.u;
          const double lg = std::log(m1 / (du * du)) + 2.0 * std::log(L);
          const RingKernelValue eff{reg.zz + lg * logc.zz,
                                    reg.zr + lg * logc.zr,
                                    reg.rz + lg * logc.rz,
                                    reg.rr + lg * logc.rr};
          accumulate(A_full, N, out, in, eff);
        }
        // minus 2 L int_0^1 logc(u -+ L t) (-ln t) dt
        for (std::size_t i = 0; i < logrule.size(); ++i) {
          const double v = side == 0 ? out.u - L * logrule.nodes[i]
                                     : out.u + L * logrule.nodes[i];
          const LinePt in = line_point(curve, v, logrule.weights[i]);
          RingKernelValue reg, logc;
          double m1;
          ring_kernel_split(out.r, out.z, in.r, in.z, reg, logc, m1);
          accumulate(A_full, N, out, in, logc, -2.0 * L);
        }
      }
    }
  }

  // scalar mass and normal-field moments
  Eigen::MatrixXd msc = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd br = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd bz = Eigen::VectorXd::Zero(N);
  double area = 0.0;
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      const double c = qp.w * qp.g.dS;
      area += c;
      for (int j = 0; j <= qp.cub.degree; ++j) {
        const int I = qp.cub.first + j;
        const double B = qp.cub.values[0][j];
        br(I) += c * B * qp.g.n[0];
        bz(I) += c * B * qp.g.n[1];
        for (int l = 0; l <= qp.cub.degree; ++l)
          msc(I, qp.cub.first + l) += c * B * qp.cub.values[0][l];
      }
    }
  bem.area = area;

  Eigen::MatrixXd M_full = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  M_full.topLeftCorner(N, N) = msc;
  M_full.bottomRightCorner(N, N) = msc;

  bem.A = dof.reduce_matrix(A_full);
  bem.A = 0.5 * (bem.A + bem.A.transpose()).eval();
  bem.M = dof.reduce_matrix(M_full);

  // near-null direction of the single layer: density along the normal
  Eigen::LDLT<Eigen::MatrixXd> msolve(msc);
  Eigen::VectorXd nu_full(2 * N);
  nu_full.head(N) = msolve.solve(br);
  nu_full.tail(N) = msolve.solve(bz);
  Eigen::VectorXd nu = dof.coords(nu_full);
  bem.null_dir = nu / nu.norm();

  Eigen::VectorXd b_full(2 * N);
  b_full.head(N) = br;
  b_full.tail(N) = bz;
  bem.compat_row = dof.reduce(b_full);

  const double gamma = bem.A.trace() / bem.A.rows();
  const Eigen::MatrixXd A_shift =
      bem.A + gamma * bem.null_dir * bem.null_dir.transpose();
  bem.A_reg.compute(A_shift);
  if (bem.A_reg.info() != Eigen::Success)
    throw std::runtime_error("assemble_bem: factorization failed");
  return bem;
}

Eigen::VectorXd solve_traction(const BemSystem& bem,
                               const Eigen::VectorXd& v_full,
                               double* compat_residual) {
  const DofMap dof(bem.curve.n());
  const Eigen::VectorXd q = dof.coords(v_full);
  const double compat = bem.compat_row.dot(q);
  const double vrms = std::sqrt(std::max(q.dot(bem.M * q), 0.0) / bem.area);
  if (compat_residual) *compat_residual = std::abs(compat);
  if (std::abs(compat) >
      1e-8 * std::max(vrms, std::numeric_limits<double>::min()) * bem.area)
    throw IncompatibleVelocity(
        "solve_traction: velocity violates the volume-compatibility "
        "condition int V.n dS = 0");
  Eigen::VectorXd b = bem.mu_bulk * (bem.M * q);
  b -= bem.null_dir * bem.null_dir.dot(b);
  const Eigen::VectorXd dg = bem.A_reg.solve(b);
  return dof.expand(dg);
}

Eigen::MatrixXd assemble_Dbulk(const BemSystem& bem) {
  const Eigen::MatrixXd X = bem.A_reg.solve(bem.M);
  Eigen::MatrixXd D = bem.mu_bulk * bem.M * X;
  return 0.5 * (D + D.transpose());
}

Eigen::Vector2d eval_offsurface_velocity(const BemSystem& bem,
                                         const Eigen::VectorXd& dg_full,
                                         double r, double z,
                                         double* min_dist_out) {
  const int N = bem.curve.n();
  const GeomCache cache = GeomCache::build(bem.curve, bem.options.n_gauss);
  double vr = 0.0, vz = 0.0;
  double min_dist = std::numeric_limits<double>::infinity();
  for (const auto& span : cache.spans)
    for (const auto& qp : span) {
      min_dist = std::min(min_dist, std::hypot(r - qp.g.r, z - qp.g.z));
      double gr = 0.0, gz = 0.0;
      for (int j = 0; j <= qp.cub.degree; ++j) {
        const int I = qp.cub.first + j;
        gr += qp.cub.values[0][j] * dg_full(I);
        gz += qp.cub.values[0][j] * dg_full(N + I);
      }
      const RingKernelValue ker = ring_kernel(r, z, qp.g.r, qp.g.z);
      const double w = qp.w * qp.g.a / bem.mu_bulk;
      vr += w * (ker.rz * gz + ker.rr * gr);
      vz += w * (ker.zz * gz + ker.zr * gr);
    }
  if (min_dist_out) *min_dist_out = min_dist;
  return {vr, vz};
}

}  // namespace ves
