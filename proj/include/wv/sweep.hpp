#ifndef WV_SWEEP_HPP
#define WV_SWEEP_HPP

// Experiment drivers: linearization remainders, boundary-trace difference
// ladders in beta and in the sound-speed family, degeneracy scans, and the
// perturbation-stability probes (geodesic, Jacobi determinant, beam field,
// scalar ODE).

#include <string>
#include <vector>

#include "wv/beam.hpp"
#include "wv/fit.hpp"
#include "wv/solver.hpp"
#include "wv/transform.hpp"

namespace wv {

// ------------------------------------------------ linearization remainders

struct RemainderRow {
  double eps = 0.0;
  double q = 0.0;  // ||u - eps v||_{L2(M)}
  double r = 0.0;  // ||u - eps v - eps^2 w||_{L2(M)}
  double min_factor = 0.0;
};

inline std::vector<RemainderRow> expansion_remainders(const Grid3D& g, double beta, double amp,
                                                      const std::vector<double>& eps_list,
                                                      StepperOptions opt = {}) {
  SoundSpeed c1 = SoundSpeed::constant(1.0);
  Nonlinearity zero = Nonlinearity::constant(0.0);
  SolveReport v = solve_wave(g, c1, zero, onset_profile(amp), nullptr, true, opt);

  // second linearization: zero data, divided-difference source from v^2
  std::vector<RField3> v2(g.nt, RField3(g.n));
  for (int k = 0; k < g.nt; ++k)
    for (size_t m = 0; m < v2[k].size(); ++m) {
      double uv = v.field.frames[k].a[m];
      v2[k].a[m] = uv * uv;
    }
  SourceFn wsrc = [&](int k, RField3& s) {
    for (size_t m = 0; m < s.size(); ++m) s.a[m] = beta * (v2[k + 1].a[m] - v2[k].a[m]) / g.dt;
  };
  SolveReport w = solve_wave(g, c1, zero, zero_profile(), wsrc, true, opt);

  std::vector<RemainderRow> rows;
  for (double eps : eps_list) {
    Nonlinearity nl = Nonlinearity::constant(beta);
    SolveReport u = solve_wave(g, c1, nl, onset_profile(eps * amp), nullptr, true, opt);
    RSpaceTimeField Q, R;
    Q.grid = R.grid = g;
    Q.frames.resize(g.nt, RField3(g.n));
    R.frames.resize(g.nt, RField3(g.n));
    for (int k = 0; k < g.nt; ++k)
      for (size_t m = 0; m < Q.frames[k].size(); ++m) {
        double q = u.field.frames[k].a[m] - eps * v.field.frames[k].a[m];
        Q.frames[k].a[m] = q;
        R.frames[k].a[m] = q - eps * eps * w.field.frames[k].a[m];
      }
    RemainderRow row;
    row.eps = eps;
    row.q = l2_m(Q);
    row.r = l2_m(R);
    row.min_factor = u.min_factor;
    rows.push_back(row);
  }
  return rows;
}

// ------------------------------------------------------- trace differences

inline double trace_difference(const RBoundaryTrace& a, const RBoundaryTrace& b) {
  RBoundaryTrace d;
  d.grid = a.grid;
  d.steps.resize(a.steps.size(), RFaces(a.grid.n));
  for (size_t k = 0; k < a.steps.size(); ++k)
    for (int face = 0; face < 6; ++face)
      for (size_t m = 0; m < a.steps[k].f[face].size(); ++m)
        d.steps[k].f[face][m] = a.steps[k].f[face][m] - b.steps[k].f[face][m];
  return l2_sigma(d);
}

inline RBoundaryTrace dn_of_run(const Grid3D& g, const SoundSpeed& c, double beta, double amp,
                                double* min_factor = nullptr, StepperOptions opt = {}) {
  SolveReport rep =
      solve_wave(g, c, Nonlinearity::constant(beta), onset_profile(amp), nullptr, false, opt);
  if (min_factor) *min_factor = rep.min_factor;
  return std::move(rep.dn);
}

struct LadderPoint {
  double delta = 0.0;
  double dn_diff = 0.0;
};

struct LadderResult {
  std::vector<LadderPoint> points;
  SlopeFit fit;
  bool monotone = false;
};

inline LadderResult finish_ladder(std::vector<LadderPoint> pts) {
  LadderResult r;
  r.points = std::move(pts);
  std::vector<double> xs, ys;
  for (const auto& p : r.points) {
    xs.push_back(p.delta);
    ys.push_back(p.dn_diff);
  }
  r.fit = loglog_fit(xs, ys);
  r.monotone = true;
  for (size_t i = 0; i + 1 < r.points.size(); ++i)
    if (r.points[i].dn_diff >= r.points[i + 1].dn_diff + 1e-10) r.monotone = false;
  return r;
}

// beta2 = beta1 + delta against the beta1 anchor, fixed medium
inline LadderResult beta_ladder(const Grid3D& g, const SoundSpeed& c, double beta1,
                                const std::vector<double>& deltas, double amp,
                                StepperOptions opt = {}) {
  RBoundaryTrace base = dn_of_run(g, c, beta1, amp, nullptr, opt);
  std::vector<LadderPoint> pts;
  for (double d : deltas) {
    RBoundaryTrace tr = dn_of_run(g, c, beta1 + d, amp, nullptr, opt);
    pts.push_back({d, trace_difference(base, tr)});
  }
  return finish_ladder(std::move(pts));
}

// c_alpha family ladder at fixed beta (the linear map when beta = 0)
inline LadderResult alpha_ladder(const Grid3D& g, double beta, double alpha1,
                                 const std::vector<double>& deltas, double amp,
                                 StepperOptions opt = {}) {
  RBoundaryTrace base = dn_of_run(g, SoundSpeed::herglotz(alpha1), beta, amp, nullptr, opt);
  std::vector<LadderPoint> pts;
  for (double d : deltas) {
    RBoundaryTrace tr = dn_of_run(g, SoundSpeed::herglotz(alpha1 + d), beta, amp, nullptr, opt);
    pts.push_back({d, trace_difference(base, tr)});
  }
  return finish_ladder(std::move(pts));
}

// ---------------------------------------------------------- breakdown scans

struct ScanRow {
  double beta = 0.0;
  bool ok = false;
  double min_factor = 0.0;
  std::string message;
};

inline ScanRow try_forward_run(const Grid3D& g, const SoundSpeed& c, double beta, double amp,
                               StepperOptions opt = {}) {
  ScanRow row;
  row.beta = beta;
  try {
    WaveStepper st(g, c, Nonlinearity::constant(beta), opt);
    auto bf = onset_profile(amp);
    st.start(bf);
    for (int k = 0; k + 1 < g.nt; ++k) st.step();
    row.ok = true;
    row.min_factor = st.min_factor();
  } catch (const NumericalBreakdown& e) {
    row.ok = false;
    row.min_factor = 0.0;
    row.message = e.what();
  }
  return row;
}

inline std::vector<ScanRow> breakdown_scan(const Grid3D& g, const SoundSpeed& c, double amp,
                                           const std::vector<double>& betas,
                                           StepperOptions opt = {}) {
  std::vector<ScanRow> rows;
  for (double b : betas) rows.push_back(try_forward_run(g, c, b, amp, opt));
  return rows;
}

// --------------------------------------------------- perturbation stability

// sup over a cube lattice of |c1 - c2|
inline double c0_distance(const SoundSpeed& c1, const SoundSpeed& c2, int nsamp = 21) {
  double worst = 0.0;
  for (int i = 0; i < nsamp; ++i)
    for (int j = 0; j < nsamp; ++j)
      for (int k = 0; k < nsamp; ++k) {
        Vec3 x{-1.0 + 2.0 * i / (nsamp - 1), -1.0 + 2.0 * j / (nsamp - 1),
               -1.0 + 2.0 * k / (nsamp - 1)};
        worst = std::max(worst, std::abs(c1.c(x) - c2.c(x)));
      }
  return worst;
}

// exit-state distance between the geodesics of two media from the same entry
inline double geodesic_deviation(const SoundSpeed& c1, const SoundSpeed& c2, const Vec3& p,
                                 const Vec3& dir, double h = 1e-3) {
  Geodesic g1 = shoot_geodesic(c1, p, dir, h);
  Geodesic g2 = shoot_geodesic(c2, p, dir, h);
  return std::max(norm(g1.x_exit - g2.x_exit),
                  std::max(norm(g1.v_exit - g2.v_exit), std::abs(g1.t_exit - g2.t_exit)));
}

// |det Y| compared at the same fraction of the common arc length
inline double jacobi_deviation(const SoundSpeed& c1, const SoundSpeed& c2, const Vec3& p,
                               const Vec3& dir, double h = 1e-3) {
  FermiChart ch1(c1, shoot_geodesic(c1, p, dir, h));
  FermiChart ch2(c2, shoot_geodesic(c2, p, dir, h));
  double send = 0.9 * std::min(ch1.s_max(), ch2.s_max());
  JacobiFlow f1 = integrate_jacobi(ch1, 0.0, 0.0, send, h);
  JacobiFlow f2 = integrate_jacobi(ch2, 0.0, 0.0, send, h);
  return std::abs(f1.detY_at(send) - f2.detY_at(send));
}

// sup over tube sample points of the beam field difference at fixed tau
inline double beam_sup_deviation(const GaussianBeam& b1, const GaussianBeam& b2) {
  double send = 0.9 * std::min(b1.s_max(), b2.s_max());
  double worst = 0.0;
  const Vec3 zdirs[4] = {{0, 0, 0}, {0.05, 0, 0}, {0, 0.05, 0}, {0, 0, 0.05}};
  for (int is = 1; is <= 9; ++is) {
    double s = send * is / 10.0;
    for (const Vec3& z : zdirs) {
      Vec4 tx = b1.chart().F(s, z);
      cplx d = b1.value(tx[0], {tx[1], tx[2], tx[3]}) - b2.value(tx[0], {tx[1], tx[2], tx[3]});
      worst = std::max(worst, std::abs(d));
    }
  }
  return worst;
}

// scalar model problem dx/dt = sin(x) + alpha: empirical perturbation constant
// sup_t |x1 - x2| / (|xi1 - xi2| + |alpha1 - alpha2|)
inline double ode_perturbation_constant(double xi1, double alpha1, double xi2, double alpha2,
                                        double T = 2.0, double h = 1e-3) {
  auto f1 = [&](double, const State<1>& y) { return State<1>{std::sin(y[0]) + alpha1}; };
  auto f2 = [&](double, const State<1>& y) { return State<1>{std::sin(y[0]) + alpha2}; };
  Trajectory<1> t1 = rk4(f1, State<1>{xi1}, 0.0, T, h);
  Trajectory<1> t2 = rk4(f2, State<1>{xi2}, 0.0, T, h);
  double sup = 0.0;
  size_t m = std::min(t1.y.size(), t2.y.size());
  for (size_t k = 0; k < m; ++k) sup = std::max(sup, std::abs(t1.y[k][0] - t2.y[k][0]));
  double denom = std::abs(xi1 - xi2) + std::abs(alpha1 - alpha2);
  if (denom == 0.0) throw ConfigError("ode probe: identical data");
  return sup / denom;
}

}  // namespace wv

#endif
