#ifndef WV_SOLVER_HPP
#define WV_SOLVER_HPP

// Implicit midpoint (Crank-Nicolson) stepping for the integrated-form
// quasilinear wave model
//   (c^{-2} - 2 beta u) du/dt = Lap U + S,   U(t) = int_0^t u dr,
// with Dirichlet data on the cube faces.  Each step runs Picard iteration on
// the frozen-coefficient linear system, solved by Jacobi-preconditioned CG on
// interior nodes.  The same stepper covers linear solves (beta = 0), second
// linearizations (divided-difference source), and the nonlinear forward model.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wv/fields.hpp"
#include "wv/media.hpp"

namespace wv {

using BoundaryFn = std::function<void(double t, RFaces&)>;
// fills the interior source for the half step k -> k+1 (frame k given)
using SourceFn = std::function<void(int k, RField3&)>;

// write face data into the cube faces; x faces first, then y, then z, so the
// later families own the shared edges (the trace quadratures expect this)
inline void set_boundary(RField3& u, const RFaces& b) {
  const int n = u.n;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      u.at(0, a, c) = b.at(0, a, c);
      u.at(n - 1, a, c) = b.at(1, a, c);
    }
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      u.at(a, 0, c) = b.at(2, a, c);
      u.at(a, n - 1, c) = b.at(3, a, c);
    }
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      u.at(a, c, 0) = b.at(4, a, c);
      u.at(a, c, n - 1) = b.at(5, a, c);
    }
}

inline void zero_boundary(RField3& u) {
  const int n = u.n;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      u.at(0, a, c) = u.at(n - 1, a, c) = 0.0;
      u.at(a, 0, c) = u.at(a, n - 1, c) = 0.0;
      u.at(a, c, 0) = u.at(a, c, n - 1) = 0.0;
    }
}

inline double interior_dot(const RField3& a, const RField3& b) {
  const int n = a.n;
  double s = 0.0;
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j)
      for (int k = 1; k < n - 1; ++k) s += a.at(i, j, k) * b.at(i, j, k);
  return s;
}

// interior 7-point Laplacian into a preallocated output (boundary rows zero)
inline void laplacian7_into(const RField3& u, double dx, RField3& L) {
  const int n = u.n;
  const double idx2 = 1.0 / (dx * dx);
  std::fill(L.a.begin(), L.a.end(), 0.0);
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j)
      for (int k = 1; k < n - 1; ++k)
        L.at(i, j, k) = (u.at(i + 1, j, k) + u.at(i - 1, j, k) + u.at(i, j + 1, k) +
                         u.at(i, j - 1, k) + u.at(i, j, k + 1) + u.at(i, j, k - 1) -
                         6.0 * u.at(i, j, k)) *
                        idx2;
}

// Solve (D/dt) x - (dt/4) Lap x = rhs on the interior, x = 0 on the boundary.
// x carries the initial guess on entry and the solution on exit.  Returns the
// iteration count.  Dot products of deeply subnormal residual entries can
// underflow to exactly zero while the residual itself is nonzero; in that
// state there is nothing left to gain and the current iterate is returned.
inline int cg_solve(const RField3& D_over_dt, double dt, double dx, const RField3& rhs,
                    RField3& x, double tol = 1e-10, int maxit = 500) {
  const int n = x.n;
  const size_t sz = x.size();
  RField3 r(n), z(n), p(n), Ap(n), minv(n);
  zero_boundary(x);

  auto apply_A = [&](const RField3& v, RField3& out) {
    laplacian7_into(v, dx, out);
    for (size_t m = 0; m < sz; ++m) out.a[m] = D_over_dt.a[m] * v.a[m] - (dt / 4.0) * out.a[m];
  };

  apply_A(x, Ap);
  for (size_t m = 0; m < sz; ++m) r.a[m] = rhs.a[m] - Ap.a[m];
  zero_boundary(r);
  const double diag_lap = 6.0 * dt / (4.0 * dx * dx);
  for (size_t m = 0; m < sz; ++m) minv.a[m] = 1.0 / (D_over_dt.a[m] + diag_lap);
  for (size_t m = 0; m < sz; ++m) z.a[m] = minv.a[m] * r.a[m];
  p = z;
  double rz = interior_dot(r, z);
  double b_norm = std::sqrt(interior_dot(rhs, rhs));
  if (b_norm == 0.0) {
    std::fill(x.a.begin(), x.a.end(), 0.0);
    return 0;
  }
  for (int it = 0; it < maxit; ++it) {
    apply_A(p, Ap);
    double pAp = interior_dot(p, Ap);
    if (rz == 0.0 || pAp <= 0.0) return it;  // residual at underflow scale
    double alpha = rz / pAp;
    for (int i = 1; i < n - 1; ++i)
      for (int j = 1; j < n - 1; ++j)
        for (int k = 1; k < n - 1; ++k) {
          x.at(i, j, k) += alpha * p.at(i, j, k);
          r.at(i, j, k) -= alpha * Ap.at(i, j, k);
        }
    double rn = std::sqrt(interior_dot(r, r));
    if (rn <= tol * b_norm) return it + 1;
    for (size_t m = 0; m < sz; ++m) z.a[m] = minv.a[m] * r.a[m];
    double rz_new = interior_dot(r, z);
    for (int i = 1; i < n - 1; ++i)
      for (int j = 1; j < n - 1; ++j)
        for (int k = 1; k < n - 1; ++k)
          p.at(i, j, k) = z.at(i, j, k) + (rz_new / rz) * p.at(i, j, k);
    rz = rz_new;
  }
  throw NumericalBreakdown("cg: no convergence within iteration budget");
}

struct StepperOptions {
  double cg_tol = 1e-10;
  double picard_tol = 1e-10;
  double degen_thresh = 0.1;
  int picard_max = 20;
  int cg_max = 500;
  double cfl = 0.9;
};

class WaveStepper {
 public:
  WaveStepper(const Grid3D& g, const SoundSpeed& c, const Nonlinearity& beta,
              StepperOptions opt = {})
      : grid_(g), opt_(opt), u_(g.n), U_(g.n), c2inv_(g.n), c2_(g.n), beta_(g.n),
        faces_(g.n), ub_(g.n), lap_fixed_(g.n), scratch_(g.n), rhs_(g.n), sol_(g.n),
        u_new_(g.n), D_(g.n) {
    double cmax = 0.0;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k) {
          double cv = c.c({g.x(i), g.x(j), g.x(k)});
          c2_.at(i, j, k) = cv * cv;
          c2inv_.at(i, j, k) = 1.0 / (cv * cv);
          beta_.at(i, j, k) = beta.beta({g.x(i), g.x(j), g.x(k)});
          cmax = std::max(cmax, cv);
        }
    if (g.dt > opt.cfl * g.dx / cmax)
      throw ConfigError("time step violates the CFL guard dt <= " + std::to_string(opt.cfl) +
                        " dx / max c");
    is_linear_ = beta.is_zero();
  }

  void start(BoundaryFn bf) {
    bf_ = std::move(bf);
    std::fill(u_.a.begin(), u_.a.end(), 0.0);
    std::fill(U_.a.begin(), U_.a.end(), 0.0);
    k_ = 0;
    min_factor_ = 1e300;
    picard_iters_.clear();
    cg_iters_.clear();
    bf_(0.0, faces_);
    set_boundary(u_, faces_);
  }

  // advance one step; s_half optionally points at the integrated-form source
  // for this half step (interior values used, boundary ignored)
  const RField3& step(const RField3* s_half = nullptr) {
    const double dt = grid_.dt, dx = grid_.dx;
    const double t1 = (k_ + 1) * dt;
    const size_t sz = u_.size();

    bf_(t1, faces_);
    u_new_ = u_;
    set_boundary(u_new_, faces_);
    std::fill(ub_.a.begin(), ub_.a.end(), 0.0);
    set_boundary(ub_, faces_);
    // lap_fixed = Lap(U + (dt/4) u) + (dt/4) Lap(ub)
    for (size_t m = 0; m < sz; ++m) scratch_.a[m] = U_.a[m] + (dt / 4.0) * u_.a[m];
    laplacian7_into(scratch_, dx, lap_fixed_);
    laplacian7_into(ub_, dx, scratch_);
    for (size_t m = 0; m < sz; ++m) lap_fixed_.a[m] += (dt / 4.0) * scratch_.a[m];

    int pit = 0;
    for (; pit < opt_.picard_max; ++pit) {
      double mf = 1e300;
      for (size_t m = 0; m < sz; ++m) {
        double uh = 0.5 * (u_.a[m] + u_new_.a[m]);
        D_.a[m] = (c2inv_.a[m] - 2.0 * beta_.a[m] * uh) / dt;
        double fac = 1.0 - 2.0 * beta_.a[m] * c2_.a[m] * uh;
        mf = std::min(mf, fac);
      }
      min_factor_ = std::min(min_factor_, mf);
      if (mf < opt_.degen_thresh)
        throw NumericalBreakdown("degeneracy: min factor " + std::to_string(mf) + " at t=" +
                                 std::to_string(t1));
      for (size_t m = 0; m < sz; ++m) rhs_.a[m] = D_.a[m] * u_.a[m] + lap_fixed_.a[m];
      if (s_half)
        for (size_t m = 0; m < sz; ++m) rhs_.a[m] += s_half->a[m];
      zero_boundary(rhs_);
      sol_ = u_new_;
      int its = cg_solve(D_, dt, dx, rhs_, sol_, opt_.cg_tol, opt_.cg_max);
      cg_iters_.push_back(its);
      double du = 0.0, scale = 0.0;
      set_boundary(sol_, faces_);
      for (size_t m = 0; m < sz; ++m) {
        du = std::max(du, std::abs(sol_.a[m] - u_new_.a[m]));
        scale = std::max(scale, std::abs(sol_.a[m]));
      }
      u_new_ = sol_;
      if (is_linear_ || du <= opt_.picard_tol * std::max(scale, 1e-300)) {
        ++pit;
        break;
      }
    }
    picard_iters_.push_back(pit);
    for (size_t m = 0; m < sz; ++m) U_.a[m] += (dt / 2.0) * (u_.a[m] + u_new_.a[m]);
    u_ = u_new_;
    ++k_;
    return u_;
  }

  const Grid3D& grid() const { return grid_; }
  const RField3& u() const { return u_; }
  const RField3& U() const { return U_; }
  int frame() const { return k_; }
  bool linear() const { return is_linear_; }
  double min_factor() const { return min_factor_; }
  const std::vector<int>& picard_iters() const { return picard_iters_; }
  const std::vector<int>& cg_iters() const { return cg_iters_; }

 private:
  Grid3D grid_;
  StepperOptions opt_;
  RField3 u_, U_, c2inv_, c2_, beta_;
  RFaces faces_;
  RField3 ub_, lap_fixed_, scratch_, rhs_, sol_, u_new_, D_;
  BoundaryFn bf_;
  bool is_linear_ = true;
  int k_ = 0;
  double min_factor_ = 1e300;
  std::vector<int> picard_iters_, cg_iters_;
};

// ------------------------------------------------------------------ profiles

// value(t) on all six faces
inline BoundaryFn uniform_boundary(std::function<double(double)> value) {
  return [value = std::move(value)](double t, RFaces& f) {
    double v = value(t);
    for (int face = 0; face < 6; ++face)
      std::fill(f.f[face].begin(), f.f[face].end(), v);
  };
}

// C exp(-1/t^2): smooth onset, identically flat at t = 0
inline double onset_flat(double t, double amplitude = 1.0) {
  return t > 0 ? amplitude * std::exp(-1.0 / (t * t)) : 0.0;
}

inline BoundaryFn onset_profile(double amplitude) {
  return uniform_boundary([amplitude](double t) { return onset_flat(t, amplitude); });
}

inline BoundaryFn zero_profile() {
  return [](double, RFaces& f) {
    for (int face = 0; face < 6; ++face)
      std::fill(f.f[face].begin(), f.f[face].end(), 0.0);
  };
}

inline BoundaryFn reversed_profile(BoundaryFn bf, double T) {
  return [bf = std::move(bf), T](double t, RFaces& f) { bf(T - t, f); };
}

// --------------------------------------------------------------- full solves

struct SolveReport {
  RSpaceTimeField field;  // frames when stored
  RBoundaryTrace dn;      // outward normal derivative per time node
  double min_factor = 1e300;
  int max_picard = 0;
  long total_cg = 0;
};

inline SolveReport solve_wave(const Grid3D& g, const SoundSpeed& c, const Nonlinearity& beta,
                              const BoundaryFn& bf, const SourceFn& source = nullptr,
                              bool store_field = true, StepperOptions opt = {}) {
  WaveStepper st(g, c, beta, opt);
  st.start(bf);
  SolveReport rep;
  rep.field.grid = g;
  rep.dn.grid = g;
  if (store_field) rep.field.frames.push_back(st.u());
  rep.dn.steps.push_back(normal_derivative_frame(st.u(), g.dx));
  RField3 src(g.n);
  for (int k = 0; k + 1 < g.nt; ++k) {
    const RField3* sp = nullptr;
    if (source) {
      source(k, src);
      sp = &src;
    }
    const RField3& u = st.step(sp);
    if (store_field) rep.field.frames.push_back(u);
    rep.dn.steps.push_back(normal_derivative_frame(u, g.dx));
  }
  rep.min_factor = st.min_factor();
  for (int p : st.picard_iters()) rep.max_picard = std::max(rep.max_picard, p);
  for (int c_ : st.cg_iters()) rep.total_cg += c_;
  return rep;
}

// discrete energy matched to the implicit midpoint structure: kinetic part on
// interior nodes, potential part on forward-difference links (boundary links
// included); exactly conserved once the boundary data stops
inline double scheme_energy(const RField3& u, const RField3& U, const RField3& c2inv,
                            double dx) {
  const int n = u.n;
  double kin = 0.0;
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j)
      for (int k = 1; k < n - 1; ++k) kin += c2inv.at(i, j, k) * u.at(i, j, k) * u.at(i, j, k);
  double pot = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i + 1 < n) {
          double d = U.at(i + 1, j, k) - U.at(i, j, k);
          pot += d * d;
        }
        if (j + 1 < n) {
          double d = U.at(i, j + 1, k) - U.at(i, j, k);
          pot += d * d;
        }
        if (k + 1 < n) {
          double d = U.at(i, j, k + 1) - U.at(i, j, k);
          pot += d * d;
        }
      }
  return 0.5 * kin * dx * dx * dx + 0.5 * pot * dx;
}

// ------------------------------------------------ streaming boundary identity

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // relative
};

// Three forward passes at fixed memory: the first linearization v (storing
// v^2 frames in single precision), the source-driven second linearization w
// paired against h on the boundary, and the reversed-data field paired against
// beta d_t(v^2) in the volume.  Data: f = e^{-1/t^2}, h = e^{-1/(T-t)^2},
// uniform over all faces.
inline IdentityReport boundary_identity_check(int n, double dt, double beta = 0.3,
                                              double T = 3.48) {
  Grid3D g(n, dt, T);
  const int nt = g.nt;
  const double dx = g.dx;
  const size_t fsz = (size_t)n * n * n;
  SoundSpeed c = SoundSpeed::constant(1.0);
  Nonlinearity nl = Nonlinearity::constant(0.0);

  auto bf = onset_profile(1.0);
  auto bh = uniform_boundary([T](double t) { return onset_flat(T - t); });

  auto trap3 = [n](int i, int j, int k) {
    double w = 1.0;
    if (i == 0 || i == n - 1) w *= 0.5;
    if (j == 0 || j == n - 1) w *= 0.5;
    if (k == 0 || k == n - 1) w *= 0.5;
    return w;
  };

  // pass 1: v, storing v^2 in single precision
  std::vector<float> v2((size_t)nt * fsz);
  {
    WaveStepper stv(g, c, nl);
    stv.start(bf);
    for (size_t m = 0; m < fsz; ++m) {
      double uv = stv.u().a[m];
      v2[m] = (float)(uv * uv);
    }
    for (int k = 0; k + 1 < nt; ++k) {
      const RField3& u = stv.step();
      float* dst = v2.data() + (size_t)(k + 1) * fsz;
      for (size_t m = 0; m < fsz; ++m) dst[m] = (float)(u.a[m] * u.a[m]);
    }
  }

  // pass 2: w driven by the divided-difference source, paired against h on
  // the boundary (trapezoid in t)
  double lhs = 0.0;
  {
    WaveStepper stw(g, c, nl);
    stw.start(zero_profile());
    RFaces hfaces(n);
    auto pair_face = [&](const RFaces& tr, const RFaces& h) {
      double acc = 0.0;
      for (int face = 0; face < 6; ++face)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            acc += trap_w(a, n - 1) * trap_w(b, n - 1) * tr.at(face, a, b) * h.at(face, a, b);
      return acc;
    };
    bh(0.0, hfaces);
    lhs += 0.5 * pair_face(normal_derivative_frame(stw.u(), dx), hfaces);
    RField3 S(n);
    for (int k = 0; k + 1 < nt; ++k) {
      const float* a0 = v2.data() + (size_t)k * fsz;
      const float* a1 = v2.data() + (size_t)(k + 1) * fsz;
      for (size_t m = 0; m < fsz; ++m) S.a[m] = beta * ((double)a1[m] - (double)a0[m]) / dt;
      const RField3& w = stw.step(&S);
      bh((k + 1) * dt, hfaces);
      double wt = (k == nt - 2) ? 0.5 : 1.0;
      lhs += wt * pair_face(normal_derivative_frame(w, dx), hfaces);
    }
    lhs *= dx * dx * dt;
  }

  // pass 3: psi solves forward with the reversed data; theta(t_j) = psi(s_m),
  // m = nt-1-j, so d_t theta = -d_s psi at the mirrored index
  double rhs = 0.0;
  {
    auto dv2_at = [&](int k, RField3& out) {
      const float* f0 = v2.data() + (size_t)k * fsz;
      if (k == 0) {
        const float* f1 = v2.data() + fsz;
        const float* f2 = v2.data() + 2 * fsz;
        for (size_t m = 0; m < fsz; ++m)
          out.a[m] = (-3.0 * (double)f0[m] + 4.0 * (double)f1[m] - (double)f2[m]) / (2 * dt);
      } else if (k == nt - 1) {
        const float* f1 = v2.data() + (size_t)(nt - 2) * fsz;
        const float* f2 = v2.data() + (size_t)(nt - 3) * fsz;
        for (size_t m = 0; m < fsz; ++m)
          out.a[m] = (3.0 * (double)f0[m] - 4.0 * (double)f1[m] + (double)f2[m]) / (2 * dt);
      } else {
        const float* fp = v2.data() + (size_t)(k + 1) * fsz;
        const float* fm = v2.data() + (size_t)(k - 1) * fsz;
        for (size_t m = 0; m < fsz; ++m)
          out.a[m] = ((double)fp[m] - (double)fm[m]) / (2 * dt);
      }
    };
    auto vol_pair = [&](const RField3& dv2, const RField3& dth) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            acc += trap3(i, j, k) * dv2.at(i, j, k) * dth.at(i, j, k);
      return acc;
    };

    WaveStepper stp(g, c, nl);
    stp.start(reversed_profile(bh, T));
    std::vector<RField3> win;
    win.push_back(stp.u());
    std::vector<RField3> first3;
    first3.push_back(stp.u());
    RField3 dth(n), dv2f(n);
    for (int m = 0; m + 1 < nt; ++m) {
      win.push_back(stp.step());
      if ((int)win.size() > 3) win.erase(win.begin());
      if ((int)first3.size() < 3) first3.push_back(win.back());
      if (m >= 1) {
        for (size_t q = 0; q < fsz; ++q)
          dth.a[q] = -(win[2].a[q] - win[0].a[q]) / (2 * dt);
        int j = nt - 1 - m;
        dv2_at(j, dv2f);
        for (size_t q = 0; q < fsz; ++q) dth.a[q] *= beta;
        rhs += vol_pair(dv2f, dth);
      }
    }
    // endpoint stencils of d_t theta at t = T and t = 0
    for (size_t q = 0; q < fsz; ++q)
      dth.a[q] = beta * (3.0 * first3[0].a[q] - 4.0 * first3[1].a[q] + first3[2].a[q]) / (2 * dt);
    dv2_at(nt - 1, dv2f);
    rhs += 0.5 * vol_pair(dv2f, dth);
    for (size_t q = 0; q < fsz; ++q)
      dth.a[q] = beta * (-3.0 * win[2].a[q] + 4.0 * win[1].a[q] - win[0].a[q]) / (2 * dt);
    dv2_at(0, dv2f);
    rhs += 0.5 * vol_pair(dv2f, dth);
    rhs *= dx * dx * dx * dt;
  }

  IdentityReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.gap = std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
  return rep;
}

}  // namespace wv

#endif
