#ifndef WV_FERMI_HPP
#define WV_FERMI_HPP

// Fermi machinery along the null lift theta(t) = (t, gamma(t)) of a unit-speed
// geodesic: the parallel pseudo-orthonormal frame, the chart
// F(s,z) = exp_{theta(s)}(z^i E_i(s)) by geodesic shooting, the pulled-back
// metric, the second-order Fermi coefficient feeding the Riccati flow, and the
// damped-Newton chart inverse.
//
// s parametrizes the lift with theta(s) = theta(t), s = sqrt(2) t; this is the
// arc parameter induced by the frame normalization <e0,e1> = 1.

#include <algorithm>
#include <cmath>
#include <vector>

#include "wv/geodesic.hpp"
#include "wv/linalg.hpp"
#include "wv/media.hpp"

namespace wv {

inline constexpr double kSqrt2 = 1.4142135623730951;

// rotation taking unit vector a to unit vector b (Rodrigues)
inline Mat3 rotation_from_to(const Vec3& a_in, const Vec3& b_in) {
  Vec3 a = normalized(a_in), b = normalized(b_in);
  Vec3 v = cross(a, b);
  double s = norm(v), cth = dot(a, b);
  if (s < 1e-15) {
    if (cth > 0) return mat3_eye();
    Mat3 m = mat3_eye();
    for (int i = 0; i < 3; ++i) m[i][i] = -1.0;  // antipodal: reflect
    return m;
  }
  Mat3 vx = {{{0, -v[2], v[1]}, {v[2], 0, -v[0]}, {-v[1], v[0], 0}}};
  Mat3 r = mat3_eye() + vx + ((1 - cth) / (s * s)) * mul(vx, vx);
  return r;
}

class FermiChart {
 public:
  // text: g-time margin the chart is integrated beyond [0, t_exit] on each side
  FermiChart(const SoundSpeed& c, const Geodesic& geo, double text = 1.0)
      : c_(c), geo_(geo), flat_(c.is_constant()), h_(geo.h), text_(text) {
    t_lo_ = -text;
    n_back_ = (int)std::ceil(text / h_);
    n_fwd_ = (int)std::ceil((geo.t_exit + text) / h_);
    t_lo_ = -n_back_ * h_;
    build_lattice();
    build_frames();
    check_frames();
  }

  const SoundSpeed& medium() const { return c_; }
  const Geodesic& geodesic() const { return geo_; }
  double s_max() const { return kSqrt2 * geo_.t_exit; }

  GeoState state_at(double t) const {
    if (flat_) {
      double cp = c_.constant_value();
      GeoState y;
      for (int d = 0; d < 3; ++d) {
        y[d] = geo_.p[d] + cp * t * geo_.dir[d];
        y[3 + d] = cp * geo_.dir[d];
      }
      return y;
    }
    auto f = [&](double, const GeoState& s) { return geo_rhs(c_, s); };
    int i = lattice_index(t);
    double dt = t - ts_[i];
    if (std::abs(dt) < 1e-15) return ys_[i];
    return rk4_step(f, ys_[i], ts_[i], dt);
  }

  std::array<Vec4, 4> frame_at(double t) const {
    if (flat_) return Es_.front();
    int i = lattice_index(t);
    double dt = t - ts_[i];
    if (std::abs(dt) < 1e-15) return Es_[i];
    auto f = [&](double, const GeoState& s) { return geo_rhs(c_, s); };
    GeoState ym = rk4_step(f, ys_[i], ts_[i], 0.5 * dt);
    GeoState ye = rk4_step(f, ys_[i], ts_[i], dt);
    return transport_stage(Es_[i], ys_[i], ym, ye, dt);
  }

  // Riemannian exponential of g at x0 with initial velocity w, lambda in [0,1]
  Vec3 exp_spatial(const Vec3& x0, const Vec3& w, int nstep = 24) const {
    if (flat_) return x0 + w;
    double wn = norm(w);
    if (wn < 1e-16) return x0;
    GeoState y{x0[0], x0[1], x0[2], w[0], w[1], w[2]};
    auto f = [&](double, const GeoState& s) { return geo_rhs(c_, s); };
    double dl = 1.0 / nstep;
    for (int i = 0; i < nstep; ++i) y = rk4_step(f, y, i * dl, dl);
    return {y[0], y[1], y[2]};
  }

  // chart map: (s, z) -> (t, x)
  Vec4 F(double s, const Vec3& z) const {
    double t = s / kSqrt2;
    GeoState st = state_at(t);
    auto E = frame_at(t);
    Vec4 V = z[0] * E[1] + z[1] * E[2] + z[2] * E[3];
    Vec3 xout = exp_spatial({st[0], st[1], st[2]}, {V[1], V[2], V[3]});
    return {t + V[0], xout[0], xout[1], xout[2]};
  }

  // columns a = d F / d q^a, q = (s, z1, z2, z3), central differences
  Mat4 dF(double s, const Vec3& z, double hd = 2e-5) const {
    Mat4 J{};
    double q[4] = {s, z[0], z[1], z[2]};
    for (int a = 0; a < 4; ++a) {
      double qp[4] = {q[0], q[1], q[2], q[3]}, qm[4] = {q[0], q[1], q[2], q[3]};
      qp[a] += hd;
      qm[a] -= hd;
      Vec4 Fp = F(qp[0], {qp[1], qp[2], qp[3]});
      Vec4 Fm = F(qm[0], {qm[1], qm[2], qm[3]});
      for (int r = 0; r < 4; ++r) J[r][a] = (Fp[r] - Fm[r]) / (2 * hd);
    }
    return J;
  }

  // (gbar o F)_{ab}(s,z) = dF^T gbar dF
  Mat4 pulled_metric(double s, const Vec3& z, double hd = 2e-5) const {
    Mat4 J = dF(s, z, hd);
    Vec4 Fc = F(s, z);
    Mat4 gb = gbar_matrix(c_, {Fc[1], Fc[2], Fc[3]});
    return mul(transpose(J), mul(gb, J));
  }

  // Riccati coefficient: minus one half of the z-Hessian of the ss-component of
  // the pulled-back metric, by 19-point second differences at radius hz.
  Mat3 B_at(double s, double hz = 0.02) const {
    if (flat_) return mat3_zero();  // metric constant, all higher coefficients vanish
    auto g00 = [&](const Vec3& z) { return pulled_metric(s, z)[0][0]; };
    double center = g00({0, 0, 0});
    Mat3 H = mat3_zero();
    double ax[3];
    for (int i = 0; i < 3; ++i) {
      Vec3 e{0, 0, 0};
      e[i] = hz;
      ax[i] = g00(e);
      double b = g00(-1.0 * e);
      H[i][i] = (ax[i] - 2 * center + b) / (hz * hz);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        Vec3 ei{0, 0, 0}, ej{0, 0, 0};
        ei[i] = hz;
        ej[j] = hz;
        double app = g00(ei + ej), amm = g00(-1.0 * (ei + ej));
        double apm = g00(ei - ej), amp = g00(ej - ei);
        H[i][j] = H[j][i] = (app + amm - apm - amp) / (4 * hz * hz);
      }
    double asym = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) asym = std::max(asym, std::abs(H[i][j] - H[j][i]));
    if (asym > 1e-4) throw NumericalBreakdown("fermi B: non-symmetric Hessian");
    return -0.5 * sym(H);
  }

  // damped Newton for F(s,z) = (t,x); returns false when it cannot converge.
  // For a constant medium the chart is affine and inverted in closed form.
  bool invert(const Vec4& tx, double& s, Vec3& z, int maxit = 30) const {
    if (flat_) {
      double c0 = c_.constant_value();
      Vec3 u{tx[1] - geo_.p[0], tx[2] - geo_.p[1], tx[3] - geo_.p[2]};
      double ud = dot(u, geo_.dir) / c0;
      s = (kSqrt2 * tx[0] + kSqrt2 * ud) * 0.5;
      z = {(kSqrt2 * ud - kSqrt2 * tx[0]) * 0.5, dot(u, n2_) / c0, dot(u, n3_) / c0};
      return true;
    }
    double q[4] = {kSqrt2 * tx[0], 0, 0, 0};
    auto resid = [&](const double* qq, Vec4& r) {
      Vec4 Fc = F(qq[0], {qq[1], qq[2], qq[3]});
      r = Fc - tx;
      return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2]), std::abs(r[3])});
    };
    Vec4 r;
    double rn = resid(q, r);
    for (int it = 0; it < maxit; ++it) {
      if (rn < 1e-10) {
        s = q[0];
        z = {q[1], q[2], q[3]};
        return true;
      }
      Mat4 J = dF(q[0], {q[1], q[2], q[3]});
      Vec4 dq = solve4(J, r);
      if (!std::isfinite(dq[0])) return false;
      double step = 1.0;
      for (int halve = 0; halve < 6; ++halve) {
        double qn[4];
        for (int a = 0; a < 4; ++a) qn[a] = q[a] - step * dq[a];
        Vec4 rnew;
        double rnn = resid(qn, rnew);
        if (rnn < rn || halve == 5) {
          for (int a = 0; a < 4; ++a) q[a] = qn[a];
          rn = rnn;
          r = rnew;
          break;
        }
        step *= 0.5;
      }
    }
    if (rn < 1e-8) {  // loose fallback: still a usable inverse
      s = q[0];
      z = {q[1], q[2], q[3]};
      return true;
    }
    return false;
  }

  // shrink from 0.25 until the Newton inverse round-trips on a test lattice
  double rho_max() const {
    if (rho_max_ > 0) return rho_max_;
    double rho = 0.25;
    for (int attempt = 0; attempt < 12; ++attempt, rho *= 0.8) {
      if (roundtrip_ok(rho)) {
        rho_max_ = rho;
        return rho;
      }
    }
    throw NumericalBreakdown("fermi chart: inversion fails at all tested radii");
  }

 private:
  int lattice_index(double t) const {
    int i = (int)std::floor((t - t_lo_) / h_);
    return std::min(std::max(i, 0), (int)ts_.size() - 2);
  }

  void build_lattice() {
    int total = n_back_ + n_fwd_ + 1;
    ts_.resize(total);
    ys_.resize(total);
    double cp = c_.c(geo_.p);
    GeoState y0{geo_.p[0], geo_.p[1], geo_.p[2], cp * geo_.dir[0], cp * geo_.dir[1], cp * geo_.dir[2]};
    ys_[n_back_] = y0;
    for (int i = 0; i < total; ++i) ts_[i] = t_lo_ + i * h_;
    if (flat_) return;
    auto f = [&](double, const GeoState& s) { return geo_rhs(c_, s); };
    for (int i = n_back_; i + 1 < total; ++i) ys_[i + 1] = rk4_step(f, ys_[i], ts_[i], h_);
    for (int i = n_back_; i > 0; --i) ys_[i - 1] = rk4_step(f, ys_[i], ts_[i], -h_);
  }

  // dE/dt (spatial rows) = -Gamma^k_ij xdot^i E^j; time components ride along
  std::array<Vec4, 4> transport_rhs(const GeoState& st, const std::array<Vec4, 4>& E) const {
    Vec3 x{st[0], st[1], st[2]}, v{st[3], st[4], st[5]};
    Vec3 dl = c_.grad_log_c(x);
    std::array<Vec4, 4> dE{};
    for (int m = 0; m < 4; ++m) {
      Vec3 e{E[m][1], E[m][2], E[m][3]};
      double vd = dot(e, dl), ev = dot(v, e);
      // -Gamma^k_ij v^i e^j = v^k (e.dl) + e^k (v.dl) - (v.e) dl^k
      dE[m][0] = 0.0;
      for (int k = 0; k < 3; ++k)
        dE[m][k + 1] = v[k] * vd + e[k] * dot(v, dl) - ev * dl[k];
    }
    return dE;
  }

  std::array<Vec4, 4> transport_stage(const std::array<Vec4, 4>& E, const GeoState& y0,
                                      const GeoState& ym, const GeoState& ye, double dt) const {
    auto k1 = transport_rhs(y0, E);
    auto add = [](const std::array<Vec4, 4>& a, double s, const std::array<Vec4, 4>& b) {
      std::array<Vec4, 4> r;
      for (int m = 0; m < 4; ++m) r[m] = a[m] + s * b[m];
      return r;
    };
    auto k2 = transport_rhs(ym, add(E, 0.5 * dt, k1));
    auto k3 = transport_rhs(ym, add(E, 0.5 * dt, k2));
    auto k4 = transport_rhs(ye, add(E, dt, k3));
    std::array<Vec4, 4> r;
    for (int m = 0; m < 4; ++m)
      r[m] = E[m] + (dt / 6.0) * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
    return r;
  }

  void build_frames() {
    double cp = c_.c(geo_.p);
    Mat3 R = rotation_from_to({1, 0, 0}, geo_.dir);
    n2_ = {R[0][1], R[1][1], R[2][1]};
    n3_ = {R[0][2], R[1][2], R[2][2]};
    std::array<Vec4, 4> E0;
    E0[0] = {1.0 / kSqrt2, cp * R[0][0] / kSqrt2, cp * R[1][0] / kSqrt2, cp * R[2][0] / kSqrt2};
    E0[1] = {-1.0 / kSqrt2, cp * R[0][0] / kSqrt2, cp * R[1][0] / kSqrt2, cp * R[2][0] / kSqrt2};
    E0[2] = {0.0, cp * R[0][1], cp * R[1][1], cp * R[2][1]};
    E0[3] = {0.0, cp * R[0][2], cp * R[1][2], cp * R[2][2]};
    if (flat_) {
      Es_.assign(1, E0);
      return;
    }
    Es_.resize(ts_.size());
    Es_[n_back_] = E0;
    auto march = [&](int from, int to, int stepdir) {
      for (int i = from; i != to; i += stepdir) {
        int j = i + stepdir;
        GeoState ym;
        for (int d = 0; d < 6; ++d) ym[d] = 0.5 * (ys_[i][d] + ys_[j][d]);
        Es_[j] = transport_stage(Es_[i], ys_[i], ym, ys_[j], ts_[j] - ts_[i]);
      }
    };
    march(n_back_, (int)ts_.size() - 1, +1);
    march(n_back_, 0, -1);
  }

  double pairing_g(const Vec3& x, const Vec4& u, const Vec4& v) const {
    Mat4 g = gbar_matrix(c_, x);
    return dot4(u, mul(g, v));
  }
  static double dot4(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
  }

  void check_frames() {
    // pseudo-orthonormality at the exit end: <e0,e1>=1, <e2,e2>=<e3,e3>=1, rest 0
    auto E = frame_at(geo_.t_exit);
    GeoState ye = state_at(geo_.t_exit);
    Vec3 x{ye[0], ye[1], ye[2]};
    double dev = std::max({std::abs(pairing_g(x, E[0], E[1]) - 1.0),
                           std::abs(pairing_g(x, E[2], E[2]) - 1.0),
                           std::abs(pairing_g(x, E[3], E[3]) - 1.0),
                           std::abs(pairing_g(x, E[0], E[0])), std::abs(pairing_g(x, E[1], E[1])),
                           std::abs(pairing_g(x, E[0], E[2])), std::abs(pairing_g(x, E[0], E[3])),
                           std::abs(pairing_g(x, E[1], E[2])), std::abs(pairing_g(x, E[1], E[3])),
                           std::abs(pairing_g(x, E[2], E[3]))});
    if (dev > 1e-5) throw NumericalBreakdown("fermi frame: pseudo-orthonormality lost");
  }

  bool roundtrip_ok(double rho) const {
    const double svals[3] = {0.1 * s_max(), 0.5 * s_max(), 0.9 * s_max()};
    const Vec3 dirs[10] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1},
                           {0.5773502691896258, 0.5773502691896258, 0.5773502691896258},
                           {-0.5773502691896258, 0.5773502691896258, 0.5773502691896258},
                           {0.5773502691896258, -0.5773502691896258, 0.5773502691896258},
                           {0.5773502691896258, 0.5773502691896258, -0.5773502691896258}};
    for (double s : svals)
      for (const Vec3& d : dirs) {
        Vec3 z = rho * d;
        Vec4 tx = F(s, z);
        double si;
        Vec3 zi;
        if (!invert(tx, si, zi)) return false;
        double err = std::max({std::abs(si - s), std::abs(zi[0] - z[0]), std::abs(zi[1] - z[1]),
                               std::abs(zi[2] - z[2])});
        if (err > 1e-6) return false;
      }
    return true;
  }

  SoundSpeed c_;
  Geodesic geo_;
  bool flat_;
  Vec3 n2_{}, n3_{};
  double h_, text_, t_lo_;
  int n_back_ = 0, n_fwd_ = 0;
  std::vector<double> ts_;
  std::vector<GeoState> ys_;
  std::vector<std::array<Vec4, 4>> Es_;
  mutable double rho_max_ = -1.0;
};

}  // namespace wv

#endif
