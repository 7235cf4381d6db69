#ifndef WV_BEAM_HPP
#define WV_BEAM_HPP

// Gaussian beams v(t,x) = A0(s) chi(|z|/rho) exp(i tau phi(s,z)) supported on
// a tube around the null lift of a boundary-to-boundary geodesic, with
// phi(s,z) = z1 + (1/2) z.H(s)z.  The adjoint-side beam uses the conjugate
// phase at a doubled frequency.  All tube-coordinate evaluation runs off fused
// Catmull-Rom reads of the Jacobi flow tables.

#include <cmath>

#include "wv/jacobi.hpp"

namespace wv {

class GaussianBeam {
 public:
  GaussianBeam(const SoundSpeed& c, const Geodesic& geo, double tau, double rho,
               double h = 1e-3, double sext = 0.6, int nb = 48)
      : chart_(c, geo, /*text=*/1.0), tau_(tau), rho_(rho), sext_(sext) {
    if (tau <= 0) throw ConfigError("beam: tau must be positive");
    if (rho <= 0) throw ConfigError("beam: rho must be positive");
    if (!c.is_constant() && rho > chart_.rho_max() + 1e-12)
      throw ConfigError("beam: rho exceeds invertible tube radius");
    flow_ = integrate_jacobi(chart_, 0.0, -sext, chart_.s_max() + sext, h, nb);
  }

  double tau() const { return tau_; }
  double rho() const { return rho_; }
  double s_max() const { return chart_.s_max(); }
  const FermiChart& chart() const { return chart_; }
  const JacobiFlow& flow() const { return flow_; }

  // smooth bump: 1 on r <= rho/2, exp(1 - 1/(1-u^2)) with u = 2r/rho - 1, 0 beyond
  static double cutoff(double r, double rho) {
    double u = 2.0 * r / rho - 1.0;
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
  }

  // amplitude and phase-Hessian frozen at one s, for lattice sweeps
  struct Slice {
    cplx a0;
    cplx h[6];  // 00, 01, 02, 11, 12, 22
    double tau, rho;
    cplx phase(const Vec3& z) const {
      cplx quad = h[0] * z[0] * z[0] + h[3] * z[1] * z[1] + h[5] * z[2] * z[2] +
                  2.0 * (h[1] * z[0] * z[1] + h[2] * z[0] * z[2] + h[4] * z[1] * z[2]);
      return z[0] + 0.5 * quad;
    }
    cplx value(const Vec3& z) const {
      double r = norm(z);
      if (r >= rho) return cplx(0, 0);
      return a0 * cutoff(r, rho) * std::exp(cplx(0, 1) * tau * phase(z));
    }
    // adjoint-side beam at frequency mult*tau with the conjugated phase
    cplx adjoint(const Vec3& z, double mult = 2.0) const {
      double r = norm(z);
      if (r >= rho) return cplx(0, 0);
      return std::conj(a0) * cutoff(r, rho) *
             std::exp(cplx(0, -1) * (mult * tau) * std::conj(phase(z)));
    }
  };

  Slice slice(double s) const;

  cplx phase(double s, const Vec3& z) const { return slice(s).phase(z); }
  cplx value_tube(double s, const Vec3& z) const { return slice(s).value(z); }
  cplx adjoint_tube(double s, const Vec3& z, double mult = 2.0) const {
    return slice(s).adjoint(z, mult);
  }

  bool tube_coords(double t, const Vec3& x, double& s, Vec3& z) const {
    return chart_.invert({t, x[0], x[1], x[2]}, s, z);
  }

  cplx value(double t, const Vec3& x) const {
    double s;
    Vec3 z;
    if (!tube_coords(t, x, s, z)) return cplx(0, 0);
    if (s < flow_.s_lo - flow_.hs || s > flow_.s_hi + flow_.hs) return cplx(0, 0);
    return value_tube(s, z);
  }

  cplx adjoint(double t, const Vec3& x, double mult = 2.0) const {
    double s;
    Vec3 z;
    if (!tube_coords(t, x, s, z)) return cplx(0, 0);
    if (s < flow_.s_lo - flow_.hs || s > flow_.s_hi + flow_.hs) return cplx(0, 0);
    return adjoint_tube(s, z, mult);
  }

 private:
  FermiChart chart_;
  JacobiFlow flow_;
  double tau_, rho_, sext_;
};

// one index computation, shared Catmull-Rom weights for A0 and sym(H)
inline GaussianBeam::Slice GaussianBeam::slice(double s) const {
  int n = (int)flow_.H.size();
  double u = (s - flow_.s_lo) / flow_.hs;
  int i = (int)std::floor(u);
  i = std::min(std::max(i, 1), n - 3);
  double f = u - i;
  double w0 = 0.5 * (-f + 2 * f * f - f * f * f);
  double w1 = 0.5 * (2 - 5 * f * f + 3 * f * f * f);
  double w2 = 0.5 * (f + 4 * f * f - 3 * f * f * f);
  double w3 = 0.5 * (-f * f + f * f * f);
  Slice sl;
  sl.tau = tau_;
  sl.rho = rho_;
  sl.a0 = w0 * flow_.A0[i - 1] + w1 * flow_.A0[i] + w2 * flow_.A0[i + 1] + w3 * flow_.A0[i + 2];
  static constexpr int ra[6] = {0, 0, 0, 1, 1, 2};
  static constexpr int cb[6] = {0, 1, 2, 1, 2, 2};
  for (int m = 0; m < 6; ++m) {
    int a = ra[m], b = cb[m];
    sl.h[m] = w0 * flow_.H[i - 1][a][b] + w1 * flow_.H[i][a][b] + w2 * flow_.H[i + 1][a][b] +
              w3 * flow_.H[i + 2][a][b];
  }
  return sl;
}

}  // namespace wv

#endif
