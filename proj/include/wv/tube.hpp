#ifndef WV_TUBE_HPP
#define WV_TUBE_HPP

// Tube quadratures over the beam support.  The flat-chord routines integrate
// on a lattice adapted to the Gaussian widths (sigma_1 = 1/(2 sqrt(tau)) along
// z1, sigma_w = sqrt((1+s^2)/(4 tau)) transversally) and clip the z1 window so
// the spacetime point stays inside [-1,1]^3 x [0,T]; they require the
// unit-speed x1 chord of the cube, where the clipping is exact.  Trapezoid
// weights throughout.

#include <cmath>

#include "wv/beam.hpp"

namespace wv {

inline constexpr double kPi = 3.14159265358979323846;

inline void require_canonical_flat(const GaussianBeam& beam) {
  const Geodesic& g = beam.chart().geodesic();
  bool ok = beam.chart().medium().is_constant() &&
            std::abs(beam.chart().medium().constant_value() - 1.0) < 1e-12 &&
            norm(g.p - Vec3{-1, 0, 0}) < 1e-12 && norm(g.dir - Vec3{1, 0, 0}) < 1e-12;
  if (!ok) throw ConfigError("flat tube quadrature requires the unit-speed x1 chord");
}

// Grid-resolution guard for the quadrature lattices.  The integrands are
// envelopes (moduli of beam products), so the binding constraints are nodes
// per Gaussian sigma transversally, s spacing under the amplitude variation
// scale, and the finite-difference step staying clear of cancellation
// roundoff at large tau.  Violations raise ResolutionGuard (CLI exit 4).
inline void tube_guard(double tau, double s_range, int ns, int nz, int nw) {
  if (tau > 2e4)
    throw ResolutionGuard("tube quadrature: tau beyond the difference-stencil roundoff bound 2e4");
  if (nz < 25)  // z1 window spans 16 sigma_1, so (nz-1)/16 nodes per sigma
    throw ResolutionGuard("tube quadrature: z1 lattice under 1.5 nodes per beam width");
  if (nw < 19)  // w window spans 12 sigma_w
    throw ResolutionGuard("tube quadrature: w lattice under 1.5 nodes per beam width");
  if (s_range / (ns - 1) > 0.025)
    throw ResolutionGuard("tube quadrature: s spacing above the amplitude variation scale");
}

struct TubeNorm {
  double value = 0.0;
  double predicted = 0.0;
};

namespace detail {
inline double trap(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }
}

// L2(M x [0,T]) norm of the beam
inline TubeNorm flat_beam_l2(const GaussianBeam& beam, double T = 2.0, int ns = 240,
                             int nz = 48, int nw = 48) {
  require_canonical_flat(beam);
  double tau = beam.tau();
  double smax = beam.s_max();
  tube_guard(tau, smax, ns, nz, nw);
  double eps = 1e-9;
  double ds = (smax - 2 * eps) / (ns - 1);
  double sig1 = 1.0 / (2.0 * std::sqrt(tau));
  double ext1 = 8.0 * sig1;
  double acc = 0.0;
  for (int is = 0; is < ns; ++is) {
    double s = eps + is * ds;
    double lo = std::max({-ext1, -s, s - kSqrt2 * T});
    double hi = std::min({ext1, s, smax - s});
    if (hi <= lo) continue;
    double dz = (hi - lo) / (nz - 1);
    double sigw = std::sqrt((1.0 + s * s) / (4.0 * tau));
    double extw = std::min(1.0, 6.0 * sigw);
    double dw = 2.0 * extw / (nw - 1);
    auto sl = beam.slice(s);
    double slice_acc = 0.0;
    for (int iz = 0; iz < nz; ++iz) {
      double z1 = lo + iz * dz;
      for (int iw = 0; iw < nw; ++iw) {
        double w1 = -extw + iw * dw;
        for (int jw = 0; jw < nw; ++jw) {
          double w2 = -extw + jw * dw;
          double wt = detail::trap(iz, nz) * detail::trap(iw, nw) * detail::trap(jw, nw);
          slice_acc += std::norm(sl.value({z1, w1, w2})) * wt;
        }
      }
    }
    acc += slice_acc * dz * dw * dw * ds * detail::trap(is, ns);
  }
  TubeNorm r;
  r.value = std::sqrt(acc);
  r.predicted = std::sqrt(2.0 * kSqrt2 * std::pow(kPi, 1.5)) * std::pow(tau, -0.75);
  return r;
}

// L2 norm of (-d_tt + lap) v by central differences of width 3e-4/tau
inline TubeNorm flat_residual_l2(const GaussianBeam& beam, double T = 2.0, int ns = 240,
                                 int nz = 48, int nw = 48) {
  require_canonical_flat(beam);
  double tau = beam.tau();
  double smax = beam.s_max();
  tube_guard(tau, smax, ns, nz, nw);
  double eps = 1e-9;
  double ds = (smax - 2 * eps) / (ns - 1);
  double sig1 = 1.0 / (2.0 * std::sqrt(tau));
  double ext1 = 8.0 * sig1;
  double hfd = 3e-4 / tau;
  double acc = 0.0;
  for (int is = 0; is < ns; ++is) {
    double s = eps + is * ds;
    double lo = std::max({-ext1, -s, s - kSqrt2 * T});
    double hi = std::min({ext1, s, smax - s});
    if (hi <= lo) continue;
    double dz = (hi - lo) / (nz - 1);
    double sigw = std::sqrt((1.0 + s * s) / (4.0 * tau));
    double extw = std::min(1.0, 6.0 * sigw);
    double dw = 2.0 * extw / (nw - 1);
    double slice_acc = 0.0;
    for (int iz = 0; iz < nz; ++iz) {
      double z1 = lo + iz * dz;
      double t = (s - z1) / kSqrt2;
      double x1 = (s + z1) / kSqrt2 - 1.0;
      for (int iw = 0; iw < nw; ++iw) {
        double w1 = -extw + iw * dw;
        for (int jw = 0; jw < nw; ++jw) {
          double w2 = -extw + jw * dw;
          Vec3 x{x1, w1, w2};
          cplx ctr = beam.value(t, x);
          cplx dtt = beam.value(t + hfd, x) - 2.0 * ctr + beam.value(t - hfd, x);
          cplx lap(0, 0);
          for (int d = 0; d < 3; ++d) {
            Vec3 xp = x, xm = x;
            xp[d] += hfd;
            xm[d] -= hfd;
            lap += beam.value(t, xp) - 2.0 * ctr + beam.value(t, xm);
          }
          cplx pv = (lap - dtt) / (hfd * hfd);
          double wt = detail::trap(iz, nz) * detail::trap(iw, nw) * detail::trap(jw, nw);
          slice_acc += std::norm(pv) * wt;
        }
      }
    }
    acc += slice_acc * dz * dw * dw * ds * detail::trap(is, ns);
  }
  TubeNorm r;
  r.value = std::sqrt(acc);
  r.predicted = std::sqrt(2.0 * kSqrt2 * std::pow(kPi, 1.5)) * std::pow(tau, -0.25);
  return r;
}

// pairing of d_t(v^2) against the doubled-frequency adjoint beam, scaled by
// tau^{-1/2}; the s-window overhangs the chord by sext on both sides
inline cplx flat_pairing(const GaussianBeam& beam, double sext = 0.6, int ns = 420,
                         int nz = 64, int nw = 64) {
  require_canonical_flat(beam);
  double tau = beam.tau(), rho = beam.rho();
  double smax = beam.s_max();
  tube_guard(tau, smax + 2 * sext, ns, nz, nw);
  double ds = (smax + 2 * sext) / (ns - 1);
  double sig1 = 1.0 / (2.0 * std::sqrt(tau));
  double ext1 = std::min(rho, 8.0 * sig1);
  double dt = 0.02 / tau;
  cplx acc(0, 0);
  for (int is = 0; is < ns; ++is) {
    double s = -sext + is * ds;
    // clip the lattice to t >= 0 and |x1| <= 1: the identity lives on the
    // physical cylinder, and the transform only weights the in-cube chord
    double lo = std::max(-ext1, -s);
    double hi = std::min({ext1, s, smax - s});
    if (hi <= lo) continue;
    double dz = (hi - lo) / (nz - 1);
    double sigw = std::sqrt((1.0 + s * s) / (4.0 * tau));
    double extw = std::min(std::min(rho, 1.0), 6.0 * sigw);
    double dw = 2.0 * extw / (nw - 1);
    cplx slice_acc(0, 0);
    for (int iz = 0; iz < nz; ++iz) {
      double z1 = lo + iz * dz;
      double t = (s - z1) / kSqrt2;
      double x1 = (s + z1) / kSqrt2 - 1.0;
      for (int iw = 0; iw < nw; ++iw) {
        double w1 = -extw + iw * dw;
        for (int jw = 0; jw < nw; ++jw) {
          double w2 = -extw + jw * dw;
          Vec3 x{x1, w1, w2};
          cplx vp = beam.value(t + dt, x);
          cplx vm = beam.value(t - dt, x);
          cplx dtv2 = (vp * vp - vm * vm) / (2.0 * dt);
          cplx dth = (beam.adjoint(t + dt, x) - beam.adjoint(t - dt, x)) / (2.0 * dt);
          double wt = detail::trap(iz, nz) * detail::trap(iw, nw) * detail::trap(jw, nw);
          slice_acc += dtv2 * dth * wt;
        }
      }
    }
    acc += slice_acc * (dz * dw * dw * ds * detail::trap(is, ns));
  }
  return acc / std::sqrt(tau);
}

// indicator-clipped L2 over M x [0,T] for arbitrary media: lattice in tube
// coordinates, volume element |det dF|
inline double tube_l2_generic(const GaussianBeam& beam, double T, int ns = 60, int nz = 16) {
  double smax = beam.s_max(), rho = beam.rho();
  double ds = smax / (ns - 1);
  double dz = 2.0 * rho / (nz - 1);
  double acc = 0.0;
  for (int is = 0; is < ns; ++is) {
    double s = is * ds;
    auto sl = beam.slice(s);
    for (int a = 0; a < nz; ++a)
      for (int b = 0; b < nz; ++b)
        for (int cidx = 0; cidx < nz; ++cidx) {
          Vec3 z{-rho + a * dz, -rho + b * dz, -rho + cidx * dz};
          if (norm(z) >= rho) continue;
          cplx v = sl.value(z);
          if (std::norm(v) == 0.0) continue;
          Vec4 tx = beam.chart().F(s, z);
          if (tx[0] < 0 || tx[0] > T) continue;
          if (std::max({std::abs(tx[1]), std::abs(tx[2]), std::abs(tx[3])}) > 1.0) continue;
          double jac = std::abs(det(beam.chart().dF(s, z)));
          double wt = detail::trap(is, ns) * detail::trap(a, nz) * detail::trap(b, nz) *
                      detail::trap(cidx, nz);
          acc += std::norm(v) * jac * wt;
        }
  }
  return std::sqrt(acc * ds * dz * dz * dz);
}

}  // namespace wv

#endif
