#ifndef WV_JACOBI_HPP
#define WV_JACOBI_HPP

// Complexified Jacobi flow along the Fermi chart axis:
//   Y' = A Z,  Z' = -B(s) Y,  Y(s-) = I,  Z(s-) = i I,  A = diag(0,1,1),
// with B sampled on a coarse node set and interpolated (Catmull-Rom) into a
// classical RK4 march.  H = Z Y^{-1} is the phase Hessian; the amplitude is
// A0(s) = det Y(s)^{-1/2} c(p)^{1/2} c(gamma(t(s)))^{-1/2} with the square-root
// branch tracked continuously in s.  The lattice may extend beyond the data
// point s- on both sides (the tube of a beam overhangs the entry face); the
// initial condition always sits at s-.

#include <cmath>
#include <complex>
#include <vector>

#include "wv/fermi.hpp"

namespace wv {

// Catmull-Rom on a uniform table; clamps to one-sided cells at the ends
template <class T>
T catmull_rom(const std::vector<T>& tab, double x0, double dx, double x) {
  int n = (int)tab.size();
  double u = (x - x0) / dx;
  int i = (int)std::floor(u);
  i = std::min(std::max(i, 1), n - 3);
  double f = u - i;
  const T &p0 = tab[i - 1], &p1 = tab[i], &p2 = tab[i + 1], &p3 = tab[i + 2];
  return 0.5 * ((2.0 * p1) + f * ((p2 - p0) + f * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                                                   f * (-1.0 * p0 + 3.0 * p1 - 3.0 * p2 + p3))));
}

struct JacobiFlow {
  double s_minus = 0.0;            // where Y=I, Z=iI is imposed
  double s_lo = 0.0, s_hi = 0.0, hs = 0.0;
  std::vector<double> s_nodes;     // integration lattice (uniform)
  std::vector<CMat3> Y, Z, H;
  std::vector<cplx> detY;
  std::vector<cplx> A0;            // branch-tracked amplitude incl. sound-speed factor
  std::vector<double> c_along;     // c(gamma(t(s))) per node
  double C_theta = 0.0;            // det Im H(s-) |det Y(s-)|^2
  double conservation_drift = 0.0; // max relative drift of the invariant
  double min_abs_detY = 0.0;
  double min_imH_eig = 0.0;

  CMat3 H_at(double s) const { return catmull_rom(H, s_lo, hs, s); }
  cplx detY_at(double s) const { return catmull_rom(detY, s_lo, hs, s); }
  cplx A0_at(double s) const { return catmull_rom(A0, s_lo, hs, s); }
  double c_at(double s) const { return catmull_rom(c_along, s_lo, hs, s); }
};

// B interpolation table on nb uniform nodes across [s_lo, s_hi]
struct BTable {
  double s_lo = 0.0, ds = 0.0;
  std::vector<Mat3> nodes;
  Mat3 at(double s) const { return catmull_rom(nodes, s_lo, ds, s); }
};

inline BTable build_B_table(const FermiChart& chart, double s_lo, double s_hi, int nb = 48) {
  BTable tab;
  tab.s_lo = s_lo;
  tab.ds = (s_hi - s_lo) / (nb - 1);
  tab.nodes.resize(nb);
  for (int i = 0; i < nb; ++i) tab.nodes[i] = chart.B_at(s_lo + i * tab.ds);
  return tab;
}

namespace detail {

struct YZ {
  CMat3 Y, Z;
};

inline YZ yz_rhs(const Mat3& Br, const YZ& q) {
  // A = diag(0,1,1) applied on the left zeroes the first row of Y'
  YZ d;
  d.Y = q.Z;
  for (int j = 0; j < 3; ++j) d.Y[0][j] = cplx(0, 0);
  d.Z = (-1.0) * mul_real_cplx(Br, q.Y);
  return d;
}

inline YZ yz_axpy(const YZ& a, double s, const YZ& b) {
  YZ r;
  r.Y = a.Y + s * b.Y;
  r.Z = a.Z + s * b.Z;
  return r;
}

inline YZ yz_rk4(const BTable& btab, const YZ& q, double s, double h) {
  auto k1 = yz_rhs(btab.at(s), q);
  auto k2 = yz_rhs(btab.at(s + 0.5 * h), yz_axpy(q, 0.5 * h, k1));
  auto k3 = yz_rhs(btab.at(s + 0.5 * h), yz_axpy(q, 0.5 * h, k2));
  auto k4 = yz_rhs(btab.at(s + h), yz_axpy(q, h, k3));
  YZ incr;
  incr.Y = k1.Y + 2.0 * k2.Y + 2.0 * k3.Y + k4.Y;
  incr.Z = k1.Z + 2.0 * k2.Z + 2.0 * k3.Z + k4.Z;
  return yz_axpy(q, h / 6.0, incr);
}

}  // namespace detail

inline JacobiFlow integrate_jacobi(const FermiChart& chart, double s_minus, double s_lo,
                                   double s_hi, double h_target = 1e-3, int nb = 48) {
  if (!(s_hi > s_lo)) throw ConfigError("jacobi: empty s-interval");
  if (s_minus < s_lo - 1e-12 || s_minus > s_hi + 1e-12)
    throw ConfigError("jacobi: s_minus outside lattice range");
  if (h_target <= 0) throw ConfigError("jacobi: step must be positive");
  BTable btab = build_B_table(chart, s_lo, s_hi, nb);

  detail::YZ q{cmat3_eye(), cplx(0, 1) * cmat3_eye()};
  double arg_acc = 0.0;
  cplx det_prev(1, 0);
  // invariant reference at s-, from the actual initial data
  double C_ref = det(imag_part(mul(q.Z, inverse(q.Y)))) * std::norm(det(q.Y));

  // pre-integrate backward from s_minus to s_lo, tracking the branch
  if (s_minus > s_lo + 1e-15) {
    int nback = (int)std::ceil((s_minus - s_lo) / h_target);
    double hb = (s_minus - s_lo) / nback;
    for (int k = 0; k < nback; ++k) {
      q = detail::yz_rk4(btab, q, s_minus - k * hb, -hb);
      cplx dY = det(q.Y);
      double dphi = std::arg(dY / det_prev);
      if (std::abs(dphi) > 3.0) throw NumericalBreakdown("jacobi: branch jump in det Y");
      arg_acc += dphi;
      det_prev = dY;
    }
  }

  int nstep = (int)std::ceil((s_hi - s_lo) / h_target);
  double hs = (s_hi - s_lo) / nstep;

  JacobiFlow out;
  out.s_minus = s_minus;
  out.s_lo = s_lo;
  out.s_hi = s_hi;
  out.hs = hs;
  out.s_nodes.resize(nstep + 1);
  out.Y.resize(nstep + 1);
  out.Z.resize(nstep + 1);
  out.H.resize(nstep + 1);
  out.detY.resize(nstep + 1);
  out.A0.resize(nstep + 1);
  out.c_along.resize(nstep + 1);

  double cp = chart.medium().c(chart.geodesic().p);
  double min_det = 1e300, min_eig = 1e300, drift = 0.0;
  out.C_theta = C_ref;

  for (int k = 0; k <= nstep; ++k) {
    double s = s_lo + k * hs;
    out.s_nodes[k] = s;
    out.Y[k] = q.Y;
    out.Z[k] = q.Z;
    out.H[k] = mul(q.Z, inverse(q.Y));
    cplx dY = det(q.Y);
    out.detY[k] = dY;

    double dphi = std::arg(dY / det_prev);
    if (std::abs(dphi) > 3.0) throw NumericalBreakdown("jacobi: branch jump in det Y");
    arg_acc += dphi;
    det_prev = dY;

    GeoState st = chart.state_at(s / kSqrt2);
    double cs = chart.medium().c({st[0], st[1], st[2]});
    out.c_along[k] = cs;
    double mag = std::abs(dY);
    if (mag < 1e-10) throw NumericalBreakdown("jacobi: det Y vanished (caustic)");
    out.A0[k] = std::sqrt(cp / cs) / std::sqrt(mag) * std::exp(cplx(0, -0.5 * arg_acc));

    Mat3 ImH = imag_part(0.5 * (out.H[k] + transpose(out.H[k])));
    double eig = min_eig_sym3(ImH);
    min_eig = std::min(min_eig, eig);
    min_det = std::min(min_det, mag);
    double inv3 = ImH[0][0] * (ImH[1][1] * ImH[2][2] - ImH[1][2] * ImH[2][1]) -
                  ImH[0][1] * (ImH[1][0] * ImH[2][2] - ImH[1][2] * ImH[2][0]) +
                  ImH[0][2] * (ImH[1][0] * ImH[2][1] - ImH[1][1] * ImH[2][0]);
    double cons = inv3 * mag * mag;
    drift = std::max(drift, std::abs(cons - out.C_theta) / std::abs(out.C_theta));

    if (k < nstep) q = detail::yz_rk4(btab, q, s, hs);
  }
  out.conservation_drift = drift;
  out.min_abs_detY = min_det;
  out.min_imH_eig = min_eig;
  if (min_eig <= 0) throw NumericalBreakdown("jacobi: Im H lost positivity");
  return out;
}

// max |dH/ds + H A H + B| over interior probe nodes (central differences on
// the stored lattice); a consistency check on the Riccati reduction
inline double riccati_residual(const JacobiFlow& fl, const FermiChart& chart, int stride = 200) {
  double worst = 0.0;
  int n = (int)fl.H.size();
  for (int k = stride; k + stride < n; k += stride) {
    CMat3 dH = (1.0 / (2.0 * fl.hs)) * (fl.H[k + 1] - fl.H[k - 1]);
    CMat3 A = cmat3_zero();
    A[1][1] = cplx(1, 0);
    A[2][2] = cplx(1, 0);
    CMat3 HAH = mul(mul(fl.H[k], A), fl.H[k]);
    Mat3 Br = chart.B_at(fl.s_nodes[k]);
    CMat3 R = dH + HAH;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) R[a][b] += cplx(Br[a][b], 0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) worst = std::max(worst, std::abs(R[a][b]));
  }
  return worst;
}

}  // namespace wv

#endif
