#ifndef WV_GEODESIC_HPP
#define WV_GEODESIC_HPP

// Unit-speed geodesics of g = c^-2 delta on the cube, with exit detection by
// per-face sign change and bisection, and the scattering relation.

#include <algorithm>
#include <cmath>
#include <vector>

#include "wv/media.hpp"
#include "wv/ode.hpp"

namespace wv {

// state = (x, xdot); unit g-speed means |xdot| = c(x)
using GeoState = State<6>;

inline GeoState geo_rhs(const SoundSpeed& c, const GeoState& y) {
  Vec3 x{y[0], y[1], y[2]}, v{y[3], y[4], y[5]};
  Vec3 dl = c.grad_log_c(x);
  // Gamma^k_ij v^i v^j = -2 v^k (v. dlogc) + |v|^2 dlogc^k
  double vd = dot(v, dl), v2 = dot(v, v);
  GeoState r;
  r[0] = v[0];
  r[1] = v[1];
  r[2] = v[2];
  r[3] = 2.0 * v[0] * vd - v2 * dl[0];
  r[4] = 2.0 * v[1] * vd - v2 * dl[1];
  r[5] = 2.0 * v[2] * vd - v2 * dl[2];
  return r;
}

struct Geodesic {
  Vec3 p{};    // entry point on the boundary
  Vec3 dir{};  // entry direction, Euclidean unit
  double h = 0;
  std::vector<double> t;       // g-time samples, t[0]=0
  std::vector<GeoState> s;     // states at t[k]; last sample sits on the boundary
  double t_exit = 0;
  Vec3 x_exit{}, v_exit{};

  Vec3 x(size_t k) const { return {s[k][0], s[k][1], s[k][2]}; }
  Vec3 v(size_t k) const { return {s[k][3], s[k][4], s[k][5]}; }
};

struct ScatteringDatum {
  Vec3 q{};    // exit point
  Vec3 eta{};  // exit direction, Euclidean unit
  double length = 0;  // g-length = exit time under unit-speed parametrization
};

inline double max_abs_coord(const GeoState& y) {
  return std::max({std::abs(y[0]), std::abs(y[1]), std::abs(y[2])});
}

inline Geodesic shoot_geodesic(const SoundSpeed& c, const Vec3& p, const Vec3& dir_in, double h = 1e-3) {
  Vec3 dir = normalized(dir_in);
  Geodesic g;
  g.p = p;
  g.dir = dir;
  g.h = h;
  double cp = c.c(p);
  GeoState y{p[0], p[1], p[2], cp * dir[0], cp * dir[1], cp * dir[2]};
  g.t.push_back(0.0);
  g.s.push_back(y);

  // trapped-ray bound: ten Euclidean diameters at the slowest sampled speed
  double cmin = c.c({0, 0, 0});
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      for (int k = -2; k <= 2; ++k) cmin = std::min(cmin, c.c({0.5 * i, 0.5 * j, 0.5 * k}));
  const double t_max = 10.0 * 2.0 * kSqrt3 / cmin;

  auto f = [&](double, const GeoState& s) { return geo_rhs(c, s); };
  double t = 0.0;
  while (true) {
    GeoState y1 = rk4_step(f, y, t, h);
    if (!std::isfinite(y1[0]) || !std::isfinite(y1[3]))
      throw NumericalBreakdown("shoot_geodesic: non-finite state");
    if (max_abs_coord(y1) > 1.0) {
      // bisect the step length until the endpoint is on the boundary
      double lo = 0.0, hi = h;
      GeoState yb = y1;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        GeoState ym = rk4_step(f, y, t, mid);
        if (max_abs_coord(ym) > 1.0) {
          hi = mid;
          yb = ym;
        } else {
          lo = mid;
          yb = ym;
        }
        if (hi - lo < 1e-15 || std::abs(max_abs_coord(yb) - 1.0) < 1e-10) break;
      }
      double te = t + 0.5 * (lo + hi);
      g.t.push_back(te);
      g.s.push_back(yb);
      g.t_exit = te;
      g.x_exit = {yb[0], yb[1], yb[2]};
      g.v_exit = {yb[3], yb[4], yb[5]};
      return g;
    }
    t += h;
    y = y1;
    g.t.push_back(t);
    g.s.push_back(y);
    if (t > t_max) throw NumericalBreakdown("shoot_geodesic: trapped ray, no exit");
  }
}

inline ScatteringDatum scattering_relation(const SoundSpeed& c, const Vec3& p, const Vec3& dir, double h = 1e-3) {
  Geodesic g = shoot_geodesic(c, p, dir, h);
  ScatteringDatum d;
  d.q = g.x_exit;
  d.eta = normalized(g.v_exit);
  d.length = g.t_exit;
  return d;
}

// State at arbitrary t from the stored lattice: nearest stored node below plus a
// single RK4 substep (the lattice is uniform except for the final short step).
inline GeoState geodesic_state_at(const SoundSpeed& c, const Geodesic& g, double t) {
  auto f = [&](double, const GeoState& s) { return geo_rhs(c, s); };
  if (t <= 0) return g.s.front();
  size_t k = std::min((size_t)(t / g.h), g.s.size() - 2);
  while (k + 2 < g.s.size() && g.t[k + 1] <= t) ++k;  // guard against rounding
  double dt = t - g.t[k];
  if (dt < 1e-15) return g.s[k];
  return rk4_step(f, g.s[k], g.t[k], dt);
}

// max |<v,v>_g - 1| over the stored samples
inline double unit_speed_error(const SoundSpeed& c, const Geodesic& g) {
  double worst = 0.0;
  for (size_t k = 0; k < g.s.size(); ++k) {
    Vec3 x = g.x(k), v = g.v(k);
    double cv = c.c(x);
    worst = std::max(worst, std::abs(dot(v, v) / (cv * cv) - 1.0));
  }
  return worst;
}

}  // namespace wv

#endif
