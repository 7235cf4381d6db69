#ifndef WV_GRID_HPP
#define WV_GRID_HPP

#include <cmath>

#include "wv/errors.hpp"

namespace wv {

// Uniform grid on [-1,1]^3 x [0,T].  dx*(n-1) == 2 by construction.
struct Grid3D {
  int n = 0;      // nodes per axis, faces included
  double dx = 0;  // 2/(n-1)
  double dt = 0;
  int nt = 0;  // time nodes, t=0 included
  double T = 0;

  Grid3D() = default;
  Grid3D(int n_, double dt_, double T_) {
    if (n_ < 3) throw ConfigError("grid: need at least 3 nodes per axis");
    if (dt_ <= 0 || T_ <= 0) throw ConfigError("grid: dt and T must be positive");
    n = n_;
    dx = 2.0 / (n - 1);
    dt = dt_;
    nt = (int)std::lround(T_ / dt_) + 1;
    T = (nt - 1) * dt;  // snap T to the step lattice
  }

  double x(int i) const { return -1.0 + i * dx; }
  double t(int k) const { return k * dt; }
};

}  // namespace wv

#endif
