#ifndef WV_ODE_HPP
#define WV_ODE_HPP

// Classical fixed-step RK4.  States are std::array<double,N>; the last step is
// shortened to land exactly on the final time.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "wv/errors.hpp"

namespace wv {

template <size_t N>
using State = std::array<double, N>;

template <size_t N>
State<N> axpy(const State<N>& a, double s, const State<N>& b) {
  State<N> r;
  for (size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
  return r;
}

template <size_t N, class F>
State<N> rk4_step(F&& f, const State<N>& y, double t, double h) {
  State<N> k1 = f(t, y);
  State<N> k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
  State<N> k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
  State<N> k4 = f(t + h, axpy(y, h, k3));
  State<N> r = y;
  for (size_t i = 0; i < N; ++i) r[i] += (h / 6.0) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return r;
}

template <size_t N>
struct Trajectory {
  std::vector<double> t;
  std::vector<State<N>> y;
};

template <size_t N, class F>
Trajectory<N> rk4(F&& f, const State<N>& y0, double t0, double t1, double h) {
  if (h <= 0) throw ConfigError("rk4: step must be positive");
  Trajectory<N> tr;
  tr.t.push_back(t0);
  tr.y.push_back(y0);
  double t = t0;
  while (t < t1 - 1e-15) {
    double hh = std::min(h, t1 - t);
    State<N> y = rk4_step(f, tr.y.back(), t, hh);
    for (double v : y)
      if (!std::isfinite(v)) throw NumericalBreakdown("rk4: non-finite state");
    t += hh;
    tr.t.push_back(t);
    tr.y.push_back(y);
  }
  return tr;
}

}  // namespace wv

#endif
