#ifndef WV_FIT_HPP
#define WV_FIT_HPP

// Ordinary least squares on (log x, log y).

#include <cmath>
#include <vector>

#include "wv/errors.hpp"

namespace wv {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline SlopeFit loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ConfigError("loglog_fit: length mismatch");
  if (xs.size() < 4) throw ConfigError("loglog_fit: needs at least 4 points");
  const int n = (int)xs.size();
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (xs[i] <= 0 || ys[i] <= 0) throw ConfigError("loglog_fit: non-positive value");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0) throw ConfigError("loglog_fit: degenerate abscissae");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (int i = 0; i < n; ++i) {
    double pred = f.intercept + f.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - my) * (ly[i] - my);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace wv

#endif
