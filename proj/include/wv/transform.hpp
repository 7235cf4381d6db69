#ifndef WV_TRANSFORM_HPP
#define WV_TRANSFORM_HPP

// Weighted geodesic ray transform of a coefficient b along a chord, with the
// branch-tracked Jacobi amplitude as weight, and the stationary-phase
// prediction for the beam pairing built from it.

#include <functional>

#include "wv/beam.hpp"

namespace wv {

inline cplx jacobi_transform(const FermiChart& chart, const JacobiFlow& flow,
                             const std::function<double(const Vec3&)>& b, int nq = 4000) {
  if (nq < 2) throw ConfigError("transform: too few quadrature nodes");
  double smax = chart.s_max();
  double dq = smax / nq;
  cplx acc(0, 0);
  for (int k = 0; k <= nq; ++k) {
    double s = k * dq;
    GeoState st = chart.state_at(s / kSqrt2);
    double w = (k == 0 || k == nq) ? 0.5 : 1.0;
    acc += w * b({st[0], st[1], st[2]}) * flow.A0_at(s);
  }
  return acc * dq;
}

// (2 pi)^{3/2}/4 * C_theta^{-1/2} * c(p)^{3/2}
inline double pairing_constant(const GaussianBeam& beam) {
  double cp = beam.chart().medium().c(beam.chart().geodesic().p);
  double ct = beam.flow().C_theta;
  return std::pow(2.0 * 3.14159265358979323846, 1.5) / 4.0 * std::pow(ct, -0.5) *
         std::pow(cp, 1.5);
}

inline cplx predicted_pairing(const GaussianBeam& beam, const Nonlinearity& bn, int nq = 4000) {
  auto b = [&](const Vec3& x) { return bn.beta(x); };
  return pairing_constant(beam) * jacobi_transform(beam.chart(), beam.flow(), b, nq);
}

}  // namespace wv

#endif
