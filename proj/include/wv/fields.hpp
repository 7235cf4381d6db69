#ifndef WV_FIELDS_HPP
#define WV_FIELDS_HPP

// Scalar and space-time fields on the uniform cube grid, plus the discrete
// operators used everywhere: 7-point Laplacian, one-sided normal derivatives,
// cumulative time integrals, trapezoid norms on M and Sigma.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "wv/errors.hpp"
#include "wv/grid.hpp"
#include "wv/linalg.hpp"

namespace wv {

template <typename T>
struct Field3 {
  int n = 0;
  std::vector<T> a;

  Field3() = default;
  explicit Field3(int n_) : n(n_), a((size_t)n_ * n_ * n_, T(0)) {}

  T& at(int i, int j, int k) { return a[((size_t)i * n + j) * n + k]; }
  const T& at(int i, int j, int k) const { return a[((size_t)i * n + j) * n + k]; }
  size_t size() const { return a.size(); }
};

using RField3 = Field3<double>;
using CField3 = Field3<cplx>;

// One n x n array per cube face.  Face order: x-, x+, y-, y+, z-, z+.
// x faces are indexed (j,k), y faces (i,k), z faces (i,j), row-major.
template <typename T>
struct Faces {
  int n = 0;
  std::array<std::vector<T>, 6> f;

  Faces() = default;
  explicit Faces(int n_) : n(n_) {
    for (auto& v : f) v.assign((size_t)n_ * n_, T(0));
  }
  T& at(int face, int a_, int b_) { return f[face][(size_t)a_ * n + b_]; }
  const T& at(int face, int a_, int b_) const { return f[face][(size_t)a_ * n + b_]; }
};

using RFaces = Faces<double>;

template <typename T>
struct SpaceTimeField {
  Grid3D grid;
  std::vector<Field3<T>> frames;
};

using RSpaceTimeField = SpaceTimeField<double>;
using CSpaceTimeField = SpaceTimeField<cplx>;

template <typename T>
struct BoundaryTrace {
  Grid3D grid;
  std::vector<Faces<T>> steps;  // one Faces per time node
};

using RBoundaryTrace = BoundaryTrace<double>;
using CBoundaryTrace = BoundaryTrace<cplx>;

// ------------------------------------------------------------------ operators

// Interior nodes carry (sum of 6 neighbours - 6 center)/dx^2; boundary nodes are
// set to 0, a flag value that contributes nothing to interior norms.
template <typename T>
Field3<T> laplacian7(const Field3<T>& u, double dx) {
  Field3<T> L(u.n);
  const int n = u.n;
  const double idx2 = 1.0 / (dx * dx);
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j)
      for (int k = 1; k < n - 1; ++k)
        L.at(i, j, k) = (u.at(i + 1, j, k) + u.at(i - 1, j, k) + u.at(i, j + 1, k) +
                         u.at(i, j - 1, k) + u.at(i, j, k + 1) + u.at(i, j, k - 1) -
                         6.0 * u.at(i, j, k)) *
                        idx2;
  return L;
}

// Outward normal derivative per face, (3u0 - 4u1 + u2)/(2dx) with u0 on the face.
template <typename T>
Faces<T> normal_derivative_frame(const Field3<T>& u, double dx) {
  const int n = u.n;
  if (n < 3) throw ConfigError("normal_derivative: grid too small");
  Faces<T> tr(n);
  const double s = 1.0 / (2.0 * dx);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      tr.at(0, a, b) = (3.0 * u.at(0, a, b) - 4.0 * u.at(1, a, b) + u.at(2, a, b)) * s;
      tr.at(1, a, b) = (3.0 * u.at(n - 1, a, b) - 4.0 * u.at(n - 2, a, b) + u.at(n - 3, a, b)) * s;
      tr.at(2, a, b) = (3.0 * u.at(a, 0, b) - 4.0 * u.at(a, 1, b) + u.at(a, 2, b)) * s;
      tr.at(3, a, b) = (3.0 * u.at(a, n - 1, b) - 4.0 * u.at(a, n - 2, b) + u.at(a, n - 3, b)) * s;
      tr.at(4, a, b) = (3.0 * u.at(a, b, 0) - 4.0 * u.at(a, b, 1) + u.at(a, b, 2)) * s;
      tr.at(5, a, b) = (3.0 * u.at(a, b, n - 1) - 4.0 * u.at(a, b, n - 2) + u.at(a, b, n - 3)) * s;
    }
  return tr;
}

template <typename T>
BoundaryTrace<T> normal_derivative(const SpaceTimeField<T>& u) {
  BoundaryTrace<T> tr;
  tr.grid = u.grid;
  tr.steps.reserve(u.frames.size());
  for (const auto& f : u.frames) tr.steps.push_back(normal_derivative_frame(f, u.grid.dx));
  return tr;
}

// Cumulative trapezoid in t; frame 0 is identically zero.
template <typename T>
SpaceTimeField<T> time_integral(const SpaceTimeField<T>& u) {
  SpaceTimeField<T> U;
  U.grid = u.grid;
  U.frames.resize(u.frames.size(), Field3<T>(u.grid.n));
  const double half_dt = 0.5 * u.grid.dt;
  for (size_t k = 1; k < u.frames.size(); ++k) {
    const auto& prev = U.frames[k - 1];
    for (size_t m = 0; m < prev.a.size(); ++m)
      U.frames[k].a[m] = prev.a[m] + half_dt * (u.frames[k - 1].a[m] + u.frames[k].a[m]);
  }
  return U;
}

template <typename T>
T trilinear_sample(const Field3<T>& f, double dx, const Vec3& x) {
  for (int d = 0; d < 3; ++d)
    if (x[d] < -1.0 - 1e-12 || x[d] > 1.0 + 1e-12)
      throw ConfigError("trilinear_sample: point outside [-1,1]^3");
  const int n = f.n;
  double c[3];
  int i0[3];
  for (int d = 0; d < 3; ++d) {
    double u = std::min(std::max((x[d] + 1.0) / dx, 0.0), (double)(n - 1));
    i0[d] = std::min((int)u, n - 2);
    c[d] = u - i0[d];
  }
  T v(0);
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj)
      for (int dk = 0; dk < 2; ++dk) {
        double w = (di ? c[0] : 1 - c[0]) * (dj ? c[1] : 1 - c[1]) * (dk ? c[2] : 1 - c[2]);
        v += w * f.at(i0[0] + di, i0[1] + dj, i0[2] + dk);
      }
  return v;
}

// ---------------------------------------------------------------------- norms

inline double trap_w(int i, int last) { return (i == 0 || i == last) ? 0.5 : 1.0; }

template <typename T>
double abs2(const T& v) {
  return std::norm(std::complex<double>(v));
}
inline double abs2(double v) { return v * v; }

// L2 over M = [0,T] x [-1,1]^3, tensor-product trapezoid in all four directions.
template <typename T>
double l2_m(const SpaceTimeField<T>& u) {
  const int n = u.grid.n;
  const int last = n - 1;
  double tot = 0.0;
  for (size_t k = 0; k < u.frames.size(); ++k) {
    double wt = trap_w((int)k, (int)u.frames.size() - 1);
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double wij = trap_w(i, last) * trap_w(j, last);
        for (int kk = 0; kk < n; ++kk) acc += wij * trap_w(kk, last) * abs2(u.frames[k].at(i, j, kk));
      }
    tot += wt * acc;
  }
  return std::sqrt(tot * u.grid.dx * u.grid.dx * u.grid.dx * u.grid.dt);
}

// L2 over Sigma = [0,T] x dOmega, per-face tensor trapezoid (edges counted once
// per adjacent face, i.e. the boundary measure of the union of faces).
template <typename T>
double l2_sigma(const BoundaryTrace<T>& tr) {
  const int n = tr.grid.n;
  const int last = n - 1;
  double tot = 0.0;
  for (size_t k = 0; k < tr.steps.size(); ++k) {
    double wt = trap_w((int)k, (int)tr.steps.size() - 1);
    double acc = 0.0;
    for (int face = 0; face < 6; ++face)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          acc += trap_w(a, last) * trap_w(b, last) * abs2(tr.steps[k].at(face, a, b));
    tot += wt * acc;
  }
  return std::sqrt(tot * tr.grid.dx * tr.grid.dx * tr.grid.dt);
}

// int_Sigma a*b dS dt (real bilinear pairing, used by the boundary identity).
inline double sigma_pair_integral(const RBoundaryTrace& a, const RBoundaryTrace& b) {
  const int n = a.grid.n;
  const int last = n - 1;
  double tot = 0.0;
  for (size_t k = 0; k < a.steps.size(); ++k) {
    double wt = trap_w((int)k, (int)a.steps.size() - 1);
    double acc = 0.0;
    for (int face = 0; face < 6; ++face)
      for (int ai = 0; ai < n; ++ai)
        for (int bi = 0; bi < n; ++bi)
          acc += trap_w(ai, last) * trap_w(bi, last) * a.steps[k].at(face, ai, bi) * b.steps[k].at(face, ai, bi);
    tot += wt * acc;
  }
  return tot * a.grid.dx * a.grid.dx * a.grid.dt;
}

// Frame-wise d/dt, second-order central with one-sided second-order ends.
template <typename T>
SpaceTimeField<T> dt_frames(const SpaceTimeField<T>& u) {
  SpaceTimeField<T> d;
  d.grid = u.grid;
  const size_t m = u.frames.size();
  d.frames.resize(m, Field3<T>(u.grid.n));
  const double s = 1.0 / (2.0 * u.grid.dt);
  for (size_t k = 0; k < m; ++k)
    for (size_t idx = 0; idx < u.frames[k].a.size(); ++idx) {
      if (k == 0)
        d.frames[k].a[idx] = (-3.0 * u.frames[0].a[idx] + 4.0 * u.frames[1].a[idx] - u.frames[2].a[idx]) * s;
      else if (k == m - 1)
        d.frames[k].a[idx] = (3.0 * u.frames[m - 1].a[idx] - 4.0 * u.frames[m - 2].a[idx] + u.frames[m - 3].a[idx]) * s;
      else
        d.frames[k].a[idx] = (u.frames[k + 1].a[idx] - u.frames[k - 1].a[idx]) * s;
    }
  return d;
}

}  // namespace wv

#endif
