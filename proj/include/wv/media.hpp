#ifndef WV_MEDIA_HPP
#define WV_MEDIA_HPP

// Sound-speed and nonlinearity models, the acoustic metric g = c^-2 delta, its
// Christoffel symbols, and the Herglotz-condition checker.

#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "wv/errors.hpp"
#include "wv/fields.hpp"
#include "wv/linalg.hpp"

namespace wv {

inline constexpr double kSqrt3 = 1.7320508075688772;

// c_alpha(x) = alpha sqrt3 / ((alpha-1)||x|| + sqrt3); uniform speed 1 at alpha=1.
inline double herglotz_c(double alpha, const Vec3& x) {
  if (alpha < 1.0) throw ConfigError("herglotz_c: alpha must be >= 1");
  double r = norm(x);
  return alpha * kSqrt3 / ((alpha - 1.0) * r + kSqrt3);
}

class SoundSpeed {
 public:
  enum class Kind { Constant, Herglotz, Tabulated };

  static SoundSpeed constant(double c0) {
    if (c0 <= 0) throw ConfigError("sound speed must be positive");
    SoundSpeed s;
    s.kind_ = Kind::Constant;
    s.c0_ = c0;
    return s;
  }
  static SoundSpeed herglotz(double alpha) {
    if (alpha < 1.0) throw ConfigError("herglotz: alpha must be >= 1");
    SoundSpeed s;
    s.kind_ = Kind::Herglotz;
    s.alpha_ = alpha;
    return s;
  }
  static SoundSpeed tabulated(RField3 table, double dx) {
    SoundSpeed s;
    s.kind_ = Kind::Tabulated;
    s.table_ = std::make_shared<RField3>(std::move(table));
    s.table_dx_ = dx;
    for (double v : s.table_->a)
      if (!(v > 0.0)) throw ConfigError("tabulated sound speed must be positive everywhere");
    return s;
  }

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  double constant_value() const { return c0_; }
  double alpha() const { return alpha_; }

  // Valid on the extended domain [-1.25,1.25]^3: closed forms evaluate anywhere,
  // tables continue by clamping (constant along the outward normal).
  double c(const Vec3& x) const {
    switch (kind_) {
      case Kind::Constant:
        return c0_;
      case Kind::Herglotz:
        return herglotz_c(alpha_, x);
      case Kind::Tabulated:
        return trilinear_sample(*table_, table_dx_, clamp_cube(x));
    }
    return c0_;
  }

  Vec3 grad_log_c(const Vec3& x) const {
    switch (kind_) {
      case Kind::Constant:
        return {0, 0, 0};
      case Kind::Herglotz: {
        double r = norm(x);
        if (r < 1e-14) return {0, 0, 0};
        double f = -(alpha_ - 1.0) / ((alpha_ - 1.0) * r + kSqrt3) / r;
        return {f * x[0], f * x[1], f * x[2]};
      }
      case Kind::Tabulated: {
        // fourth-order central differences of log c at the table spacing
        Vec3 g{0, 0, 0};
        double h = table_dx_;
        for (int d = 0; d < 3; ++d) {
          Vec3 xp = x, xm = x, xpp = x, xmm = x;
          xp[d] += h;
          xm[d] -= h;
          xpp[d] += 2 * h;
          xmm[d] -= 2 * h;
          g[d] = (-std::log(c(xpp)) + 8 * std::log(c(xp)) - 8 * std::log(c(xm)) + std::log(c(xmm))) / (12 * h);
        }
        return g;
      }
    }
    return {0, 0, 0};
  }

  Vec3 grad_c(const Vec3& x) const {
    if (kind_ == Kind::Herglotz) {
      double r = std::max(norm(x), 1e-14);
      double D = (alpha_ - 1.0) * r + kSqrt3;
      double dcdr = -alpha_ * kSqrt3 * (alpha_ - 1.0) / (D * D);
      return {dcdr * x[0] / r, dcdr * x[1] / r, dcdr * x[2] / r};
    }
    Vec3 gl = grad_log_c(x);
    double cv = c(x);
    return {cv * gl[0], cv * gl[1], cv * gl[2]};
  }

  Mat3 hess_c(const Vec3& x) const {
    if (kind_ == Kind::Constant) return mat3_zero();
    if (kind_ == Kind::Herglotz) {
      double r = std::max(norm(x), 1e-8);
      double D = (alpha_ - 1.0) * r + kSqrt3;
      double A = alpha_ * kSqrt3, B = alpha_ - 1.0;
      double d1 = -A * B / (D * D);
      double d2 = 2.0 * A * B * B / (D * D * D);
      Vec3 u{x[0] / r, x[1] / r, x[2] / r};
      Mat3 hss;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          hss[i][j] = d2 * u[i] * u[j] + d1 * (((i == j) ? 1.0 : 0.0) - u[i] * u[j]) / r;
      return hss;
    }
    // tabulated: fourth-order central stencil on grad_c
    Mat3 hss = mat3_zero();
    double h = table_dx_;
    for (int d = 0; d < 3; ++d) {
      Vec3 xp = x, xm = x, xpp = x, xmm = x;
      xp[d] += h;
      xm[d] -= h;
      xpp[d] += 2 * h;
      xmm[d] -= 2 * h;
      Vec3 gp = grad_c(xp), gm = grad_c(xm), gpp = grad_c(xpp), gmm = grad_c(xmm);
      for (int i = 0; i < 3; ++i)
        hss[i][d] = (-gpp[i] + 8 * gp[i] - 8 * gm[i] + gmm[i]) / (12 * h);
    }
    return sym(hss);
  }

  RField3 sample(const Grid3D& g) const {
    RField3 f(g.n);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k) f.at(i, j, k) = c({g.x(i), g.x(j), g.x(k)});
    return f;
  }

 private:
  static Vec3 clamp_cube(const Vec3& x) {
    return {std::min(1.0, std::max(-1.0, x[0])), std::min(1.0, std::max(-1.0, x[1])),
            std::min(1.0, std::max(-1.0, x[2]))};
  }

  Kind kind_ = Kind::Constant;
  double c0_ = 1.0;
  double alpha_ = 1.0;
  std::shared_ptr<const RField3> table_;
  double table_dx_ = 0.0;
};

class Nonlinearity {
 public:
  static Nonlinearity constant(double b0) {
    Nonlinearity b;
    b.kind_constant_ = true;
    b.b0_ = b0;
    return b;
  }
  static Nonlinearity tabulated(RField3 table, double dx) {
    Nonlinearity b;
    b.kind_constant_ = false;
    b.table_ = std::make_shared<RField3>(std::move(table));
    b.table_dx_ = dx;
    return b;
  }

  bool is_constant() const { return kind_constant_; }
  bool is_zero() const { return kind_constant_ && b0_ == 0.0; }
  double constant_value() const { return b0_; }

  // constant continuation outside the cube, same convention as SoundSpeed
  double beta(const Vec3& x) const {
    if (kind_constant_) return b0_;
    Vec3 xc{std::min(1.0, std::max(-1.0, x[0])), std::min(1.0, std::max(-1.0, x[1])),
            std::min(1.0, std::max(-1.0, x[2]))};
    return trilinear_sample(*table_, table_dx_, xc);
  }

  RField3 sample(const Grid3D& g) const {
    RField3 f(g.n);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k) f.at(i, j, k) = beta({g.x(i), g.x(j), g.x(k)});
    return f;
  }

 private:
  bool kind_constant_ = true;
  double b0_ = 0.0;
  std::shared_ptr<const RField3> table_;
  double table_dx_ = 0.0;
};

// d/dr (r / c(r)) > 0 on a radial lattice over (0, sqrt3].  Closed-form kinds use
// the analytic derivative; tabulated kinds must be radially symmetric and are
// checked by finite differences of sampled values.
inline bool herglotz_check(const SoundSpeed& c, int samples) {
  if (samples < 2) throw ConfigError("herglotz_check: need at least 2 samples");
  if (c.kind() == SoundSpeed::Kind::Constant) return true;
  if (c.kind() == SoundSpeed::Kind::Herglotz) {
    // r/c = r((a-1)r + sqrt3)/(a sqrt3); derivative (2(a-1)r + sqrt3)/(a sqrt3)
    double a = c.alpha();
    for (int i = 1; i <= samples; ++i) {
      double r = kSqrt3 * i / samples;
      if ((2.0 * (a - 1.0) * r + kSqrt3) / (a * kSqrt3) <= 0.0) return false;
    }
    return true;
  }
  // radial-symmetry screen, then sign of the difference quotient of r/c(r).
  // The baseline ray runs along the main diagonal, the only direction that
  // stays inside the cube through r = sqrt3.  Cross-direction screening is
  // restricted to the inscribed ball, with a tolerance wide enough for the
  // O(dx^2) anisotropy a trilinear table puts on an exactly radial profile.
  const Vec3 diag{0.577350269189626, 0.577350269189626, 0.577350269189626};
  const Vec3 screens[2] = {{1, 0, 0}, {0, 0.6, 0.8}};
  auto radial = [&](double r) {
    double v0 = c.c({r * diag[0], r * diag[1], r * diag[2]});
    if (r <= 1.0) {
      for (const Vec3& d : screens) {
        double v = c.c({r * d[0], r * d[1], r * d[2]});
        if (std::abs(v - v0) > 5e-2 * std::max(1.0, std::abs(v0)))
          throw ConfigError("herglotz_check: sound speed is not radial");
      }
    }
    return v0;
  };
  double prev_r = kSqrt3 * 1.0 / samples / 2.0;
  double prev = prev_r / radial(prev_r);
  for (int i = 1; i <= samples; ++i) {
    double r = kSqrt3 * i / samples;
    double cur = r / radial(r);
    if (cur <= prev) return false;
    prev = cur;
  }
  return true;
}

// Gamma^k_ij = -d_jk di(log c) - d_ik dj(log c) + d_ij dk(log c) for g = c^-2 delta.
inline std::array<Mat3, 3> christoffel(const SoundSpeed& c, const Vec3& x) {
  Vec3 dl = c.grad_log_c(x);
  std::array<Mat3, 3> G;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        G[k][i][j] = -((j == k) ? dl[i] : 0.0) - ((i == k) ? dl[j] : 0.0) + ((i == j) ? dl[k] : 0.0);
  return G;
}

// gbar = -dt^2 + g is static: all components with a time index vanish, the
// spatial block is christoffel(c,x).
inline std::array<Mat4, 4> spacetime_christoffel(const SoundSpeed& c, const Vec3& x) {
  std::array<Mat4, 4> Gb{};
  auto G = christoffel(c, x);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) Gb[k + 1][i + 1][j + 1] = G[k][i][j];
  return Gb;
}

// Lorentzian metric matrix at x, coordinates (t, x1, x2, x3).
inline Mat4 gbar_matrix(const SoundSpeed& c, const Vec3& x) {
  double ci = 1.0 / (c.c(x) * c.c(x));
  Mat4 m{};
  m[0][0] = -1.0;
  m[1][1] = m[2][2] = m[3][3] = ci;
  return m;
}

}  // namespace wv

#endif
