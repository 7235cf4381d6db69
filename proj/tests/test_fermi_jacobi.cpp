#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "wv/fermi.hpp"
#include "wv/jacobi.hpp"

using namespace wv;

namespace {
FermiChart flat_chart() {
  SoundSpeed c = SoundSpeed::constant(1.0);
  Geodesic g = shoot_geodesic(c, {-1, 0, 0}, {1, 0, 0});
  return FermiChart(c, g);
}
}  // namespace

TEST_CASE("rotation aligns unit vectors", "[fermi]") {
  Vec3 a{0, 0, 1}, b = normalized(Vec3{1, 2, 2});
  Mat3 R = rotation_from_to(a, b);
  Vec3 Ra{R[0][2], R[1][2], R[2][2]};  // R applied to e3 = a
  CHECK(norm(Ra - b) < 1e-14);
  // orthogonality: columns are orthonormal
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double d = 0;
      for (int k = 0; k < 3; ++k) d += R[k][i] * R[k][j];
      CHECK(d == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-14));
    }
  // antipodal input still produces a rotation taking a to b
  Mat3 Rn = rotation_from_to(a, {0, 0, -1});
  Vec3 Rna{Rn[0][2], Rn[1][2], Rn[2][2]};
  CHECK(norm(Rna - Vec3{0, 0, -1}) < 1e-14);
}

TEST_CASE("flat chart is the affine null map", "[fermi]") {
  FermiChart ch = flat_chart();
  CHECK(ch.s_max() == Catch::Approx(2.0 * kSqrt2).margin(1e-9));
  for (double s : {0.0, 0.7, 1.9, 2.8}) {
    for (Vec3 z : {Vec3{0, 0, 0}, Vec3{0.2, -0.1, 0.3}, Vec3{-0.4, 0.2, 0.1}}) {
      Vec4 tx = ch.F(s, z);
      CHECK(tx[0] == Catch::Approx((s - z[0]) / kSqrt2).margin(1e-9));
      CHECK(tx[1] == Catch::Approx((s + z[0]) / kSqrt2 - 1.0).margin(1e-9));
      CHECK(tx[2] == Catch::Approx(z[1]).margin(1e-9));
      CHECK(tx[3] == Catch::Approx(z[2]).margin(1e-9));
    }
  }
}

TEST_CASE("flat chart inverts exactly", "[fermi]") {
  FermiChart ch = flat_chart();
  for (double s : {0.1, 1.4, 2.6}) {
    Vec3 z{0.15, -0.22, 0.31};
    Vec4 tx = ch.F(s, z);
    double s2;
    Vec3 z2;
    REQUIRE(ch.invert(tx, s2, z2));
    CHECK(s2 == Catch::Approx(s).margin(1e-10));
    CHECK(norm(z2 - z) < 1e-10);
  }
}

TEST_CASE("flat pulled metric is the constant null form", "[fermi]") {
  // -dt^2 + dx^2 in (s, z) coordinates is 2 ds dz1 + dz2^2 + dz3^2
  FermiChart ch = flat_chart();
  Mat4 m = ch.pulled_metric(1.3, {0.1, 0.05, -0.2});
  Mat4 want{};
  want[0][1] = want[1][0] = 1.0;
  want[2][2] = want[3][3] = 1.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(m[a][b] == Catch::Approx(want[a][b]).margin(1e-6));
}

TEST_CASE("flat phase hessian driver vanishes", "[fermi]") {
  FermiChart ch = flat_chart();
  Mat3 B = ch.B_at(1.1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(B[i][j] == 0.0);
}

TEST_CASE("curved chart frames stay pseudo-orthonormal", "[fermi]") {
  SoundSpeed c = SoundSpeed::herglotz(1.5);
  Geodesic g = shoot_geodesic(c, {-1, 0.2, 0.1}, {1, 0.1, 0});
  FermiChart ch(c, g);  // ctor runs the frame check and throws on drift
  CHECK(ch.s_max() > 0.5);
  // chart inversion round-trips inside the tube
  double s0 = 0.5 * ch.s_max();
  Vec3 z0{0.05, -0.04, 0.06};
  Vec4 tx = ch.F(s0, z0);
  double s1;
  Vec3 z1;
  REQUIRE(ch.invert(tx, s1, z1));
  CHECK(s1 == Catch::Approx(s0).margin(1e-7));
  CHECK(norm(z1 - z0) < 1e-7);
  CHECK(ch.rho_max() > 0.0);
}

TEST_CASE("flat jacobi flow matches the closed form", "[fermi]") {
  FermiChart ch = flat_chart();
  JacobiFlow fl = integrate_jacobi(ch, 0.0, 0.0, ch.s_max());
  double derr = 0, herr = 0, aerr = 0;
  for (size_t k = 0; k < fl.s_nodes.size(); ++k) {
    double s = fl.s_nodes[k];
    cplx d = cplx(1.0, s) * cplx(1.0, s);
    derr = std::max(derr, std::abs(fl.detY[k] - d));
    cplx hh = cplx(0, 1) / cplx(1.0, s);
    herr = std::max(herr, std::abs(fl.H[k][0][0] - cplx(0, 1)));
    herr = std::max(herr, std::abs(fl.H[k][1][1] - hh));
    herr = std::max(herr, std::abs(fl.H[k][2][2] - hh));
    herr = std::max(herr, std::abs(fl.H[k][0][1]) + std::abs(fl.H[k][1][2]));
    aerr = std::max(aerr, std::abs(fl.A0[k] - 1.0 / cplx(1.0, s)));
  }
  CHECK(derr < 1e-8);
  CHECK(herr < 1e-8);
  CHECK(aerr < 1e-8);
  CHECK(fl.C_theta == Catch::Approx(1.0).margin(1e-12));
  CHECK(fl.conservation_drift < 1e-8);
  CHECK(fl.min_imH_eig > 0.0);
}

TEST_CASE("interpolated flow values agree off-lattice", "[fermi]") {
  FermiChart ch = flat_chart();
  JacobiFlow fl = integrate_jacobi(ch, 0.0, 0.0, ch.s_max());
  for (double s : {0.33331, 1.25007, 2.71003}) {
    CHECK(std::abs(fl.detY_at(s) - cplx(1.0, s) * cplx(1.0, s)) < 1e-9);
    CHECK(std::abs(fl.A0_at(s) - 1.0 / cplx(1.0, s)) < 1e-9);
    CHECK(fl.c_at(s) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("backward overhang keeps the invariant and the branch", "[fermi]") {
  FermiChart ch = flat_chart();
  JacobiFlow fl = integrate_jacobi(ch, 0.0, -0.6, ch.s_max() + 0.6);
  CHECK(fl.s_lo == Catch::Approx(-0.6));
  CHECK(std::abs(fl.detY_at(-0.4) - cplx(1.0, -0.4) * cplx(1.0, -0.4)) < 1e-9);
  CHECK(std::abs(fl.A0_at(-0.4) - 1.0 / cplx(1.0, -0.4)) < 1e-9);
  CHECK(fl.conservation_drift < 1e-8);
}

TEST_CASE("curved flow conserves the quadratic invariant", "[fermi]") {
  SoundSpeed c = SoundSpeed::herglotz(1.5);
  Geodesic g = shoot_geodesic(c, {-1, 0.2, 0.1}, {1, 0.1, 0});
  FermiChart ch(c, g);
  JacobiFlow fl = integrate_jacobi(ch, 0.0, 0.0, ch.s_max());
  CHECK(fl.conservation_drift < 1e-6);
  CHECK(fl.min_imH_eig > 0.0);
  CHECK(fl.min_abs_detY > 1e-3);
  // Riccati equation residual of the interpolated solution
  CHECK(riccati_residual(fl, ch) < 5e-3);
}

TEST_CASE("amplitude carries the sound-speed factor", "[fermi]") {
  SoundSpeed c = SoundSpeed::herglotz(1.5);
  Geodesic g = shoot_geodesic(c, {-1, 0.2, 0.1}, {1, 0.1, 0});
  FermiChart ch(c, g);
  JacobiFlow fl = integrate_jacobi(ch, 0.0, 0.0, ch.s_max());
  // at the start detY = 1 so |A0| = sqrt(c(p)/c(p)) = 1
  CHECK(std::abs(fl.A0.front() - cplx(1, 0)) < 1e-9);
  // far end: |A0| = sqrt(c(p)/c(q)) / |detY|^(1/2)
  double cp = c.c(g.p);
  double cq = fl.c_along.back();
  double want = std::sqrt(cp / cq) / std::sqrt(std::abs(fl.detY.back()));
  CHECK(std::abs(fl.A0.back()) == Catch::Approx(want).margin(1e-9));
}
