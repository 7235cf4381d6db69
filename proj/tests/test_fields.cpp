#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wv/fields.hpp"
#include "wv/grid.hpp"

using namespace wv;

TEST_CASE("grid snaps T to the step lattice", "[fields]") {
  Grid3D g(17, 0.03, 3.0);
  CHECK(g.dx == Catch::Approx(2.0 / 16.0));
  CHECK(g.nt == 101);
  CHECK(g.T == Catch::Approx(3.0));
  CHECK(g.x(0) == Catch::Approx(-1.0));
  CHECK(g.x(16) == Catch::Approx(1.0));
  CHECK_THROWS_AS(Grid3D(2, 0.1, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid3D(9, -0.1, 1.0), ConfigError);
}

TEST_CASE("laplacian is exact on quadratics", "[fields]") {
  Grid3D g(9, 0.1, 1.0);
  RField3 u(g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        double x = g.x(i), y = g.x(j), z = g.x(k);
        u.at(i, j, k) = x * x + 2 * y * y + 3 * z * z;
      }
  RField3 L = laplacian7(u, g.dx);
  for (int i = 1; i < g.n - 1; ++i)
    for (int j = 1; j < g.n - 1; ++j)
      for (int k = 1; k < g.n - 1; ++k)
        CHECK(L.at(i, j, k) == Catch::Approx(12.0).margin(1e-10));
  CHECK(L.at(0, 4, 4) == 0.0);  // boundary nodes are flagged zero
}

TEST_CASE("normal derivative is outward and exact on quadratics", "[fields]") {
  Grid3D g(9, 0.1, 1.0);
  RField3 u(g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        double x = g.x(i), y = g.x(j), z = g.x(k);
        u.at(i, j, k) = x + x * x - 2 * y + 0.5 * z * z;
      }
  RFaces tr = normal_derivative_frame(u, g.dx);
  // d(x+x^2)/dx = 1+2x; outward on x- is -d/dx at x=-1: -(1-2) = 1
  CHECK(tr.at(0, 3, 5) == Catch::Approx(1.0).margin(1e-10));
  CHECK(tr.at(1, 3, 5) == Catch::Approx(3.0).margin(1e-10));
  // y faces: outward derivative of -2y is +2 at y=-1, -2 at y=+1
  CHECK(tr.at(2, 2, 2) == Catch::Approx(2.0).margin(1e-10));
  CHECK(tr.at(3, 2, 2) == Catch::Approx(-2.0).margin(1e-10));
  // z faces: d(z^2/2)/dz = z, outward gives +1 on both ends
  CHECK(tr.at(4, 2, 2) == Catch::Approx(1.0).margin(1e-10));
  CHECK(tr.at(5, 2, 2) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("face order and indexing conventions", "[fields]") {
  Grid3D g(5, 0.1, 1.0);
  RField3 u(g.n);
  u.at(0, 1, 2) = 1.0;  // x- face, (j,k)=(1,2)
  RFaces tr = normal_derivative_frame(u, g.dx);
  CHECK(tr.at(0, 1, 2) == Catch::Approx(3.0 / (2 * g.dx)));
  CHECK(tr.at(0, 2, 1) == 0.0);
}

TEST_CASE("time integral is cumulative trapezoid", "[fields]") {
  Grid3D g(5, 0.1, 1.0);
  RSpaceTimeField u;
  u.grid = g;
  u.frames.assign(g.nt, RField3(g.n));
  for (int k = 0; k < g.nt; ++k)
    for (auto& v : u.frames[k].a) v = g.t(k);  // u = t
  auto U = time_integral(u);
  for (int k = 0; k < g.nt; ++k) {
    double want = 0.5 * g.t(k) * g.t(k);  // trapezoid is exact for linear data
    CHECK(U.frames[k].at(2, 2, 2) == Catch::Approx(want).margin(1e-14));
  }
}

TEST_CASE("trilinear sampling hits nodes and midpoints", "[fields]") {
  Grid3D g(5, 0.1, 1.0);
  RField3 u(g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) u.at(i, j, k) = g.x(i) + 2 * g.x(j) - g.x(k);
  CHECK(trilinear_sample(u, g.dx, {g.x(1), g.x(2), g.x(3)}) ==
        Catch::Approx(g.x(1) + 2 * g.x(2) - g.x(3)));
  // trilinear interpolation reproduces affine functions anywhere
  CHECK(trilinear_sample(u, g.dx, {0.13, -0.41, 0.77}) ==
        Catch::Approx(0.13 - 2 * 0.41 - 0.77).margin(1e-12));
  CHECK_THROWS_AS(trilinear_sample(u, g.dx, Vec3{1.5, 0, 0}), ConfigError);
}

TEST_CASE("space-time and boundary norms on constants", "[fields]") {
  Grid3D g(9, 0.1, 1.0);
  RSpaceTimeField u;
  u.grid = g;
  u.frames.assign(g.nt, RField3(g.n));
  for (auto& f : u.frames)
    for (auto& v : f.a) v = 1.0;
  CHECK(l2_m(u) == Catch::Approx(std::sqrt(8.0 * g.T)).margin(1e-12));

  RBoundaryTrace tr;
  tr.grid = g;
  tr.steps.assign(g.nt, RFaces(g.n));
  for (auto& s : tr.steps)
    for (auto& fv : s.f)
      for (auto& v : fv) v = 1.0;
  CHECK(l2_sigma(tr) == Catch::Approx(std::sqrt(24.0 * g.T)).margin(1e-12));
  CHECK(sigma_pair_integral(tr, tr) == Catch::Approx(24.0 * g.T).margin(1e-12));
}

TEST_CASE("frame-wise time derivative is exact on quadratics", "[fields]") {
  Grid3D g(5, 0.1, 1.0);
  RSpaceTimeField u;
  u.grid = g;
  u.frames.assign(g.nt, RField3(g.n));
  for (int k = 0; k < g.nt; ++k)
    for (auto& v : u.frames[k].a) v = g.t(k) * g.t(k);
  auto d = dt_frames(u);
  for (int k = 0; k < g.nt; ++k)
    CHECK(d.frames[k].at(1, 1, 1) == Catch::Approx(2.0 * g.t(k)).margin(1e-12));
}
