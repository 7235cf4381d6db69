#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "wv/transform.hpp"
#include "wv/tube.hpp"

using namespace wv;

namespace {
GaussianBeam canonical_beam(double tau, double rho = 1.2) {
  SoundSpeed c = SoundSpeed::constant(1.0);
  Geodesic g = shoot_geodesic(c, {-1, 0, 0}, {1, 0, 0});
  return GaussianBeam(c, g, tau, rho);
}
}  // namespace

TEST_CASE("weighted transform of a unit weight on the flat chord", "[transform]") {
  // closed form: int_0^{2 sqrt2} ds/(1+is) = -i log(1+2 sqrt2 i)
  GaussianBeam b = canonical_beam(40.0);
  auto one = [](const Vec3&) { return 1.0; };
  cplx J = jacobi_transform(b.chart(), b.flow(), one);
  cplx want = cplx(0, -1) * std::log(cplx(1.0, 2.0 * kSqrt2));
  CHECK(std::abs(J - want) < 1e-6);
  CHECK(J.real() == Catch::Approx(1.2309594173407747).margin(1e-6));
  CHECK(J.imag() == Catch::Approx(-1.0986122886681098).margin(1e-6));
}

TEST_CASE("transform is linear in the weight", "[transform]") {
  GaussianBeam b = canonical_beam(40.0);
  auto one = [](const Vec3&) { return 1.0; };
  auto two = [](const Vec3&) { return 2.0; };
  auto zero = [](const Vec3&) { return 0.0; };
  cplx J1 = jacobi_transform(b.chart(), b.flow(), one);
  cplx J2 = jacobi_transform(b.chart(), b.flow(), two);
  CHECK(std::abs(J2 - 2.0 * J1) < 1e-12);
  CHECK(std::abs(jacobi_transform(b.chart(), b.flow(), zero)) == 0.0);
}

TEST_CASE("transform weights by position along the ray", "[transform]") {
  // weight supported left of the midplane only picks up the first half
  GaussianBeam b = canonical_beam(40.0);
  auto left = [](const Vec3& x) { return x[0] < 0.0 ? 1.0 : 0.0; };
  cplx Jl = jacobi_transform(b.chart(), b.flow(), left);
  cplx want = cplx(0, -1) * std::log(cplx(1.0, kSqrt2));  // int_0^{sqrt2}
  CHECK(std::abs(Jl - want) < 1e-3);  // indicator weight costs one trapezoid cell
}

TEST_CASE("pairing constant on the flat chord", "[transform]") {
  GaussianBeam b = canonical_beam(40.0);
  // C_theta = 1 and c(p) = 1 leave (2 pi)^(3/2)/4
  CHECK(pairing_constant(b) == Catch::Approx(3.93740248643060493).margin(1e-10));
}

TEST_CASE("predicted pairing freezes the flat oracle", "[transform]") {
  GaussianBeam b = canonical_beam(40.0);
  cplx pred = predicted_pairing(b, Nonlinearity::constant(1.0));
  CHECK(pred.real() == Catch::Approx(4.846782670532735).margin(1e-5));
  CHECK(pred.imag() == Catch::Approx(-4.325678757025033).margin(1e-5));
  cplx zero = predicted_pairing(b, Nonlinearity::constant(0.0));
  CHECK(std::abs(zero) == 0.0);
}

TEST_CASE("beam pairing quadrature approaches the prediction", "[transform]") {
  // one doubling only; the full ladder is the acceptance gate's job.  The
  // off-axis phase-slope corrections decay like tau^{-1/2}, which puts the
  // tau = 40 gap near 0.4 of the prediction.
  GaussianBeam b40 = canonical_beam(40.0);
  GaussianBeam b80 = canonical_beam(80.0);
  Nonlinearity one = Nonlinearity::constant(1.0);
  cplx pred = predicted_pairing(b40, one);
  double gap40 = std::abs(flat_pairing(b40) - pred);
  double gap80 = std::abs(flat_pairing(b80) - predicted_pairing(b80, one));
  CHECK(gap40 < 0.5 * std::abs(pred));
  CHECK(gap80 < gap40);
  CHECK(gap80 > 0.5 * gap40);  // no faster than one power of tau^{-1/2} per doubling
}
