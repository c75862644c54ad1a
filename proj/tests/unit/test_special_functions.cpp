#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "edgespec/errors.hpp"
#include "edgespec/special_functions.hpp"
#include "oracle.hpp"

using namespace edgespec::special;

TEST_CASE("eta at 1 and its small-x limit") {
  CHECK(olver_eta(1.0) == doctest::Approx(std::sqrt(2.0) + std::log(1.0 / (1.0 + std::sqrt(2.0)))).epsilon(1e-15));
  CHECK(olver_eta(1.0) == doctest::Approx(0.532839).epsilon(1e-6));
  CHECK(olver_eta(1e-8) - std::log(1e-8) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(olver_eta(0.0), edgespec::DomainError);
  CHECK_THROWS_AS(olver_eta(-1.0), edgespec::DomainError);
}

TEST_CASE("eta and eta - ln x increase") {
  CHECK(olver_eta(2.0) - std::log(2.0) > olver_eta(1.0));
  double prev = -1e300, prev_shift = -1e300;
  for (double x : oracle::log_space(1e-6, 1e6, 400)) {
    double e = olver_eta(x);
    CHECK(e > prev);
    CHECK(e - std::log(x) > prev_shift);
    prev = e;
    prev_shift = e - std::log(x);
  }
}

TEST_CASE("U polynomials") {
  auto f1 = olver_u_polys(1);
  REQUIRE(f1.u_polys.size() == 1);
  CHECK(f1.u_polys[0].coeffs == std::vector<Rational>{Rational(1)});
  CHECK(f1.tv_bounds[0] == 0.0);

  auto f2 = olver_u_polys(2);
  const auto& u1 = f2.u_polys[1].coeffs;
  REQUIRE(u1.size() == 4);
  CHECK(u1[0] == 0);
  CHECK(u1[1] == Rational(3, 24));
  CHECK(u1[2] == 0);
  CHECK(u1[3] == Rational(-5, 24));

  // U_1 is increasing up to 1/sqrt(5), then falls to U_1(1) = -1/12
  double ps = 1.0 / std::sqrt(5.0);
  double peak = (3 * ps - 5 * ps * ps * ps) / 24.0;
  CHECK(f2.tv_bounds[1] == doctest::Approx(peak + (peak + 1.0 / 12.0)).epsilon(1e-13));
  REQUIRE(f2.critical_points[1].size() == 1);
  CHECK(f2.critical_points[1][0] == doctest::Approx(ps).epsilon(1e-13));

  CHECK_THROWS_AS(olver_u_polys(0), edgespec::ConfigError);
  CHECK_THROWS_AS(olver_u_polys(kMaxOlverTerms + 1), edgespec::ConfigError);
}

TEST_CASE("U_2 against the known closed form") {
  // (81 p^2 - 462 p^4 + 385 p^6) / 1152
  auto f = olver_u_polys(3);
  const auto& c = f.u_polys[2].coeffs;
  REQUIRE(c.size() == 7);
  CHECK(c[2] == Rational(81, 1152));
  CHECK(c[4] == Rational(-462, 1152));
  CHECK(c[6] == Rational(385, 1152));
}

TEST_CASE("total variation of a monotone polynomial is its range") {
  RationalPolynomial p{{Rational(0), Rational(1), Rational(0), Rational(1)}};
  CHECK(total_variation(p, 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  RationalPolynomial q{{Rational(0), Rational(-1), Rational(1)}};  // min at 1/2
  CHECK(total_variation(q, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("small argument series") {
  auto r = bessel_i(BesselOrder(1.0), 1e-4, false);
  CHECK(r.value == doctest::Approx(5e-5).epsilon(1e-8));
  CHECK(r.value == doctest::Approx(oracle::i_leading(1.0, 1e-4)).epsilon(1e-8));
}

TEST_CASE("half-integer closed forms") {
  for (double x : {1e-3, 0.1, 1.0, 2.0, 7.5, 30.0, 300.0}) {
    CAPTURE(x);
    CHECK(oracle::rel(bessel_i(BesselOrder(0.5), x, false).value, oracle::i_half(x)) < 1e-13);
    CHECK(oracle::rel(bessel_k(BesselOrder(0.5), x, false).value, oracle::k_half(x)) < 1e-13);
    CHECK(oracle::rel(bessel_i(BesselOrder(1.5), x, false).value, oracle::i_three_halves(x)) < 1e-13);
    CHECK(oracle::rel(bessel_k(BesselOrder(1.5), x, false).value, oracle::k_three_halves(x)) < 1e-13);
  }
  CHECK(bessel_k(BesselOrder(0.5), 2.0, false).value ==
        doctest::Approx(std::sqrt(std::numbers::pi / 4.0) * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("agreement with a 50 digit reference") {
  for (double nu : {0.7, 2.5, 9.0, 10.5, 31.0, 50.0, 200.0, 1000.0})
    for (double x : {1e-3, 0.5, 3.0, 25.0, 50.0, 400.0, 1e4}) {
      CAPTURE(nu);
      CAPTURE(x);
      auto i = bessel_i(BesselOrder(nu), x, true);
      auto k = bessel_k(BesselOrder(nu), x, true);
      double ri = oracle::scaled_i(nu, x), rk = oracle::scaled_k(nu, x);
      CHECK(oracle::rel(i.value, ri) <= std::max(i.err_bound, 4e-15));
      CHECK(oracle::rel(k.value, rk) <= std::max(k.err_bound, 4e-15));
      CHECK(oracle::rel(i.value, ri) < 1e-10);
      CHECK(oracle::rel(k.value, rk) < 1e-10);
    }
}

TEST_CASE("nu = 50, x = 50 uniform expansion within its bound") {
  auto i = bessel_i_uniform(BesselOrder(50.0), 50.0, 4, true);
  auto k = bessel_k_uniform(BesselOrder(50.0), 50.0, 4, true);
  auto b = olver_error_bounds(4, 50.0, 1.0);
  CHECK(oracle::rel(i.value, oracle::scaled_i(50.0, 50.0)) <= b.eta1 + 1e-15);
  CHECK(oracle::rel(k.value, oracle::scaled_k(50.0, 50.0)) <= b.eta2 + 1e-15);
}

TEST_CASE("uniform expansion error bounded by eta for mu >= 10") {
  for (double mu : {10.0, 14.0, 30.0, 120.0})
    for (double x : oracle::log_space(1e-2, 1e4, 12)) {
      CAPTURE(mu);
      CAPTURE(x);
      auto i = bessel_i_uniform(BesselOrder(mu), x, 4, true);
      auto k = bessel_k_uniform(BesselOrder(mu), x, 4, true);
      CHECK(oracle::rel(i.value, oracle::scaled_i(mu, x)) <= i.err_bound + 1e-14);
      CHECK(oracle::rel(k.value, oracle::scaled_k(mu, x)) <= k.err_bound + 1e-14);
    }
}

TEST_CASE("eta bounds shrink like mu^-n") {
  for (double z : {0.05, 1.0, 20.0}) {
    auto a = olver_error_bounds(4, 10.0, z), b = olver_error_bounds(4, 20.0, z);
    double q = (a.eta2 * 1e4) / (b.eta2 * std::pow(20.0, 4));
    CHECK(q > 0.5);
    CHECK(q < 2.0);
    CHECK(a.eta1 <= a.eta1_inf * (1 + 1e-12));
  }
}

TEST_CASE("Wronskian") {
  // I K' - I' K = -1/x, written with the order nu + 1 neighbours
  auto p = bessel_ik_scaled(BesselOrder(2.5), 3.0);
  CHECK(3.0 * (p.i0 * p.k1 + p.i1 * p.k0) == doctest::Approx(1.0).epsilon(1e-14));
  // and numerically with difference quotients
  auto I = [](double x) { return bessel_i(BesselOrder(2.5), x, false).value; };
  auto K = [](double x) { return bessel_k(BesselOrder(2.5), x, false).value; };
  double w = I(3.0) * oracle::central_diff(K, 3.0, 1e-5) - oracle::central_diff(I, 3.0, 1e-5) * K(3.0);
  CHECK(w == doctest::Approx(-1.0 / 3.0).epsilon(1e-8));
  for (double nu : oracle::log_space(0.5, 50.0, 50))
    for (double x : oracle::log_space(1e-3, 1e3, 50)) {
      auto q = bessel_ik_scaled(BesselOrder(nu), x);
      CHECK(std::abs(x * (q.i0 * q.k1 + q.i1 * q.k0) - 1.0) <= 1e-10);
    }
}

TEST_CASE("overflow in unscaled mode only") {
  auto i = bessel_i(BesselOrder(100.0), 200.0, true);
  auto k = bessel_k(BesselOrder(100.0), 200.0, true);
  CHECK(std::isfinite(i.value));
  CHECK(std::isfinite(k.value));
  CHECK(i.log_scaled);
  // I_100(200) ~ 1e84, still a double
  CHECK(std::isfinite(bessel_i(BesselOrder(100.0), 200.0, false).value));
  CHECK_THROWS_AS(bessel_i(BesselOrder(1000.0), 2000.0, false), edgespec::OverflowError);
  // K_1000(2000) ~ exp(-1755) underflows instead
  CHECK(bessel_k(BesselOrder(1000.0), 2000.0, false).value >= 0.0);
  CHECK(bessel_k(BesselOrder(1000.0), 2000.0, false).value < 1e-300);
  CHECK(std::isfinite(bessel_i(BesselOrder(1e4), 1e6, true).value));
  CHECK(std::isfinite(bessel_k(BesselOrder(1e4), 1e6, true).value));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(bessel_i(BesselOrder(1.0), 0.0, false), edgespec::DomainError);
  CHECK_THROWS_AS(bessel_k(BesselOrder(1.0), -2.0, false), edgespec::DomainError);
  CHECK_THROWS_AS(BesselOrder(-1.0), edgespec::DomainError);
}

TEST_CASE("log derivatives") {
  auto d = bessel_log_derivatives(BesselOrder(0.5), 1.0);
  double i_minus_half = std::sqrt(2.0 / std::numbers::pi) * std::cosh(1.0);
  CHECK(d.first == doctest::Approx(i_minus_half - 0.5 * oracle::i_half(1.0)).epsilon(1e-13));

  auto I = [](double x) { return bessel_i(BesselOrder(2.5), x, false).value; };
  auto e = bessel_log_derivatives(BesselOrder(2.5), 3.0);
  CHECK(oracle::rel(e.first, 3.0 * oracle::central_diff(I, 3.0, 1e-5)) < 1e-6);

  for (double nu : {0.5, 2.0, 7.0, 40.0})
    for (double x : {0.01, 1.0, 10.0, 100.0}) CHECK(bessel_log_derivatives(BesselOrder(nu), x).second < 0.0);
}
