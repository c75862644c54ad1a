#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <complex>

#include "edgespec/errors.hpp"
#include "edgespec/gb_algebra.hpp"

using namespace edgespec::gb;

namespace {

// small integer matrices as complex doubles: every product below is exact
using C = std::complex<double>;
using M2 = std::array<std::array<C, 2>, 2>;
using M4 = std::array<std::array<C, 4>, 4>;

M4 kron2(const M2& a, const M2& b) {
  M4 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) r[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
  return r;
}

M4 mul(const M4& a, const M4& b) {
  M4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

M4 add(const M4& a, const M4& b) {
  M4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

bool zero(const M4& a) {
  for (const auto& row : a)
    for (C v : row)
      if (v != C(0)) return false;
  return true;
}

bool same(const CliffordMatrix& m, const M4& ref) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (static_cast<double>(m(i, j).re) != ref[i][j].real() || static_cast<double>(m(i, j).im) != ref[i][j].imag())
        return false;
  return true;
}

}  // namespace

TEST_CASE("Gaussian rationals") {
  GaussRational a{Rational(1, 3), Rational(2)}, b{Rational(-1, 2), Rational(1, 5)};
  auto p = a * b;
  CHECK(p.re == Rational(1, 3) * Rational(-1, 2) - Rational(2) * Rational(1, 5));
  CHECK(p.im == Rational(1, 3) * Rational(1, 5) + Rational(2) * Rational(-1, 2));
  CHECK(kI * kI == GaussRational(-1));
  CHECK((a - a).is_zero());
}

TEST_CASE("Clifford generators") {
  auto c = build_clifford();
  auto i2 = CliffordMatrix::identity(2), i4 = CliffordMatrix::identity(4);
  CHECK(c.sigma1 * c.sigma1 == -i2);
  CHECK(c.sigma2 * c.sigma2 == -i2);
  CHECK(c.omega == kI * (c.sigma1 * c.sigma2));
  CHECK(c.omega * c.omega == i2);
  CHECK(c.gamma == kron(c.sigma1, c.omega));
  CHECK(c.gamma * c.gamma == -i4);
  CHECK(c.gamma.transpose() == -c.gamma);
  CHECK(c.gamma.transpose() * c.gamma == i4);
  CHECK(c.s_sign == CliffordMatrix::diagonal({1, -1, -1, 1}));
  CHECK(c.s_sign * c.s_sign == i4);
  CHECK(c.t_sign * c.t_sign == i4);
  CHECK(c.grading == CliffordMatrix::diagonal({1, 1, -1, -1}));
  CHECK(c.gamma.is_real());
}

TEST_CASE("commutators vanish exactly") {
  auto r = commutator_report();
  CHECK(r.gamma_s.is_zero());
  CHECK(r.gamma_t.is_zero());
  CHECK(r.t_s.is_zero());
  CHECK(r.grading.is_zero());
  CHECK(r.all_zero());
  CHECK(structure_report().all());
}

TEST_CASE("independent integer check of the 4x4 identities") {
  const C i(0, 1);
  M2 s1{{{0, -1}, {1, 0}}}, s2{{{0, i}, {i, 0}}};
  M2 w{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k) w[a][b] += i * s1[a][k] * s2[k][b];
  CHECK(w[0][0] == C(1));
  CHECK(w[1][1] == C(-1));
  CHECK(w[0][1] == C(0));
  M4 g = kron2(s1, w), s = kron2(w, w), t = kron2(s1, s1);
  M4 grading{};
  for (int k = 0; k < 4; ++k) grading[k][k] = k < 2 ? 1 : -1;
  CHECK(zero(add(mul(g, s), mul(s, g))));
  CHECK(zero(add(mul(g, t), mul(t, g))));
  M4 ts = mul(t, s), st = mul(s, t);
  for (auto& row : st)
    for (C& v : row) v = -v;
  CHECK(zero(add(ts, st)));
  CHECK(zero(add(mul(grading, g), mul(g, grading))));
  auto c = build_clifford();
  CHECK(same(c.gamma, g));
  CHECK(same(c.s_sign, s));
  CHECK(same(c.t_sign, t));
}

TEST_CASE("operator polynomial composition") {
  auto id = CliffordMatrix::identity(1);
  OperatorPolynomial d(1), xinv(1);
  d.add(0, 1, id);
  xinv.add(1, 0, id);
  // d/dx X^-1 = X^-1 d/dx - X^-2
  auto p = d.compose(xinv);
  CHECK(p.coefficient(1, 1) == id);
  CHECK(p.coefficient(2, 0) == -id);
  CHECK(p.terms().size() == 2);
  // d^2 X^-2 = X^-2 d^2 - 4 X^-3 d + 6 X^-4
  OperatorPolynomial x2(1);
  x2.add(2, 0, id);
  auto q = d.compose(d).compose(x2);
  CHECK(q.coefficient(2, 2) == id);
  CHECK(q.coefficient(3, 1) == GaussRational(-4) * id);
  CHECK(q.coefficient(4, 0) == GaussRational(6) * id);
  CHECK((p + p).coefficient(2, 0) == GaussRational(-2) * id);
  OperatorPolynomial z(1);
  z.add(0, 0, id);
  z.add(0, 0, -id);
  CHECK(z.terms().empty());
  CHECK_THROWS_AS(z.add(0, 0, CliffordMatrix::identity(2)), edgespec::ConfigError);
}

TEST_CASE("symbolic square of the model edge operator") {
  for (auto m : {ModelEdgeDirac{{2.1}, {1.0}}, ModelEdgeDirac{{2.1, 3.5}, {1.0, -0.5}},
                 ModelEdgeDirac{{0.75, 1.25, 5.0}, {0.0, 2.0, -3.0}}}) {
    auto r = symbolic_square(m);
    CHECK(r.identity_holds);
    CHECK(r.componentwise_s_s1);
    CHECK(r.square == r.expected);
    // no first-order-in-X^-1 cross terms survive
    CHECK(r.square.coefficient(1, 0).is_zero());
    CHECK(r.square.coefficient(1, 1).is_zero());
    CHECK(r.square.coefficient(0, 1).is_zero());
  }
  // X^-2 coefficient for a = 2.1: entries +-2.1 (+-2.1 + 1)
  auto r = symbolic_square({{2.1}, {1.0}});
  auto c = r.square.coefficient(2, 0);
  CHECK(c.real_entry(0, 0) == doctest::Approx(2.1 * 3.1));
  CHECK(c.real_entry(1, 1) == doctest::Approx(-2.1 * -1.1));
  CHECK_THROWS_AS(ModelEdgeDirac({{1.0}, {}}).validate(), edgespec::InputError);
}

TEST_CASE("discrete D squared converges") {
  auto u = [](double x) { return std::exp(-2.0 * std::pow(std::log(x), 2)); };
  auto rep = dirac_square_structure({{2.1}, {1.0}}, u, {200, 400, 800}, 1e-2, 1e2);
  REQUIRE(rep.observed_orders.size() == 2);
  for (double o : rep.observed_orders) CHECK(o >= 1.0);
  for (std::size_t i = 1; i < rep.levels.size(); ++i) CHECK(rep.levels[i].discrepancy < rep.levels[i - 1].discrepancy);
  auto z = dirac_square_structure({{2.1}, {1.0}}, [](double) { return 0.0; }, {100}, 1e-2, 1e2);
  CHECK(z.levels[0].discrepancy == 0.0);
}
