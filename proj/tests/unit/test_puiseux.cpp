#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "test_support.hpp"
#include "walkspec/asymptotics.hpp"
#include "walkspec/puiseux.hpp"

using namespace walkspec;
using namespace walkspec::testing;

namespace {

constexpr unsigned kBits = 256;

Real tol() { return pow_int(Real(2), 16 - static_cast<long>(kBits)); }

PuiseuxSeries at_zero(const std::map<Rational, Real>& terms, std::optional<Rational> trunc = std::nullopt) {
  return PuiseuxSeries::from_terms(Direction::AtZero, terms, trunc);
}

Real R(long a, long b = 1) { return to_real(ratio(a, b)); }

bool near(const Real& a, const Real& b, const Real& eps) { return abs(a - b) <= eps * (1 + abs(b)); }

// Roots of chi(t) = 1 + u on (0, 1) and (1, infinity) by bisection.
Real solve_branch(const WalkShape& shape, const Real& u, bool small) {
  Real lo = small ? Real(0) : Real(1);
  Real hi = 1;
  if (small) {
    lo = pow_int(Real(2), -200);
  } else {
    hi = 2;
    while (shape(hi) < 1 + u) hi *= 2;
  }
  for (int i = 0; i < 400; ++i) {
    Real mid = (lo + hi) / 2;
    bool above = shape(mid) > 1 + u;
    if (above == small) lo = mid;
    else hi = mid;
  }
  return (lo + hi) / 2;
}

Real t_chi_prime_at(const WalkShape& shape, const Real& t) {
  Real total = 0;
  for (const auto& [k, v] : shape.coeffs()) total += to_real(v * k) * pow_int(t, k);
  return total;
}

}  // namespace

TEST_CASE("series_root: examples") {
  PrecisionScope scope(kBits);
  auto F = at_zero({{0, R(1)}, {1, R(1)}}, Rational(6));
  auto G = series_root(F, 2);
  std::vector<Real> expect = {R(1), R(1, 2), R(-1, 8), R(1, 16), R(-5, 128), R(7, 256)};
  REQUIRE(G.coeffs.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(near(G.coeffs[i], expect[i], tol()));
  CHECK(*G.truncation_exponent() == 6);

  auto sq = series_root(PuiseuxSeries::monomial(Direction::AtZero, 2, Radical(4)), 2);
  CHECK(sq.base_exponent() == 1);
  CHECK(*sq.exact_leading == Radical(2));
  CHECK(!sq.local_truncation);

  auto inv = series_root(at_zero({{-1, R(1)}, {0, R(2)}}, Rational(5)), -1);
  CHECK(inv.base_exponent() == 1);
  for (long k = 0; k < 6; ++k) CHECK(near(inv.coefficient(Rational(1 + k)), pow_int(Real(-2), k), tol()));
  CHECK_THROWS_AS(series_root(at_zero({{0, R(-1)}, {1, R(1)}}, Rational(4)), 2), Error);
}

TEST_CASE("series_root: type law") {
  PrecisionScope scope(kBits);
  auto F = at_zero({{Rational(2, 3), R(5)}, {Rational(5, 3), R(1)}}, Rational(8, 3));
  F.exact_leading = Radical(5);
  auto G = series_root(F, 3);
  CHECK(G.base_exponent() == Rational(2, 9));
  CHECK(*G.exact_leading == Radical::power(5, Rational(1, 3)));
  auto back = G * G * G;
  CHECK(*back.truncation_exponent() == Rational(8, 3));
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) CHECK(near(back.coefficient(F.u_exponent(i)), F.coeffs[i], tol()));
}

TEST_CASE("series_invert: examples") {
  PrecisionScope scope(kBits);
  std::map<Rational, Real> geo;
  for (long k = 1; k <= 8; ++k) geo[Rational(k)] = R(1);
  auto inv = series_invert(at_zero(geo, Rational(9)));
  for (long k = 1; k <= 8; ++k) CHECK(near(inv.coefficient(Rational(k)), R(k % 2 == 1 ? 1 : -1), tol()));

  auto id = at_zero({{1, R(1)}});
  id.exact_leading = Radical(1);
  auto same = series_invert(id);
  CHECK(same.coeffs.size() == 1);

  auto cat = series_invert(at_zero({{1, R(1)}, {2, R(1)}}, Rational(7)));
  std::vector<long> catalan = {1, -1, 2, -5, 14, -42};
  for (long k = 1; k <= 6; ++k) CHECK(near(cat.coefficient(Rational(k)), R(catalan[k - 1]), tol()));

  CHECK_THROWS_AS(series_invert(at_zero({{1, R(2)}, {2, R(1)}}, Rational(4))), Error);
  CHECK_THROWS_AS(series_invert(at_zero({{2, R(1)}}, Rational(4))), Error);
}

TEST_CASE("series_compose: examples and roundtrip") {
  PrecisionScope scope(kBits);
  auto sq = series_compose(at_zero({{2, R(1)}}), at_zero({{1, R(2)}}));
  CHECK(sq.base_exponent() == 2);
  CHECK(near(sq.leading(), R(4), tol()));

  auto G = at_zero({{1, R(1)}, {3, R(1)}});
  auto F = at_zero({{1, R(1)}, {2, R(-1)}});
  auto H = series_compose(G, F);
  std::vector<long> expect = {1, -1, 1, -3, 3, -1};
  for (long k = 1; k <= 6; ++k) CHECK(near(H.coefficient(Rational(k)), R(expect[k - 1]), tol()));

  auto Gd = PuiseuxSeries::monomial(Direction::AtZero, 1, Radical(3), Rational(4));
  auto Fb = PuiseuxSeries::monomial(Direction::AtZero, 1, Radical(Rational(2, 5)), Rational(3));
  CHECK(*series_compose(Gd, Fb).exact_leading == Radical(Rational(6, 5)));

  // Order-12 coefficients reach ~1e4 and cancel in the roundtrip.
  const Real cancel = pow_int(Real(2), -200);
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> coeff(-5, 5);
  for (int trial = 0; trial < 10; ++trial) {
    std::map<Rational, Real> terms{{Rational(1), R(1)}};
    for (long k = 2; k <= 12; ++k) terms[Rational(k)] = R(coeff(gen), 3);
    auto P = at_zero(terms, Rational(13));
    P.exact_leading = Radical(1);
    auto Q = series_invert(P);
    auto id = series_compose(P, Q);
    CHECK(*id.truncation_exponent() == 13);
    for (long k = 1; k <= 12; ++k) CHECK(near(id.coefficient(Rational(k)), R(k == 1 ? 1 : 0), cancel));
  }
}

TEST_CASE("series_compose: exponent clash") {
  PrecisionScope scope(kBits);
  auto root = at_zero({{Rational(1, 2), R(1)}, {Rational(3, 2), R(1)}}, Rational(5, 2));
  auto negative = at_zero({{1, R(-1)}, {2, R(1)}}, Rational(3));
  CHECK_THROWS_AS(series_compose(root, negative), Error);
  auto constant = at_zero({{0, R(1)}, {1, R(1)}}, Rational(3));
  CHECK_THROWS_AS(series_compose(root, constant), Error);
}

TEST_CASE("alpha_branches: simple walk closed forms") {
  PrecisionScope scope(kBits);
  auto ab = alpha_branches(simple_walk(), 60, kBits);
  CHECK(*ab.alpha_minus.exact_leading == Radical(Rational(1, 2)));
  CHECK(ab.alpha_minus.base_exponent() == -1);
  CHECK(*ab.alpha_plus.exact_leading == Radical(2));
  CHECK(ab.alpha_plus.base_exponent() == 1);
  Real u = 50;
  Real root = sqrt(u * u + 2 * u);
  CHECK(near(ab.alpha_plus.evaluate(u), 1 + u + root, Real(1e-60)));
  CHECK(near(ab.alpha_minus.evaluate(u), 1 + u - root, Real(1e-60)));
  std::vector<Real> plus = {R(2), R(2), R(-1, 2), R(1, 2), R(-5, 8)};
  for (long i = 0; i < 5; ++i) CHECK(near(ab.alpha_plus.coefficient(Rational(1 - i)), plus[i], tol()));
}

TEST_CASE("alpha_branches: leading terms and defining equation") {
  PrecisionScope scope(kBits);
  auto ab = alpha_branches(skew_walk(), 12, kBits);
  CHECK(*ab.alpha_minus.exact_leading == Radical(Rational(2, 3)));
  CHECK(ab.alpha_minus.base_exponent() == -1);
  CHECK(*ab.alpha_plus.exact_leading == Radical::power(3, Rational(1, 2)));
  CHECK(ab.alpha_plus.base_exponent() == Rational(1, 2));

  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto shape = random_shape(gen, 1 + trial % 3, 1 + (trial / 3) % 3);
    auto br = alpha_branches(shape, 12, kBits);
    for (const auto* alpha : {&br.alpha_minus, &br.alpha_plus}) {
      auto value = series_compose(shape_series(shape), *alpha);
      REQUIRE(value.truncation_exponent());
      for (std::size_t i = 0; i < value.coeffs.size(); ++i) {
        Rational q = value.u_exponent(i);
        Real expect = (q == 1 || q == 0) ? Real(1) : Real(0);
        CHECK(near(value.coeffs[i], expect, Real(1e-60)));
      }
      CHECK(value.known(Rational(0)));
    }
  }
}

TEST_CASE("gamma_branches: simple walk and leading coefficients") {
  PrecisionScope scope(kBits);
  auto gb = gamma_branches(simple_walk(), 6, kBits);
  std::vector<Real> plus = {R(1), R(-1), R(3, 2), R(-5, 2), R(35, 8)};
  for (long i = 0; i < 5; ++i) {
    CHECK(near(gb.gamma_plus.coefficient(Rational(-1 - i)), plus[i], tol()));
    CHECK(near(gb.gamma_minus.coefficient(Rational(-1 - i)), -plus[i], tol()));
  }
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 12; ++trial) {
    long e = 1 + trial % 3;
    long f = 1 + (trial / 3) % 4;
    auto shape = random_shape(gen, e, f);
    auto g = gamma_branches(shape, 4, kBits);
    CHECK(g.gamma_plus.base_exponent() == -1);
    CHECK(g.gamma_minus.base_exponent() == -1);
    REQUIRE(g.gamma_plus.exact_leading);
    REQUIRE(g.gamma_minus.exact_leading);
    CHECK(*g.gamma_plus.exact_leading == Radical(ratio(1, f)));
    CHECK(*g.gamma_minus.exact_leading == Radical(ratio(-1, e)));
  }
}

TEST_CASE("gamma_branches: numeric oracle at large u") {
  PrecisionScope scope(kBits);
  std::mt19937_64 gen(29);
  Real u = 10000;
  for (int trial = 0; trial < 6; ++trial) {
    auto shape = random_shape(gen, 1 + trial % 2, 1 + trial % 3);
    auto g = gamma_branches(shape, 40, kBits);
    Real am = solve_branch(shape, u, true);
    Real ap = solve_branch(shape, u, false);
    CHECK(near(g.gamma_minus.evaluate(u), 1 / t_chi_prime_at(shape, am), Real(1e-40)));
    CHECK(near(g.gamma_plus.evaluate(u), 1 / t_chi_prime_at(shape, ap), Real(1e-40)));
  }
}

TEST_CASE("gamma_diff_at_infinity: examples and leading law") {
  PrecisionScope scope(kBits);
  auto d = gamma_diff_at_infinity(simple_walk(), 6, kBits);
  std::vector<long> expect = {2, -2, 3, -5};
  for (long i = 0; i < 4; ++i) CHECK(near(d.diff.coefficient(Rational(-1 - i)), R(expect[i]), tol()));
  CHECK(*gamma_diff_at_infinity(skew_walk(), 4, kBits).diff.exact_leading == Radical(Rational(3, 2)));
  CHECK(*gamma_diff_at_infinity(lazy_walk(), 4, kBits).diff.exact_leading == Radical(2));

  auto skew = gamma_diff_at_infinity(skew_walk(), 6, kBits);
  CHECK(skew.diff.ramification == 2);
  REQUIRE(!skew.collisions.empty());
  CHECK(skew.collisions.front() == -1);
  for (const auto& q : skew.collisions) CHECK(q.get_den() == 1);

  auto wide = gamma_diff_at_infinity(WalkShape::create({{-2, Rational(1, 2)}, {2, Rational(1, 2)}}), 4, kBits);
  CHECK(wide.collisions.size() >= 2);
  CHECK(wide.collisions[1] == Rational(-3, 2));
}

TEST_CASE("gamma_diff_at_zero: simple walk and leading coefficient") {
  PrecisionScope scope(kBits);
  auto d = gamma_diff_at_zero(simple_walk(), 8, kBits);
  Real s2 = sqrt(Real(2));
  std::vector<Real> half = {s2, -s2 / 4, 3 * s2 / 32, -5 * s2 / 128};
  for (long l = 0; l < 4; ++l) {
    CHECK(near(d.coefficient(ratio(2 * l - 1, 2)), half[l], tol()));
    CHECK(abs(d.coefficient(Rational(l))) <= tol());
  }
  CHECK(*d.exact_leading == Radical::power(2, Rational(1, 2)));
  CHECK_THROWS_AS(gamma_diff_at_zero(biased_walk(), 4, kBits), Error);

  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 8; ++trial) {
    auto shape = random_unbiased(gen, 1 + trial % 3, 1 + trial % 2);
    auto z = gamma_diff_at_zero(shape, 10, kBits);
    Rational J2 = moments(shape, 2).J(2);
    REQUIRE(z.exact_leading);
    CHECK(*z.exact_leading == Radical::power(2 / J2, Rational(1, 2)));
    for (long l = 0; l < 4; ++l) CHECK(abs(z.coefficient(Rational(l))) <= tol());
  }
}

TEST_CASE("gamma_diff_at_zero: Watson transform matches the alternating expansion") {
  PrecisionScope scope(kBits);
  std::mt19937_64 gen(37);
  const Real two_pi = 2 * boost::math::constants::pi<Real>();
  for (int trial = 0; trial < 6; ++trial) {
    auto shape = random_unbiased(gen, 1 + trial % 3, 1 + trial % 4);
    auto z = gamma_diff_at_zero(shape, 12, kBits);
    auto ex = expansion(shape, 4, SignMode::Alternating);
    for (long l = 0; l <= 4; ++l) {
      Rational q = ratio(2 * l - 1, 2);
      Real watson = z.coefficient(q) * boost::math::tgamma(to_real(q) + 1) / two_pi;
      Real predicted = ex.prefactor * ex.coefficients[l] * (l % 2 == 0 ? 1 : -1);
      CHECK(near(watson, predicted, Real(1e-60)));
    }
  }
}

TEST_CASE("watson_check: passes on random shapes") {
  std::mt19937_64 gen(71);
  for (int trial = 0; trial < 4; ++trial) {
    auto w = watson_check(random_unbiased(gen, 1 + trial % 2, 2), 2, kBits);
    CHECK(w.pass);
    CHECK(w.transformed.size() == 3);
    CHECK(w.max_gap < Real(1e-60));
  }
  CHECK_THROWS_AS(watson_check(biased_walk(), 2, kBits), Error);
}
