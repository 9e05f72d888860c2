#include "doctest.h"
#include "test_support.hpp"
#include "walkspec/walk_core.hpp"

using namespace walkspec;
using namespace walkspec::testing;

TEST_CASE("new_shape validates and caches the support") {
  auto s = simple_walk();
  CHECK(s.e() == 1);
  CHECK(s.f() == 1);
  CHECK(s.unbiased());

  auto k = skew_walk();
  CHECK(k.e() == 1);
  CHECK(k.f() == 2);
  CHECK(k.unbiased());

  CHECK_FALSE(biased_walk().unbiased());
  try {
    WalkShape::create({{-1, Rational(3, 7)}, {2, Rational(4, 7)}}, true);
    FAIL("expected Biased");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::Biased);
  }
}

TEST_CASE("new_shape error paths") {
  auto code_of = [](std::map<long, Rational> c) {
    try {
      WalkShape::create(std::move(c));
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of({{-1, Rational(-1, 2)}, {1, Rational(3, 2)}}) == ErrorCode::NegativeCoefficient);
  CHECK(code_of({{-1, Rational(1, 2)}, {1, Rational(1, 3)}}) == ErrorCode::MassNotOne);
  CHECK(code_of({{0, Rational(1, 2)}, {1, Rational(1, 2)}}) == ErrorCode::NoNegativeSupport);
  CHECK(code_of({{-2, Rational(1, 2)}, {0, Rational(1, 2)}}) == ErrorCode::NoPositiveSupport);
}

TEST_CASE("zero coefficients are dropped") {
  auto s = WalkShape::create({{-3, Rational(0)}, {-1, Rational(1, 2)}, {0, Rational(0)}, {1, Rational(1, 2)}, {5, Rational(0)}});
  CHECK(s.e() == 1);
  CHECK(s.f() == 1);
  CHECK(s.coeffs().size() == 2);
  CHECK(s == simple_walk());
}

TEST_CASE("moments") {
  auto j = moments(simple_walk(), 4);
  CHECK(j.J(2) == 1);
  CHECK(j.J(3) == 0);
  CHECK(j.J(4) == 1);
  auto k = moments(skew_walk(), 3);
  CHECK(k.J(2) == 2);
  CHECK(k.J(3) == 2);
  auto l = moments(lazy_walk(), 4);
  CHECK(l.J(2) == Rational(1, 2));
  CHECK(l.J(3) == 0);
  CHECK(l.J(4) == Rational(1, 2));
  CHECK_THROWS_AS(moments(simple_walk(), 1), Error);
}

TEST_CASE("support gcd") {
  CHECK(support_gcd(simple_walk()) == 1);
  CHECK(support_gcd(reindex(simple_walk(), 2)) == 2);
  CHECK(support_gcd(skew_walk()) == 1);
}

TEST_CASE("scale equivalents of the biased example") {
  auto eqs = scale_equivalents(biased_walk(), 128);
  REQUIRE(eqs.size() == 1);
  REQUIRE(eqs[0].exact_lambda.has_value());
  CHECK(*eqs[0].exact_lambda == Rational(1, 2));
  REQUIRE(eqs[0].exact_shape.has_value());
  CHECK(*eqs[0].exact_shape == biased_partner());
  CHECK(scale_equivalents(simple_walk(), 128).empty());
  CHECK(scale_equivalents(lazy_walk(), 128).empty());
}

TEST_CASE("scale equivalents with an irrational root satisfy chi(lambda) = 1") {
  // chi = 1/2 t^-1 + 1/2 t^2 has t^3 - 2t + 1 = (t - 1)(t^2 + t - 1), so the
  // partner root is the golden-ratio conjugate (sqrt(5) - 1)/2.
  auto s = WalkShape::create({{-1, Rational(1, 2)}, {2, Rational(1, 2)}});
  const unsigned bits = 200;
  auto eqs = scale_equivalents(s, bits);
  REQUIRE(eqs.size() == 1);
  CHECK_FALSE(eqs[0].exact_lambda.has_value());
  PrecisionScope scope(bits);
  Real golden = (sqrt(Real(5)) - 1) / 2;
  CHECK(abs(eqs[0].lambda - golden) < pow_int(Real(2), -static_cast<long>(bits) + 8));
  Real mass = eqs[0].shape.mass();
  CHECK(abs(mass - 1) < pow_int(Real(2), -static_cast<long>(bits) + 8));
}

TEST_CASE("scale equivalents property: every returned lambda is a root") {
  std::mt19937_64 gen(11);
  const unsigned bits = 160;
  for (int trial = 0; trial < 30; ++trial) {
    auto s = random_shape(gen, 1 + trial % 3, 1 + trial % 4);
    auto eqs = scale_equivalents(s, bits);
    if (s.unbiased()) CHECK(eqs.empty());
    PrecisionScope scope(bits);
    for (const auto& eq : eqs) {
      CHECK(eq.lambda > 0);
      CHECK(abs(eq.shape.mass() - 1) < pow_int(Real(2), -static_cast<long>(bits) + 8));
    }
  }
}

TEST_CASE("reindex and equivalence") {
  auto r = reindex(simple_walk(), 2);
  CHECK(r.coeff(-2) == Rational(1, 2));
  CHECK(r.coeff(2) == Rational(1, 2));
  auto refl = reindex(skew_walk(), -1);
  CHECK(refl.coeff(1) == Rational(2, 3));
  CHECK(refl.coeff(-2) == Rational(1, 3));
  CHECK(reindex(skew_walk(), 1) == skew_walk());
  CHECK_THROWS_AS(reindex(skew_walk(), 0), Error);

  CHECK(equivalent(simple_walk(), simple_walk()) == Equivalence::Identical);
  CHECK(equivalent(skew_walk(), refl) == Equivalence::Reflected);
  CHECK(equivalent(simple_walk(), lazy_walk()) == Equivalence::No);
}

TEST_CASE("shape invariants on random shapes") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 50; ++trial) {
    long e = 1 + trial % 4;
    long f = 1 + (trial / 4) % 4;
    auto s = random_shape(gen, e, f);
    Rational mass = 0;
    for (const auto& [k, v] : s.coeffs()) mass += v;
    CHECK(mass == 1);
    // Jensen: J_2 > mean^2 since the support has at least two points.
    CHECK(moments(s, 2).J(2) > s.mean() * s.mean());
    for (long n : {2L, 3L, -1L, -3L}) CHECK(reindex(reindex(s, n), -1) == reindex(s, -n));
    auto t = random_shape(gen, e, f);
    CHECK((equivalent(s, t) == Equivalence::No) == (equivalent(t, s) == Equivalence::No));
    CHECK(equivalent(s, s) == Equivalence::Identical);
    auto u = random_unbiased(gen, e, f);
    CHECK(u.mean() == 0);
    CHECK(u.e() == e);
    CHECK(u.f() == f);
  }
}
