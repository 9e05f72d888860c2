#include <boost/math/constants/constants.hpp>

#include "doctest.h"
#include "test_support.hpp"
#include "walkspec/asymptotics.hpp"

using namespace walkspec;
using namespace walkspec::testing;

namespace {

Real pi() { return boost::math::constants::pi<Real>(); }

// Bessel coefficient ((2l-1)!!)^2 / (l! 8^l) of e^{-x} I_0(x) sqrt(2 pi x).
Rational bessel_coefficient(long l) {
  Rational c = 1;
  for (long k = 1; k <= l; ++k) c *= Rational((2 * k - 1) * (2 * k - 1), 8 * k);
  return c;
}

bool close_bits(const Real& a, const Real& b, long bits) {
  return abs(a - b) <= pow_int(Real(2), -bits) * abs(b);
}

}  // namespace

TEST_CASE("symbolic_A: low orders") {
  auto A = symbolic_A(1);
  REQUIRE(A.size() == 2);
  CHECK(A[0].to_string() == "1");
  CHECK(A[1].to_string() == "1/8*rho4 - 5/24*rho3^2");
  CHECK(evaluate_A(simple_walk(), 1)[1] == Rational(1, 8));
  CHECK(evaluate_A(lazy_walk(), 1)[1] == Rational(1, 4));
  CHECK_THROWS_AS(symbolic_A(kMaxSymbolicOrder + 1), Error);
  CHECK_THROWS_AS(evaluate_A(biased_walk(), 1), Error);
}

TEST_CASE("symbolic_A: Bessel coefficients for the simple and lazy walks") {
  auto simple = evaluate_A(simple_walk(), 8);
  auto lazy = evaluate_A(lazy_walk(), 8);
  for (long l = 0; l <= 8; ++l) {
    CHECK(simple[l] == bessel_coefficient(l));
    CHECK(lazy[l] == bessel_coefficient(l) * pow(Rational(2), l));
  }
}

TEST_CASE("symbolic_A: weight grading and index bound") {
  auto A = symbolic_A(9);
  for (long l = 0; l <= 9; ++l) {
    CHECK(A[l].max_index() <= 2 * l + 2);
    for (const auto& [key, c] : A[l].terms) CHECK(NormalizedMomentPolynomial::weight(key) == 2 * l);
  }
}

TEST_CASE("symbolic_A: symmetric shapes use even moments only") {
  auto sym = WalkShape::create({{-2, Rational(1, 6)}, {-1, Rational(1, 3)}, {1, Rational(1, 3)}, {2, Rational(1, 6)}});
  auto A = symbolic_A(4);
  MomentVector J = moments(sym, 10);
  for (long l = 0; l <= 4; ++l) {
    NormalizedMomentPolynomial even;
    for (const auto& [key, c] : A[l].terms) {
      bool has_odd = false;
      for (std::size_t i = 0; i < key.size(); i += 2) has_odd = has_odd || key[i] != 0;
      if (!has_odd) even.terms[key] = c;
    }
    CHECK(even.evaluate(J) == A[l].evaluate(J));
  }
}

TEST_CASE("evaluate_L: Bessel oracle") {
  PrecisionScope scope(256);
  Real s = 10;
  Real simple = evaluate_L(simple_walk(), s, terms_for_L(s));
  CHECK(close_bits(simple, exp(-s) * bessel_i0(s), 200));
  Real lazy = evaluate_L(lazy_walk(), s, terms_for_L(s));
  CHECK(close_bits(lazy, exp(-s / 2) * bessel_i0(s / 2), 200));
  CHECK(evaluate_L(skew_walk(), Real(0), 0) == 1);
}

TEST_CASE("evaluate_L: pruned path and its error bound") {
  PrecisionScope scope(128);
  Real s = 2000;
  long N = terms_for_L(s);
  REQUIRE(N > kExactTermLimit);
  LValue v = evaluate_L_bounded(simple_walk(), s, N);
  Real truth = exp(-s) * bessel_i0(s);
  CHECK(v.error_bound < pow_int(Real(2), -100));
  CHECK(abs(v.value - truth) <= v.error_bound + pow_int(Real(2), -120) * truth);
}

TEST_CASE("evaluate_L: tail errors and monotonicity in N") {
  PrecisionScope scope(128);
  Real s = 20;
  CHECK_THROWS_AS(evaluate_L(skew_walk(), s, 15), Error);
  CHECK_THROWS_AS(evaluate_L(skew_walk(), s, 40), Error);
  long N = terms_for_L(s);
  Real previous = evaluate_L(skew_walk(), s, N);
  for (long extra = 1; extra <= 4; ++extra) {
    Real next = evaluate_L(skew_walk(), s, N + 10 * extra);
    CHECK(next >= previous);
    previous = next;
  }
}

TEST_CASE("evaluate_L_tilde: K_0 oracle") {
  PrecisionScope scope(128);
  for (int si : {10, 100}) {
    Real s = si;
    Real truth = exp(s) * bessel_k0(s) / pi();
    CHECK(close_bits(evaluate_L_tilde(simple_walk(), s, 128), truth, 100));
  }
  Real s = 10;
  CHECK(close_bits(evaluate_L_tilde(lazy_walk(), s, 128), exp(s / 2) * bessel_k0(s / 2) / pi(), 100));
  CHECK_THROWS_AS(evaluate_L_tilde(biased_walk(), s, 128), Error);
}

TEST_CASE("evaluate_L_tilde: alternating expansion at large s") {
  PrecisionScope scope(128);
  Real s = 10000;
  auto ex = expansion(simple_walk(), 2, SignMode::Alternating);
  Real v = evaluate_L_tilde(simple_walk(), s, 128);
  CHECK(abs(v - ex.partial_sum(s, 2)) < 10 * pow(s, Real(-3.5)));
}

TEST_CASE("amgm_delta: quadratic lower bound") {
  PrecisionScope scope(128);
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto shape = random_unbiased(gen, 1 + trial % 3, 1 + trial % 4);
    Real delta = amgm_delta(shape);
    REQUIRE(delta > 0);
    for (int i = -40; i <= 40; ++i) {
      Real x = Real(i) / 8;
      CHECK(shape(exp(x)) >= 1 + delta * x * x - pow_int(Real(2), -100));
    }
  }
}

TEST_CASE("verify_expansion: prefactor discrimination") {
  PrecisionScope scope(256);
  std::vector<Real> grid = {Real(100), Real(1000), Real(10000)};
  auto simple = verify_expansion(simple_walk(), 1, grid, Target::L, 3);
  CHECK(simple.pass);
  CHECK(simple.prefactor_match == "both");
  CHECK(abs(simple.fitted_prefactor - Real("0.3989422804014327")) < Real(1e-9));
  CHECK(abs(simple.fitted_coefficients[1] - Real(1) / 8) < Real(1e-6) / 8);

  auto lazy = verify_expansion(lazy_walk(), 1, grid, Target::L, 3);
  CHECK(lazy.pass);
  CHECK(lazy.prefactor_match == "inverse_sqrt");
  CHECK(abs(lazy.fitted_prefactor - 1 / sqrt(pi())) < Real(1e-8));
  CHECK(abs(lazy.fitted_coefficients[1] - Real(1) / 4) < Real(1e-6) / 4);

  auto skew = verify_expansion(skew_walk(), 0, grid, Target::L, 3);
  CHECK(skew.pass);
  CHECK(skew.prefactor_match == "inverse_sqrt");
  CHECK(abs(skew.fitted_prefactor - 1 / sqrt(4 * pi())) < Real(1e-9));
}

TEST_CASE("verify_expansion: sign flip between L and L tilde") {
  PrecisionScope scope(256);
  std::mt19937_64 gen(11);
  std::vector<Real> grid = {Real(400), Real(800), Real(1600), Real(3200)};
  for (int trial = 0; trial < 2; ++trial) {
    auto shape = random_unbiased(gen, 1 + trial, 2);
    auto plain = verify_expansion(shape, 2, grid, Target::L, 4);
    auto tilde = verify_expansion(shape, 2, grid, Target::LTilde, 4);
    CHECK(plain.pass);
    CHECK(tilde.pass);
    for (long l = 0; l <= 2; ++l) {
      Real sign = l % 2 == 0 ? 1 : -1;
      Real tol = 4 * (plain.coefficient_errors[l] + tilde.coefficient_errors[l]);
      CHECK(abs(tilde.fitted_coefficients[l] - sign * plain.fitted_coefficients[l]) <= tol);
      CHECK(abs(plain.fitted_coefficients[l] - plain.predicted_coefficients[l]) <= 4 * plain.coefficient_errors[l]);
    }
  }
}

TEST_CASE("verify_expansion: argument checks") {
  CHECK_THROWS_AS(verify_expansion(simple_walk(), 1, {Real(10), Real(20)}), Error);
  CHECK_THROWS_AS(verify_expansion(simple_walk(), 1, {Real(10), Real(30), Real(20)}), Error);
}
