#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "walkspec/numeric.hpp"
#include "walkspec/walk_core.hpp"

namespace walkspec {

/// Exact real number factor * prod base^exponent with prime bases (or
/// large atoms without small factors) and exponents in (0, 1). Closed under products and rational powers
/// of positive values; sums only when the radical parts agree.
struct Radical {
  Rational factor = 0;
  std::map<Rational, Rational> powers;

  Radical() = default;
  Radical(const Rational& q) : factor(q) {}
  static Radical power(const Rational& base, const Rational& exponent);

  bool is_rational() const { return powers.empty() || factor == 0; }
  Real value() const;
  std::string to_string() const;

  friend Radical operator*(const Radical& a, const Radical& b);
  friend bool operator==(const Radical& a, const Radical& b) {
    return a.factor == b.factor && (a.factor == 0 || a.powers == b.powers);
  }
  Radical operator-() const;
};

/// Rational power of a radical; non-integer powers need a positive value.
Radical pow(const Radical& r, const Rational& p);
std::optional<Radical> add(const Radical& a, const Radical& b);

enum class Direction { AtZero, AtInfinity };
std::string_view to_string(Direction d);

/// Truncated Puiseux series in a local variable t (t = u at zero,
/// t = 1/u at infinity): sum_i coeffs[i] t^{local_base + i/ramification},
/// with every term of t-exponent >= local_truncation unknown. An absent
/// truncation means the series is exact (finitely many terms).
struct PuiseuxSeries {
  Direction direction = Direction::AtZero;
  long ramification = 1;
  Rational local_base = 0;
  std::vector<Real> coeffs;
  std::optional<Rational> local_truncation;
  std::optional<Radical> exact_leading;

  /// Build from u-exponent/coefficient pairs; `u_truncation` is the first
  /// unknown u-exponent (nullopt for an exact series).
  static PuiseuxSeries from_terms(Direction d, const std::map<Rational, Real>& terms,
                                  std::optional<Rational> u_truncation);
  static PuiseuxSeries monomial(Direction d, const Rational& u_exponent, const Radical& coefficient,
                                std::optional<Rational> u_truncation = std::nullopt);

  bool is_zero() const { return coeffs.empty(); }
  int sign() const { return direction == Direction::AtZero ? 1 : -1; }
  Rational u_exponent(std::size_t i) const;
  Rational base_exponent() const { return sign() * local_base; }
  std::optional<Rational> truncation_exponent() const;
  /// Coefficient of u^q: zero off the lattice, throws if q is not known.
  Real coefficient(const Rational& u_q) const;
  bool known(const Rational& u_q) const;
  /// Value of the retained terms at u.
  Real evaluate(const Real& u) const;
  Real leading() const { return coeffs.empty() ? Real(0) : coeffs.front(); }
};

/// Keep only terms of local exponent below `local_truncation`.
PuiseuxSeries truncate_local(const PuiseuxSeries& F, const Rational& local_truncation);
/// Keep the first n coefficients (n >= 1).
PuiseuxSeries truncate_terms(const PuiseuxSeries& F, std::size_t n);

PuiseuxSeries operator+(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries operator-(const PuiseuxSeries& a);
PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries scale(const PuiseuxSeries& a, const Radical& c);

/// F^p for rational p. Non-integer p needs a positive leading coefficient;
/// an exact F must have a nonnegative integer p.
PuiseuxSeries series_pow(const PuiseuxSeries& F, const Rational& p);
/// m-th root of F for a nonzero integer m (m = -1 is the reciprocal).
PuiseuxSeries series_root(const PuiseuxSeries& F, long m);
/// Compositional inverse of a power series t + w_1 t^2 + ... (Lagrange).
PuiseuxSeries series_invert(const PuiseuxSeries& F);
/// G(F(t)): G's variable is F's value (G at zero needs F -> 0, G at
/// infinity needs F -> infinity), unless G is a Laurent polynomial.
PuiseuxSeries series_compose(const PuiseuxSeries& G, const PuiseuxSeries& F);

/// chi as an exact series at zero.
PuiseuxSeries shape_series(const WalkShape& shape);

struct AlphaBranches {
  PuiseuxSeries alpha_minus;  // -> 0, exponents in (1/e) Z
  PuiseuxSeries alpha_plus;   // -> infinity, exponents in (1/f) Z
};

/// Solutions of chi(alpha) = 1 + u near u = infinity, `order` coefficients each.
AlphaBranches alpha_branches(const WalkShape& shape, long order, unsigned precision_bits);

struct BranchPair {
  PuiseuxSeries gamma_plus;   // (1/f) u^{-1} + ...
  PuiseuxSeries gamma_minus;  // -(1/e) u^{-1} + ...
};

/// gamma = 1 / (alpha chi'(alpha)) on both branches.
BranchPair gamma_branches(const WalkShape& shape, long order, unsigned precision_bits);

/// gamma_minus of a Laurent polynomial with real coefficients, given as
/// chi - 1; its lowest term must have a negative power and a positive
/// coefficient. Used to model normalized half shapes.
PuiseuxSeries gamma_minus_of(const std::map<long, Real>& chi_minus_one, long order, unsigned precision_bits);

struct GammaDifference {
  PuiseuxSeries diff;
  BranchPair branches;
  /// Known u-exponents where both branches have lattice points, so the
  /// difference does not separate them.
  std::vector<Rational> collisions;
};

GammaDifference gamma_diff_at_infinity(const WalkShape& shape, long order, unsigned precision_bits);

/// gamma_plus - gamma_minus at u = 0 in powers of u^{1/2}, from inverting
/// chi(e^x) - 1 on both sign branches; `order` coefficients.
PuiseuxSeries gamma_diff_at_zero(const WalkShape& shape, long order, unsigned precision_bits);

/// Term-by-term Laplace transform of gamma_diff_at_zero against the
/// alternating expansion: c_{l-1/2} Gamma(l+1/2) / (2 pi) = P (-1)^l A_l.
struct WatsonCheck {
  std::vector<Real> transformed;  // l = 0..m
  std::vector<Real> predicted;
  Real max_gap;
  /// Largest |c_l| over the integer exponents 0..m, which must vanish.
  Real max_integer_coefficient;
  /// Both quantities below 2^{-precision/2}.
  bool pass = false;
};

WatsonCheck watson_check(const WalkShape& shape, long m, unsigned precision_bits);

}  // namespace walkspec
