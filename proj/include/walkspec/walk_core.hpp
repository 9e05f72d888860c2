#pragma once

#include <map>
#include <optional>
#include <vector>

#include "walkspec/laurent.hpp"
#include "walkspec/numeric.hpp"
#include "walkspec/polynomial.hpp"

namespace walkspec {

/// Step distribution chi(t) = sum_k kappa_k t^k of a finitely supported walk
/// on the integers. Immutable; zero coefficients are never stored.
class WalkShape {
 public:
  /// Validates and normalizes a coefficient map.
  static WalkShape create(std::map<long, Rational> coeffs, bool require_unbiased = false);

  const std::map<long, Rational>& coeffs() const { return coeffs_; }
  Rational coeff(long k) const;
  long e() const { return e_; }
  long f() const { return f_; }
  long degree() const { return e_ + f_; }
  bool unbiased() const { return unbiased_; }
  Rational mean() const;
  Rational operator()(const Rational& t) const;
  Real operator()(const Real& t) const;
  Laurent<Rational> laurent() const;
  /// t^e * chi(t) as an ordinary polynomial.
  QPoly numerator() const;

  friend bool operator==(const WalkShape& a, const WalkShape& b) { return a.coeffs_ == b.coeffs_; }

 private:
  WalkShape() = default;
  std::map<long, Rational> coeffs_;
  long e_ = 0;
  long f_ = 0;
  bool unbiased_ = false;
};

/// A Laurent polynomial with real coefficients; the output type of the
/// inverse solvers, whose coefficients are irrational in general.
struct RealShape {
  std::map<long, Real> coeffs;

  Real coeff(long k) const;
  Real mass() const;
  Real mean() const;
  Real operator()(const Real& t) const;
};

RealShape to_real_shape(const WalkShape& shape);
/// Largest coefficientwise absolute difference over the union of supports.
Real max_abs_difference(const RealShape& a, const RealShape& b);
RealShape reflect(const RealShape& shape);

/// Raw moments J_2..J_m.
struct MomentVector {
  std::vector<Rational> values;
  const Rational& J(long n) const { return values.at(static_cast<std::size_t>(n - 2)); }
  long max_order() const { return static_cast<long>(values.size()) + 1; }
};

MomentVector moments(const WalkShape& shape, long m);
Integer support_gcd(const WalkShape& shape);

struct ScaleEquivalent {
  Real lambda;
  std::optional<Rational> exact_lambda;
  RealShape shape;
  std::optional<WalkShape> exact_shape;
};

/// Every lambda > 0, lambda != 1 with chi(lambda) = 1, paired with the
/// isospectral shape kappa_k lambda^k. Empty for unbiased shapes.
std::vector<ScaleEquivalent> scale_equivalents(const WalkShape& shape, unsigned precision_bits);

WalkShape reindex(const WalkShape& shape, long n);

enum class Equivalence { Identical, Reflected, No };
std::string_view to_string(Equivalence eq);
Equivalence equivalent(const WalkShape& a, const WalkShape& b);

}  // namespace walkspec
