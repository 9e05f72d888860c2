#pragma once

#include <initializer_list>
#include <optional>
#include <vector>

#include "walkspec/numeric.hpp"

namespace walkspec {

/// Dense univariate polynomial with exact rational coefficients; coeffs()[i]
/// multiplies x^i. The zero polynomial has no coefficients.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<Rational> coeffs);
  QPoly(std::initializer_list<Rational> coeffs);
  static QPoly monomial(const Rational& c, std::size_t degree);

  bool is_zero() const { return coeffs_.empty(); }
  /// Degree of the polynomial; -1 for zero.
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  Rational coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Rational(0); }
  const Rational& leading() const;

  Rational operator()(const Rational& x) const;
  Real operator()(const Real& x) const;

  QPoly derivative() const;
  QPoly monic() const;

  friend QPoly operator+(const QPoly& a, const QPoly& b);
  friend QPoly operator-(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const Rational& c, const QPoly& a);
  friend QPoly operator-(const QPoly& a);
  friend bool operator==(const QPoly& a, const QPoly& b) { return a.coeffs_ == b.coeffs_; }

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

struct DivMod {
  QPoly quotient;
  QPoly remainder;
};

DivMod divmod(const QPoly& a, const QPoly& b);
/// Monic greatest common divisor; gcd(0, 0) = 0.
QPoly gcd(const QPoly& a, const QPoly& b);
QPoly squarefree_part(const QPoly& p);
bool is_squarefree(const QPoly& p);

/// Sturm sequence p, p', -rem(p, p'), ...
std::vector<QPoly> sturm_sequence(const QPoly& p);
/// Number of distinct real roots in the half-open interval (lo, hi].
int count_real_roots(const std::vector<QPoly>& sturm, const Rational& lo, const Rational& hi);
/// Bound B with every complex root satisfying |z| < B.
Rational cauchy_bound(const QPoly& p);

struct RootInterval {
  Rational lo;
  Rational hi;
  bool exact = false;  ///< lo == hi is an exact rational root.
};

/// Disjoint isolating intervals, one per distinct real root in (lo, hi],
/// sorted increasingly. Each interval is (lo, hi] and contains exactly one
/// root.
std::vector<RootInterval> isolate_real_roots(const QPoly& p, const Rational& lo, const Rational& hi);
/// Bisects an isolating interval of a squarefree polynomial until its width is
/// below 2^-bits, or an exact rational root is met.
RootInterval refine_root(const QPoly& squarefree, RootInterval interval, unsigned bits);
/// Searches the refined interval for a small-denominator exact rational root.
std::optional<Rational> rational_root_in(const QPoly& p, const RootInterval& interval);

Rational resultant(const QPoly& a, const QPoly& b);
/// Unique polynomial of degree < n through n points with distinct abscissae.
QPoly interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys);

}  // namespace walkspec
