#pragma once

#include <map>
#include <string>
#include <vector>

#include "walkspec/numeric.hpp"
#include "walkspec/walk_core.hpp"

namespace walkspec {

/// Polynomial in the normalized moments rho_n = J_n J_2^{-n/2}, n >= 3.
struct NormalizedMomentPolynomial {
  /// Key: degrees (d_3, d_4, ...) with trailing zeros removed.
  std::map<std::vector<unsigned>, Rational> terms;

  /// sum (n - 2) d_n of a monomial.
  static long weight(const std::vector<unsigned>& degrees);
  /// Largest n with rho_n present, or 0 for a constant.
  long max_index() const;
  std::string to_string() const;
  /// Exact value at the given moments. Every monomial must have even weight.
  Rational evaluate(const MomentVector& J) const;
};

/// A_0..A_m of the large-s expansion of L(s) as polynomials in rho_n.
std::vector<NormalizedMomentPolynomial> symbolic_A(long m);

constexpr long kMaxSymbolicOrder = 12;

/// A_0..A_m evaluated exactly at an unbiased shape.
std::vector<Rational> evaluate_A(const WalkShape& shape, long m);

enum class SignMode { Plain, Alternating };
std::string_view to_string(SignMode mode);

/// prefactor * sum_l (+-1)^l A_l s^{-l-1/2}
struct AsymptoticExpansion {
  Real prefactor;
  std::vector<Real> coefficients;  // A_0..A_m, unsigned
  SignMode sign_mode = SignMode::Plain;

  Real partial_sum(const Real& s, long order) const;
};

/// (2 pi J_2)^{-1/2}, the prefactor confirmed by the numeric fits.
Real prefactor(const WalkShape& shape);
/// sqrt(J_2 / 2 pi), the competing candidate; equal to the above iff J_2 = 1.
Real alternative_prefactor(const WalkShape& shape);

AsymptoticExpansion expansion(const WalkShape& shape, long m, SignMode mode);

/// Smallest N for which the Poisson tail e^{-s} sum_{n>N} s^n/n! is below
/// 2^{-bits}; bits = 0 means the working precision.
long terms_for_L(const Real& s, unsigned bits = 0);

struct LValue {
  Real value;
  Real error_bound;  // truncation + pruning + rounding
};

/// L(s) = e^{-s} sum_{n<=N} s^n I_n / n!. Exact rational summation for
/// N <= kExactTermLimit. Above it N only has to pass the tail test, and the
/// whole series is evaluated as the probability that the Poissonized walk
/// (independent Poisson(s kappa_k) counts of each step k) ends at 0.
LValue evaluate_L_bounded(const WalkShape& shape, const Real& s, long N_terms);
Real evaluate_L(const WalkShape& shape, const Real& s, long N_terms);

constexpr long kExactTermLimit = 512;

/// delta with chi(e^x) >= 1 + delta x^2, from weighted AM-GM applied to
/// the second derivative.
Real amgm_delta(const WalkShape& shape);

/// (2 pi)^{-1} int e^{-s (chi(e^x) - 1)} dx by tanh-sinh quadrature.
Real evaluate_L_tilde(const WalkShape& shape, const Real& s, unsigned precision_bits);

enum class Target { L, LTilde };
std::string_view to_string(Target t);

struct ExpansionReport {
  Target target = Target::L;
  long m = 0;
  unsigned precision = 0;
  std::vector<Real> s_grid;
  std::vector<Real> values;
  /// (value - partial expansion through A_m) * s^{m+1/2}
  std::vector<Real> residuals;
  bool pass = false;

  Real fitted_prefactor;
  Real prefactor_error;
  Real candidate_inverse_sqrt;  // (2 pi J_2)^{-1/2}
  Real candidate_sqrt;          // sqrt(J_2 / 2 pi)
  std::string prefactor_match;  // "inverse_sqrt", "sqrt", "both" or "neither"

  /// Fitted coefficient of s^{-l-1/2} divided by the prefactor, l = 0..m,
  /// with an error estimate from dropping the smallest grid point.
  std::vector<Real> fitted_coefficients;
  std::vector<Real> coefficient_errors;
  /// (+-1)^l A_l from symbolic_A.
  std::vector<Real> predicted_coefficients;
};

ExpansionReport verify_expansion(const WalkShape& shape, long m, const std::vector<Real>& s_grid,
                                 Target target = Target::L, unsigned threads = 1);

/// Constant term of the polynomial in x interpolating (xs, ys).
Real interpolate_at_zero(const std::vector<Real>& xs, const std::vector<Real>& ys);

}  // namespace walkspec
