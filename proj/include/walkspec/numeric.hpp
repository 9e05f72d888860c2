#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

namespace walkspec {

using Integer = mpz_class;
using Rational = mpq_class;
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  NegativeCoefficient,
  MassNotOne,
  NoNegativeSupport,
  NoPositiveSupport,
  Biased,
  PrecisionExhausted,
  InsufficientData,
  OrderTooLarge,
  TailNotConverged,
  QuadratureFailure,
  NonPositiveLeading,
  NotType11,
  ExponentClash,
  Inconsistent,
  NotE1,
  MissingOrders,
  NoSolution,
  AmbiguousLattice,
  DegreesEqual,
  SearchSpaceTooLarge,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

constexpr unsigned kDefaultPrecision = 256;
constexpr unsigned kMinPrecision = 64;

/// Sets the working precision (in bits) of newly created Real values on this
/// thread, restoring the previous setting on destruction.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits10_;
};

/// Working precision of newly created Real values, in bits.
unsigned working_precision();

/// x rounded to the working precision. Arithmetic results inherit the
/// precision of their left operand, so inputs are re-rounded before use.
Real to_working(const Real& x);
Real to_real(const Rational& q);
Real to_real(const Integer& z);
/// The exact binary value of x (x must be finite).
Rational to_rational(const Real& x);

/// The canonical fraction a/b (b != 0).
Rational ratio(long a, long b);

Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& q);
/// Scientific notation with `digits` significant decimal digits.
std::string format_real(const Real& x, int digits);
int digits_for_bits(unsigned bits);

/// The rational with the smallest denominator in the closed interval
/// [lo, hi] (Stern-Brocot descent). Requires lo <= hi.
Rational simplest_rational_between(const Rational& lo, const Rational& hi);

Rational abs(const Rational& q);
Integer lcm(const Integer& a, const Integer& b);
/// q^n for a nonnegative integer n.
Rational pow(const Rational& q, unsigned long n);
Real pow_int(const Real& x, long n);

/// Portable splitmix64 step; used to derive independent generator seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace walkspec
