#include "walkspec/numeric.hpp"

#include <cmath>
#include <ios>

namespace walkspec {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::MassNotOne: return "MassNotOne";
    case ErrorCode::NoNegativeSupport: return "NoNegativeSupport";
    case ErrorCode::NoPositiveSupport: return "NoPositiveSupport";
    case ErrorCode::Biased: return "Biased";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::TailNotConverged: return "TailNotConverged";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NonPositiveLeading: return "NonPositiveLeading";
    case ErrorCode::NotType11: return "NotType11";
    case ErrorCode::ExponentClash: return "ExponentClash";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::NotE1: return "NotE1";
    case ErrorCode::MissingOrders: return "MissingOrders";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::AmbiguousLattice: return "AmbiguousLattice";
    case ErrorCode::DegreesEqual: return "DegreesEqual";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

int digits_for_bits(unsigned bits) {
  return static_cast<int>(std::ceil(bits * 0.30102999566398120)) + 1;
}

PrecisionScope::PrecisionScope(unsigned bits) : saved_digits10_(Real::default_precision()) {
  if (bits < kMinPrecision) {
    throw Error(ErrorCode::InvalidArgument, "precision must be at least 64 bits");
  }
  Real::default_precision(digits_for_bits(bits));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_digits10_); }

unsigned working_precision() {
  Real probe;
  return static_cast<unsigned>(mpfr_get_prec(probe.backend().data()));
}

Real to_working(const Real& x) {
  Real r;
  mpfr_set(r.backend().data(), x.backend().data(), MPFR_RNDN);
  return r;
}

Real to_real(const Rational& q) {
  Real r;
  mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

Real to_real(const Integer& z) {
  Real r;
  mpfr_set_z(r.backend().data(), z.get_mpz_t(), MPFR_RNDN);
  return r;
}

Rational to_rational(const Real& x) {
  if (!mpfr_number_p(x.backend().data())) {
    throw Error(ErrorCode::InvalidArgument, "cannot convert a non-finite value to a rational");
  }
  if (mpfr_zero_p(x.backend().data())) return Rational(0);
  Integer mantissa;
  mpfr_exp_t exponent = mpfr_get_z_2exp(mantissa.get_mpz_t(), x.backend().data());
  Rational q(mantissa);
  if (exponent >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exponent));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-exponent));
  }
  q.canonicalize();
  return q;
}

Rational ratio(long a, long b) {
  if (b == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  Rational q(a, b < 0 ? -b : b);
  if (b < 0) q = -q;
  q.canonicalize();
  return q;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto slash = s.find('/');
  auto valid_integer = [](const std::string& part) {
    if (part.empty()) return false;
    std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i) {
      if (part[i] < '0' || part[i] > '9') return false;
    }
    return true;
  };
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_integer(num) || !valid_integer(den)) {
    throw Error(ErrorCode::ParseError, "not a rational literal: '" + s + "'");
  }
  if (num[0] == '+') num.erase(0, 1);
  if (den[0] == '+') den.erase(0, 1);
  Integer n(num, 10);
  Integer d(den, 10);
  if (d == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + s + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string format_real(const Real& x, int digits) {
  return x.str(digits, std::ios_base::scientific);
}

namespace {

Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational simplest_positive(const Rational& lo, const Rational& hi) {
  Integer fl = floor_of(lo);
  if (Rational(fl) == lo) return lo;
  if (Rational(fl + 1) <= hi) return Rational(fl + 1);
  // lo and hi lie strictly inside (fl, fl+1).
  Rational inner = simplest_positive(1 / (hi - fl), 1 / (lo - fl));
  return Rational(fl) + 1 / inner;
}

}  // namespace

Rational simplest_rational_between(const Rational& lo, const Rational& hi) {
  if (lo > hi) throw Error(ErrorCode::InvalidArgument, "empty interval");
  if (lo <= 0 && hi >= 0) return Rational(0);
  if (lo > 0) return simplest_positive(lo, hi);
  return -simplest_positive(-hi, -lo);
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Rational pow(const Rational& q, unsigned long n) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), q.get_num_mpz_t(), n);
  mpz_pow_ui(r.get_den_mpz_t(), q.get_den_mpz_t(), n);
  r.canonicalize();
  return r;
}

Real pow_int(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.backend().data(), x.backend().data(), n, MPFR_RNDN);
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace walkspec
