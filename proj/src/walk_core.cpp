#include "walkspec/walk_core.hpp"

#include <algorithm>

namespace walkspec {

WalkShape WalkShape::create(std::map<long, Rational> coeffs, bool require_unbiased) {
  WalkShape s;
  Rational mass = 0;
  Rational first = 0;
  for (auto& [k, v] : coeffs) {
    v.canonicalize();
    if (v < 0) {
      throw Error(ErrorCode::NegativeCoefficient,
                  "coefficient of t^" + std::to_string(k) + " is " + format_rational(v));
    }
    if (v == 0) continue;
    s.coeffs_.emplace(k, v);
    mass += v;
    first += k * v;
  }
  if (s.coeffs_.empty()) throw Error(ErrorCode::InvalidArgument, "shape has empty support");
  if (mass != 1) throw Error(ErrorCode::MassNotOne, "coefficients sum to " + format_rational(mass));
  long lo = s.coeffs_.begin()->first;
  long hi = s.coeffs_.rbegin()->first;
  if (lo >= 0) throw Error(ErrorCode::NoNegativeSupport, "support has no negative exponent");
  if (hi <= 0) throw Error(ErrorCode::NoPositiveSupport, "support has no positive exponent");
  s.e_ = -lo;
  s.f_ = hi;
  s.unbiased_ = (first == 0);
  if (require_unbiased && !s.unbiased_) {
    throw Error(ErrorCode::Biased, "mean is " + format_rational(first));
  }
  return s;
}

Rational WalkShape::coeff(long k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

Rational WalkShape::mean() const {
  Rational m = 0;
  for (const auto& [k, v] : coeffs_) m += k * v;
  return m;
}

Rational WalkShape::operator()(const Rational& t) const {
  Rational acc = 0;
  for (const auto& [k, v] : coeffs_) {
    Rational p = pow(t, static_cast<unsigned long>(std::labs(k)));
    acc += k >= 0 ? Rational(v * p) : Rational(v / p);
  }
  return acc;
}

Real WalkShape::operator()(const Real& t) const {
  Real acc = 0;
  for (const auto& [k, v] : coeffs_) acc += to_real(v) * pow_int(t, k);
  return acc;
}

Laurent<Rational> WalkShape::laurent() const {
  Laurent<Rational> l;
  l.low = -e_;
  l.c.assign(static_cast<std::size_t>(e_ + f_ + 1), Rational(0));
  for (const auto& [k, v] : coeffs_) l.c[static_cast<std::size_t>(k + e_)] = v;
  return l;
}

QPoly WalkShape::numerator() const {
  std::vector<Rational> c(static_cast<std::size_t>(e_ + f_ + 1));
  for (const auto& [k, v] : coeffs_) c[static_cast<std::size_t>(k + e_)] = v;
  return QPoly(std::move(c));
}

Real RealShape::coeff(long k) const {
  auto it = coeffs.find(k);
  return it == coeffs.end() ? Real(0) : it->second;
}

Real RealShape::mass() const {
  Real m = 0;
  for (const auto& [k, v] : coeffs) m += v;
  return m;
}

Real RealShape::mean() const {
  Real m = 0;
  for (const auto& [k, v] : coeffs) m += k * v;
  return m;
}

Real RealShape::operator()(const Real& t) const {
  Real acc = 0;
  for (const auto& [k, v] : coeffs) acc += v * pow_int(t, k);
  return acc;
}

RealShape to_real_shape(const WalkShape& shape) {
  RealShape r;
  for (const auto& [k, v] : shape.coeffs()) r.coeffs.emplace(k, to_real(v));
  return r;
}

Real max_abs_difference(const RealShape& a, const RealShape& b) {
  Real worst = 0;
  for (const auto& [k, v] : a.coeffs) worst = std::max(worst, Real(boost::multiprecision::abs(v - b.coeff(k))));
  for (const auto& [k, v] : b.coeffs) worst = std::max(worst, Real(boost::multiprecision::abs(v - a.coeff(k))));
  return worst;
}

RealShape reflect(const RealShape& shape) {
  RealShape r;
  for (const auto& [k, v] : shape.coeffs) r.coeffs.emplace(-k, v);
  return r;
}

MomentVector moments(const WalkShape& shape, long m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "moment order must be at least 2");
  MomentVector out;
  for (long n = 2; n <= m; ++n) {
    Rational j = 0;
    for (const auto& [k, v] : shape.coeffs()) {
      Integer power;
      mpz_pow_ui(power.get_mpz_t(), Integer(std::labs(k)).get_mpz_t(), static_cast<unsigned long>(n));
      if (k < 0 && n % 2 == 1) power = -power;
      j += v * power;
    }
    out.values.push_back(j);
  }
  return out;
}

Integer support_gcd(const WalkShape& shape) {
  Integer g = 0;
  for (const auto& [k, v] : shape.coeffs()) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), Integer(std::labs(k)).get_mpz_t());
  }
  return g;
}

std::vector<ScaleEquivalent> scale_equivalents(const WalkShape& shape, unsigned precision_bits) {
  PrecisionScope scope(precision_bits);
  std::vector<ScaleEquivalent> out;
  if (shape.unbiased()) return out;
  // t^e (chi(t) - 1) vanishes at t = 1; the remaining factor carries the
  // other positive roots.
  QPoly p = shape.numerator() - QPoly::monomial(Rational(1), static_cast<std::size_t>(shape.e()));
  QPoly q = divmod(p, QPoly{Rational(-1), Rational(1)}).quotient;
  QPoly sf = squarefree_part(q);
  for (auto interval : isolate_real_roots(sf, Rational(0), cauchy_bound(sf))) {
    interval = refine_root(sf, interval, precision_bits + 8);
    if (interval.lo <= 0 && !interval.exact) {
      throw Error(ErrorCode::PrecisionExhausted, "root isolation did not separate a root from 0");
    }
    ScaleEquivalent eq;
    eq.exact_lambda = rational_root_in(sf, interval);
    if (eq.exact_lambda) {
      const Rational& lam = *eq.exact_lambda;
      eq.lambda = to_real(lam);
      std::map<long, Rational> scaled;
      for (const auto& [k, v] : shape.coeffs()) {
        Rational pk = pow(lam, static_cast<unsigned long>(std::labs(k)));
        scaled.emplace(k, k >= 0 ? Rational(v * pk) : Rational(v / pk));
      }
      eq.exact_shape = WalkShape::create(std::move(scaled));
      eq.shape = to_real_shape(*eq.exact_shape);
    } else {
      eq.lambda = (to_real(interval.lo) + to_real(interval.hi)) / 2;
      for (const auto& [k, v] : shape.coeffs()) eq.shape.coeffs.emplace(k, to_real(v) * pow_int(eq.lambda, k));
    }
    out.push_back(std::move(eq));
  }
  return out;
}

WalkShape reindex(const WalkShape& shape, long n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "reindex factor must be nonzero");
  std::map<long, Rational> c;
  for (const auto& [k, v] : shape.coeffs()) c.emplace(k * n, v);
  return WalkShape::create(std::move(c));
}

std::string_view to_string(Equivalence eq) {
  switch (eq) {
    case Equivalence::Identical: return "Identical";
    case Equivalence::Reflected: return "Reflected";
    case Equivalence::No: return "No";
  }
  return "No";
}

Equivalence equivalent(const WalkShape& a, const WalkShape& b) {
  if (a == b) return Equivalence::Identical;
  if (a == reindex(b, -1)) return Equivalence::Reflected;
  return Equivalence::No;
}

}  // namespace walkspec
