#include "walkspec/puiseux.hpp"

#include "walkspec/asymptotics.hpp"

#include <numeric>

#include <boost/math/special_functions/gamma.hpp>
#include <sstream>

namespace walkspec {

namespace {

Integer floor_of(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Rational int_pow(const Rational& q, const Integer& n) {
  if (n >= 0) return pow(q, n.get_ui());
  if (q == 0) throw Error(ErrorCode::InvalidArgument, "zero to a negative power");
  return 1 / pow(q, Integer(-n).get_ui());
}

long lcm_long(long a, long b) { return std::lcm(a, b); }

long den_long(const Rational& q) { return static_cast<long>(q.get_den().get_si()); }

// Prime factorization by trial division; a cofactor without small factors
// is kept as a single atom.
std::vector<std::pair<Integer, long>> factor_integer(Integer n) {
  std::vector<std::pair<Integer, long>> out;
  for (unsigned long p = 2; p < 100000 && Integer(p) * p <= n; p += p == 2 ? 1 : 2) {
    long k = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      n /= p;
      ++k;
    }
    if (k > 0) out.emplace_back(Integer(p), k);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

}  // namespace

Radical Radical::power(const Rational& base, const Rational& exponent) {
  if (base <= 0) throw Error(ErrorCode::NonPositiveLeading, "radical base must be positive");
  Radical out(1);
  auto absorb = [&](const Integer& n, long sign) {
    for (const auto& [p, k] : factor_integer(n)) {
      Rational e = exponent * (k * sign);
      Integer whole = floor_of(e);
      out.factor *= int_pow(Rational(p), whole);
      Rational frac = e - Rational(whole);
      if (frac != 0) out.powers[Rational(p)] = frac;
    }
  };
  absorb(base.get_num(), 1);
  absorb(base.get_den(), -1);
  return out;
}

Radical operator*(const Radical& a, const Radical& b) {
  Radical out;
  out.factor = a.factor * b.factor;
  if (out.factor == 0) return out;
  std::map<Rational, Rational> merged = a.powers;
  for (const auto& [base, e] : b.powers) merged[base] += e;
  for (const auto& [base, e] : merged) {
    Radical part = Radical::power(base, e);
    out.factor *= part.factor;
    for (const auto& [b2, e2] : part.powers) out.powers[b2] = e2;
  }
  return out;
}

Radical Radical::operator-() const {
  Radical out = *this;
  out.factor = -out.factor;
  return out;
}

Radical pow(const Radical& r, const Rational& p) {
  if (is_integer(p)) {
    Radical out;
    out.factor = int_pow(r.factor, p.get_num());
    for (const auto& [base, e] : r.powers) out = out * Radical::power(base, e * p);
    return out;
  }
  if (r.factor <= 0) throw Error(ErrorCode::NonPositiveLeading, "fractional power of a non-positive value");
  Radical out = Radical::power(r.factor, p);
  for (const auto& [base, e] : r.powers) out = out * Radical::power(base, e * p);
  return out;
}

std::optional<Radical> add(const Radical& a, const Radical& b) {
  if (a.factor == 0) return b;
  if (b.factor == 0) return a;
  if (a.powers != b.powers) return std::nullopt;
  Radical out = a;
  out.factor += b.factor;
  if (out.factor == 0) out.powers.clear();
  return out;
}

Real Radical::value() const {
  Real out = to_real(factor);
  for (const auto& [base, e] : powers) out *= exp(to_real(e) * log(to_real(base)));
  return out;
}

std::string Radical::to_string() const {
  std::string out = format_rational(factor);
  for (const auto& [base, e] : powers) out += "*(" + format_rational(base) + ")^(" + format_rational(e) + ")";
  return out;
}

std::string_view to_string(Direction d) { return d == Direction::AtZero ? "zero" : "infinity"; }

namespace {

std::size_t count_below(const Rational& base, long m, const Rational& trunc) {
  Rational span = (trunc - base) * m;
  if (span <= 0) return 0;
  Integer n = floor_of(span);
  if (Rational(n) == span) return n.get_ui();
  return n.get_ui() + 1;
}

std::optional<Rational> min_trunc(const std::optional<Rational>& a, const std::optional<Rational>& b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

// Same series on the finer lattice with ramification m (a multiple).
std::vector<Real> spread(const std::vector<Real>& c, long from, long to) {
  if (from == to) return c;
  long step = to / from;
  std::vector<Real> out(c.empty() ? 0 : (c.size() - 1) * static_cast<std::size_t>(step) + 1, Real(0));
  for (std::size_t i = 0; i < c.size(); ++i) out[i * static_cast<std::size_t>(step)] = c[i];
  return out;
}

// Refine the lattice so the base is a multiple of 1/m, drop exact leading
// zeros and trim coefficients at or beyond the truncation.
PuiseuxSeries normalize(PuiseuxSeries F) {
  if (F.local_truncation) {
    std::size_t n = count_below(F.local_base, F.ramification, *F.local_truncation);
    if (F.coeffs.size() > n) F.coeffs.resize(n);
  }
  std::size_t lead = 0;
  while (lead < F.coeffs.size() && F.coeffs[lead] == 0) ++lead;
  if (lead > 0) {
    F.coeffs.erase(F.coeffs.begin(), F.coeffs.begin() + static_cast<std::ptrdiff_t>(lead));
    F.local_base += ratio(static_cast<long>(lead), F.ramification);
    F.exact_leading.reset();
  }
  while (!F.coeffs.empty() && F.coeffs.back() == 0) F.coeffs.pop_back();
  if (F.coeffs.empty()) {
    F.local_base = F.local_truncation ? *F.local_truncation : Rational(0);
    F.ramification = 1;
    F.exact_leading = Radical(0);
    return F;
  }
  long m = lcm_long(F.ramification, den_long(F.local_base));
  if (m != F.ramification) {
    F.coeffs = spread(F.coeffs, F.ramification, m);
    F.ramification = m;
  }
  return F;
}

// Coefficients of (1 + v_1 x + v_2 x^2 + ...)^p through x^{n-1}.
std::vector<Real> unit_power(const std::vector<Real>& v, const Real& p, std::size_t n) {
  std::vector<Real> w(n, Real(0));
  if (n == 0) return w;
  w[0] = 1;
  for (std::size_t k = 1; k < n; ++k) {
    Real acc = 0;
    for (std::size_t j = 1; j <= k && j < v.size(); ++j) {
      if (v[j] == 0) continue;
      acc += ((p + 1) * Real(static_cast<long>(j)) - Real(static_cast<long>(k))) * v[j] * w[k - j];
    }
    w[k] = acc / static_cast<long>(k);
  }
  return w;
}

bool is_monomial(const PuiseuxSeries& F) { return !F.local_truncation && F.coeffs.size() == 1; }

}  // namespace

PuiseuxSeries PuiseuxSeries::from_terms(Direction d, const std::map<Rational, Real>& terms,
                                        std::optional<Rational> u_truncation) {
  PuiseuxSeries F;
  F.direction = d;
  int sg = d == Direction::AtZero ? 1 : -1;
  if (u_truncation) F.local_truncation = sg * *u_truncation;
  std::map<Rational, Real> local;
  for (const auto& [q, c] : terms) {
    Rational e = sg * q;
    if (F.local_truncation && e >= *F.local_truncation) continue;
    if (c != 0) local[e] = c;
  }
  if (local.empty()) return normalize(F);
  long m = 1;
  Rational base = local.begin()->first;
  for (const auto& [e, c] : local) m = lcm_long(m, den_long(e - base));
  F.local_base = base;
  F.ramification = m;
  Rational last = local.rbegin()->first;
  std::size_t n = Integer((last - base) * m).get_ui() + 1;
  F.coeffs.assign(n, Real(0));
  for (const auto& [e, c] : local) F.coeffs[Integer((e - base) * m).get_ui()] = c;
  return normalize(F);
}

PuiseuxSeries PuiseuxSeries::monomial(Direction d, const Rational& u_exponent, const Radical& coefficient,
                                      std::optional<Rational> u_truncation) {
  PuiseuxSeries F = from_terms(d, {{u_exponent, coefficient.value()}}, u_truncation);
  if (!F.is_zero()) F.exact_leading = coefficient;
  return F;
}

Rational PuiseuxSeries::u_exponent(std::size_t i) const {
  Rational e = local_base + ratio(static_cast<long>(i), ramification);
  return sign() * e;
}

std::optional<Rational> PuiseuxSeries::truncation_exponent() const {
  if (!local_truncation) return std::nullopt;
  return sign() * *local_truncation;
}

bool PuiseuxSeries::known(const Rational& u_q) const {
  return !local_truncation || sign() * u_q < *local_truncation;
}

Real PuiseuxSeries::coefficient(const Rational& u_q) const {
  if (!known(u_q)) throw Error(ErrorCode::InvalidArgument, "coefficient beyond the truncation order");
  Rational e = sign() * u_q;
  if (coeffs.empty() || e < local_base) return Real(0);
  Rational idx = (e - local_base) * ramification;
  if (!is_integer(idx)) return Real(0);
  std::size_t i = Integer(idx).get_ui();
  return i < coeffs.size() ? coeffs[i] : Real(0);
}

Real PuiseuxSeries::evaluate(const Real& u) const {
  if (u <= 0) throw Error(ErrorCode::InvalidArgument, "evaluation needs u > 0");
  Real lu = log(to_working(u));
  Real total = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == 0) continue;
    total += coeffs[i] * exp(to_real(u_exponent(i)) * lu);
  }
  return total;
}

PuiseuxSeries truncate_local(const PuiseuxSeries& F, const Rational& local_truncation) {
  PuiseuxSeries out = F;
  out.local_truncation = min_trunc(F.local_truncation, local_truncation);
  if (out.is_zero()) {
    out.local_base = *out.local_truncation;
    return out;
  }
  if (*out.local_truncation <= out.local_base) {
    out.coeffs.clear();
    out.exact_leading = Radical(0);
    out.local_base = *out.local_truncation;
    out.ramification = 1;
    return out;
  }
  return normalize(out);
}

PuiseuxSeries truncate_terms(const PuiseuxSeries& F, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "keep at least one term");
  if (F.is_zero()) return F;
  Rational t = F.local_base + ratio(static_cast<long>(n), F.ramification);
  return truncate_local(F, t);
}

namespace {

void require_same_direction(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  if (a.direction != b.direction) throw Error(ErrorCode::InvalidArgument, "series expanded at different points");
}

}  // namespace

PuiseuxSeries operator+(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  require_same_direction(a, b);
  if (a.is_zero() && !a.local_truncation) return b;
  if (b.is_zero() && !b.local_truncation) return a;
  PuiseuxSeries out;
  out.direction = a.direction;
  out.local_truncation = min_trunc(a.local_truncation, b.local_truncation);
  if (a.is_zero() || b.is_zero()) {
    const PuiseuxSeries& other = a.is_zero() ? b : a;
    out.local_base = other.local_base;
    out.ramification = other.ramification;
    out.coeffs = other.coeffs;
    out.exact_leading = other.exact_leading;
    return truncate_local(out, *out.local_truncation);
  }
  Rational base = std::min(a.local_base, b.local_base);
  long m = lcm_long(lcm_long(a.ramification, b.ramification),
                    lcm_long(den_long(a.local_base - base), den_long(b.local_base - base)));
  auto place = [&](const PuiseuxSeries& s, std::vector<Real>& acc) {
    std::vector<Real> c = spread(s.coeffs, s.ramification, m);
    std::size_t offset = Integer((s.local_base - base) * m).get_ui();
    if (acc.size() < offset + c.size()) acc.resize(offset + c.size(), Real(0));
    for (std::size_t i = 0; i < c.size(); ++i) acc[offset + i] += c[i];
  };
  place(a, out.coeffs);
  place(b, out.coeffs);
  out.local_base = base;
  out.ramification = m;
  if (a.local_base < b.local_base) {
    out.exact_leading = a.exact_leading;
  } else if (b.local_base < a.local_base) {
    out.exact_leading = b.exact_leading;
  } else if (a.exact_leading && b.exact_leading) {
    out.exact_leading = add(*a.exact_leading, *b.exact_leading);
    if (out.exact_leading && out.exact_leading->factor == 0) out.coeffs[0] = 0;
  }
  return normalize(out);
}

PuiseuxSeries operator-(const PuiseuxSeries& a) {
  PuiseuxSeries out = a;
  for (auto& c : out.coeffs) c = -c;
  if (out.exact_leading) out.exact_leading = -*out.exact_leading;
  return out;
}

PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b) { return a + (-b); }

PuiseuxSeries scale(const PuiseuxSeries& a, const Radical& c) {
  PuiseuxSeries out = a;
  Real v = c.value();
  for (auto& x : out.coeffs) x *= v;
  if (out.exact_leading) out.exact_leading = *out.exact_leading * c;
  return normalize(out);
}

PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  require_same_direction(a, b);
  PuiseuxSeries out;
  out.direction = a.direction;
  std::optional<Rational> ta, tb;
  if (a.local_truncation) ta = *a.local_truncation + b.local_base;
  if (b.local_truncation) tb = *b.local_truncation + a.local_base;
  out.local_truncation = min_trunc(ta, tb);
  if (a.is_zero() || b.is_zero()) return normalize(out);
  long m = lcm_long(a.ramification, b.ramification);
  std::vector<Real> ca = spread(a.coeffs, a.ramification, m);
  std::vector<Real> cb = spread(b.coeffs, b.ramification, m);
  out.local_base = a.local_base + b.local_base;
  out.ramification = m;
  std::size_t n = ca.size() + cb.size() - 1;
  if (out.local_truncation) n = std::min(n, count_below(out.local_base, m, *out.local_truncation));
  out.coeffs.assign(n, Real(0));
  for (std::size_t i = 0; i < ca.size() && i < n; ++i) {
    if (ca[i] == 0) continue;
    for (std::size_t j = 0; j < cb.size() && i + j < n; ++j) {
      if (cb[j] == 0) continue;
      mpfr_ptr target = out.coeffs[i + j].backend().data();
      mpfr_fma(target, ca[i].backend().data(), cb[j].backend().data(), target, MPFR_RNDN);
    }
  }
  if (a.exact_leading && b.exact_leading) out.exact_leading = *a.exact_leading * *b.exact_leading;
  return normalize(out);
}

PuiseuxSeries series_pow(const PuiseuxSeries& F, const Rational& p) {
  if (F.is_zero()) throw Error(ErrorCode::InvalidArgument, "power of the zero series");
  bool integral = is_integer(p);
  if (!integral) {
    bool positive = F.exact_leading ? F.exact_leading->factor > 0 : F.leading() > 0;
    if (!positive) throw Error(ErrorCode::NonPositiveLeading, "fractional power needs a positive leading coefficient");
  }
  if (is_monomial(F)) {
    Radical c = F.exact_leading ? *F.exact_leading : Radical(to_rational(F.leading()));
    return PuiseuxSeries::monomial(F.direction, F.base_exponent() * p, pow(c, p));
  }
  if (!F.local_truncation) {
    if (!integral || p < 0) throw Error(ErrorCode::InvalidArgument, "truncate an exact series before this power");
    PuiseuxSeries out = PuiseuxSeries::monomial(F.direction, 0, Radical(1));
    PuiseuxSeries base = F;
    for (unsigned long k = p.get_num().get_ui(); k > 0; k >>= 1) {
      if (k & 1) out = out * base;
      if (k > 1) base = base * base;
    }
    return out;
  }
  const Real c0 = F.coeffs.front();
  std::vector<Real> v(F.coeffs.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = F.coeffs[i] / c0;
  std::vector<Real> w = unit_power(v, to_real(p), count_below(F.local_base, F.ramification, *F.local_truncation));
  std::optional<Radical> lead;
  if (F.exact_leading) lead = pow(*F.exact_leading, p);
  Real c0p = lead ? lead->value()
                  : integral ? pow_int(c0, p.get_num().get_si()) : Real(exp(to_real(p) * log(c0)));
  for (auto& x : w) x *= c0p;
  PuiseuxSeries out;
  out.direction = F.direction;
  out.ramification = F.ramification;
  out.local_base = F.local_base * p;
  out.local_truncation = out.local_base + (*F.local_truncation - F.local_base);
  out.coeffs = std::move(w);
  out.exact_leading = lead;
  return normalize(out);
}

PuiseuxSeries series_root(const PuiseuxSeries& F, long m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "root index must be nonzero");
  Rational p(1, std::labs(m));
  return series_pow(F, m < 0 ? Rational(-p) : p);
}

PuiseuxSeries series_invert(const PuiseuxSeries& F) {
  if (F.is_zero() || F.local_base != 1 || F.ramification != 1)
    throw Error(ErrorCode::NotType11, "inversion needs a power series t + ...");
  bool unit = F.exact_leading ? (*F.exact_leading == Radical(1))
                              : abs(F.leading() - 1) <= pow_int(Real(2), 16 - static_cast<long>(working_precision()));
  if (!unit) throw Error(ErrorCode::NotType11, "inversion needs leading coefficient 1");
  if (!F.local_truncation) {
    if (F.coeffs.size() == 1) return F;
    throw Error(ErrorCode::InvalidArgument, "truncate an exact series before inverting");
  }
  std::size_t n = count_below(F.local_base, 1, *F.local_truncation);
  // (F/t) = 1 + v_1 t + ...; g_r = [t^{r-1}] (F/t)^{-r} / r.
  std::vector<Real> v(F.coeffs.begin(), F.coeffs.end());
  v[0] = 1;
  std::vector<Real> g(n);
  for (std::size_t r = 1; r <= n; ++r) {
    std::vector<Real> w = unit_power(v, Real(-static_cast<long>(r)), r);
    g[r - 1] = w[r - 1] / static_cast<long>(r);
  }
  PuiseuxSeries out;
  out.direction = F.direction;
  out.ramification = 1;
  out.local_base = 1;
  out.local_truncation = Rational(static_cast<long>(n) + 1);
  out.coeffs = std::move(g);
  out.exact_leading = Radical(1);
  return normalize(out);
}

PuiseuxSeries series_compose(const PuiseuxSeries& G, const PuiseuxSeries& F) {
  PuiseuxSeries X = G.direction == Direction::AtZero ? F : series_pow(F, -1);
  if (X.is_zero()) throw Error(ErrorCode::ExponentClash, "inner series is zero");
  const Rational& a = X.local_base;
  bool finite = !G.local_truncation;
  bool integral = G.is_zero() || (G.ramification == 1 && is_integer(G.local_base));
  if (a == 0 || (a < 0 && !(finite && integral)))
    throw Error(ErrorCode::ExponentClash, "inner series does not tend to the expansion point");
  PuiseuxSeries out;
  out.direction = F.direction;
  if (G.is_zero()) {
    if (G.local_truncation) out.local_truncation = a * *G.local_truncation;
    return normalize(out);
  }

  PuiseuxSeries R = X;
  long k0 = 0;
  if (integral) {
    k0 = G.local_base.get_num().get_si();
  } else {
    bool positive = X.exact_leading ? X.exact_leading->factor > 0 : X.leading() > 0;
    if (!positive) throw Error(ErrorCode::ExponentClash, "fractional powers of a negative inner series");
    R = series_pow(X, Rational(1, G.ramification));
    k0 = Integer(G.local_base * G.ramification).get_si();
  }
  const Rational& ar = R.local_base;
  std::optional<Rational> bound;
  if (G.local_truncation) bound = a * *G.local_truncation;
  if (R.local_truncation) {
    long k_end = k0 + static_cast<long>(G.coeffs.size()) - 1;
    long worst = ar > 0 ? k0 : k_end;
    bound = min_trunc(bound, Rational(worst) * ar + (*R.local_truncation - ar));
  }

  PuiseuxSeries power = series_pow(R, k0);
  bool have = false;
  for (std::size_t i = 0; i < G.coeffs.size(); ++i) {
    if (i > 0) power = power * R;
    if (G.coeffs[i] == 0) continue;
    if (bound && ar > 0 && Rational(k0 + static_cast<long>(i)) * ar >= *bound) break;
    PuiseuxSeries term = power;
    for (auto& c : term.coeffs) c *= G.coeffs[i];
    if (i == 0 && G.exact_leading && term.exact_leading)
      term.exact_leading = *term.exact_leading * *G.exact_leading;
    else
      term.exact_leading.reset();
    out = have ? out + term : term;
    have = true;
  }
  if (!have) {
    out = PuiseuxSeries();
    out.direction = F.direction;
    out.local_truncation = bound;
    return normalize(out);
  }
  if (bound) return truncate_local(out, *bound);
  out.local_truncation.reset();
  return normalize(out);
}

PuiseuxSeries shape_series(const WalkShape& shape) {
  std::map<Rational, Real> terms;
  for (const auto& [k, v] : shape.coeffs()) terms[Rational(k)] = to_real(v);
  PuiseuxSeries F = PuiseuxSeries::from_terms(Direction::AtZero, terms, std::nullopt);
  F.exact_leading = Radical(shape.coeff(-shape.e()));
  return F;
}

namespace {

WalkShape reflected(const WalkShape& shape) {
  std::map<long, Rational> c;
  for (const auto& [k, v] : shape.coeffs()) c[-k] = v;
  return WalkShape::create(std::move(c));
}

std::map<long, Real> minus_one(const WalkShape& shape) {
  std::map<long, Real> c;
  for (long k = -shape.e(); k <= shape.f(); ++k) {
    Rational v = k == 0 ? shape.coeff(0) - 1 : shape.coeff(k);
    if (v != 0) c[k] = to_real(v);
  }
  return c;
}

// t chi'(t) = sum k c_k t^k as an exact Laurent polynomial.
PuiseuxSeries t_chi_prime(const std::map<long, Real>& c, const std::optional<Rational>& kappa) {
  std::map<Rational, Real> terms;
  for (const auto& [k, v] : c)
    if (k != 0) terms[Rational(k)] = v * k;
  PuiseuxSeries F = PuiseuxSeries::from_terms(Direction::AtZero, terms, std::nullopt);
  long e = -c.begin()->first;
  if (kappa) F.exact_leading = Radical(*kappa * -e);
  return F;
}

// The solution of chi(alpha) = 1 + u tending to 0 as u -> infinity, with
// chi - 1 given by its coefficients c and the exact lowest one if known.
PuiseuxSeries small_branch(const std::map<long, Real>& c, const std::optional<Rational>& kappa, long order) {
  const long e = -c.begin()->first;
  if (e < 1 || c.begin()->second <= 0)
    throw Error(ErrorCode::InvalidArgument, "branch needs a positive lowest coefficient at a negative power");
  const Real lowest = c.begin()->second;
  // Q(t) = t^e (chi(t) - 1) / kappa_{-e} = 1 + ..., a polynomial.
  std::map<Rational, Real> q;
  for (const auto& [k, v] : c) q[Rational(k + e)] = k == -e ? Real(1) : Real(v / lowest);
  PuiseuxSeries Q = PuiseuxSeries::from_terms(Direction::AtZero, q, std::nullopt);
  Q.exact_leading = Radical(1);
  Q = truncate_local(Q, Rational(order));
  // H(t) = t Q(t)^{-1/e} satisfies H^{-e} = (chi - 1)/kappa_{-e}; alpha = H^{-1}(c u^{-1/e}).
  PuiseuxSeries t = PuiseuxSeries::monomial(Direction::AtZero, 1, Radical(1));
  PuiseuxSeries H = t * series_pow(Q, Rational(-1, e));
  PuiseuxSeries G = series_invert(H);
  PuiseuxSeries x;
  if (kappa) {
    x = PuiseuxSeries::monomial(Direction::AtInfinity, Rational(-1, e), Radical::power(*kappa, Rational(1, e)));
  } else {
    Real root = exp(log(lowest) / e);
    x = PuiseuxSeries::from_terms(Direction::AtInfinity, {{Rational(-1, e), root}}, std::nullopt);
  }
  return series_compose(G, x);
}

PuiseuxSeries small_branch(const WalkShape& shape, long order) {
  return small_branch(minus_one(shape), shape.coeff(-shape.e()), order);
}

PuiseuxSeries t_chi_prime(const WalkShape& shape) { return t_chi_prime(minus_one(shape), shape.coeff(-shape.e())); }

}  // namespace

AlphaBranches alpha_branches(const WalkShape& shape, long order, unsigned precision_bits) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "order must be at least 1");
  PrecisionScope scope(precision_bits);
  AlphaBranches out;
  out.alpha_minus = small_branch(shape, order);
  out.alpha_plus = series_pow(small_branch(reflected(shape), order), -1);
  return out;
}

BranchPair gamma_branches(const WalkShape& shape, long order, unsigned precision_bits) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "order must be at least 1");
  PrecisionScope scope(precision_bits);
  BranchPair out;
  out.gamma_minus = series_pow(series_compose(t_chi_prime(shape), small_branch(shape, order)), -1);
  // With chi_r(t) = chi(1/t): alpha_plus = 1/alpha_r and t chi'(t) = -t chi_r'(t) at t = alpha_r.
  WalkShape r = reflected(shape);
  out.gamma_plus = -series_pow(series_compose(t_chi_prime(r), small_branch(r, order)), -1);
  return out;
}

PuiseuxSeries gamma_minus_of(const std::map<long, Real>& chi_minus_one, long order, unsigned precision_bits) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "order must be at least 1");
  if (chi_minus_one.empty()) throw Error(ErrorCode::InvalidArgument, "empty Laurent polynomial");
  PrecisionScope scope(precision_bits);
  std::map<long, Real> c;
  for (const auto& [k, v] : chi_minus_one)
    if (v != 0) c[k] = to_working(v);
  return series_pow(series_compose(t_chi_prime(c, std::nullopt), small_branch(c, std::nullopt, order)), -1);
}

GammaDifference gamma_diff_at_infinity(const WalkShape& shape, long order, unsigned precision_bits) {
  GammaDifference out;
  out.branches = gamma_branches(shape, order, precision_bits);
  PrecisionScope scope(precision_bits);
  out.diff = out.branches.gamma_plus - out.branches.gamma_minus;
  long g = std::gcd(shape.e(), shape.f());
  for (long i = 0;; ++i) {
    Rational q = Rational(-1) - ratio(i, g);
    if (!out.diff.known(q)) break;
    out.collisions.push_back(q);
  }
  return out;
}

namespace {

PuiseuxSeries derivative(const PuiseuxSeries& F) {
  PuiseuxSeries out = F;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= to_real(F.u_exponent(i));
  out.local_base -= 1;
  if (out.local_truncation) *out.local_truncation -= 1;
  if (out.exact_leading) out.exact_leading = *out.exact_leading * Radical(F.local_base);
  return normalize(out);
}

}  // namespace

PuiseuxSeries gamma_diff_at_zero(const WalkShape& shape, long order, unsigned precision_bits) {
  if (!shape.unbiased()) throw Error(ErrorCode::Biased, "shape must have mean zero");
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "order must be at least 1");
  PrecisionScope scope(precision_bits);
  // phi(x) = chi(e^x) - 1 = sum_{n>=2} J_n x^n / n!.
  MomentVector J = moments(shape, order + 1);
  std::map<Rational, Real> terms;
  Rational fact = 1;
  for (long n = 2; n <= order + 1; ++n) {
    fact *= n;
    terms[Rational(n)] = to_real(J.J(n) / fact);
  }
  PuiseuxSeries phi = PuiseuxSeries::from_terms(Direction::AtZero, terms, Rational(order + 2));
  phi.exact_leading = Radical(J.J(2) / 2);
  // y = sqrt(phi) = beta x (1 + ...), beta = sqrt(J_2 / 2); x = psi(y / beta).
  PuiseuxSeries y = series_pow(phi, Rational(1, 2));
  Radical beta = *y.exact_leading;
  Radical inv_beta = pow(beta, Rational(-1));
  PuiseuxSeries psi = series_invert(scale(y, inv_beta));
  PuiseuxSeries dpsi = derivative(psi);
  PuiseuxSeries half = PuiseuxSeries::monomial(Direction::AtZero, Rational(-1, 2), inv_beta * Radical(Rational(1, 2)));
  // x_+ = psi(sqrt(u)/beta), x_- = psi(-sqrt(u)/beta); gamma_+ = dx_+/du, gamma_- = dx_-/du.
  PuiseuxSeries root_plus = PuiseuxSeries::monomial(Direction::AtZero, Rational(1, 2), inv_beta);
  PuiseuxSeries root_minus = PuiseuxSeries::monomial(Direction::AtZero, Rational(1, 2), -inv_beta);
  PuiseuxSeries gamma_plus = series_compose(dpsi, root_plus) * half;
  PuiseuxSeries gamma_minus = -(series_compose(dpsi, root_minus) * half);
  return truncate_terms(gamma_plus - gamma_minus, static_cast<std::size_t>(order));
}

WatsonCheck watson_check(const WalkShape& shape, long m, unsigned precision_bits) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "order must be nonnegative");
  PrecisionScope scope(precision_bits);
  auto z = gamma_diff_at_zero(shape, 2 * m + 3, precision_bits);
  auto ex = expansion(shape, m, SignMode::Alternating);
  const Real two_pi = 2 * boost::math::constants::pi<Real>();
  WatsonCheck out;
  out.max_gap = 0;
  out.max_integer_coefficient = 0;
  for (long l = 0; l <= m; ++l) {
    Rational q = ratio(2 * l - 1, 2);
    out.transformed.push_back(z.coefficient(q) * boost::math::tgamma(to_real(q) + 1) / two_pi);
    out.predicted.push_back(ex.prefactor * ex.coefficients[static_cast<std::size_t>(l)] * (l % 2 == 0 ? 1 : -1));
    Real gap = abs(out.transformed.back() - out.predicted.back());
    if (gap > out.max_gap) out.max_gap = gap;
    Real c = abs(z.coefficient(Rational(l)));
    if (c > out.max_integer_coefficient) out.max_integer_coefficient = c;
  }
  Real tol = pow_int(Real(2), -static_cast<long>(precision_bits / 2));
  out.pass = out.max_gap <= tol && out.max_integer_coefficient <= tol;
  return out;
}

}  // namespace walkspec
