#include "walkspec/reconstruct.hpp"

#include <cmath>
#include <functional>
#include <numeric>

namespace walkspec {

namespace {

// [t^n] (1 + kappa0 t + sum_k p_k t^{k+1})^n, the return probability I_n
// of an e = 1 shape in terms of kappa0 and p_k = kappa_{-1}^k kappa_k.
Rational e1_return(const Rational& kappa0, const std::vector<Rational>& p, long n) {
  std::vector<Rational> q(static_cast<std::size_t>(n) + 1, Rational(0));
  q[0] = 1;
  if (n >= 1) q[1] = kappa0;
  for (std::size_t k = 1; k < p.size() && static_cast<long>(k) < n; ++k) q[k + 1] = p[k];
  std::vector<Rational> acc(static_cast<std::size_t>(n) + 1, Rational(0));
  acc[0] = 1;
  for (long step = 0; step < n; ++step) {
    std::vector<Rational> next(acc.size(), Rational(0));
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (acc[i] == 0) continue;
      for (std::size_t j = 0; i + j < acc.size(); ++j)
        if (q[j] != 0) next[i + j] += acc[i] * q[j];
    }
    acc = std::move(next);
  }
  return acc[static_cast<std::size_t>(n)];
}

// Root of an increasing function on [lo, hi] with F(lo) < 0 < F(hi);
// fn returns value and derivative. Newton steps, bisection when they leave
// the bracket.
Real solve_increasing(const std::function<std::pair<Real, Real>(const Real&)>& fn, Real lo, Real hi) {
  const Real eps = pow_int(Real(2), 6 - static_cast<long>(working_precision()));
  Real x = (lo + hi) / 2;
  const long limit = 4 * static_cast<long>(working_precision()) + 64;
  for (long iter = 0; iter < limit; ++iter) {
    auto [v, d] = fn(x);
    if (v == 0) return x;
    if (v < 0) lo = x;
    else hi = x;
    Real next = d > 0 ? Real(x - v / d) : Real((lo + hi) / 2);
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    if (abs(next - x) <= eps * abs(x) || hi - lo <= eps * abs(x)) return next;
    x = next;
  }
  throw Error(ErrorCode::PrecisionExhausted, "root solve did not converge");
}

// Monic side polynomial t^d + sum nu_k t^{d-k} as coefficients by power.
std::vector<Real> side_poly(const NormalizedHalfShape& h) {
  std::vector<Real> c(static_cast<std::size_t>(h.degree) + 1, Real(0));
  c[static_cast<std::size_t>(h.degree)] = 1;
  for (long k = 1; k < h.degree; ++k) c[static_cast<std::size_t>(h.degree - k)] = to_working(h.nu[k - 1]);
  return c;
}

// p(x), x p'(x) and (x p'(x))' for a polynomial without constant term.
struct SideValue {
  Real p, xdp, dxdp, dp;
};

SideValue side_eval(const std::vector<Real>& c, const Real& x) {
  SideValue out{Real(0), Real(0), Real(0), Real(0)};
  Real xk = 1;
  for (std::size_t k = 1; k < c.size(); ++k) {
    Real prev = xk;
    xk *= x;
    if (c[k] == 0) continue;
    long kk = static_cast<long>(k);
    out.p += c[k] * xk;
    out.xdp += c[k] * kk * xk;
    out.dxdp += c[k] * (kk * kk) * prev;
    out.dp += c[k] * kk * prev;
  }
  return out;
}

// x with p(x) = target on (0, infinity), p increasing.
Real side_solve(const std::vector<Real>& c, const Real& target) {
  if (target <= 0) return Real(0);
  Real hi = 1;
  while (side_eval(c, hi).p < target) hi *= 2;
  return solve_increasing([&](const Real& x) {
    SideValue v = side_eval(c, x);
    return std::pair<Real, Real>(v.p - target, v.dp);
  }, Real(0), hi);
}

long leading_degree(const PuiseuxSeries& gamma, const char* what) {
  if (gamma.is_zero() || gamma.base_exponent() != -1)
    throw Error(ErrorCode::MissingOrders, std::string(what) + " does not start at u^-1");
  Rational lead;
  if (gamma.exact_leading && gamma.exact_leading->is_rational()) {
    lead = gamma.exact_leading->factor;
  } else {
    Real inv = 1 / abs(gamma.leading());
    lead = Rational(static_cast<long>(std::lround(static_cast<double>(inv))));
    if (lead == 0 || abs(inv - to_real(lead)) > pow_int(Real(2), -32))
      throw Error(ErrorCode::Inconsistent, std::string(what) + " leading coefficient is not 1/d");
    lead = 1 / lead;
    if (gamma.leading() < 0) lead = -lead;
  }
  Rational inv = 1 / abs(lead);
  if (inv.get_den() != 1) throw Error(ErrorCode::Inconsistent, std::string(what) + " leading coefficient is not 1/d");
  return inv.get_num().get_si();
}

}  // namespace

Reconstruction reconstruct_e1(const Spectrum& spectrum, long f, unsigned precision_bits) {
  if (f < 1) throw Error(ErrorCode::InvalidArgument, "f must be at least 1");
  if (spectrum.start > 1 || spectrum.start + spectrum.size() - 1 < f + 1)
    throw Error(ErrorCode::InsufficientData, "need I_1..I_{f+1}");
  PrecisionScope scope(precision_bits);
  const Rational kappa0 = spectrum.I(1);
  if (kappa0 < 0 || kappa0 >= 1) throw Error(ErrorCode::Inconsistent, "I_1 must lie in [0, 1)");
  // I_{k+1} = (k+1) p_k + (terms in kappa0, p_1..p_{k-1}).
  std::vector<Rational> p(static_cast<std::size_t>(f) + 1, Rational(0));
  for (long k = 1; k <= f; ++k) {
    Rational rest = e1_return(kappa0, p, k + 1);
    p[static_cast<std::size_t>(k)] = (spectrum.I(k + 1) - rest) / (k + 1);
    if (p[static_cast<std::size_t>(k)] < 0) throw Error(ErrorCode::NotE1, "negative product kappa_-1^k kappa_k");
  }
  if (p[static_cast<std::size_t>(f)] == 0) throw Error(ErrorCode::NotE1, "kappa_f vanishes");
  for (long n = f + 2; n < spectrum.start + spectrum.size(); ++n)
    if (e1_return(kappa0, p, n) != spectrum.I(n))
      throw Error(ErrorCode::Inconsistent, "I_" + std::to_string(n) + " disagrees with the recovered shape");

  // Mean zero: x^{f+1} = sum_k k p_k x^{f-k}, with x = kappa_{-1}.
  std::vector<Rational> mean(static_cast<std::size_t>(f) + 2, Rational(0));
  mean[static_cast<std::size_t>(f) + 1] = -1;
  for (long k = 1; k <= f; ++k) mean[static_cast<std::size_t>(f - k)] = k * p[static_cast<std::size_t>(k)];
  QPoly poly(mean);
  auto roots = isolate_real_roots(poly, Rational(0), cauchy_bound(poly));
  if (roots.size() != 1) throw Error(ErrorCode::Inconsistent, "mean-zero equation has no unique positive root");
  QPoly sf = squarefree_part(poly);
  RootInterval root = refine_root(sf, roots.front(), precision_bits + 16);
  std::optional<Rational> exact_x = root.exact ? std::optional<Rational>(root.lo) : rational_root_in(poly, root);

  Reconstruction out;
  if (exact_x) {
    std::map<long, Rational> c{{-1, *exact_x}};
    if (kappa0 != 0) c[0] = kappa0;
    Rational total = *exact_x + kappa0;
    for (long k = 1; k <= f; ++k) {
      Rational v = p[static_cast<std::size_t>(k)] / pow(*exact_x, static_cast<unsigned long>(k));
      if (v != 0) c[k] = v;
      total += v;
    }
    if (total != 1) throw Error(ErrorCode::Inconsistent, "recovered coefficients do not sum to 1");
    out.exact = WalkShape::create(std::move(c), true);
    out.shape = to_real_shape(*out.exact);
    return out;
  }
  Real x = (to_real(root.lo) + to_real(root.hi)) / 2;
  out.shape.coeffs[-1] = x;
  if (kappa0 != 0) out.shape.coeffs[0] = to_real(kappa0);
  for (long k = 1; k <= f; ++k)
    if (p[static_cast<std::size_t>(k)] != 0) out.shape.coeffs[k] = to_real(p[static_cast<std::size_t>(k)]) / pow_int(x, k);
  if (abs(out.shape.mass() - 1) > pow_int(Real(2), -static_cast<long>(precision_bits) / 2))
    throw Error(ErrorCode::Inconsistent, "recovered coefficients do not sum to 1");
  return out;
}

std::string_view to_string(Side side) { return side == Side::Plus ? "plus" : "minus"; }

NormalizedHalfShape half_shape_of(const RealShape& shape, Side side) {
  if (shape.coeffs.empty()) throw Error(ErrorCode::InvalidArgument, "empty shape");
  NormalizedHalfShape h;
  h.side = side;
  int sg = side == Side::Plus ? 1 : -1;
  h.degree = side == Side::Plus ? shape.coeffs.rbegin()->first : -shape.coeffs.begin()->first;
  if (h.degree < 1) throw Error(ErrorCode::InvalidArgument, "side has no support");
  Real top = shape.coeff(sg * h.degree);
  for (long k = 1; k < h.degree; ++k) {
    Real expo = Real(-1) + Real(k) / h.degree;
    h.nu.push_back(shape.coeff(sg * (h.degree - k)) * exp(expo * log(top)));
  }
  return h;
}

NormalizedHalfShape half_shape_from_series(const PuiseuxSeries& gamma, Side side, long degree) {
  if (degree < 1) throw Error(ErrorCode::InvalidArgument, "degree must be at least 1");
  NormalizedHalfShape h;
  h.side = side;
  h.degree = degree;
  if (degree == 1) return h;
  if (!gamma.known(Rational(-1) - ratio(degree - 1, degree)))
    throw Error(ErrorCode::MissingOrders, "series stops before u^{-1-(d-1)/d}");
  const Real sg = side == Side::Minus ? 1 : -1;
  // Both sides are modelled as the minus branch of t^{-d} + sum nu_k t^{-(d-k)}:
  // the plus branch of a shape is minus the minus branch of its reflection.
  auto model = [&](const std::vector<Real>& nu, long k) {
    std::map<long, Real> c{{-degree, Real(1)}};
    for (std::size_t j = 0; j < nu.size(); ++j) c[-(degree - 1 - static_cast<long>(j))] = nu[j];
    PuiseuxSeries g = gamma_minus_of(c, degree + 1, working_precision());
    return g.coefficient(Rational(-1) - ratio(k, degree));
  };
  // Forward substitution: coefficient k is affine in nu_k given nu_1..nu_{k-1}.
  for (long k = 1; k < degree; ++k) {
    Real target = sg * gamma.coefficient(Rational(-1) - ratio(k, degree));
    std::vector<Real> nu = h.nu;
    nu.push_back(Real(0));
    Real base = model(nu, k);
    nu.back() = 1;
    Real slope = model(nu, k) - base;
    h.nu.push_back((target - base) / slope);
  }
  return h;
}

RealShape fix_scales(const NormalizedHalfShape& plus, const NormalizedHalfShape& minus, const Rational& kappa0,
                     unsigned precision_bits) {
  if (kappa0 >= 1) throw Error(ErrorCode::NoSolution, "kappa_0 >= 1 leaves no mass for the sides");
  if (kappa0 < 0) throw Error(ErrorCode::InvalidArgument, "kappa_0 must be nonnegative");
  if (plus.side != Side::Plus || minus.side != Side::Minus)
    throw Error(ErrorCode::InvalidArgument, "expected a plus and a minus half shape");
  PrecisionScope scope(precision_bits);
  const std::vector<Real> cp = side_poly(plus);
  const std::vector<Real> cm = side_poly(minus);
  const Real mass = to_real(1 - kappa0);
  const Real A = side_solve(cp, mass);
  // g(a) = a psi+'(a) - b psi-'(b) with psi+(a) + psi-(b) = 1 - kappa_0;
  // g is increasing in a, negative at a = 0 and positive at a = A.
  auto b_of = [&](const Real& a) { return side_solve(cm, mass - side_eval(cp, a).p); };
  Real a = solve_increasing([&](const Real& x) {
    SideValue P = side_eval(cp, x);
    Real b = side_solve(cm, mass - P.p);
    SideValue M = side_eval(cm, b);
    Real db = M.dp > 0 ? Real(-P.dp / M.dp) : Real(0);
    return std::pair<Real, Real>(P.xdp - M.xdp, P.dxdp - M.dxdp * db);
  }, Real(0), A);
  Real b = b_of(a);
  RealShape out;
  if (kappa0 != 0) out.coeffs[0] = to_real(kappa0);
  for (long k = 1; k <= plus.degree; ++k)
    if (cp[static_cast<std::size_t>(k)] != 0) out.coeffs[k] = cp[static_cast<std::size_t>(k)] * pow_int(a, k);
  for (long k = 1; k <= minus.degree; ++k)
    if (cm[static_cast<std::size_t>(k)] != 0) out.coeffs[-k] = cm[static_cast<std::size_t>(k)] * pow_int(b, k);
  return out;
}

RealShape reconstruct_from_branches(const BranchPair& pair, const Rational& kappa0, unsigned precision_bits) {
  PrecisionScope scope(precision_bits);
  long f = leading_degree(pair.gamma_plus, "gamma_plus");
  long e = leading_degree(pair.gamma_minus, "gamma_minus");
  if (pair.gamma_plus.leading() < 0 || pair.gamma_minus.leading() > 0)
    throw Error(ErrorCode::Inconsistent, "branch leading coefficients have the wrong signs");
  auto plus = half_shape_from_series(pair.gamma_plus, Side::Plus, f);
  auto minus = half_shape_from_series(pair.gamma_minus, Side::Minus, e);
  return fix_scales(plus, minus, kappa0, precision_bits);
}

RealShape reconstruct_from_diff(const PuiseuxSeries& diff, long e, long f, const Rational& kappa0,
                                unsigned precision_bits) {
  if (e < 1 || f < 1) throw Error(ErrorCode::InvalidArgument, "e and f must be at least 1");
  if (e == f && e > 1) throw Error(ErrorCode::DegreesEqual, "e = f: the branch lattices coincide");
  if (std::gcd(e, f) > 1)
    throw Error(ErrorCode::AmbiguousLattice, "gcd(e, f) > 1: the branch lattices share non-integer exponents");
  PrecisionScope scope(precision_bits);
  Rational lead = ratio(1, e) + ratio(1, f);
  if (diff.is_zero() || diff.base_exponent() != -1 ||
      abs(diff.leading() - to_real(lead)) > pow_int(Real(2), 16 - static_cast<long>(precision_bits)))
    throw Error(ErrorCode::Inconsistent, "difference does not start with (1/e + 1/f) u^-1");
  // Exponents -1-k/f and -1-j/e (0 < k < f, 0 < j < e) never meet when gcd(e, f) = 1.
  auto branch = [&](long d, int sg) {
    if (d > 1 && !diff.known(Rational(-1) - ratio(d - 1, d)))
      throw Error(ErrorCode::MissingOrders, "difference stops before u^{-1-(d-1)/d}");
    std::map<Rational, Real> terms{{Rational(-1), to_real(ratio(sg, d))}};
    for (long k = 1; k < d; ++k) {
      Rational q = Rational(-1) - ratio(k, d);
      terms[q] = sg * diff.coefficient(q);
    }
    PuiseuxSeries g = PuiseuxSeries::from_terms(Direction::AtInfinity, terms, Rational(-2));
    g.exact_leading = Radical(ratio(sg, d));
    return g;
  };
  BranchPair pair{branch(f, 1), branch(e, -1)};
  return reconstruct_from_branches(pair, kappa0, precision_bits);
}

bool is_perfect_square(long n) {
  if (n < 0) return false;
  Integer z(n);
  return mpz_perfect_square_p(z.get_mpz_t()) != 0;
}

namespace {

// (p, m) with n = p^m for a prime p, if any.
std::optional<std::pair<long, long>> prime_power(long n) {
  if (n < 2) return std::nullopt;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    long m = 0;
    while (n % p == 0) {
      n /= p;
      ++m;
    }
    if (n != 1) return std::nullopt;
    return std::make_pair(p, m);
  }
  return std::make_pair(n, 1L);
}

bool is_prime(long n) {
  auto pp = prime_power(n);
  return pp && pp->second == 1;
}

bool family_contains(NFamily family, long n) {
  switch (family) {
    case NFamily::Concrete:
      return false;
    case NFamily::PrimePower:
      return prime_power(n).has_value();
    case NFamily::PrimePowerNonPrime: {
      auto pp = prime_power(n);
      return pp && pp->second >= 2;
    }
    case NFamily::OddPrimeSquare: {
      auto pp = prime_power(n);
      return pp && pp->second == 2 && pp->first > 2;
    }
    case NFamily::PowerOfTwoAtLeast8: {
      auto pp = prime_power(n);
      return pp && pp->first == 2 && pp->second >= 3;
    }
    case NFamily::SquareAtLeast25:
      return n >= 25 && is_perfect_square(n);
    case NFamily::PrimePlusOneSquared: {
      if (!is_perfect_square(n)) return false;
      long r = std::lround(std::sqrt(static_cast<double>(n)));
      return r - 1 >= 5 && is_prime(r - 1);
    }
    case NFamily::AtLeast6:
      return n >= 6;
    case NFamily::PrimePlusOne:
      return is_prime(n - 1);
    case NFamily::ProjectiveOddQ:
      for (long q = 3; 1 + q <= n; q += 2) {
        auto pp = prime_power(q);
        if (!pp) continue;
        long total = 1 + q;
        long power = q;
        while (total < n) {
          power *= q;
          total += power;
        }
        if (total == n) return true;
      }
      return false;
  }
  return false;
}

MullerTableRow row(MullerTable table, std::string label, std::string group, std::string order, std::string simple,
                   long n, std::vector<std::string> e, std::string value, std::string note = {}) {
  MullerTableRow r;
  r.table = table;
  r.label = std::move(label);
  r.group = std::move(group);
  r.order = std::move(order);
  r.simple_factors = std::move(simple);
  r.n = std::to_string(n);
  r.concrete_n = n;
  r.e_options = std::move(e);
  r.one_over_e_plus_one_over_f = std::move(value);
  r.note = std::move(note);
  return r;
}

MullerTableRow family_row(MullerTable table, std::string label, std::string group, std::string order,
                          std::string simple, std::string n, NFamily family, std::vector<std::string> e,
                          std::string value) {
  MullerTableRow r = row(table, std::move(label), std::move(group), std::move(order), std::move(simple), 0,
                         std::move(e), std::move(value));
  r.n = std::move(n);
  r.family = family;
  return r;
}

std::vector<MullerTableRow> build_tables() {
  using T = MullerTable;
  std::vector<MullerTableRow> rows;
  const T A = T::Affine, P = T::Product, S = T::Sporadic;
  rows.push_back(family_row(A, "(a)", ">F_{p^m}⋊GL_{m/t}(p^t)", "≈p^{m+m^2/t}", "0 or 1", "p^m",
                            NFamily::PrimePower, {"1"}, "p^m/(p^m-1)"));
  rows.push_back(row(A, "(b)", "F_2^2⋊GL_2(2)", "24", "0", 4, {"2"}, "1"));
  rows.push_back(row(A, "(b)", "F_2^3⋊GL_3(2)", "1344", "1", 8, {"2"}, "2/3"));
  rows.push_back(row(A, "(b)", "F_2^4⋊GL_4(2)", "322560", "1", 16, {"2"}, "4/7"));
  rows.push_back(row(A, "(b)", "F_3^2⋊GL_2(3)", "432", "0", 9, {"3"}, "1/2"));
  rows.push_back(row(A, "(b)", "F_5^2⋊GL_2(5)", "12000", "1", 25, {"5"}, "1/4"));
  rows.push_back(family_row(A, "(b)", "F_p^m⋊GL_m(p)", "≈p^{m^2+m}", "1", "p^m", NFamily::PrimePowerNonPrime,
                            {"p"}, "p^{m-2}/(p^{m-1}-1)"));
  rows.push_back(family_row(A, "(c)", "F_p^2⋊N, p>2", "≤2(p-1)p^2", "0", "p^2", NFamily::OddPrimeSquare, {"p"},
                            "1/(p-1)"));
  rows.push_back(family_row(A, "(d)", "F_2^m⋊GL_m(2)", "≈2^{m^2+m}", "1", "2^m", NFamily::PowerOfTwoAtLeast8,
                            {"4"}, "2^{m-4}/(2^{m-2}-1)"));
  rows.push_back(row(A, "(e)", "A_4", "12", "0", 4, {"2"}, "1"));
  rows.push_back(row(A, "(e)", "F_8⋊(F_8^×⋊C_3)", "96", "0", 8, {"2"}, "2/3"));
  rows.push_back(row(A, "(e)", "F_9⋊(F_9^×⋊C_2)", "108", "0", 9, {"3"}, "1/2"));
  rows.push_back(row(A, "(e)", "F_16⋊(C_5⋊C_4)", "320", "0", 16, {"8"}, "1/4"));
  rows.push_back(row(A, "(e)", "F_16⋊(F_16^×⋊C_4)", "512", "0", 16, {"8"}, "1/4"));
  rows.push_back(row(A, "(e)", "F_16⋊(C_3^2⋊C_4)", "576", "0", 16, {"8"}, "1/4"));
  rows.push_back(row(A, "(e)", "F_16⋊(SL_2(4)⋊C_2)", "1920", "1", 16, {"8"}, "1/4"));
  rows.push_back(row(A, "(e)", "F_16⋊(GL_2(4)⋊C_2)", "1152", "1", 16, {"8"}, "1/4"));
  rows.push_back(row(A, "(e)", "F_16⋊A_6", "5760", "1", 16, {"8"}, "1/4"));
  rows.push_back(row(A, "(e)", "F_16⋊GL_4(2)", "322560", "1", 16, {"8"}, "1/4"));
  rows.push_back(row(A, "(e)", "F_16⋊(S_3^2⋊C_2)", "1152", "0", 16, {"4", "8"}, "1/3 or 1/4"));
  rows.push_back(row(A, "(e)", "F_16⋊S_5", "1920", "1", 16, {"4", "8"}, "1/3 or 1/4"));
  rows.push_back(row(A, "(e)", "F_16⋊S_6", "11520", "1", 16, {"4", "8"}, "1/3 or 1/4"));
  rows.push_back(row(A, "(e)", "F_16⋊A_7", "40320", "1", 16, {"2", "8"}, "4/7 or 1/4"));
  rows.push_back(row(A, "(e)", "F_25⋊G_1", "2400", "0", 25, {"5"}, "1/4"));
  rows.push_back(family_row(P, "(a)", "S_r^2⋊C_2 (r≥5)", "2r!^2", "2", "r^2", NFamily::SquareAtLeast25,
                            {"ar", "(a,n)=1"}, "1/(a(r-a))"));
  rows.push_back(family_row(P, "(b)", "PGL_2(p)^2⋊C_2 (p≥5)", "2(p^3-p)^2", "2", "(p+1)^2",
                            NFamily::PrimePlusOneSquared, {"p+1"}, "1/p"));
  rows.push_back(row(S, "(a)", "A_5", "60", "1", 5, {"1", "2"}, "5/4 or 5/6"));
  rows.push_back(row(S, "(a)", "S_5", "120", "1", 5, {"1", "2"}, "5/4 or 5/6"));
  rows.push_back(family_row(S, "(a)", "A_n (n≥6)", "n!/2", "1", "n", NFamily::AtLeast6, {"1,...,floor(n/2)"},
                            "n/(e(n-e))"));
  rows.push_back(family_row(S, "(a)", "S_n (n≥6)", "n!", "1", "n", NFamily::AtLeast6, {"1,...,floor(n/2)"},
                            "n/(e(n-e))"));
  rows.push_back(row(S, "(b)", "A_5", "60", "1", 10, {"5"}, "2/5"));
  rows.push_back(row(S, "(b)", "S_5", "120", "1", 10, {"5"}, "2/5"));
  rows.push_back(family_row(S, "(c)", ">PSL_2(p)", "≤p^3-p", "0 or 1", "p+1", NFamily::PrimePlusOne, {"1"},
                            "(p+1)/p"));
  rows.push_back(family_row(S, "(d)", ">PSL_m(q) (q odd)", "≈q^{m^2-1}", "1", "(q^m-1)/(q-1)",
                            NFamily::ProjectiveOddQ, {"(q^m-1)/(2(q-1))"}, "4(q-1)/(q^m-1)"));
  const std::string n19 = "n = 10; listed as n = 19 in the original classification, a misprint";
  rows.push_back(row(S, "(e)", "M_10", "720", "1", 10, {"2"}, "5/8", n19));
  rows.push_back(row(S, "(e)", "M_10⋊C_2", "1440", "1", 10, {"2"}, "5/8", n19));
  rows.push_back(row(S, "(f)", "PSL_3(4)⋊C_2", "40320", "1", 21, {"7"}, "3/14"));
  rows.push_back(row(S, "(f)", "PGL_3(4)⋊C_2", "80640", "1", 21, {"7"}, "3/14"));
  rows.push_back(row(S, "(g)", "M_11", "7920", "1", 12, {"1", "4"}, "12/11 or 8/3",
                     "8/3 as printed; e = 4, f = 8 gives 1/4 + 1/8 = 3/8"));
  rows.push_back(row(S, "(h)", "M_12", "95040", "1", 12, {"1", "2", "4", "6"}, "12/11, 3/5, 3/8, or 1/3"));
  rows.push_back(row(S, "(i)", "M_22", "443520", "1", 22, {"11"}, "2/11"));
  rows.push_back(row(S, "(i)", "M_22⋊C_2", "887040", "1", 22, {"11"}, "2/11"));
  rows.push_back(row(S, "(j)", "M_24", "244823040", "1", 24, {"1", "3", "12"}, "24/23, 8/21, or 1/6"));
  return rows;
}

}  // namespace

std::string_view to_string(MullerTable t) {
  switch (t) {
    case MullerTable::Affine: return "affine";
    case MullerTable::Product: return "product";
    case MullerTable::Sporadic: return "sporadic";
  }
  return "affine";
}

bool MullerTableRow::matches(long n_value, bool include_families) const {
  if (family == NFamily::Concrete) return concrete_n == n_value;
  return include_families && family_contains(family, n_value);
}

const std::vector<MullerTableRow>& muller_tables() {
  static const std::vector<MullerTableRow> rows = build_tables();
  return rows;
}

std::vector<MullerTableRow> muller_rows(long n_value, bool include_families) {
  std::vector<MullerTableRow> out;
  for (const auto& r : muller_tables())
    if (r.matches(n_value, include_families)) out.push_back(r);
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::TheoremClean: return "TheoremClean";
    case Verdict::TheoremMain: return "TheoremMain";
    case Verdict::GenericOnly: return "GenericOnly";
    case Verdict::Exceptional: return "Exceptional";
  }
  return "TheoremClean";
}

GuaranteeReport guarantee(long e, long f) {
  if (e < 1 || f < 1) throw Error(ErrorCode::InvalidArgument, "e and f must be at least 1");
  GuaranteeReport r;
  r.e = e;
  r.f = f;
  r.n = e + f;
  const bool degree_ok = r.n != 10 && !is_perfect_square(r.n);
  const std::string n = std::to_string(r.n);
  if (std::gcd(e, f) == 1) {
    r.verdict = Verdict::TheoremClean;
    r.notes = "gcd(e,f) = 1: the spectrum determines the shape up to equivalence.";
    if (degree_ok) r.notes += " The degree condition also holds (n = " + n + " is neither 10 nor a perfect square).";
  } else if (degree_ok) {
    r.verdict = Verdict::TheoremMain;
    r.notes = "n = " + n + " is neither 10 nor a perfect square: the spectrum determines the shape up to equivalence.";
  } else {
    r.verdict = Verdict::Exceptional;
    r.notes = "gcd(e,f) > 1 and n = " + n +
              (r.n == 10 ? " is 10" : " is a perfect square") +
              ": uniqueness is not established; the listed groups are the candidate mechanisms.";
    r.table_rows = muller_rows(r.n, true);
  }
  return r;
}

}  // namespace walkspec
