#include "walkspec/asymptotics.hpp"

#include <atomic>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "walkspec/spectrum.hpp"

namespace walkspec {

namespace {

Real pi_real() { return boost::math::constants::pi<Real>(); }

Rational factorial(unsigned long n) {
  Integer out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return Rational(out);
}

Integer double_factorial(long n) {
  Integer out = 1;
  for (long k = n; k > 1; k -= 2) out *= k;
  return out;
}

// Coefficient of prod rho_n^{d_n} in the Gaussian-integrated exponential:
// prod 1/(n!^{d_n} d_n!) times (-1)^{j/2} (j-1)!! with j = sum n d_n.
Rational monomial_coefficient(const std::vector<unsigned>& degrees) {
  Rational c = 1;
  long j = 0;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    unsigned long n = i + 3;
    unsigned d = degrees[i];
    if (d == 0) continue;
    c /= pow(factorial(n), d) * factorial(d);
    j += static_cast<long>(n * d);
  }
  c *= Rational(double_factorial(j - 1));
  if ((j / 2) % 2 == 1) c = -c;
  return c;
}

// All degree vectors with weight exactly `target`, parts (n - 2) >= `part`.
void enumerate(long target, long part, std::vector<unsigned>& degrees,
               std::vector<std::vector<unsigned>>& out) {
  if (target == 0) {
    std::vector<unsigned> key = degrees;
    while (!key.empty() && key.back() == 0) key.pop_back();
    out.push_back(std::move(key));
    return;
  }
  if (part > target) return;
  std::size_t idx = static_cast<std::size_t>(part - 1);
  if (degrees.size() <= idx) degrees.resize(idx + 1, 0);
  for (long d = 0; d * part <= target; ++d) {
    degrees[idx] = static_cast<unsigned>(d);
    enumerate(target - d * part, part + 1, degrees, out);
  }
  degrees[idx] = 0;
}

Real sqrt_real(const Real& x) { return boost::multiprecision::sqrt(x); }

Real two_pow(long k) { return pow_int(Real(2), k); }

// Monomial coefficients c_0..c_{n-1} of the interpolating polynomial.
std::vector<Real> interpolation_coefficients(const std::vector<Real>& xs, const std::vector<Real>& ys) {
  std::size_t n = xs.size();
  std::vector<std::vector<Real>> a(n, std::vector<Real>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    Real p = 1;
    for (std::size_t j = 0; j < n; ++j) {
      a[i][j] = p;
      p *= xs[i];
    }
    a[i][n] = ys[i];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (boost::multiprecision::abs(a[r][col]) > boost::multiprecision::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    if (a[col][col] == 0) throw Error(ErrorCode::InvalidArgument, "interpolation nodes must be distinct");
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Real factor = a[r][col] / a[col][col];
      for (std::size_t k = col; k <= n; ++k) a[r][k] -= factor * a[col][k];
    }
  }
  std::vector<Real> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i][n] / a[i][i];
  return out;
}

void require_unbiased(const WalkShape& shape) {
  if (!shape.unbiased()) throw Error(ErrorCode::Biased, "shape must have mean zero");
}

// Poisson(lambda) probabilities p[j] at j = first + index, keeping the
// entries above `floor`; `dropped` bounds the omitted mass.
struct PoissonMass {
  long first = 0;
  std::vector<Real> p;
  Real dropped;
};

PoissonMass poisson_mass(const Real& lambda, const Real& floor) {
  long mode = static_cast<long>(boost::multiprecision::floor(lambda).convert_to<double>());
  Real pm = exp(-lambda + Real(mode) * log(lambda) - lgamma(Real(mode + 1)));
  std::vector<Real> up{pm};
  Real p = pm;
  long j = mode;
  while (p >= floor) {
    ++j;
    p *= lambda / j;
    up.push_back(p);
  }
  up.pop_back();
  // Ratios lambda/(j+1) keep shrinking past j, so the tail is geometric.
  Real dropped = p / (1 - lambda / (j + 1));
  std::vector<Real> down;
  p = pm;
  j = mode;
  while (j > 0) {
    p *= Real(j) / lambda;
    --j;
    if (p < floor) {
      dropped += j > 0 ? Real(p / (1 - Real(j) / lambda)) : p;
      break;
    }
    down.push_back(p);
  }
  PoissonMass out;
  out.first = mode - static_cast<long>(down.size());
  out.p.assign(down.rbegin(), down.rend());
  out.p.insert(out.p.end(), up.begin(), up.end());
  out.dropped = dropped;
  return out;
}

}  // namespace

long NormalizedMomentPolynomial::weight(const std::vector<unsigned>& degrees) {
  long w = 0;
  for (std::size_t i = 0; i < degrees.size(); ++i) w += static_cast<long>(i + 1) * degrees[i];
  return w;
}

long NormalizedMomentPolynomial::max_index() const {
  long out = 0;
  for (const auto& [key, c] : terms) out = std::max(out, static_cast<long>(key.size()) + 2);
  return out;
}

std::string NormalizedMomentPolynomial::to_string() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : terms) {
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool constant = key.empty();
    if (mag != 1 || constant) {
      os << format_rational(mag);
      if (!constant) os << "*";
    }
    bool first_factor = true;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] == 0) continue;
      if (!first_factor) os << "*";
      first_factor = false;
      os << "rho" << (i + 3);
      if (key[i] > 1) os << "^" << key[i];
    }
  }
  return os.str();
}

Rational NormalizedMomentPolynomial::evaluate(const MomentVector& J) const {
  Rational total = 0;
  const Rational& j2 = J.J(2);
  for (const auto& [key, c] : terms) {
    long w = weight(key);
    if (w % 2 != 0) throw Error(ErrorCode::InvalidArgument, "odd-weight monomial has an irrational value");
    long r = 0;
    Rational term = c;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] == 0) continue;
      long n = static_cast<long>(i) + 3;
      if (n > J.max_order()) throw Error(ErrorCode::InvalidArgument, "moment vector too short");
      term *= pow(J.J(n), key[i]);
      r += key[i];
    }
    term /= pow(j2, static_cast<unsigned long>(w / 2 + r));
    total += term;
  }
  return total;
}

std::vector<NormalizedMomentPolynomial> symbolic_A(long m) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "order must be nonnegative");
  if (m > kMaxSymbolicOrder) throw Error(ErrorCode::OrderTooLarge, "order above " + std::to_string(kMaxSymbolicOrder));
  std::vector<NormalizedMomentPolynomial> out;
  for (long l = 0; l <= m; ++l) {
    NormalizedMomentPolynomial a;
    std::vector<std::vector<unsigned>> keys;
    std::vector<unsigned> scratch;
    enumerate(2 * l, 1, scratch, keys);
    for (const auto& key : keys) {
      Rational c = monomial_coefficient(key);
      if (c != 0) a.terms[key] = c;
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Rational> evaluate_A(const WalkShape& shape, long m) {
  require_unbiased(shape);
  auto polys = symbolic_A(m);
  MomentVector J = moments(shape, 2 * m + 2);
  std::vector<Rational> out;
  for (const auto& p : polys) out.push_back(p.evaluate(J));
  return out;
}

std::string_view to_string(SignMode mode) { return mode == SignMode::Plain ? "plain" : "alternating"; }

Real AsymptoticExpansion::partial_sum(const Real& s, long order) const {
  Real total = 0;
  Real power = 1 / sqrt_real(s);
  for (long l = 0; l <= order && l < static_cast<long>(coefficients.size()); ++l) {
    Real c = coefficients[static_cast<std::size_t>(l)];
    if (sign_mode == SignMode::Alternating && l % 2 == 1) c = -c;
    total += c * power;
    power /= s;
  }
  return prefactor * total;
}

Real prefactor(const WalkShape& shape) {
  require_unbiased(shape);
  return 1 / sqrt_real(2 * pi_real() * to_real(moments(shape, 2).J(2)));
}

Real alternative_prefactor(const WalkShape& shape) {
  require_unbiased(shape);
  return sqrt_real(to_real(moments(shape, 2).J(2)) / (2 * pi_real()));
}

AsymptoticExpansion expansion(const WalkShape& shape, long m, SignMode mode) {
  AsymptoticExpansion out;
  out.prefactor = prefactor(shape);
  for (const auto& a : evaluate_A(shape, m)) out.coefficients.push_back(to_real(a));
  out.sign_mode = mode;
  return out;
}

long terms_for_L(const Real& s, unsigned bits) {
  if (bits == 0) bits = working_precision();
  double sd = s.convert_to<double>();
  if (sd < 0) throw Error(ErrorCode::InvalidArgument, "s must be nonnegative");
  if (sd == 0) return 0;
  double target = -static_cast<double>(bits) * std::log(2.0) - 1.0;
  long N = static_cast<long>(std::ceil(sd));
  for (;; ++N) {
    double n1 = static_cast<double>(N + 1);
    if (N + 2 <= sd) continue;
    double log_bound = -sd + n1 * std::log(sd) - std::lgamma(n1 + 1) - std::log1p(-sd / (n1 + 1));
    if (log_bound < target) return N;
  }
}

LValue evaluate_L_bounded(const WalkShape& shape, const Real& s, long N_terms) {
  if (s < 0) throw Error(ErrorCode::InvalidArgument, "s must be nonnegative");
  if (N_terms < 0) throw Error(ErrorCode::InvalidArgument, "N_terms must be nonnegative");
  unsigned prec = working_precision();
  if (s == 0) return {Real(1), Real(0)};
  if (Real(N_terms + 2) <= s) throw Error(ErrorCode::TailNotConverged, "N_terms must exceed s");

  Real n1(N_terms + 1);
  Real tail = exp(-s + n1 * log(s) - lgamma(n1 + 1)) / (1 - s / (n1 + 1));
  if (tail >= two_pow(-static_cast<long>(prec)))
    throw Error(ErrorCode::TailNotConverged, "tail bound " + format_real(tail, 6) + " above 2^-" + std::to_string(prec));

  PrecisionScope guard(prec + 32);
  const Real sw = to_working(s);
  Real ulp = two_pow(1 - static_cast<long>(prec + 32));
  if (N_terms <= kExactTermLimit) {
    Rational q = to_rational(s);
    Rational sum = 1;
    Rational term = 1;
    if (N_terms > 0) {
      Spectrum spec = return_probabilities(shape, N_terms);
      for (long n = 1; n <= N_terms; ++n) {
        term *= q;
        term /= n;
        sum += term * spec.I(n);
      }
    }
    Real value = to_real(sum) * exp(-sw);
    return {value, tail + 4 * ulp};
  }

  // The full series equals the probability that the Poissonized walk, with
  // independent Poisson(s kappa_k) counts of each step k, sits at 0.
  Real prune = two_pow(-static_cast<long>(prec + 48));
  Real dropped = 0;
  Real pmf_error = 0;
  long ops = 0;
  auto side = [&](int sign) {
    std::vector<Real> dist{Real(1)};
    long low = 0;
    for (const auto& [k, v] : shape.coeffs()) {
      if (k * sign <= 0) continue;
      long step = k * sign;
      PoissonMass pm = poisson_mass(sw * to_real(v), prune);
      dropped += pm.dropped;
      // Relative error of the masses: the exp/lgamma argument plus the ratio chain.
      Real lambda = sw * to_real(v);
      pmf_error += lambda * (abs(log(lambda)) + 2) + Real(2 * pm.p.size());
      long out_low = low + step * pm.first;
      long out_size = static_cast<long>(dist.size()) - 1 + step * static_cast<long>(pm.p.size() - 1) + 1;
      std::vector<Real> out(static_cast<std::size_t>(out_size), Real(0));
      for (std::size_t j = 0; j < pm.p.size(); ++j) {
        mpfr_ptr pj = pm.p[j].backend().data();
        std::size_t offset = static_cast<std::size_t>(step) * j;
        for (std::size_t i = 0; i < dist.size(); ++i) {
          mpfr_ptr target = out[i + offset].backend().data();
          mpfr_fma(target, dist[i].backend().data(), pj, target, MPFR_RNDN);
        }
        ops += static_cast<long>(dist.size());
      }
      std::size_t first = 0;
      std::size_t last = out.size();
      while (first < last && out[first] < prune) dropped += out[first++];
      while (last > first && out[last - 1] < prune) dropped += out[--last];
      dist.assign(out.begin() + static_cast<std::ptrdiff_t>(first), out.begin() + static_cast<std::ptrdiff_t>(last));
      low = out_low + static_cast<long>(first);
    }
    return std::pair<long, std::vector<Real>>{low, std::move(dist)};
  };
  auto [plow, plus] = side(1);
  auto [mlow, minus] = side(-1);
  Real value = 0;
  for (std::size_t i = 0; i < plus.size(); ++i) {
    long m = plow + static_cast<long>(i);
    if (m < mlow || m >= mlow + static_cast<long>(minus.size())) continue;
    value += plus[i] * minus[static_cast<std::size_t>(m - mlow)];
  }
  Real bound = dropped + (pmf_error + Real(ops + static_cast<long>(plus.size()) + 64)) * ulp;
  return {value, bound};
}

Real evaluate_L(const WalkShape& shape, const Real& s, long N_terms) {
  return evaluate_L_bounded(shape, s, N_terms).value;
}

Real amgm_delta(const WalkShape& shape) {
  Real W = 0;
  for (const auto& [k, v] : shape.coeffs())
    if (k != 0) W += to_real(v);
  Real log_prod = 0;
  for (const auto& [k, v] : shape.coeffs())
    if (k != 0) log_prod += 2 * to_real(v) / W * log(Real(std::labs(k)));
  return W * exp(log_prod) / 2;
}

namespace {

// Tanh-sinh quadrature of f over [a, b].
template <typename F>
Real tanh_sinh(const F& f, const Real& a, const Real& b, unsigned bits) {
  const Real half_pi = pi_real() / 2;
  const Real c = (a + b) / 2;
  const Real d = (b - a) / 2;
  double log_eps = -(static_cast<double>(bits) + 40) * std::log(2.0);
  double t_max = 1;
  while (std::log(M_PI * std::cosh(t_max)) - M_PI * std::sinh(t_max) > log_eps) t_max += 0.125;

  auto node = [&](const Real& t) {
    Real u = half_pi * sinh(t);
    Real ch = cosh(u);
    Real w = half_pi * cosh(t) / (ch * ch);
    return std::pair<Real, Real>{c + d * tanh(u), w};
  };

  Real h = 1;
  Real sum = f(c) * half_pi;
  for (long k = 1; Real(k) * h <= t_max; ++k) {
    auto [xp, w] = node(Real(k) * h);
    auto [xm, w2] = node(-Real(k) * h);
    sum += w * (f(xp) + f(xm));
  }
  Real estimate = d * h * sum;
  Real tol = two_pow(-static_cast<long>(bits) - 4);
  for (int level = 1; level <= 18; ++level) {
    h /= 2;
    for (long k = 1; Real(k) * h <= t_max; k += 2) {
      auto [xp, w] = node(Real(k) * h);
      auto [xm, w2] = node(-Real(k) * h);
      sum += w * (f(xp) + f(xm));
    }
    Real next = d * h * sum;
    Real diff = abs(next - estimate);
    estimate = next;
    if (level >= 3 && diff <= tol * abs(estimate)) return estimate;
  }
  throw Error(ErrorCode::QuadratureFailure, "tanh-sinh did not converge");
}

}  // namespace

Real evaluate_L_tilde(const WalkShape& shape, const Real& s, unsigned precision_bits) {
  require_unbiased(shape);
  if (s <= 0) throw Error(ErrorCode::InvalidArgument, "s must be positive");
  PrecisionScope guard(precision_bits + 32);
  Real sr = to_working(s);
  Real delta = amgm_delta(shape);
  Real sd = sr * delta;
  Real eps = two_pow(-static_cast<long>(precision_bits) - 8);
  Real X = sqrt_real(Real(precision_bits + 8) * log(Real(2)) / sd);
  // Each half-line tail is at most e^{-s delta X^2} / (2 s delta X).
  while (exp(-sd * X * X) / (2 * sd * X) >= eps) X *= Real(5) / 4;

  std::vector<std::pair<long, Real>> terms;
  for (const auto& [k, v] : shape.coeffs()) terms.emplace_back(k, to_real(v));
  auto integrand = [&](const Real& x) {
    Real g = 0;
    for (const auto& [k, v] : terms)
      if (k != 0) g += v * expm1(Real(k) * x);
    return exp(-sr * g);
  };
  Real right = tanh_sinh(integrand, Real(0), X, precision_bits + 16);
  Real left = tanh_sinh(integrand, -X, Real(0), precision_bits + 16);
  return (left + right) / (2 * pi_real());
}

std::string_view to_string(Target t) { return t == Target::L ? "L" : "L_tilde"; }

Real interpolate_at_zero(const std::vector<Real>& xs, const std::vector<Real>& ys) {
  return interpolation_coefficients(xs, ys).at(0);
}

ExpansionReport verify_expansion(const WalkShape& shape, long m, const std::vector<Real>& s_grid, Target target,
                                 unsigned threads) {
  require_unbiased(shape);
  if (s_grid.size() < 3) throw Error(ErrorCode::InvalidArgument, "s_grid needs at least 3 points");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (s_grid[i] <= 0) throw Error(ErrorCode::InvalidArgument, "s_grid must be positive");
    if (i > 0 && s_grid[i] <= s_grid[i - 1]) throw Error(ErrorCode::InvalidArgument, "s_grid must increase");
  }
  ExpansionReport rep;
  rep.target = target;
  rep.m = m;
  rep.precision = working_precision();
  rep.s_grid = s_grid;
  std::vector<Rational> A = evaluate_A(shape, m);

  const std::size_t n = s_grid.size();
  rep.values.assign(n, Real(0));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  unsigned prec = rep.precision;
  auto work = [&] {
    PrecisionScope scope(prec);
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const Real& s = s_grid[i];
        if (target == Target::L)
          rep.values[i] = evaluate_L(shape, s, terms_for_L(s, prec + 16));
        else
          rep.values[i] = evaluate_L_tilde(shape, s, prec);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const bool alternating = target == Target::LTilde;
  rep.candidate_inverse_sqrt = prefactor(shape);
  rep.candidate_sqrt = alternative_prefactor(shape);
  for (long l = 0; l <= m; ++l) {
    Real a = to_real(A[static_cast<std::size_t>(l)]);
    rep.predicted_coefficients.push_back(alternating && l % 2 == 1 ? Real(-a) : a);
  }

  std::vector<Real> xs(n), scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = 1 / s_grid[i];
    scaled[i] = rep.values[i] * sqrt_real(s_grid[i]);
  }
  auto drop_first = [](const std::vector<Real>& v) { return std::vector<Real>(v.begin() + 1, v.end()); };
  rep.fitted_prefactor = interpolate_at_zero(xs, scaled);
  rep.prefactor_error = abs(rep.fitted_prefactor - interpolate_at_zero(drop_first(xs), drop_first(scaled)));
  Real tol = 4 * rep.prefactor_error + two_pow(-40) * abs(rep.fitted_prefactor);
  bool inv = abs(rep.fitted_prefactor - rep.candidate_inverse_sqrt) <= tol;
  bool sq = abs(rep.fitted_prefactor - rep.candidate_sqrt) <= tol;
  rep.prefactor_match = inv && sq ? "both" : inv ? "inverse_sqrt" : sq ? "sqrt" : "neither";

  // With the prefactor P fixed, y = s (F sqrt(s) / P - 1) = c_1 + c_2/s + ...
  const Real& P = rep.candidate_inverse_sqrt;
  rep.fitted_coefficients.push_back(rep.fitted_prefactor / P);
  rep.coefficient_errors.push_back(rep.prefactor_error / P);
  if (m >= 1) {
    std::vector<Real> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = s_grid[i] * (scaled[i] / P - 1);
    auto full = interpolation_coefficients(xs, y);
    auto reduced = interpolation_coefficients(drop_first(xs), drop_first(y));
    for (long l = 1; l <= m; ++l) {
      std::size_t idx = static_cast<std::size_t>(l - 1);
      Real c = idx < full.size() ? full[idx] : Real(0);
      Real err = idx < reduced.size() ? Real(abs(c - reduced[idx])) : Real(abs(c));
      rep.fitted_coefficients.push_back(c);
      rep.coefficient_errors.push_back(err);
    }
  }

  AsymptoticExpansion ex;
  ex.prefactor = P;
  for (const auto& a : A) ex.coefficients.push_back(to_real(a));
  ex.sign_mode = alternating ? SignMode::Alternating : SignMode::Plain;
  rep.pass = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Real& s = s_grid[i];
    Real r = (rep.values[i] - ex.partial_sum(s, m)) * pow_int(s, m) * sqrt_real(s);
    rep.residuals.push_back(r);
    if (i > 0 && abs(r) >= abs(rep.residuals[i - 1])) rep.pass = false;
  }
  return rep;
}

}  // namespace walkspec
