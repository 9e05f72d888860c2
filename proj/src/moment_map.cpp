#include "walkspec/moment_map.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include <boost/math/constants/constants.hpp>

#include "walkspec/spectrum.hpp"

namespace walkspec {

bool ParameterPoint::in_simplex() const {
  for (const auto& k : kappas)
    if (k < 0) return false;
  return kappas.front() > 0 && kappas.back() > 0;
}

bool ParameterPoint::on_slice() const {
  Rational mass = 0, first = 0;
  for (long k = -e; k <= f; ++k) {
    mass += kappa(k);
    first += k * kappa(k);
  }
  return mass == 1 && first == 0;
}

std::optional<WalkShape> ParameterPoint::shape() const {
  if (!in_simplex() || !on_slice()) return std::nullopt;
  std::map<long, Rational> c;
  for (long k = -e; k <= f; ++k)
    if (kappa(k) != 0) c[k] = kappa(k);
  return WalkShape::create(std::move(c));
}

ParameterPoint to_point(const WalkShape& shape) {
  ParameterPoint p;
  p.e = shape.e();
  p.f = shape.f();
  for (long k = -p.e; k <= p.f; ++k) p.kappas.push_back(shape.coeff(k));
  return p;
}

namespace {

Rational dyadic(double x) {
  constexpr long kScale = 1L << 20;
  return ratio(std::lround(x * kScale), kScale);
}

}  // namespace

ParameterPoint sample(long e, long f, std::uint64_t seed, bool simplex_only) {
  if (e < 1 || f < 1) throw Error(ErrorCode::InvalidArgument, "e and f must be at least 1");
  std::mt19937_64 gen(splitmix64(seed));
  std::exponential_distribution<double> spacing(1.0);
  ParameterPoint p;
  p.e = e;
  p.f = f;
  Rational first = 0;
  for (long k = -e; k <= f; ++k) {
    Rational x = std::max(dyadic(spacing(gen)), ratio(1, 1L << 20));
    p.kappas.push_back(x);
    first += k * x;
  }
  // Move mass onto an extreme until the mean vanishes.
  if (first > 0) p.kappas.front() += first / e;
  else p.kappas.back() -= first / f;
  Rational total = std::accumulate(p.kappas.begin(), p.kappas.end(), Rational(0));
  for (auto& x : p.kappas) x /= total;
  if (simplex_only) return p;
  std::normal_distribution<double> step(0.0, 1.0 / static_cast<double>(e + f + 1));
  RationalMatrix basis = tangent_basis(e, f);
  for (const auto& v : basis) {
    Rational g = dyadic(step(gen));
    for (std::size_t i = 0; i < v.size(); ++i) p.kappas[i] += g * v[i];
  }
  return p;
}

namespace {

// Laurent coefficients of chi^n for n = 0..N; entry n has offset -n e.
std::vector<std::vector<Rational>> powers(const ParameterPoint& p, long N) {
  std::vector<std::vector<Rational>> out;
  out.push_back({Rational(1)});
  for (long n = 1; n <= N; ++n) {
    const auto& prev = out.back();
    std::vector<Rational> next(prev.size() + p.kappas.size() - 1, Rational(0));
    for (std::size_t i = 0; i < prev.size(); ++i) {
      if (prev[i] == 0) continue;
      for (std::size_t j = 0; j < p.kappas.size(); ++j)
        if (p.kappas[j] != 0) next[i + j] += prev[i] * p.kappas[j];
    }
    out.push_back(std::move(next));
  }
  return out;
}

Rational laurent_coeff(const std::vector<Rational>& c, long n, long e, long exponent) {
  long idx = exponent + n * e;
  if (idx < 0 || idx >= static_cast<long>(c.size())) return Rational(0);
  return c[static_cast<std::size_t>(idx)];
}

}  // namespace

std::vector<Rational> moment_values(const ParameterPoint& p, long N) {
  auto pw = powers(p, N);
  std::vector<Rational> out;
  for (long n = 1; n <= N; ++n) out.push_back(laurent_coeff(pw[static_cast<std::size_t>(n)], n, p.e, 0));
  return out;
}

RationalMatrix tangent_basis(long e, long f) {
  RationalMatrix out;
  for (long k = -e; k <= f; ++k) {
    if (k == 0 || k == 1) continue;
    std::vector<Rational> v(static_cast<std::size_t>(e + f + 1), Rational(0));
    v[static_cast<std::size_t>(k + e)] = 1;
    v[static_cast<std::size_t>(e)] = k - 1;
    v[static_cast<std::size_t>(1 + e)] = -k;
    out.push_back(std::move(v));
  }
  return out;
}

RationalMatrix full_jacobian(const ParameterPoint& p, long N) {
  auto pw = powers(p, N);
  RationalMatrix J;
  for (long n = 1; n <= N; ++n) {
    std::vector<Rational> row;
    for (long k = -p.e; k <= p.f; ++k)
      row.push_back(n * laurent_coeff(pw[static_cast<std::size_t>(n - 1)], n - 1, p.e, -k));
    J.push_back(std::move(row));
  }
  return J;
}

RationalMatrix moment_jacobian(const ParameterPoint& p, long N) {
  if (N < p.e + p.f - 1) throw Error(ErrorCode::InvalidArgument, "need at least e+f-1 moments");
  RationalMatrix J = full_jacobian(p, N);
  RationalMatrix basis = tangent_basis(p.e, p.f);
  RationalMatrix out;
  for (const auto& row : J) {
    std::vector<Rational> r;
    for (const auto& v : basis) {
      Rational s = 0;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) s += row[i] * v[i];
      r.push_back(s);
    }
    out.push_back(std::move(r));
  }
  return out;
}

long rank(RationalMatrix m) {
  long r = 0;
  if (m.empty()) return 0;
  const std::size_t cols = m.front().size();
  for (std::size_t c = 0; c < cols && r < static_cast<long>(m.size()); ++c) {
    std::size_t pivot = static_cast<std::size_t>(r);
    while (pivot < m.size() && m[pivot][c] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[pivot], m[static_cast<std::size_t>(r)]);
    const auto& pr = m[static_cast<std::size_t>(r)];
    for (std::size_t i = static_cast<std::size_t>(r) + 1; i < m.size(); ++i) {
      if (m[i][c] == 0) continue;
      Rational factor = m[i][c] / pr[c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= factor * pr[j];
    }
    ++r;
  }
  return r;
}

std::string_view to_string(MorseVerdict v) {
  switch (v) {
    case MorseVerdict::Transposition: return "Transposition";
    case MorseVerdict::Degenerate: return "Degenerate";
    case MorseVerdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

struct Complex {
  Real re, im;
};

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
Complex operator/(const Complex& a, const Complex& b) {
  Real d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
Real norm(const Complex& a) { return sqrt(a.re * a.re + a.im * a.im); }

// p(z) and p'(z) by Horner.
std::pair<Complex, Complex> horner(const std::vector<Real>& c, const Complex& z) {
  Complex v{Real(0), Real(0)}, d{Real(0), Real(0)};
  for (std::size_t i = c.size(); i-- > 0;) {
    d = d * z + v;
    v = v * z + Complex{c[i], Real(0)};
  }
  return {v, d};
}

// All complex roots of a squarefree polynomial (Aberth iteration).
std::vector<Complex> aberth(const QPoly& p) {
  std::vector<Real> c;
  for (const auto& q : p.coeffs()) c.push_back(to_real(q / p.leading()));
  const std::size_t n = c.size() - 1;
  const Real bound = to_real(cauchy_bound(p));
  const Real pi = boost::math::constants::pi<Real>();
  std::vector<Complex> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    Real angle = 2 * pi * Real(static_cast<long>(k)) / static_cast<long>(n) + Real(0.4);
    z[k] = {bound / 2 * cos(angle), bound / 2 * sin(angle)};
  }
  const Real eps = pow_int(Real(2), 8 - static_cast<long>(working_precision()));
  const long limit = 50 * static_cast<long>(working_precision());
  for (long iter = 0; iter < limit; ++iter) {
    Real worst = 0;
    for (std::size_t k = 0; k < n; ++k) {
      auto [v, d] = horner(c, z[k]);
      if (norm(v) == 0) continue;
      Complex w = v / d;
      Complex sum{Real(0), Real(0)};
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) sum = sum + Complex{Real(1), Real(0)} / (z[k] - z[j]);
      Complex step = w / (Complex{Real(1), Real(0)} - w * sum);
      z[k] = z[k] - step;
      Real size = norm(z[k]);
      Real rel = norm(step) / (size > 1 ? size : Real(1));
      if (rel > worst) worst = rel;
    }
    if (worst < eps) return z;
  }
  throw Error(ErrorCode::PrecisionExhausted, "critical points did not converge");
}

}  // namespace

MorseCertificate morse_certificate(const ParameterPoint& p, unsigned precision_bits) {
  if (p.e < 1 || p.f < 1 || p.kappas.front() == 0 || p.kappas.back() == 0)
    throw Error(ErrorCode::InvalidArgument, "point needs nonzero extremes with e, f >= 1");
  PrecisionScope scope(precision_bits);
  MorseCertificate cert;
  // t^{e+1} chi'(t) = sum k kappa_k t^{k+e}; t^e chi(t) = sum kappa_k t^{k+e}.
  std::vector<Rational> dc, nc;
  for (long k = -p.e; k <= p.f; ++k) {
    dc.push_back(k * p.kappa(k));
    nc.push_back(p.kappa(k));
  }
  QPoly P(dc), N(nc);
  cert.critical_polynomial = P;
  cert.nondegenerate = is_squarefree(P);
  // R(v) = Res_t(P, N - v t^e) has the critical values as roots; it has
  // degree deg P in v, so deg P + 1 samples determine it.
  std::vector<Rational> xs, ys;
  for (long v = 0; v <= P.degree(); ++v) {
    xs.push_back(Rational(v));
    ys.push_back(resultant(P, N - QPoly::monomial(Rational(v), static_cast<std::size_t>(p.e))));
  }
  cert.value_polynomial = interpolate(xs, ys);
  cert.distinct_values = !cert.value_polynomial.is_zero() && cert.value_polynomial.degree() == P.degree() &&
                         is_squarefree(cert.value_polynomial);
  if (cert.value_polynomial.is_zero()) cert.verdict = MorseVerdict::Inconclusive;
  else if (cert.nondegenerate && cert.distinct_values) cert.verdict = MorseVerdict::Transposition;
  else cert.verdict = MorseVerdict::Degenerate;

  QPoly sf = squarefree_part(P);
  std::vector<Real> sc;
  for (const auto& q : sf.coeffs()) sc.push_back(to_real(q));
  for (const auto& z : aberth(sf)) {
    CriticalPoint cp;
    cp.re = z.re;
    cp.im = z.im;
    auto [v, d] = horner(sc, z);
    cp.radius = norm(d) == 0 ? Real(-1) : Real(sf.degree() * norm(v) / norm(d));
    Complex value{Real(0), Real(0)};
    Complex zi = Complex{Real(1), Real(0)} / z;
    for (long k = -p.e; k <= p.f; ++k) {
      Complex term{to_real(p.kappa(k)), Real(0)};
      const Complex& base = k < 0 ? zi : z;
      for (long j = 0; j < std::labs(k); ++j) term = term * base;
      value = value + term;
    }
    cp.value_re = value.re;
    cp.value_im = value.im;
    cert.critical_points.push_back(cp);
  }
  std::sort(cert.critical_points.begin(), cert.critical_points.end(), [](const auto& a, const auto& b) {
    return a.re != b.re ? a.re < b.re : a.im < b.im;
  });
  return cert;
}

MorseCertificate morse_certificate(const WalkShape& shape, unsigned precision_bits) {
  return morse_certificate(to_point(shape), precision_bits);
}

namespace {

ParameterPoint from_numerator(const QPoly& h, long e) {
  ParameterPoint p;
  p.e = e;
  p.f = h.degree() - e;
  for (long k = -e; k <= p.f; ++k) p.kappas.push_back(h.coeff(static_cast<std::size_t>(k + e)));
  p.kappas[static_cast<std::size_t>(e)] += 1 - h(Rational(1));
  return p;
}

}  // namespace

std::vector<ParameterPoint> excluded_locus_examples() {
  // For h = (t-2)^2 (t-3)^2 and for h = (t-2)^3, chi'(1) = 0 with
  // P = t + beta forces 1 + beta = 1/(3 + e).
  QPoly two{Rational(-2), Rational(1)}, three{Rational(-3), Rational(1)};
  QPoly double_zeros = two * two * three * three * QPoly{ratio(-4, 5), Rational(1)};
  QPoly triple_zero = two * two * two * QPoly{ratio(-3, 4), Rational(1)};
  return {from_numerator(double_zeros, 2), from_numerator(triple_zero, 1)};
}

namespace {

WalkShape primitive(const WalkShape& shape) {
  long g = support_gcd(shape).get_si();
  if (g <= 1) return shape;
  std::map<long, Rational> c;
  for (const auto& [k, v] : shape.coeffs()) c[k / g] = v;
  return WalkShape::create(std::move(c));
}

}  // namespace

std::optional<std::string> explain_pair(const WalkShape& a, const WalkShape& b, unsigned precision_bits) {
  switch (equivalent(a, b)) {
    case Equivalence::Identical: return std::string("identical");
    case Equivalence::Reflected: return std::string("reflection");
    case Equivalence::No: break;
  }
  WalkShape pa = primitive(a), pb = primitive(b);
  std::string prefix;
  if (!(pa == a && pb == b)) {
    prefix = "reindexing";
    switch (equivalent(pa, pb)) {
      case Equivalence::Identical: return prefix;
      case Equivalence::Reflected: return prefix + " and reflection";
      case Equivalence::No: break;
    }
    prefix += ", then ";
  }
  for (const auto& eq : scale_equivalents(pa, precision_bits)) {
    if (!eq.exact_shape || !eq.exact_lambda) continue;
    Equivalence rel = equivalent(*eq.exact_shape, pb);
    if (rel == Equivalence::No) continue;
    std::string text = prefix + "rescaling by lambda = " + format_rational(*eq.exact_lambda);
    if (rel == Equivalence::Reflected) text += " and reflection";
    return text;
  }
  return std::nullopt;
}

namespace {

Integer binomial(long n, long k) {
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

struct GridShape {
  WalkShape shape;
  long block;
};

// Every composition of d into parts a_{-e..f} with positive extremes.
void compositions(long d, long slots, std::vector<long>& parts, const std::function<void()>& visit) {
  long used = std::accumulate(parts.begin(), parts.end(), 0L);
  std::size_t i = parts.size();
  if (static_cast<long>(i) == slots - 1) {
    long last = d - used;
    if (last < 1) return;
    parts.push_back(last);
    visit();
    parts.pop_back();
    return;
  }
  for (long a = i == 0 ? 1 : 0; used + a <= d - 1; ++a) {
    parts.push_back(a);
    compositions(d, slots, parts, visit);
    parts.pop_back();
  }
}

}  // namespace

std::uint64_t search_cells(const SearchOptions& o) {
  const long slots = o.e + o.f + 1;
  Integer total = 0;
  // Compositions of d with two positive extremes: C(d - 2 + slots - 1, slots - 1).
  for (long d = 2; d <= o.denominator_bound; ++d) total += binomial(d - 2 + slots - 1, slots - 1);
  return total.fits_ulong_p() ? total.get_ui() : UINT64_MAX;
}

SearchResult search_isospectral(const SearchOptions& o) {
  if (o.e < 1 || o.f < 1 || o.moments < 1 || o.denominator_bound < 1)
    throw Error(ErrorCode::InvalidArgument, "search needs e, f, moments and the denominator bound >= 1");
  std::uint64_t cells = search_cells(o);
  if (cells > o.max_cells)
    throw Error(ErrorCode::SearchSpaceTooLarge,
                std::to_string(cells) + " grid cells exceed the limit of " + std::to_string(o.max_cells));
  const long slots = o.e + o.f + 1;
  std::vector<GridShape> grid;
  for (long d = 2; d <= o.denominator_bound; ++d) {
    std::vector<long> parts;
    compositions(d, slots, parts, [&] {
      long g = d, first = 0;
      for (long i = 0; i < slots; ++i) {
        g = std::gcd(g, parts[static_cast<std::size_t>(i)]);
        first += (i - o.e) * parts[static_cast<std::size_t>(i)];
      }
      if (g != 1) return;
      if (!o.biased && first != 0) return;
      std::map<long, Rational> c;
      for (long i = 0; i < slots; ++i)
        if (parts[static_cast<std::size_t>(i)] != 0) c[i - o.e] = ratio(parts[static_cast<std::size_t>(i)], d);
      grid.push_back({WalkShape::create(std::move(c)), d});
    });
  }

  std::vector<std::vector<Rational>> spectra(grid.size());
  const unsigned threads = std::max(1u, o.threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < grid.size(); i += threads)
        spectra[i] = return_probabilities(grid[i].shape, o.moments).values;
    });
  }
  for (auto& th : pool) th.join();

  std::map<std::vector<Rational>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < grid.size(); ++i) groups[spectra[i]].push_back(i);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [key, members] : groups)
    for (std::size_t x = 0; x < members.size(); ++x)
      for (std::size_t y = x + 1; y < members.size(); ++y) pairs.emplace_back(members[x], members[y]);
  std::sort(pairs.begin(), pairs.end());

  SearchResult out;
  out.shapes = grid.size();
  for (const auto& [i, j] : pairs) {
    long block = std::max(grid[i].block, grid[j].block);
    if (block < o.start_block) continue;
    SearchPair pair{grid[i].shape, grid[j].shape, block, explain_pair(grid[i].shape, grid[j].shape, o.precision_bits)};
    (pair.explanation ? out.explained : out.candidates).push_back(std::move(pair));
  }
  auto by_block = [](const SearchPair& a, const SearchPair& b) { return a.block < b.block; };
  std::stable_sort(out.candidates.begin(), out.candidates.end(), by_block);
  std::stable_sort(out.explained.begin(), out.explained.end(), by_block);
  return out;
}

}  // namespace walkspec
