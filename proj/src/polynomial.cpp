#include "walkspec/polynomial.hpp"

#include <algorithm>
#include <utility>

namespace walkspec {

QPoly::QPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

QPoly::QPoly(std::initializer_list<Rational> coeffs) : coeffs_(coeffs) { trim(); }

QPoly QPoly::monomial(const Rational& c, std::size_t degree) {
  std::vector<Rational> coeffs(degree + 1);
  coeffs[degree] = c;
  return QPoly(std::move(coeffs));
}

void QPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

const Rational& QPoly::leading() const {
  if (coeffs_.empty()) throw Error(ErrorCode::InvalidArgument, "zero polynomial has no leading coefficient");
  return coeffs_.back();
}

Rational QPoly::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Real QPoly::operator()(const Real& x) const {
  Real acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_real(*it);
  return acc;
}

QPoly QPoly::derivative() const {
  if (coeffs_.size() <= 1) return QPoly();
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<long>(i);
  return QPoly(std::move(d));
}

QPoly QPoly::monic() const {
  if (is_zero()) return *this;
  Rational lc = leading();
  std::vector<Rational> c(coeffs_);
  for (auto& x : c) x /= lc;
  return QPoly(std::move(c));
}

QPoly operator+(const QPoly& a, const QPoly& b) {
  std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
  return QPoly(std::move(c));
}

QPoly operator-(const QPoly& a) {
  std::vector<Rational> c(a.coeffs_);
  for (auto& x : c) x = -x;
  return QPoly(std::move(c));
}

QPoly operator-(const QPoly& a, const QPoly& b) { return a + (-b); }

QPoly operator*(const QPoly& a, const QPoly& b) {
  if (a.is_zero() || b.is_zero()) return QPoly();
  std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return QPoly(std::move(c));
}

QPoly operator*(const Rational& k, const QPoly& a) {
  std::vector<Rational> c(a.coeffs_);
  for (auto& x : c) x *= k;
  return QPoly(std::move(c));
}

DivMod divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw Error(ErrorCode::InvalidArgument, "polynomial division by zero");
  std::vector<Rational> rem(a.coeffs());
  long db = b.degree();
  long da = a.degree();
  if (da < db) return {QPoly(), a};
  std::vector<Rational> quot(static_cast<std::size_t>(da - db + 1));
  const Rational& lc = b.leading();
  for (long i = da; i >= db; --i) {
    Rational factor = rem[static_cast<std::size_t>(i)] / lc;
    quot[static_cast<std::size_t>(i - db)] = factor;
    if (factor == 0) continue;
    for (long j = 0; j <= db; ++j) {
      rem[static_cast<std::size_t>(i - db + j)] -= factor * b.coeff(static_cast<std::size_t>(j));
    }
  }
  rem.resize(static_cast<std::size_t>(db));
  return {QPoly(std::move(quot)), QPoly(std::move(rem))};
}

QPoly gcd(const QPoly& a, const QPoly& b) {
  QPoly x = a;
  QPoly y = b;
  while (!y.is_zero()) {
    QPoly r = divmod(x, y).remainder;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

QPoly squarefree_part(const QPoly& p) {
  if (p.degree() <= 0) return p;
  QPoly g = gcd(p, p.derivative());
  return divmod(p, g).quotient;
}

bool is_squarefree(const QPoly& p) {
  if (p.degree() <= 0) return true;
  return gcd(p, p.derivative()).degree() == 0;
}

std::vector<QPoly> sturm_sequence(const QPoly& p) {
  std::vector<QPoly> seq;
  if (p.is_zero()) return seq;
  seq.push_back(p);
  QPoly d = p.derivative();
  while (!d.is_zero()) {
    seq.push_back(d);
    QPoly r = divmod(seq[seq.size() - 2], seq.back()).remainder;
    d = -r;
  }
  return seq;
}

namespace {

int sign_variations(const std::vector<QPoly>& sturm, const Rational& x) {
  int variations = 0;
  int last = 0;
  for (const auto& q : sturm) {
    int s = sgn(q(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++variations;
    last = s;
  }
  return variations;
}

}  // namespace

int count_real_roots(const std::vector<QPoly>& sturm, const Rational& lo, const Rational& hi) {
  if (sturm.empty()) return 0;
  return sign_variations(sturm, lo) - sign_variations(sturm, hi);
}

Rational cauchy_bound(const QPoly& p) {
  if (p.degree() <= 0) return Rational(1);
  Rational lc = abs(p.leading());
  Rational m = 0;
  for (long i = 0; i < p.degree(); ++i) {
    Rational r = abs(p.coeff(static_cast<std::size_t>(i))) / lc;
    if (r > m) m = r;
  }
  return m + 1;
}

std::vector<RootInterval> isolate_real_roots(const QPoly& p, const Rational& lo, const Rational& hi) {
  std::vector<RootInterval> out;
  if (p.degree() <= 0) return out;
  QPoly sf = squarefree_part(p);
  auto sturm = sturm_sequence(sf);
  std::vector<std::pair<Rational, Rational>> stack{{lo, hi}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    int c = count_real_roots(sturm, a, b);
    if (c == 0) continue;
    if (c == 1) {
      if (sf(b) == 0) {
        out.push_back({b, b, true});
      } else {
        out.push_back({a, b, false});
      }
      continue;
    }
    Rational mid = (a + b) / 2;
    stack.emplace_back(mid, b);
    stack.emplace_back(a, mid);
  }
  std::sort(out.begin(), out.end(), [](const RootInterval& x, const RootInterval& y) { return x.hi < y.hi; });
  return out;
}

RootInterval refine_root(const QPoly& squarefree, RootInterval interval, unsigned bits) {
  if (interval.exact) return interval;
  auto sturm = sturm_sequence(squarefree);
  Rational width_limit = 1;
  mpq_div_2exp(width_limit.get_mpq_t(), width_limit.get_mpq_t(), bits);
  while (interval.hi - interval.lo >= width_limit) {
    Rational mid = (interval.lo + interval.hi) / 2;
    if (squarefree(mid) == 0) return {mid, mid, true};
    if (count_real_roots(sturm, interval.lo, mid) == 1) {
      interval.hi = mid;
    } else {
      interval.lo = mid;
    }
  }
  return interval;
}

std::optional<Rational> rational_root_in(const QPoly& p, const RootInterval& interval) {
  if (interval.exact) return interval.lo;
  Rational candidate = simplest_rational_between(interval.lo, interval.hi);
  if (p(candidate) == 0) return candidate;
  return std::nullopt;
}

Rational resultant(const QPoly& a, const QPoly& b) {
  if (a.is_zero() || b.is_zero()) return Rational(0);
  const auto m = static_cast<std::size_t>(a.degree());
  const auto n = static_cast<std::size_t>(b.degree());
  const std::size_t size = m + n;
  if (size == 0) return Rational(1);
  std::vector<std::vector<Rational>> mat(size, std::vector<Rational>(size));
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t j = 0; j <= m; ++j) mat[row][row + j] = a.coeff(m - j);
  }
  for (std::size_t row = 0; row < m; ++row) {
    for (std::size_t j = 0; j <= n; ++j) mat[n + row][row + j] = b.coeff(n - j);
  }
  Rational det = 1;
  for (std::size_t col = 0; col < size; ++col) {
    std::size_t pivot = col;
    while (pivot < size && mat[pivot][col] == 0) ++pivot;
    if (pivot == size) return Rational(0);
    if (pivot != col) {
      std::swap(mat[pivot], mat[col]);
      det = -det;
    }
    det *= mat[col][col];
    for (std::size_t r = col + 1; r < size; ++r) {
      if (mat[r][col] == 0) continue;
      Rational f = mat[r][col] / mat[col][col];
      for (std::size_t c = col; c < size; ++c) mat[r][c] -= f * mat[col][c];
    }
  }
  return det;
}

QPoly interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidArgument, "interpolate: size mismatch");
  const std::size_t n = xs.size();
  std::vector<Rational> dd(ys);
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
      if (i == level) break;
    }
  }
  QPoly result;
  for (std::size_t i = n; i-- > 0;) {
    result = result * QPoly{-xs[i], Rational(1)} + QPoly{dd[i]};
  }
  return result;
}

}  // namespace walkspec
