#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace walkspec {

/// Dense Laurent polynomial sum_{i} c[i] t^{low + i}.
template <typename T>
struct Laurent {
  long low = 0;
  std::vector<T> c;

  long high() const { return low + static_cast<long>(c.size()) - 1; }
  bool empty() const { return c.empty(); }

  T coeff(long k) const {
    if (k < low || k > high()) return T(0);
    return c[static_cast<std::size_t>(k - low)];
  }

  /// Product restricted to exponents in [keep_low, keep_high].
  Laurent multiply(const Laurent& other, long keep_low, long keep_high) const {
    Laurent out;
    if (empty() || other.empty()) return out;
    long lo = std::max(low + other.low, keep_low);
    long hi = std::min(high() + other.high(), keep_high);
    if (lo > hi) return out;
    out.low = lo;
    out.c.assign(static_cast<std::size_t>(hi - lo + 1), T(0));
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 0) continue;
      long ei = low + static_cast<long>(i);
      for (std::size_t j = 0; j < other.c.size(); ++j) {
        long k = ei + other.low + static_cast<long>(j);
        if (k < lo || k > hi) continue;
        out.c[static_cast<std::size_t>(k - lo)] += c[i] * other.c[j];
      }
    }
    return out;
  }

  Laurent operator*(const Laurent& other) const {
    return multiply(other, low + other.low, high() + other.high());
  }
};

}  // namespace walkspec
