#include "walkspec/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <thread>

namespace walkspec {

namespace {

// Exponents that can still return to 0 within `remaining` further steps.
std::pair<long, long> reachable_window(const WalkShape& shape, long remaining) {
  return {-remaining * shape.f(), remaining * shape.e()};
}

}  // namespace

Spectrum return_probabilities(const WalkShape& shape, long N) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be at least 1");
  Spectrum out;
  out.start = 1;
  out.values.reserve(static_cast<std::size_t>(N));
  const Laurent<Rational> step = shape.laurent();
  Laurent<Rational> power;
  power.low = 0;
  power.c = {Rational(1)};
  for (long n = 1; n <= N; ++n) {
    auto [lo, hi] = reachable_window(shape, N - n);
    power = power.multiply(step, lo, hi);
    out.values.push_back(power.coeff(0));
  }
  return out;
}

ApproximateSpectrum approximate_return_probabilities(const WalkShape& shape, long N, const Real& prune_below) {
  ApproximateSpectrum out;
  out.values.reserve(static_cast<std::size_t>(N + 1));
  out.values.emplace_back(1);
  out.dropped_mass = 0;
  Laurent<Real> step;
  step.low = -shape.e();
  step.c.assign(static_cast<std::size_t>(shape.degree() + 1), Real(0));
  for (const auto& [k, v] : shape.coeffs()) step.c[static_cast<std::size_t>(k + shape.e())] = to_real(v);
  Laurent<Real> power;
  power.low = 0;
  power.c = {Real(1)};
  for (long n = 1; n <= N; ++n) {
    auto [lo, hi] = reachable_window(shape, N - n);
    power = power.multiply(step, lo, hi);
    // Trim negligible tails from both ends; the trimmed mass is accounted.
    std::size_t first = 0;
    std::size_t last = power.c.size();
    while (first < last && power.low + static_cast<long>(first) < 0 && power.c[first] < prune_below) {
      out.dropped_mass += power.c[first];
      ++first;
    }
    while (last > first && power.low + static_cast<long>(last) - 1 > 0 && power.c[last - 1] < prune_below) {
      out.dropped_mass += power.c[last - 1];
      --last;
    }
    if (first > 0 || last < power.c.size()) {
      std::vector<Real> kept(power.c.begin() + static_cast<std::ptrdiff_t>(first),
                             power.c.begin() + static_cast<std::ptrdiff_t>(last));
      power.low += static_cast<long>(first);
      power.c = std::move(kept);
    }
    out.values.push_back(power.coeff(0));
  }
  // Nonnegative sums: relative error per step at most (degree + 2) ulps.
  Real ulp = pow_int(Real(2), 1 - static_cast<long>(working_precision()));
  out.rounding_bound = Real(N) * Real(shape.degree() + 2) * ulp;
  return out;
}

SpectrumComparison isospectral_through(const WalkShape& a, const WalkShape& b, long N) {
  Spectrum sa = return_probabilities(a, N);
  Spectrum sb = return_probabilities(b, N);
  for (long n = 1; n <= N; ++n) {
    if (sa.I(n) != sb.I(n)) return {false, n, sa.I(n), sb.I(n)};
  }
  return {};
}

namespace {

class StepSampler {
 public:
  explicit StepSampler(const WalkShape& shape) {
    double acc = 0;
    for (const auto& [k, v] : shape.coeffs()) {
      acc += v.get_d();
      steps_.push_back(k);
      cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
  }

  long draw(std::mt19937_64& gen) const {
    double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return steps_[static_cast<std::size_t>(it - cdf_.begin())];
  }

 private:
  std::vector<long> steps_;
  std::vector<double> cdf_;
};

std::vector<std::uint64_t> run_shard(const StepSampler& sampler, long N, std::uint64_t count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(N), 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    long pos = 0;
    for (long n = 1; n <= N; ++n) {
      pos += sampler.draw(gen);
      if (pos == 0) ++hits[static_cast<std::size_t>(n - 1)];
    }
  }
  return hits;
}

}  // namespace

EmpiricalSpectrum simulate(const WalkShape& shape, long N, std::uint64_t samples, std::uint64_t seed,
                           const SimulationOptions& options) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be at least 1");
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be at least 1");
  const StepSampler sampler(shape);
  const std::uint64_t shard_size = EmpiricalSpectrum::kShardSize;
  const std::uint64_t shards = (samples + shard_size - 1) / shard_size;
  std::vector<std::vector<std::uint64_t>> shard_hits(shards);
  auto work = [&](std::uint64_t first_shard, std::uint64_t stride) {
    for (std::uint64_t s = first_shard; s < shards; s += stride) {
      std::uint64_t count = std::min(shard_size, samples - s * shard_size);
      shard_hits[s] = run_shard(sampler, N, count, splitmix64(seed ^ splitmix64(s)));
    }
  };
  unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(shards)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }

  EmpiricalSpectrum out;
  out.seed = seed;
  out.samples = samples;
  out.degenerate = samples == 1;
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(N), 0);
  for (const auto& h : shard_hits) {
    for (std::size_t i = 0; i < h.size(); ++i) hits[i] += h[i];
  }
  for (long n = 1; n <= N; ++n) {
    double p = static_cast<double>(hits[static_cast<std::size_t>(n - 1)]) / static_cast<double>(samples);
    out.estimates.push_back(p);
    out.standard_errors.push_back(std::sqrt(p * (1 - p) / static_cast<double>(samples)));
  }

  // Return-set estimator from one long trajectory. Time 0 counts as a
  // return (the walk starts at the origin).
  const std::uint64_t T = options.trajectory_length ? options.trajectory_length : samples;
  out.trajectory_length = T;
  std::mt19937_64 gen(splitmix64(~seed));
  std::vector<bool> at_origin(T + 1, false);
  at_origin[0] = true;
  long pos = 0;
  for (std::uint64_t m = 1; m <= T; ++m) {
    pos += sampler.draw(gen);
    at_origin[m] = (pos == 0);
  }
  std::uint64_t denominator = 0;
  for (std::uint64_t m = 1; m <= T; ++m) denominator += at_origin[m];
  out.returns_observed = denominator;
  for (long n = 1; n <= N; ++n) {
    std::uint64_t numerator = 0;
    for (std::uint64_t m = static_cast<std::uint64_t>(n); m <= T; ++m) {
      if (at_origin[m] && at_origin[m - static_cast<std::uint64_t>(n)]) ++numerator;
    }
    double p = denominator ? static_cast<double>(numerator) / static_cast<double>(denominator) : 0.0;
    out.return_set_estimates.push_back(p);
    out.return_set_errors.push_back(denominator ? std::sqrt(p * (1 - p) / static_cast<double>(denominator)) : 0.0);
  }
  return out;
}

U1InvariantDims u1_invariant_dims(const WalkShape& shape, long N) {
  U1InvariantDims out;
  out.d = 1;
  for (const auto& [k, v] : shape.coeffs()) out.d = lcm(out.d, v.get_den());
  Spectrum spec = return_probabilities(shape, N);
  Rational scale = 1;
  for (long n = 1; n <= N; ++n) {
    scale *= out.d;
    Rational dim = spec.I(n) * scale;
    if (dim.get_den() != 1) {
      throw Error(ErrorCode::Inconsistent, "invariant dimension is not an integer at n=" + std::to_string(n));
    }
    out.dims.push_back(dim.get_num());
  }
  return out;
}

std::string_view to_string(BiasVerdict v) {
  return v == BiasVerdict::ConsistentWithUnbiased ? "ConsistentWithUnbiased" : "SuggestsBiased";
}

namespace {

// Least squares for y ~ a + b/s + c s.
std::optional<std::array<double, 3>> fit_three(const std::vector<double>& s, const std::vector<double>& y) {
  std::array<std::array<double, 4>, 3> m{};
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::array<double, 3> basis{1.0, 1.0 / s[i], s[i]};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
      m[r][3] += basis[r] * y[i];
    }
  }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
    }
    if (std::fabs(m[pivot][col]) < 1e-300) return std::nullopt;
    std::swap(m[pivot], m[col]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      double factor = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  return std::array<double, 3>{m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

}  // namespace

BiasDiagnostic bias_diagnostic(const Spectrum& spectrum, unsigned precision_bits) {
  if (spectrum.size() < 8 || spectrum.start != 1) {
    throw Error(ErrorCode::InsufficientData, "bias diagnostic needs I_1..I_8 at least");
  }
  PrecisionScope scope(precision_bits);
  BiasDiagnostic out;
  bool all_zero = std::all_of(spectrum.values.begin(), spectrum.values.end(), [](const Rational& q) { return q == 0; });
  if (all_zero) {
    out.verdict = BiasVerdict::SuggestsBiased;
    out.evidence = "none: spectrum vanishes identically";
    return out;
  }
  const long N = spectrum.size();
  // Keep the truncated Poisson tail negligible: s <= N/4.
  const double s_max = static_cast<double>(N) / 4.0;
  const double s_min = std::max(0.5, s_max / 4.0);
  const int points = 12;
  std::vector<double> s_values;
  std::vector<double> y_values;
  for (int i = 0; i < points; ++i) {
    double s = s_min + (s_max - s_min) * i / (points - 1);
    Real sr(s);
    Real term = 1;
    Real sum = 1;
    for (long n = 1; n <= N; ++n) {
      term = term * sr / n;
      sum += term * to_real(spectrum.I(n));
    }
    Real L = exp(-sr) * sum;
    double log_l = static_cast<double>(log(L));
    out.s_grid.push_back(s);
    out.log_L.push_back(log_l);
    s_values.push_back(s);
    y_values.push_back(log_l + 0.5 * std::log(s));
  }
  auto fit = fit_three(s_values, y_values);
  if (!fit) {
    out.verdict = BiasVerdict::SuggestsBiased;
    out.evidence = "none: fit is singular";
    return out;
  }
  out.exponential_rate = (*fit)[2];
  if (*out.exponential_rate < kBiasRateThreshold) {
    out.verdict = BiasVerdict::SuggestsBiased;
    out.evidence = "log(sqrt(s) L(s)) decreases linearly in s at rate " + std::to_string(*out.exponential_rate);
  } else {
    out.verdict = BiasVerdict::ConsistentWithUnbiased;
    out.evidence = "sqrt(s) L(s) shows no exponential decay (rate " + std::to_string(*out.exponential_rate) + ")";
  }
  return out;
}

}  // namespace walkspec
