#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walkspec/numeric.hpp"
#include "walkspec/walk_core.hpp"

namespace walkspec {

/// Return probabilities I_start, I_start+1, ...
struct Spectrum {
  long start = 1;
  std::vector<Rational> values;

  const Rational& I(long n) const { return values.at(static_cast<std::size_t>(n - start)); }
  long size() const { return static_cast<long>(values.size()); }
};

/// Exact I_1..I_N: constant coefficients of chi(t)^n by iterated convolution.
Spectrum return_probabilities(const WalkShape& shape, long N);

/// Rounded I_0..I_N from a pruned convolution at the current working
/// precision. Every stored value is a lower bound of the true one up to
/// rounding, and the true value exceeds it by at most `dropped_mass` plus
/// `rounding_bound`.
struct ApproximateSpectrum {
  std::vector<Real> values;  // index n holds I_n, n = 0..N
  Real dropped_mass;
  Real rounding_bound;
};

ApproximateSpectrum approximate_return_probabilities(const WalkShape& shape, long N, const Real& prune_below);

struct SpectrumComparison {
  bool equal = true;
  long first_difference = 0;
  Rational a_value;
  Rational b_value;
};

SpectrumComparison isospectral_through(const WalkShape& a, const WalkShape& b, long N);

struct SimulationOptions {
  /// Length of the single trajectory for the return-set estimator;
  /// 0 means "same as samples".
  std::uint64_t trajectory_length = 0;
  unsigned threads = 1;
};

/// Monte Carlo estimates of I_1..I_N.
///
/// Stream splitting: walks are simulated in shards of kShardSize; shard i
/// draws from std::mt19937_64 seeded with splitmix64(seed ^ splitmix64(i)),
/// and the return-set trajectory from splitmix64(~seed). Results do not
/// depend on the thread count.
struct EmpiricalSpectrum {
  static constexpr std::uint64_t kShardSize = 1u << 16;

  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::vector<double> estimates;        // direct frequency of S_n == 0
  std::vector<double> standard_errors;  // sqrt(p(1-p)/samples)
  bool degenerate = false;              // samples == 1: SE carries no information

  std::uint64_t trajectory_length = 0;
  std::uint64_t returns_observed = 0;
  std::vector<double> return_set_estimates;  // |[1,T] ∩ S ∩ (n+S)| / |[1,T] ∩ S|
  std::vector<double> return_set_errors;
};

EmpiricalSpectrum simulate(const WalkShape& shape, long N, std::uint64_t samples, std::uint64_t seed,
                           const SimulationOptions& options = {});

/// Weight multiplicities d * kappa_k and the invariant dimensions d^n I_n.
struct U1InvariantDims {
  Integer d;
  std::vector<Integer> dims;  // n = 1..N
};

U1InvariantDims u1_invariant_dims(const WalkShape& shape, long N);

enum class BiasVerdict { ConsistentWithUnbiased, SuggestsBiased };
std::string_view to_string(BiasVerdict v);

/// Heuristic: unbiased spectra give L(s) ~ C s^{-1/2}, biased ones make
/// L(s) decay exponentially.
struct BiasDiagnostic {
  BiasVerdict verdict = BiasVerdict::SuggestsBiased;
  std::optional<double> exponential_rate;  // fitted c in log(sqrt(s) L(s)) ~ a + b/s + c s
  std::vector<double> s_grid;
  std::vector<double> log_L;
  std::string evidence;
};

/// Verdict threshold on the fitted exponential rate.
constexpr double kBiasRateThreshold = -0.03;

BiasDiagnostic bias_diagnostic(const Spectrum& spectrum, unsigned precision_bits);

}  // namespace walkspec
