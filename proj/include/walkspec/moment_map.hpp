#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walkspec/numeric.hpp"
#include "walkspec/polynomial.hpp"
#include "walkspec/walk_core.hpp"

namespace walkspec {

/// A point of the affine space sum kappa_k = 1, sum k kappa_k = 0 over
/// supports [-e, f]; kappas[i] is kappa_{i-e}. Coefficients may be negative.
struct ParameterPoint {
  long e = 1;
  long f = 1;
  std::vector<Rational> kappas;

  const Rational& kappa(long k) const { return kappas.at(static_cast<std::size_t>(k + e)); }
  bool in_simplex() const;
  bool on_slice() const;
  /// The shape, when every coefficient is nonnegative.
  std::optional<WalkShape> shape() const;
};

ParameterPoint to_point(const WalkShape& shape);
/// Deterministic per seed. Simplex samples have positive extremes and
/// nonnegative coefficients; otherwise a Gaussian step in the slice.
ParameterPoint sample(long e, long f, std::uint64_t seed, bool simplex_only);

/// Exact I_1..I_N at a point (no positivity needed).
std::vector<Rational> moment_values(const ParameterPoint& p, long N);

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Basis of the tangent space of the two constraints: one vector per
/// k outside {0, 1}, e_k + (k-1) e_0 - k e_1 (indexed like kappas).
RationalMatrix tangent_basis(long e, long f);
/// dI_n/dkappa_k = n [t^{-k}] chi^{n-1}, for n = 1..N over all kappas.
RationalMatrix full_jacobian(const ParameterPoint& p, long N);
/// The N x (e+f-1) Jacobian restricted to the tangent space.
RationalMatrix moment_jacobian(const ParameterPoint& p, long N);
long rank(RationalMatrix m);

enum class MorseVerdict { Transposition, Degenerate, Inconclusive };
std::string_view to_string(MorseVerdict v);

struct CriticalPoint {
  Real re, im;
  /// A root of the critical-point polynomial lies within this distance.
  Real radius;
  Real value_re, value_im;
};

struct MorseCertificate {
  std::vector<CriticalPoint> critical_points;
  MorseVerdict verdict = MorseVerdict::Inconclusive;
  bool nondegenerate = false;     // t^{e+1} chi'(t) is squarefree
  bool distinct_values = false;   // the critical-value polynomial is squarefree
  QPoly critical_polynomial;      // t^{e+1} chi'(t)
  QPoly value_polynomial;         // roots are the critical values, with multiplicity
};

MorseCertificate morse_certificate(const ParameterPoint& p, unsigned precision_bits);
MorseCertificate morse_certificate(const WalkShape& shape, unsigned precision_bits);

/// Points where chi - u_0 has two double zeros (t = 2, 3) or a triple
/// zero (t = 2), built as u_0 + (t - t_i)^m ... P(t) / t^e with P linear,
/// chosen so the mean vanishes.
std::vector<ParameterPoint> excluded_locus_examples();

/// Why two isospectral shapes are expected to be isospectral, if known.
std::optional<std::string> explain_pair(const WalkShape& a, const WalkShape& b, unsigned precision_bits);

struct SearchOptions {
  long e = 1;
  long f = 2;
  long moments = 6;
  long denominator_bound = 6;
  /// Include biased shapes (the positive-control variant).
  bool biased = false;
  /// Skip pairs whose later member lies in a block below this one.
  long start_block = 1;
  std::uint64_t max_cells = 2'000'000;
  unsigned threads = 1;
  unsigned precision_bits = kDefaultPrecision;
};

struct SearchPair {
  WalkShape a;
  WalkShape b;
  long block = 0;  // the larger common denominator of the two shapes
  std::optional<std::string> explanation;
};

struct SearchResult {
  std::uint64_t shapes = 0;
  std::vector<SearchPair> candidates;  // not explained by any known construction
  std::vector<SearchPair> explained;
};

/// Number of grid cells the search would enumerate.
std::uint64_t search_cells(const SearchOptions& options);
/// Exhaustive search over shapes whose coefficients share a denominator at
/// most the bound, grouped by exact spectrum I_1..I_moments.
SearchResult search_isospectral(const SearchOptions& options);

}  // namespace walkspec
