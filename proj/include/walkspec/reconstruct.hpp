#pragma once

#include <optional>
#include <string>
#include <vector>

#include "walkspec/numeric.hpp"
#include "walkspec/puiseux.hpp"
#include "walkspec/spectrum.hpp"
#include "walkspec/walk_core.hpp"

namespace walkspec {

/// A recovered shape: always as reals, and exactly when every coefficient
/// was identified as a rational.
struct Reconstruction {
  RealShape shape;
  std::optional<WalkShape> exact;
};

/// Shapes with e = 1 from I_1..I_{f+1}, exactly when kappa_{-1} is rational.
/// Further spectrum values are checked against the result.
Reconstruction reconstruct_e1(const Spectrum& spectrum, long f, unsigned precision_bits);

enum class Side { Plus, Minus };
std::string_view to_string(Side side);

/// The scaling class {phi(lambda t)} of one side of a shape, as the
/// invariants nu_k = kappa_{d-k} kappa_d^{-1+k/d} (signed indices on the
/// minus side), k = 1..d-1.
struct NormalizedHalfShape {
  Side side = Side::Plus;
  long degree = 1;
  std::vector<Real> nu;
};

NormalizedHalfShape half_shape_of(const RealShape& shape, Side side);
NormalizedHalfShape half_shape_from_series(const PuiseuxSeries& gamma, Side side, long degree);

/// The unique shape with the given side classes and kappa_0.
RealShape fix_scales(const NormalizedHalfShape& plus, const NormalizedHalfShape& minus, const Rational& kappa0,
                     unsigned precision_bits);

RealShape reconstruct_from_branches(const BranchPair& pair, const Rational& kappa0, unsigned precision_bits);
RealShape reconstruct_from_diff(const PuiseuxSeries& diff, long e, long f, const Rational& kappa0,
                                unsigned precision_bits);

enum class MullerTable { Affine, Product, Sporadic };
std::string_view to_string(MullerTable t);

/// Integer families behind the formula-valued n entries.
enum class NFamily {
  Concrete,
  PrimePower,            // p^m, m >= 1
  PrimePowerNonPrime,    // p^m, m >= 2
  OddPrimeSquare,        // p^2, p > 2
  PowerOfTwoAtLeast8,    // 2^m, m >= 3
  SquareAtLeast25,       // r^2, r >= 5
  PrimePlusOneSquared,   // (p+1)^2, p >= 5
  AtLeast6,              // n >= 6
  PrimePlusOne,          // p+1
  ProjectiveOddQ,        // (q^m-1)/(q-1), q odd prime power, m >= 2
};

/// One row of the classification of primitive groups containing an element
/// with exactly two cycles, of lengths f >= e.
struct MullerTableRow {
  MullerTable table = MullerTable::Affine;
  std::string label;
  std::string group;
  std::string order;
  std::string simple_factors;
  std::string n;
  NFamily family = NFamily::Concrete;
  long concrete_n = 0;
  std::vector<std::string> e_options;
  std::string one_over_e_plus_one_over_f;
  std::string note;

  bool matches(long n_value, bool include_families) const;
};

const std::vector<MullerTableRow>& muller_tables();
/// Rows whose n equals n_value; formula rows only when include_families.
std::vector<MullerTableRow> muller_rows(long n_value, bool include_families = false);

enum class Verdict { TheoremClean, TheoremMain, GenericOnly, Exceptional };
std::string_view to_string(Verdict v);

struct GuaranteeReport {
  long n = 0;
  long e = 0;
  long f = 0;
  Verdict verdict = Verdict::TheoremClean;
  std::vector<MullerTableRow> table_rows;
  std::string notes;
};

GuaranteeReport guarantee(long e, long f);

bool is_perfect_square(long n);

}  // namespace walkspec
