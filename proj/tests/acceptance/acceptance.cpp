#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

#include <boost/math/constants/constants.hpp>

#include "test_support.hpp"
#include "walkspec/asymptotics.hpp"
#include "walkspec/moment_map.hpp"
#include "walkspec/puiseux.hpp"
#include "walkspec/reconstruct.hpp"
#include "walkspec/spectrum.hpp"

using namespace walkspec;
using namespace walkspec::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Real pi() { return boost::math::constants::pi<Real>(); }

std::string sci(const Real& x) { return format_real(x, 3); }

Rational central_binomial_over_4k(long k) {
  Integer c;
  mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(2 * k), static_cast<unsigned long>(k));
  Rational q(c, Integer(1) << static_cast<mp_bitcnt_t>(2 * k));
  q.canonicalize();
  return q;
}

void exact_spectra(Outcome& o) {
  auto t0 = Clock::now();
  auto sp = return_probabilities(simple_walk(), 40);
  bool all = true;
  for (long k = 1; k <= 20; ++k) all = all && sp.I(2 * k) == central_binomial_over_4k(k);
  double t = seconds_since(t0);
  o.require(all, "I_2k = C(2k,k)/4^k for k <= 20");
  o.require(t < 1.0, "runtime under 1 s");
  o.detail << "I_2k exact for k <= 20 in " << t << " s";
}

void isospectral_pair(Outcome& o) {
  auto cmp = isospectral_through(biased_walk(), biased_partner(), 30);
  o.require(cmp.equal, "spectra agree through n = 30");
  auto eqs = scale_equivalents(biased_walk(), 256);
  bool linked = eqs.size() == 1 && eqs[0].exact_lambda == Rational(1, 2) && eqs[0].exact_shape == biased_partner();
  o.require(linked, "lambda = 1/2 maps {-1:3/7, 2:4/7} to {-1:6/7, 2:1/7}");
  o.detail << "equal through 30, " << eqs.size() << " scale equivalent(s), lambda = "
           << (eqs.empty() ? std::string("-") : eqs[0].exact_lambda ? format_rational(*eqs[0].exact_lambda) : sci(eqs[0].lambda));
}

// Fits of F(s) = P s^{-1/2} (1 + c_1/s + ...) on a grid: P and c_1.
std::pair<Real, Real> fit_prefactor_and_c1(const std::vector<Real>& s, const std::vector<Real>& F, const Real& P) {
  std::vector<Real> xs, scaled, y;
  for (std::size_t i = 0; i < s.size(); ++i) {
    xs.push_back(1 / s[i]);
    scaled.push_back(F[i] * sqrt(s[i]));
  }
  for (std::size_t i = 0; i < s.size(); ++i) y.push_back(s[i] * (scaled[i] / P - 1));
  return {interpolate_at_zero(xs, scaled), interpolate_at_zero(xs, y)};
}

void asymptotic_anchors(Outcome& o) {
  PrecisionScope scope(256);
  std::vector<Real> grid = {Real(100), Real(1000), Real(10000)};
  struct Case {
    const char* name;
    WalkShape shape;
    Rational A1;
    Real scale;  // L(s) = e^{-s c} I_0(s c)
  };
  for (const Case& c : {Case{"simple", simple_walk(), Rational(1, 8), Real(1)},
                        Case{"lazy", lazy_walk(), Rational(1, 4), Real(1) / 2}}) {
    Rational A1 = evaluate_A(c.shape, 1)[1];
    o.require(A1 == c.A1, std::string(c.name) + ": symbolic A_1");
    std::vector<Real> bessel;
    for (const auto& s : grid) bessel.push_back(exp(-s * c.scale) * bessel_i0(s * c.scale));
    Real P = prefactor(c.shape);
    auto [fitted_P, fitted_c1] = fit_prefactor_and_c1(grid, bessel, P);
    Real rel = abs(fitted_c1 - to_real(A1)) / to_real(A1);
    o.require(rel < Real(1e-6), std::string(c.name) + ": Bessel fit of A_1 within 1e-6");
    Real rel_P = abs(fitted_P - P) / P;
    Real rel_alt = abs(fitted_P - alternative_prefactor(c.shape)) / P;
    o.require(rel_P < Real(1e-6), std::string(c.name) + ": fitted prefactor is (2 pi J_2)^{-1/2}");
    if (c.scale != 1) o.require(rel_alt > Real(0.1), "lazy walk separates the prefactor candidates");

    auto rep = verify_expansion(c.shape, 1, grid, Target::L, 3);
    Real lib_rel = abs(rep.fitted_coefficients[1] - to_real(A1)) / to_real(A1);
    o.require(rep.pass && lib_rel < Real(1e-6), std::string(c.name) + ": library fit agrees");
    o.detail << c.name << ": A_1 = " << format_rational(A1) << ", Bessel fit rel.err " << sci(rel)
             << ", library fit rel.err " << sci(lib_rel) << ", prefactor " << format_real(fitted_P, 10) << " ("
             << rep.prefactor_match << "); ";
  }
}

void sign_flip(Outcome& o) {
  PrecisionScope scope(128);
  for (int si : {10, 100}) {
    Real s = si;
    Real truth = exp(s) * bessel_k0(s) / pi();
    Real got = evaluate_L_tilde(simple_walk(), s, 128);
    Real rel = abs(got - truth) / truth;
    o.require(rel <= pow_int(Real(2), -40), "L_tilde(" + std::to_string(si) + ") to 40 bits");
    o.detail << "s=" << si << " rel.err " << sci(rel) << "; ";
  }
  PrecisionScope wide(256);
  auto rep = verify_expansion(simple_walk(), 1, {Real(100), Real(1000), Real(10000)}, Target::LTilde, 3);
  Real A1 = to_real(evaluate_A(simple_walk(), 1)[1]);
  Real P = prefactor(simple_walk());
  Real fitted = rep.fitted_coefficients[1] * P;
  Real err = rep.coefficient_errors[1] * P;
  o.require(abs(fitted + A1 * P) <= 4 * err, "s^{-3/2} coefficient equals -A_1 P within fit error");
  o.detail << "s^{-3/2} coefficient " << format_real(fitted, 10) << " vs -A_1 P = " << format_real(-A1 * P, 10)
           << " (fit error " << sci(err) << ")";
}

void leading_law(Outcome& o) {
  std::mt19937_64 gen(1001);
  int ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    long e = 1 + trial % 7;
    long f = 1 + (trial / 7) % (8 - e);
    auto shape = random_unbiased(gen, e, f);
    auto d = gamma_diff_at_infinity(shape, 3, 256);
    Rational want = Rational(1, e) + Rational(1, f);
    want.canonicalize();
    if (d.diff.base_exponent() == -1 && d.diff.exact_leading && *d.diff.exact_leading == Radical(want)) ++ok;
  }
  o.require(ok == 50, "exact u^{-1} coefficient 1/e + 1/f");
  o.detail << ok << "/50 shapes with e+f <= 8 have u^{-1} coefficient exactly 1/e+1/f";
}

void watson(Outcome& o) {
  std::mt19937_64 gen(1002);
  Real worst_gap = 0, worst_int = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto shape = random_unbiased(gen, 1 + trial % 3, 1 + (trial / 3) % 4);
    auto w = watson_check(shape, 2, 256);
    if (w.max_gap > worst_gap) worst_gap = w.max_gap;
    if (w.max_integer_coefficient > worst_int) worst_int = w.max_integer_coefficient;
  }
  o.require(worst_gap < Real(1e-20), "transform matches through l = 2 within 1e-20");
  o.require(worst_int < Real(1e-25), "integer-exponent coefficients below 1e-25");
  o.detail << "20 shapes at 256 bits: max gap " << sci(worst_gap) << ", max integer-exponent coefficient "
           << sci(worst_int);
}

void roundtrips(Outcome& o) {
  PrecisionScope scope(256);
  std::mt19937_64 gen(1003);
  int exact = 0;
  for (int trial = 0; trial < 50; ++trial) {
    long f = 1 + trial % 6;
    auto shape = random_unbiased(gen, 1, f);
    auto rec = reconstruct_e1(return_probabilities(shape, f + 1), f, 256);
    if (rec.exact && *rec.exact == shape) ++exact;
  }
  o.require(exact == 50, "(a) exact recovery with e = 1");

  int branches = 0;
  Real worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    long e = 1 + trial % 7;
    long f = 1 + (trial / 7) % (8 - e);
    auto shape = random_unbiased(gen, e, f);
    auto rec = reconstruct_from_branches(gamma_branches(shape, e + f + 1, 256), shape.coeff(0), 256);
    Real err = max_abs_difference(rec, to_real_shape(shape));
    if (err > worst) worst = err;
    if (err < Real(1e-30)) ++branches;
  }
  o.require(branches == 50, "(b) branches roundtrip within 1e-30");

  int coprime = 0, coprime_total = 0, ambiguous = 0, degrees_equal = 0, refusals_total = 0;
  for (long e = 1; e <= 7; ++e) {
    for (long f = 1; e + f <= 8; ++f) {
      for (int rep = 0; rep < 2; ++rep) {
        auto shape = random_unbiased(gen, e, f);
        auto diff = gamma_diff_at_infinity(shape, e + f + 2, 256).diff;
        if (std::gcd(e, f) == 1) {
          ++coprime_total;
          try {
            auto rec = reconstruct_from_diff(diff, e, f, shape.coeff(0), 256);
            if (max_abs_difference(rec, to_real_shape(shape)) < Real(1e-30)) ++coprime;
          } catch (const Error&) {
          }
        } else {
          ++refusals_total;
          try {
            reconstruct_from_diff(diff, e, f, shape.coeff(0), 256);
          } catch (const Error& err) {
            if (err.code() == ErrorCode::AmbiguousLattice && e != f) ++ambiguous;
            if (err.code() == ErrorCode::DegreesEqual && e == f) ++degrees_equal;
          }
        }
      }
    }
  }
  o.require(coprime == coprime_total, "(c) diff reconstruction for gcd(e,f) = 1");
  o.require(ambiguous + degrees_equal == refusals_total, "(c) refusal for gcd(e,f) > 1");
  o.detail << "(a) " << exact << "/50 exact; (b) " << branches << "/50, max error " << sci(worst) << "; (c) "
           << coprime << "/" << coprime_total << " coprime recovered, " << ambiguous << " AmbiguousLattice + "
           << degrees_equal << " DegreesEqual (e = f) of " << refusals_total << " gcd>1 samples refused";
}

void classifier(Outcome& o) {
  long checked = 0, bad = 0;
  for (long e = 1; e <= 100; ++e) {
    for (long f = 1; f <= 100; ++f) {
      auto r = guarantee(e, f);
      long n = e + f;
      bool coprime = std::gcd(e, f) == 1;
      bool special = n == 10 || is_perfect_square(n);
      Verdict want = coprime ? Verdict::TheoremClean : special ? Verdict::Exceptional : Verdict::TheoremMain;
      bool rows_ok = r.verdict == Verdict::Exceptional || r.table_rows.empty();
      for (const auto& row : r.table_rows) rows_ok = rows_ok && row.matches(n, true);
      ++checked;
      if (r.verdict != want || r.n != n || !rows_ok) ++bad;
    }
  }
  o.require(bad == 0, "verdict invariants on 1..100");
  auto ten = guarantee(5, 5);
  auto two_eight = guarantee(2, 8);
  o.require(ten.verdict == Verdict::Exceptional && !ten.table_rows.empty(), "(5,5) Exceptional with rows");
  o.require(two_eight.verdict == Verdict::Exceptional && !two_eight.table_rows.empty(), "(2,8) Exceptional with rows");
  o.require(guarantee(2, 3).verdict == Verdict::TheoremClean, "(2,3) TheoremClean");
  o.detail << checked << " pairs checked; (5,5) and (2,8) Exceptional with " << ten.table_rows.size() << " and "
           << two_eight.table_rows.size() << " rows; (2,3) " << to_string(guarantee(2, 3).verdict);
}

void searches(Outcome& o) {
  auto t0 = Clock::now();
  SearchOptions x12;
  x12.e = 1;
  x12.f = 2;
  x12.moments = 6;
  x12.denominator_bound = 6;
  x12.threads = 4;
  auto r12 = search_isospectral(x12);
  SearchOptions x11 = x12;
  x11.f = 1;
  auto r11 = search_isospectral(x11);
  o.require(r12.candidates.empty() && r12.explained.empty(), "X_{1,2} has no isospectral pairs");
  o.require(r11.candidates.empty() && r11.explained.empty(), "X_{1,1} has no isospectral pairs");

  // The known pair has denominator 7, so the control grid goes one further.
  SearchOptions control = x12;
  control.denominator_bound = 7;
  control.biased = true;
  auto rc = search_isospectral(control);
  bool found = false;
  for (const auto& p : rc.explained)
    found = found || (p.a == biased_walk() && p.b == biased_partner()) ||
            (p.a == biased_partner() && p.b == biased_walk());
  o.require(found, "biased control finds {-1:3/7, 2:4/7} ~ {-1:6/7, 2:1/7}");
  o.require(rc.candidates.empty(), "biased control has no unexplained pairs");
  double t = seconds_since(t0);
  o.require(t < 300, "runtime under 5 min");
  o.detail << "X_{1,2}: " << r12.shapes << " shapes, X_{1,1}: " << r11.shapes
           << " shapes (denominators <= 6, 6 moments), no pairs; biased control (denominators <= 7): " << rc.shapes
           << " shapes, " << rc.explained.size() << " explained pair(s), " << rc.candidates.size() << " candidates; "
           << t << " s";
}

void monte_carlo(Outcome& o) {
  for (const auto& [name, shape] : {std::pair{"simple", simple_walk()}, std::pair{"lazy", lazy_walk()}}) {
    auto a = simulate(shape, 4, 1000000, 20261019, {0, 1});
    auto b = simulate(shape, 4, 1000000, 20261019, {0, 4});
    o.require(a.estimates == b.estimates && a.return_set_estimates == b.return_set_estimates,
              std::string(name) + ": deterministic across runs and thread counts");
    auto exact = return_probabilities(shape, 4);
    double worst = 0;
    for (long n = 1; n <= 4; ++n) {
      auto i = static_cast<std::size_t>(n - 1);
      double gap = std::fabs(a.estimates[i] - exact.I(n).get_d());
      double se = a.standard_errors[i];
      double z = se > 0 ? gap / se : (gap == 0 ? 0 : 1e9);
      worst = std::max(worst, z);
    }
    o.require(worst <= 4, std::string(name) + ": within 4 standard errors");
    o.detail << name << ": max |z| = " << worst << "; ";
  }
}

void genericity(Outcome& o) {
  int worst_rank = 100, worst_morse = 100;
  std::ostringstream per_pair;
  for (long e = 1; e <= 5; ++e) {
    for (long f = 1; e + f <= 6; ++f) {
      int full = 0, transposition = 0;
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto p = sample(e, f, 5000 + 100 * static_cast<std::uint64_t>(10 * e + f) + seed, true);
        if (e + f - 1 >= 1 && rank(moment_jacobian(p, e + f - 1)) == e + f - 1) ++full;
        if (morse_certificate(p, 128).verdict == MorseVerdict::Transposition) ++transposition;
      }
      worst_rank = std::min(worst_rank, full);
      worst_morse = std::min(worst_morse, transposition);
      per_pair << "(" << e << "," << f << "):" << full << "/" << transposition << " ";
    }
  }
  o.require(worst_rank >= 95, "full Jacobian rank at >= 95/100 points");
  o.require(worst_morse >= 95, "Transposition at >= 95/100 points");
  int degenerate = 0;
  for (const auto& p : excluded_locus_examples())
    if (morse_certificate(p, 128).verdict == MorseVerdict::Degenerate) ++degenerate;
  o.require(degenerate == 2, "Degenerate on both excluded-locus examples");
  o.detail << "min full rank " << worst_rank << "/100, min Transposition " << worst_morse << "/100, excluded examples "
           << degenerate << "/2 Degenerate; rank/Morse per (e,f): " << per_pair.str();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "exact spectra", exact_spectra},
      {2, "biased isospectral pair", isospectral_pair},
      {3, "asymptotic anchors", asymptotic_anchors},
      {4, "sign flip of L_tilde", sign_flip},
      {5, "leading-coefficient law", leading_law},
      {6, "Watson consistency", watson},
      {7, "reconstruction roundtrips", roundtrips},
      {8, "guarantee classifier", classifier},
      {9, "brute-force searches", searches},
      {10, "Monte Carlo", monte_carlo},
      {11, "genericity", genericity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    auto t0 = Clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
