#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "walkspec/io.hpp"

using namespace walkspec;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kRefusal = 3;
constexpr int kVerifyFailed = 4;

struct Config {
  unsigned precision = kDefaultPrecision;
  unsigned threads = 1;
  std::string format = "json";
};

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::AmbiguousLattice:
    case ErrorCode::DegreesEqual:
    case ErrorCode::SearchSpaceTooLarge: return kRefusal;
    default: return kValidation;
  }
}

unsigned precision_from_env() {
  const char* env = std::getenv("WALKSPEC_PRECISION");
  if (!env || !*env) return kDefaultPrecision;
  char* end = nullptr;
  unsigned long bits = std::strtoul(env, &end, 10);
  if (*end != '\0' || bits < kMinPrecision || bits > 1u << 20)
    throw Error(ErrorCode::InvalidArgument, std::string("WALKSPEC_PRECISION must be an integer >= 64, got '") + env + "'");
  return static_cast<unsigned>(bits);
}

std::vector<Real> parse_grid(const std::string& text) {
  std::vector<Real> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.emplace_back(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad grid value '" + item + "'");
    }
  }
  return out;
}

Json point_json(const ParameterPoint& p) {
  Json coeffs = Json::object();
  for (long k = -p.e; k <= p.f; ++k)
    if (p.kappa(k) != 0) coeffs[std::to_string(k)] = format_rational(p.kappa(k));
  return Json{{"e", p.e}, {"f", p.f}, {"coeffs", coeffs}};
}

struct SpectrumArgs {
  std::string shape, compare;
  long n = 10;
};

int cmd_spectrum(const Config& cfg, const SpectrumArgs& a) {
  auto shape = shape_from_json(read_json_file(a.shape));
  if (!a.compare.empty()) {
    auto other = shape_from_json(read_json_file(a.compare));
    auto cmp = isospectral_through(shape, other, a.n);
    Json out{{"schema", schema::kComparison}, {"n", a.n}, {"equal", cmp.equal}};
    if (cmp.equal) {
      out["result"] = "equal through " + std::to_string(a.n);
    } else {
      out["result"] = "differ at " + std::to_string(cmp.first_difference);
      out["first_difference"] = Json{{"n", cmp.first_difference},
                                     {"a", format_rational(cmp.a_value)},
                                     {"b", format_rational(cmp.b_value)}};
    }
    auto why = explain_pair(shape, other, cfg.precision);
    out["explanation"] = why ? Json(*why) : Json(nullptr);
    emit(out);
    return kOk;
  }
  auto sp = return_probabilities(shape, a.n);
  if (cfg.format == "table") {
    for (long n = sp.start; n < sp.start + sp.size(); ++n) std::cout << n << "\t" << format_rational(sp.I(n)) << "\n";
  } else {
    emit(to_json(sp));
  }
  return kOk;
}

struct SimulateArgs {
  std::string shape;
  long n = 4;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  std::uint64_t trajectory = 0;
};

int cmd_simulate(const Config& cfg, const SimulateArgs& a) {
  auto shape = shape_from_json(read_json_file(a.shape));
  SimulationOptions o;
  o.trajectory_length = a.trajectory;
  o.threads = cfg.threads;
  emit(to_json(simulate(shape, a.n, a.samples, a.seed, o)));
  return kOk;
}

struct AsymptoticsArgs {
  std::string shape;
  long m = 1;
  std::string grid = "100,1000,10000";
  std::string target = "L";
};

int cmd_asymptotics(const Config& cfg, const AsymptoticsArgs& a) {
  auto shape = shape_from_json(read_json_file(a.shape), true);
  Target target = a.target == "L" ? Target::L : Target::LTilde;
  PrecisionScope scope(cfg.precision);
  auto report = verify_expansion(shape, a.m, parse_grid(a.grid), target, cfg.threads);
  auto w = watson_check(shape, a.m, cfg.precision);
  Json out = to_json(report, cfg.precision);
  Json watson{{"max_gap", format_real(w.max_gap, 3)},
              {"max_integer_coefficient", format_real(w.max_integer_coefficient, 3)},
              {"flag", w.pass ? "PASS" : "FAIL"}};
  out["watson"] = watson;
  bool pass = report_passes(report) && w.pass;
  out["result"] = pass ? "PASS" : "FAIL";
  emit(out);
  return pass ? kOk : kVerifyFailed;
}

struct SeriesArgs {
  std::string shape;
  std::string kind = "diff";
  long order = 6;
};

int cmd_series(const Config& cfg, const SeriesArgs& a) {
  auto shape = shape_from_json(read_json_file(a.shape));
  PrecisionScope scope(cfg.precision);
  const unsigned bits = cfg.precision;
  if (a.kind == "alpha") {
    auto b = alpha_branches(shape, a.order, bits);
    emit(Json{{"schema", schema::kAlpha},
              {"alpha_plus", to_json(b.alpha_plus, bits)},
              {"alpha_minus", to_json(b.alpha_minus, bits)}});
  } else if (a.kind == "gamma") {
    emit(to_json(gamma_branches(shape, a.order, bits), bits));
  } else if (a.kind == "diff") {
    auto d = gamma_diff_at_infinity(shape, a.order, bits);
    Json out = to_json(d.diff, bits);
    Json collisions = Json::array();
    for (const auto& q : d.collisions) collisions.push_back(format_rational(q));
    out["collisions"] = collisions;
    emit(out);
  } else {
    emit(to_json(gamma_diff_at_zero(shape, a.order, bits), bits));
  }
  return kOk;
}

struct ReconstructArgs {
  std::string input;
  long e = 1, f = 1;
  std::string kappa0 = "0";
};

int cmd_reconstruct(const Config& cfg, const ReconstructArgs& a) {
  Json in = read_json_file(a.input);
  std::string kind = schema_of(in);
  if (kind.empty()) {
    if (in.contains("values"))
      kind = schema::kSpectrum;
    else if (in.contains("gamma_plus"))
      kind = schema::kBranches;
    else if (in.contains("direction"))
      kind = schema::kSeries;
  }
  auto report = guarantee(a.e, a.f);
  PrecisionScope scope(cfg.precision);
  Reconstruction rec;
  if (kind == schema::kSpectrum) {
    if (a.e != 1) throw Error(ErrorCode::InvalidArgument, "spectrum input reconstructs shapes with e = 1 only");
    rec = reconstruct_e1(spectrum_from_json(in), a.f, cfg.precision);
  } else if (kind == schema::kSeries) {
    rec.shape = reconstruct_from_diff(series_from_json(in), a.e, a.f, parse_rational(a.kappa0), cfg.precision);
  } else if (kind == schema::kBranches) {
    rec.shape = reconstruct_from_branches(branches_from_json(in), parse_rational(a.kappa0), cfg.precision);
  } else {
    throw Error(ErrorCode::ParseError, "input is neither a spectrum nor a series file");
  }
  emit(to_json(rec, report, cfg.precision));
  return kOk;
}

int cmd_guarantee(const Config& cfg, long e, long f) {
  auto r = guarantee(e, f);
  if (cfg.format == "table") {
    std::cout << "e=" << r.e << " f=" << r.f << " n=" << r.n << " " << to_string(r.verdict) << "\n";
    for (const auto& row : r.table_rows)
      std::cout << to_string(row.table) << "\t" << row.label << "\t" << row.group << "\t" << row.n << "\n";
  } else {
    emit(to_json(r));
  }
  return kOk;
}

struct SearchArgs {
  SearchOptions options;
};

int cmd_search(const Config& cfg, SearchArgs a) {
  a.options.threads = cfg.threads;
  a.options.precision_bits = cfg.precision;
  const auto& o = a.options;
  auto result = search_isospectral(o);
  Json header{{"schema", schema::kSearch}, {"type", "header"}};
  header["e"] = o.e;
  header["f"] = o.f;
  header["moments"] = o.moments;
  header["denominator_bound"] = o.denominator_bound;
  header["biased"] = o.biased;
  header["start_block"] = o.start_block;
  header["cells"] = search_cells(o);
  header["shapes"] = result.shapes;
  std::cout << header.dump() << "\n";
  std::vector<SearchPair> all = result.candidates;
  all.insert(all.end(), result.explained.begin(), result.explained.end());
  std::stable_sort(all.begin(), all.end(), [](const SearchPair& x, const SearchPair& y) { return x.block < y.block; });
  std::size_t next = 0;
  for (long block = std::max(2L, o.start_block); block <= o.denominator_bound; ++block) {
    for (; next < all.size() && all[next].block == block; ++next) std::cout << to_json(all[next]).dump() << "\n";
    Json cursor{{"schema", schema::kSearch}, {"type", "cursor"}, {"completed_block", block}, {"next_block", block + 1}};
    std::cout << cursor.dump() << "\n";
  }
  Json summary{{"schema", schema::kSearch}, {"type", "summary"}};
  summary["candidates"] = result.candidates.size();
  summary["explained"] = result.explained.size();
  std::cout << summary.dump() << "\n";
  return kOk;
}

struct CertifyArgs {
  std::string shape;
  long e = 0, f = 0;
  std::uint64_t seed = 0;
  bool off_simplex = false;
};

int cmd_certify(const Config& cfg, const CertifyArgs& a) {
  ParameterPoint p;
  if (!a.shape.empty())
    p = to_point(shape_from_json(read_json_file(a.shape), true));
  else if (a.e >= 1 && a.f >= 1)
    p = sample(a.e, a.f, a.seed, !a.off_simplex);
  else
    throw Error(ErrorCode::InvalidArgument, "certify needs a shape file or --sample-e and --sample-f");
  PrecisionScope scope(cfg.precision);
  auto cert = morse_certificate(p, cfg.precision);
  Json out = to_json(cert, cfg.precision);
  out["point"] = point_json(p);
  const long dim = p.e + p.f - 1;
  if (dim >= 1) {
    out["jacobian_rank"] = rank(moment_jacobian(p, dim));
    out["full_rank"] = dim;
  }
  emit(out);
  return kOk;
}

struct TablesArgs {
  long n = 0;
  bool families = false;
};

int cmd_tables(const Config& cfg, const TablesArgs& a) {
  std::vector<MullerTableRow> rows = a.n > 0 ? muller_rows(a.n, a.families) : muller_tables();
  if (cfg.format == "table") {
    for (const auto& row : rows)
      std::cout << to_string(row.table) << "\t" << row.label << "\t" << row.group << "\t" << row.n << "\t"
                << row.one_over_e_plus_one_over_f << "\n";
    return kOk;
  }
  Json list = Json::array();
  for (const auto& row : rows) list.push_back(to_json(row));
  emit(Json{{"schema", schema::kTables}, {"rows", list}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Return-probability spectra of finite random walks on the integers"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  std::optional<unsigned> precision_flag;
  app.add_option("--precision", precision_flag, "Working precision in bits (default $WALKSPEC_PRECISION or 256)");
  app.add_option("--threads", cfg.threads, "Thread cap")->check(CLI::Range(1u, 1024u));
  app.add_option("--format", cfg.format, "Output format for spectrum, guarantee and tables")
      ->check(CLI::IsMember({"json", "table"}));

  SpectrumArgs spectrum;
  auto* sp = app.add_subcommand("spectrum", "Exact return probabilities I_1..I_n");
  sp->add_option("shape", spectrum.shape, "Shape file")->required();
  sp->add_option("-n", spectrum.n, "Largest n")->check(CLI::PositiveNumber);
  sp->add_option("--compare", spectrum.compare, "Second shape file: compare spectra through n");

  SimulateArgs simulate_args;
  auto* si = app.add_subcommand("simulate", "Monte Carlo estimates of I_1..I_n");
  si->add_option("shape", simulate_args.shape, "Shape file")->required();
  si->add_option("-n", simulate_args.n, "Largest n")->check(CLI::PositiveNumber);
  si->add_option("--samples", simulate_args.samples, "Number of walks");
  si->add_option("--seed", simulate_args.seed, "Generator seed");
  si->add_option("--trajectory", simulate_args.trajectory, "Length of the return-set trajectory (0: samples)");

  AsymptoticsArgs asym;
  auto* as = app.add_subcommand("asymptotics", "Check the large-s expansion of L or L_tilde");
  as->alias("verify");
  as->add_option("shape", asym.shape, "Unbiased shape file")->required();
  as->add_option("-m", asym.m, "Expansion order")->check(CLI::Range(0L, kMaxSymbolicOrder));
  as->add_option("--grid", asym.grid, "Comma-separated increasing s values");
  as->add_option("--target", asym.target, "L or L_tilde")->check(CLI::IsMember({"L", "L_tilde"}));

  SeriesArgs series;
  auto* se = app.add_subcommand("series", "Puiseux series of the inverse branches");
  se->add_option("shape", series.shape, "Shape file")->required();
  se->add_option("--kind", series.kind, "alpha, gamma, diff (at infinity) or zero")
      ->check(CLI::IsMember({"alpha", "gamma", "diff", "zero"}));
  se->add_option("--order", series.order, "Number of coefficients")->check(CLI::PositiveNumber);

  ReconstructArgs recon;
  auto* re = app.add_subcommand("reconstruct", "Recover a shape from a spectrum or series file");
  re->add_option("input", recon.input, "Spectrum, series or branches file")->required();
  re->add_option("-e", recon.e, "Negative reach")->required()->check(CLI::PositiveNumber);
  re->add_option("-f", recon.f, "Positive reach")->required()->check(CLI::PositiveNumber);
  re->add_option("--kappa0", recon.kappa0, "Holding probability for series input");

  long ge = 0, gf = 0;
  auto* gu = app.add_subcommand("guarantee", "Which theorem covers degrees (e, f)");
  gu->add_option("-e", ge, "Negative reach")->required()->check(CLI::PositiveNumber);
  gu->add_option("-f", gf, "Positive reach")->required()->check(CLI::PositiveNumber);

  SearchArgs search;
  auto* sr = app.add_subcommand("search", "Exhaustive isospectral search on a rational grid (JSON lines)");
  sr->add_option("-e", search.options.e, "Negative reach")->check(CLI::PositiveNumber);
  sr->add_option("-f", search.options.f, "Positive reach")->check(CLI::PositiveNumber);
  sr->add_option("--moments", search.options.moments, "Spectrum values compared")->check(CLI::PositiveNumber);
  sr->add_option("--denominators", search.options.denominator_bound, "Largest common denominator")
      ->check(CLI::PositiveNumber);
  sr->add_flag("--biased", search.options.biased, "Include biased shapes");
  sr->add_option("--start-block", search.options.start_block, "Resume from this cursor")->check(CLI::PositiveNumber);
  sr->add_option("--max-cells", search.options.max_cells, "Refuse grids larger than this");

  CertifyArgs certify;
  auto* ce = app.add_subcommand("certify", "Morse certificate and moment-map Jacobian rank");
  ce->add_option("shape", certify.shape, "Unbiased shape file");
  ce->add_option("--sample-e", certify.e, "Sample a point with this e")->check(CLI::PositiveNumber);
  ce->add_option("--sample-f", certify.f, "Sample a point with this f")->check(CLI::PositiveNumber);
  ce->add_option("--seed", certify.seed, "Sampling seed");
  ce->add_flag("--off-simplex", certify.off_simplex, "Allow negative coefficients");

  TablesArgs tables;
  auto* ta = app.add_subcommand("tables", "Primitive groups with a two-cycle element");
  ta->add_option("--n", tables.n, "Only rows for this degree")->check(CLI::PositiveNumber);
  ta->add_flag("--families", tables.families, "Include formula-valued degrees");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << to_json(Error(ErrorCode::InvalidArgument, e.what())).dump(2) << "\n";
    return kValidation;
  }

  try {
    cfg.precision = precision_flag ? *precision_flag : precision_from_env();
    if (cfg.precision < kMinPrecision) throw Error(ErrorCode::InvalidArgument, "precision must be at least 64 bits");
    PrecisionScope scope(cfg.precision);
    if (*sp) return cmd_spectrum(cfg, spectrum);
    if (*si) return cmd_simulate(cfg, simulate_args);
    if (*as) return cmd_asymptotics(cfg, asym);
    if (*se) return cmd_series(cfg, series);
    if (*re) return cmd_reconstruct(cfg, recon);
    if (*gu) return cmd_guarantee(cfg, ge, gf);
    if (*sr) return cmd_search(cfg, search);
    if (*ce) return cmd_certify(cfg, certify);
    if (*ta) return cmd_tables(cfg, tables);
  } catch (const Error& e) {
    std::cerr << to_json(e).dump(2) << "\n";
    return exit_code(e.code());
  }
  return kValidation;
}
