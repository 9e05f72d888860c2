#include "walkspec/io.hpp"

#include <cerrno>
#include <fstream>
#include <set>
#include <sstream>

namespace walkspec {

namespace {

Error parse_error(const std::string& what) { return Error(ErrorCode::ParseError, what); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw parse_error(std::string("missing field '") + name + "'");
  return j.at(name);
}

std::string string_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) throw parse_error(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

long integer_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer()) throw parse_error(std::string("field '") + name + "' must be an integer");
  return v.get<long>();
}

void expect_schema(const Json& j, std::string_view expected) {
  std::string s = schema_of(j);
  if (!s.empty() && s != expected)
    throw parse_error("expected schema '" + std::string(expected) + "', found '" + s + "'");
}

long parse_index(const std::string& key) {
  std::size_t i = (!key.empty() && key[0] == '-') ? 1 : 0;
  if (i == key.size() || key.size() > 18) throw parse_error("bad coefficient index '" + key + "'");
  for (std::size_t k = i; k < key.size(); ++k)
    if (key[k] < '0' || key[k] > '9') throw parse_error("bad coefficient index '" + key + "'");
  return std::stol(key);
}

std::string real_string(const Real& x, unsigned bits) { return format_real(x, digits_for_bits(bits)); }

Json rational_array(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(format_rational(q));
  return out;
}

Json shape_body(const WalkShape& shape) {
  Json coeffs = Json::object();
  for (const auto& [k, v] : shape.coeffs()) coeffs[std::to_string(k)] = format_rational(v);
  return Json{{"coeffs", coeffs}};
}

Json real_shape_body(const RealShape& shape, unsigned bits) {
  Json coeffs = Json::object();
  for (const auto& [k, v] : shape.coeffs) coeffs[std::to_string(k)] = real_string(v, bits);
  return Json{{"coeffs", coeffs}};
}

Json series_body(const PuiseuxSeries& s, unsigned bits) {
  Json out;
  out["direction"] = std::string(to_string(s.direction));
  out["ramification"] = s.ramification;
  out["base_exponent"] = format_rational(s.base_exponent());
  Json coeffs = Json::array();
  for (const auto& c : s.coeffs) coeffs.push_back(real_string(c, bits));
  out["coeffs"] = coeffs;
  auto t = s.truncation_exponent();
  out["truncation_exponent"] = t ? Json(format_rational(*t)) : Json(nullptr);
  out["precision"] = bits;
  if (s.exact_leading) out["exact_leading"] = s.exact_leading->to_string();
  return out;
}

Json guarantee_body(const GuaranteeReport& r) {
  Json out;
  out["e"] = r.e;
  out["f"] = r.f;
  out["n"] = r.n;
  out["verdict"] = std::string(to_string(r.verdict));
  out["notes"] = r.notes;
  Json rows = Json::array();
  for (const auto& row : r.table_rows) rows.push_back(to_json(row));
  out["table_rows"] = rows;
  return out;
}

}  // namespace

Json parse_json(std::string_view text) {
  std::vector<std::set<std::string>> keys;
  std::string duplicate;
  auto check = [&](int, Json::parse_event_t event, Json& parsed) {
    if (event == Json::parse_event_t::object_start) {
      keys.emplace_back();
    } else if (event == Json::parse_event_t::object_end) {
      keys.pop_back();
    } else if (event == Json::parse_event_t::key) {
      auto key = parsed.get<std::string>();
      if (!keys.back().insert(key).second && duplicate.empty()) duplicate = key;
    }
    return true;
  };
  Json out;
  try {
    out = Json::parse(text.begin(), text.end(), check);
  } catch (const Json::parse_error& e) {
    throw parse_error(e.what());
  }
  if (!duplicate.empty()) throw parse_error("duplicate key '" + duplicate + "'");
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_json(text.str());
}

std::string schema_of(const Json& j) {
  if (!j.is_object() || !j.contains("schema")) return {};
  if (!j["schema"].is_string()) throw parse_error("field 'schema' must be a string");
  return j["schema"].get<std::string>();
}

WalkShape shape_from_json(const Json& j, bool require_unbiased) {
  expect_schema(j, schema::kShape);
  const Json& coeffs = field(j, "coeffs");
  if (!coeffs.is_object()) throw parse_error("'coeffs' must be an object");
  std::map<long, Rational> c;
  for (const auto& [key, value] : coeffs.items()) {
    if (!value.is_string()) throw parse_error("coefficient '" + key + "' must be a rational string");
    long k = parse_index(key);
    if (c.count(k)) throw parse_error("coefficient index " + std::to_string(k) + " given twice");
    c[k] = parse_rational(value.get<std::string>());
  }
  return WalkShape::create(std::move(c), require_unbiased);
}

Json to_json(const WalkShape& shape) {
  Json out{{"schema", schema::kShape}};
  out.update(shape_body(shape));
  return out;
}

Json to_json(const RealShape& shape, unsigned bits) {
  Json out{{"schema", schema::kShape}};
  out.update(real_shape_body(shape, bits));
  out["precision"] = bits;
  return out;
}

Spectrum spectrum_from_json(const Json& j) {
  expect_schema(j, schema::kSpectrum);
  Spectrum s;
  s.start = j.contains("start") ? integer_field(j, "start") : 1;
  if (s.start < 0) throw parse_error("'start' must be nonnegative");
  const Json& values = field(j, "values");
  if (!values.is_array()) throw parse_error("'values' must be an array");
  for (const auto& v : values) {
    if (!v.is_string()) throw parse_error("spectrum values must be rational strings");
    s.values.push_back(parse_rational(v.get<std::string>()));
  }
  return s;
}

Json to_json(const Spectrum& spectrum) {
  return Json{{"schema", schema::kSpectrum}, {"start", spectrum.start}, {"values", rational_array(spectrum.values)}};
}

Json to_json(const EmpiricalSpectrum& s) {
  Json out{{"schema", schema::kEmpirical}};
  out["seed"] = s.seed;
  out["samples"] = s.samples;
  out["start"] = 1;
  out["estimates"] = s.estimates;
  out["standard_errors"] = s.standard_errors;
  out["degenerate"] = s.degenerate;
  out["trajectory_length"] = s.trajectory_length;
  out["returns_observed"] = s.returns_observed;
  out["return_set_estimates"] = s.return_set_estimates;
  out["return_set_errors"] = s.return_set_errors;
  return out;
}

PuiseuxSeries series_from_json(const Json& j) {
  expect_schema(j, schema::kSeries);
  PuiseuxSeries s;
  std::string direction = string_field(j, "direction");
  if (direction == "zero")
    s.direction = Direction::AtZero;
  else if (direction == "infinity")
    s.direction = Direction::AtInfinity;
  else
    throw parse_error("direction must be 'zero' or 'infinity'");
  s.ramification = integer_field(j, "ramification");
  if (s.ramification < 1) throw parse_error("ramification must be positive");
  long bits = j.contains("precision") ? integer_field(j, "precision") : static_cast<long>(working_precision());
  if (bits < static_cast<long>(kMinPrecision)) throw parse_error("precision must be at least 64 bits");
  s.local_base = s.sign() * parse_rational(string_field(j, "base_exponent"));
  const Json& trunc = field(j, "truncation_exponent");
  if (!trunc.is_null()) {
    if (!trunc.is_string()) throw parse_error("'truncation_exponent' must be a rational string or null");
    s.local_truncation = s.sign() * parse_rational(trunc.get<std::string>());
  }
  const Json& coeffs = field(j, "coeffs");
  if (!coeffs.is_array()) throw parse_error("'coeffs' must be an array");
  PrecisionScope scope(static_cast<unsigned>(bits));
  for (const auto& c : coeffs) {
    if (!c.is_string()) throw parse_error("series coefficients must be decimal strings");
    try {
      s.coeffs.emplace_back(c.get<std::string>());
    } catch (const std::exception&) {
      throw parse_error("bad decimal coefficient '" + c.get<std::string>() + "'");
    }
  }
  return s;
}

Json to_json(const PuiseuxSeries& series, unsigned bits) {
  Json out{{"schema", schema::kSeries}};
  out.update(series_body(series, bits));
  return out;
}

BranchPair branches_from_json(const Json& j) {
  expect_schema(j, schema::kBranches);
  return {series_from_json(field(j, "gamma_plus")), series_from_json(field(j, "gamma_minus"))};
}

Json to_json(const BranchPair& pair, unsigned bits) {
  return Json{{"schema", schema::kBranches},
              {"gamma_plus", series_body(pair.gamma_plus, bits)},
              {"gamma_minus", series_body(pair.gamma_minus, bits)}};
}

bool coefficient_agrees(const ExpansionReport& r, long l) {
  auto i = static_cast<std::size_t>(l);
  Real gap = abs(r.fitted_coefficients[i] - r.predicted_coefficients[i]);
  return gap <= 4 * r.coefficient_errors[i] || gap <= Real(1e-6) * abs(r.predicted_coefficients[i]);
}

bool report_passes(const ExpansionReport& r) {
  if (!r.pass) return false;
  if (r.prefactor_match != "inverse_sqrt" && r.prefactor_match != "both") return false;
  for (long l = 0; l <= r.m; ++l)
    if (!coefficient_agrees(r, l)) return false;
  return true;
}

Json to_json(const ExpansionReport& r, unsigned bits) {
  const int digits = 12;
  Json out{{"schema", schema::kReport}};
  out["target"] = std::string(to_string(r.target));
  out["m"] = r.m;
  out["precision"] = bits;
  Json points = Json::array();
  for (std::size_t i = 0; i < r.s_grid.size(); ++i)
    points.push_back(Json{{"s", format_real(r.s_grid[i], digits)},
                          {"value", format_real(r.values[i], digits)},
                          {"residual", format_real(r.residuals[i], digits)}});
  out["points"] = points;
  out["residuals_shrink"] = r.pass ? "PASS" : "FAIL";
  Json prefactor;
  prefactor["fitted"] = format_real(r.fitted_prefactor, digits);
  prefactor["standard_error"] = format_real(r.prefactor_error, 3);
  prefactor["inverse_sqrt_2pi_J2"] = format_real(r.candidate_inverse_sqrt, digits);
  prefactor["sqrt_J2_over_2pi"] = format_real(r.candidate_sqrt, digits);
  prefactor["match"] = r.prefactor_match;
  out["prefactor"] = prefactor;
  Json coeffs = Json::array();
  for (long l = 0; l <= r.m; ++l) {
    auto i = static_cast<std::size_t>(l);
    coeffs.push_back(Json{{"l", l},
                          {"fitted", format_real(r.fitted_coefficients[i], digits)},
                          {"standard_error", format_real(r.coefficient_errors[i], 3)},
                          {"predicted", format_real(r.predicted_coefficients[i], digits)},
                          {"flag", coefficient_agrees(r, l) ? "PASS" : "FAIL"}});
  }
  out["coefficients"] = coeffs;
  out["result"] = report_passes(r) ? "PASS" : "FAIL";
  return out;
}

Json to_json(const Reconstruction& rec, const GuaranteeReport& report, unsigned bits) {
  Json out{{"schema", schema::kReconstruction}};
  out["exact"] = rec.exact.has_value();
  if (rec.exact) {
    out["shape"] = shape_body(*rec.exact);
    out["reflection"] = shape_body(reindex(*rec.exact, -1));
  } else {
    out["precision"] = bits;
    out["shape"] = real_shape_body(rec.shape, bits);
    out["reflection"] = real_shape_body(reflect(rec.shape), bits);
  }
  out["note"] = "the shape and its reflection t -> 1/t are equivalent walks with the same spectrum";
  out["guarantee"] = guarantee_body(report);
  return out;
}

Json to_json(const MullerTableRow& row) {
  Json out;
  out["table"] = std::string(to_string(row.table));
  out["label"] = row.label;
  out["group"] = row.group;
  out["order"] = row.order;
  out["simple_factors"] = row.simple_factors;
  out["n"] = row.n;
  out["e"] = row.e_options;
  out["one_over_e_plus_one_over_f"] = row.one_over_e_plus_one_over_f;
  if (!row.note.empty()) out["note"] = row.note;
  return out;
}

Json to_json(const GuaranteeReport& report) {
  Json out{{"schema", schema::kGuarantee}};
  out.update(guarantee_body(report));
  return out;
}

Json to_json(const MorseCertificate& cert, unsigned bits) {
  Json out{{"schema", schema::kCertificate}};
  out["verdict"] = std::string(to_string(cert.verdict));
  out["nondegenerate"] = cert.nondegenerate;
  out["distinct_values"] = cert.distinct_values;
  out["critical_polynomial"] = rational_array(cert.critical_polynomial.coeffs());
  out["value_polynomial"] = rational_array(cert.value_polynomial.coeffs());
  const int digits = std::min(digits_for_bits(bits), 20);
  Json points = Json::array();
  for (const auto& cp : cert.critical_points)
    points.push_back(Json{{"re", format_real(cp.re, digits)},
                          {"im", format_real(cp.im, digits)},
                          {"radius", format_real(cp.radius, 3)},
                          {"value_re", format_real(cp.value_re, digits)},
                          {"value_im", format_real(cp.value_im, digits)}});
  out["critical_points"] = points;
  return out;
}

Json to_json(const SearchPair& pair) {
  Json out{{"schema", schema::kSearch}, {"type", "pair"}};
  out["block"] = pair.block;
  out["status"] = pair.explanation ? "explained" : "candidate";
  out["a"] = shape_body(pair.a);
  out["b"] = shape_body(pair.b);
  out["explanation"] = pair.explanation ? Json(*pair.explanation) : Json(nullptr);
  return out;
}

Json to_json(const Error& err) {
  return Json{{"schema", schema::kError}, {"error", std::string(to_string(err.code()))}, {"message", err.what()}};
}

}  // namespace walkspec
