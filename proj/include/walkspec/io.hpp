#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "walkspec/asymptotics.hpp"
#include "walkspec/moment_map.hpp"
#include "walkspec/puiseux.hpp"
#include "walkspec/reconstruct.hpp"
#include "walkspec/spectrum.hpp"
#include "walkspec/walk_core.hpp"

namespace walkspec {

/// Key order is kept as written so output is byte-stable.
using Json = nlohmann::ordered_json;

namespace schema {
inline constexpr std::string_view kShape = "walkspec.shape/1";
inline constexpr std::string_view kSpectrum = "walkspec.spectrum/1";
inline constexpr std::string_view kComparison = "walkspec.comparison/1";
inline constexpr std::string_view kEmpirical = "walkspec.empirical_spectrum/1";
inline constexpr std::string_view kSeries = "walkspec.puiseux_series/1";
inline constexpr std::string_view kBranches = "walkspec.branches/1";
inline constexpr std::string_view kAlpha = "walkspec.alpha_branches/1";
inline constexpr std::string_view kReport = "walkspec.expansion_report/1";
inline constexpr std::string_view kReconstruction = "walkspec.reconstruction/1";
inline constexpr std::string_view kGuarantee = "walkspec.guarantee/1";
inline constexpr std::string_view kTables = "walkspec.tables/1";
inline constexpr std::string_view kCertificate = "walkspec.certificate/1";
inline constexpr std::string_view kSearch = "walkspec.search/1";
inline constexpr std::string_view kError = "walkspec.error/1";
}  // namespace schema

/// Strict parse: duplicate object keys are a ParseError.
Json parse_json(std::string_view text);
Json read_json_file(const std::string& path);
/// The "schema" field, or empty when absent.
std::string schema_of(const Json& j);

WalkShape shape_from_json(const Json& j, bool require_unbiased = false);
Json to_json(const WalkShape& shape);
/// Reals as decimal strings with `bits` of precision.
Json to_json(const RealShape& shape, unsigned bits);

Spectrum spectrum_from_json(const Json& j);
Json to_json(const Spectrum& spectrum);
Json to_json(const EmpiricalSpectrum& spectrum);

PuiseuxSeries series_from_json(const Json& j);
Json to_json(const PuiseuxSeries& series, unsigned bits);
BranchPair branches_from_json(const Json& j);
Json to_json(const BranchPair& pair, unsigned bits);

/// Per-coefficient agreement: within four standard errors or 1e-6 relative.
bool coefficient_agrees(const ExpansionReport& report, long l);
/// The run passes when residuals shrink, the prefactor matches
/// (2 pi J_2)^{-1/2} and every coefficient agrees.
bool report_passes(const ExpansionReport& report);
Json to_json(const ExpansionReport& report, unsigned bits);

Json to_json(const Reconstruction& rec, const GuaranteeReport& report, unsigned bits);
Json to_json(const MullerTableRow& row);
Json to_json(const GuaranteeReport& report);
Json to_json(const MorseCertificate& cert, unsigned bits);
Json to_json(const SearchPair& pair);
Json to_json(const Error& err);

}  // namespace walkspec
