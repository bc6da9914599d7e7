#pragma once

// CSV and JSON exports of atlases and diagnostics, for plotting and scripting.
// The column and key layout is documented in README.md and kept stable.

#include "pareto/atlas.hpp"
#include "pareto/diagnostics.hpp"

#include "json.hpp"

#include <iosfwd>
#include <vector>

namespace pareto {

/// Columns: w_1..w_m, x_1..x_n, f_1..f_m, residual, corank, face,
/// sv_1..sv_k (k = min(n, m)), status.
void writeAtlasCsv(std::ostream& out, const ParetoAtlas& atlas);

nlohmann::json pointToJson(const ParetoPoint& pt);
/// Inverse of pointToJson. Throws ParseError on malformed input.
ParetoPoint pointFromJson(const nlohmann::json& j);

nlohmann::json summaryToJson(const AtlasSummary& s);
nlohmann::json certificateToJson(const CorankCertificate& c);
nlohmann::json faceReportToJson(const FaceConsistencyReport& r);
nlohmann::json injectivityToJson(const InjectivityReport& r);
nlohmann::json foldToJson(const FoldReport& r);

/// {"m", "resolution", "gradTol", "nodes": [...], "adjacency": [[a, b], ...],
///  "summary": {...}}
nlohmann::json atlasToJson(const ParetoAtlas& atlas);
/// Points of an exported atlas, in node order.
std::vector<ParetoPoint> atlasPointsFromJson(const nlohmann::json& j);

}  // namespace pareto
