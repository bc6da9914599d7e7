#include "pareto/atlas_io.hpp"

#include "pareto/problem_io.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace pareto {

using nlohmann::json;

namespace {

// JSON has no inf/nan; they are written as null and read back as NaN
// (residuals as +inf).
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

double readNumber(const json& j, const std::string& field, double ifNull) {
  if (j.is_null()) return ifNull;
  if (!j.is_number()) throw ParseError(field, "number expected");
  return j.get<double>();
}

VectorXd readVec(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "array expected");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) =
        readNumber(j[i], field, std::numeric_limits<double>::quiet_NaN());
  return v;
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(key, "missing");
  return j.at(key);
}

SolveStatus statusFromString(const std::string& s) {
  for (SolveStatus st :
       {SolveStatus::Converged, SolveStatus::MaxIterExceeded, SolveStatus::SingularNewtonSystem})
    if (toString(st) == s) return st;
  throw ParseError("status", "unknown status '" + s + "'");
}

json pairs(const std::vector<NodePair>& ps) {
  json a = json::array();
  for (auto [x, y] : ps) a.push_back({x, y});
  return a;
}

}  // namespace

void writeAtlasCsv(std::ostream& out, const ParetoAtlas& atlas) {
  if (atlas.points.empty()) return;
  const auto m = atlas.points.front().w.size();
  const auto n = atlas.points.front().x.size();
  const auto k = atlas.points.front().jacobianSV.size();
  for (int i = 1; i <= m; ++i) out << "w_" << i << ',';
  for (Eigen::Index i = 1; i <= n; ++i) out << "x_" << i << ',';
  for (int i = 1; i <= m; ++i) out << "f_" << i << ',';
  out << "residual,corank,face";
  for (Eigen::Index i = 1; i <= k; ++i) out << ",sv_" << i;
  out << ",status\n";
  out << std::setprecision(17);
  for (const ParetoPoint& pt : atlas.points) {
    for (int i = 0; i < m; ++i) out << pt.w[i] << ',';
    for (Eigen::Index i = 0; i < n; ++i) out << pt.x(i) << ',';
    for (int i = 0; i < m; ++i) out << pt.fx(i) << ',';
    out << pt.kktResidual << ',' << pt.corank << ',' << faceLabel(pt.w.support());
    for (Eigen::Index i = 0; i < k; ++i) out << ',' << (i < pt.jacobianSV.size() ? pt.jacobianSV(i) : 0.0);
    out << ',' << toString(pt.status) << '\n';
  }
}

json pointToJson(const ParetoPoint& pt) {
  return json{{"w", vec(pt.w.coords())},
              {"face", pt.w.face()},
              {"x", vec(pt.x)},
              {"f", vec(pt.fx)},
              {"residual", number(pt.kktResidual)},
              {"tolerance", pt.tolerance},
              {"singular_values", vec(pt.jacobianSV)},
              {"corank", pt.corank},
              {"status", toString(pt.status)},
              {"iterations", pt.iterations}};
}

ParetoPoint pointFromJson(const json& j) {
  ParetoPoint pt;
  const VectorXd w = readVec(require(j, "w"), "w");
  try {
    pt.w = j.contains("face") ? Weight::onFace(w, j.at("face").get<std::uint32_t>()) : Weight::make(w);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError("w", e.what());
  }
  pt.x = readVec(require(j, "x"), "x");
  pt.fx = readVec(require(j, "f"), "f");
  pt.kktResidual = readNumber(require(j, "residual"), "residual", std::numeric_limits<double>::infinity());
  pt.tolerance = j.contains("tolerance") ? readNumber(j.at("tolerance"), "tolerance", 0.0) : 0.0;
  pt.jacobianSV = j.contains("singular_values") ? readVec(j.at("singular_values"), "singular_values")
                                                : VectorXd();
  pt.corank = require(j, "corank").get<int>();
  pt.status = statusFromString(require(j, "status").get<std::string>());
  pt.iterations = j.value("iterations", 0);
  return pt;
}

json summaryToJson(const AtlasSummary& s) {
  return json{{"max_kkt_residual", number(s.maxKktResidual)},
              {"corank_histogram", s.corankHistogram},
              {"min_pairwise_x_distance", number(s.minPairwiseXDistance)},
              {"max_adjacent_x_distance", number(s.maxAdjacentXDistance)},
              {"failed_nodes", s.failedNodes}};
}

json certificateToJson(const CorankCertificate& c) {
  json w = json::array();
  for (const auto& wit : c.witnesses)
    w.push_back({{"node", wit.node}, {"corank", wit.corank}, {"w", vec(wit.w)}, {"x", vec(wit.x)}});
  return json{{"tau", c.tau},
              {"max_corank", c.maxCorank},
              {"min_second_singular_ratio", number(c.minSecondSingularRatio)},
              {"simplicial_on_sample", c.simplicialOnSample()},
              {"witnesses", w}};
}

json faceReportToJson(const FaceConsistencyReport& r) {
  json faces = json::array();
  for (const auto& f : r.faces)
    faces.push_back({{"face", faceLabel(f.face)}, {"nodes", f.nodes}, {"max_discrepancy", number(f.maxDiscrepancy)}});
  return json{{"consistent", r.consistent},
              {"max_discrepancy", number(r.maxDiscrepancy)},
              {"tolerance", r.tolerance},
              {"faces", faces}};
}

json injectivityToJson(const InjectivityReport& r) {
  return json{{"injective", r.injective},
              {"collapse_tol", r.collapseTol},
              {"weight_separation", r.weightSeparation},
              {"collapsed_pairs", r.collapsedPairs.size()},
              {"first_pairs", pairs(std::vector<NodePair>(
                                  r.collapsedPairs.begin(),
                                  r.collapsedPairs.begin() +
                                      static_cast<std::ptrdiff_t>(std::min<std::size_t>(10, r.collapsedPairs.size()))))}};
}

json foldToJson(const FoldReport& r) {
  return json{{"status", toString(r.status)},
              {"variable_order", r.variableOrder},
              {"minor_sigma_min", number(r.minorSigmaMin)},
              {"lambda_jacobian_rank", r.lambdaJacobianRank},
              {"direct_sum", r.directSum},
              {"is_fold", r.isFold}};
}

json atlasToJson(const ParetoAtlas& atlas) {
  json nodes = json::array();
  for (const auto& pt : atlas.points) nodes.push_back(pointToJson(pt));
  return json{{"m", atlas.grid.m()},
              {"resolution", atlas.grid.resolution()},
              {"grad_tol", atlas.gradTol},
              {"nodes", nodes},
              {"adjacency", pairs(atlas.adjacency)},
              {"summary", summaryToJson(atlas.summary)}};
}

std::vector<ParetoPoint> atlasPointsFromJson(const json& j) {
  const json& nodes = require(j, "nodes");
  if (!nodes.is_array()) throw ParseError("nodes", "array expected");
  std::vector<ParetoPoint> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(pointFromJson(n));
  return out;
}

}  // namespace pareto
