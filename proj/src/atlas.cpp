#include "pareto/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace pareto {

namespace {

ParetoPoint failedPoint(const Weight& w, const VectorXd& x, const Problem& p) {
  ParetoPoint pt;
  pt.w = w;
  pt.x = x;
  pt.fx = VectorXd::Constant(p.m(), std::numeric_limits<double>::quiet_NaN());
  pt.kktResidual = std::numeric_limits<double>::infinity();
  pt.status = SolveStatus::SingularNewtonSystem;
  return pt;
}

ParetoPoint solveNode(const Problem& p, const ParetoAtlas& atlas, std::size_t node,
                      const SolverConfig& base) {
  const Weight w = Weight::make(atlas.grid.weight(node));
  SolverConfig cfg = base;
  const std::ptrdiff_t parent = atlas.plan.parent[node];
  if (parent >= 0) {
    const VectorXd& start = atlas.points[static_cast<std::size_t>(parent)].x;
    if (start.size() == p.n() && start.allFinite()) cfg.initialPoint = start;
  }
  try {
    return scalarize(p, w, cfg);
  } catch (const std::exception&) {
    return failedPoint(w, cfg.initialPoint.value_or(VectorXd::Zero(p.n())), p);
  }
}

void solveLevelSerial(const Problem& p, ParetoAtlas& atlas, const std::vector<std::size_t>& level,
                      const SolverConfig& cfg) {
  for (std::size_t node : level) atlas.points[node] = solveNode(p, atlas, node, cfg);
}

void solveLevelParallel(const Problem& p, ParetoAtlas& atlas,
                        const std::vector<std::size_t>& level, const SolverConfig& cfg) {
  const auto count = static_cast<std::ptrdiff_t>(level.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const std::size_t node = level[static_cast<std::size_t>(i)];
    atlas.points[node] = solveNode(p, atlas, node, cfg);
  }
}

// Collects all pairs (a < b) satisfying pred, in lexicographic order.
template <class Pred>
std::vector<NodePair> collectPairs(std::size_t count, Pred&& pred, Execution exec) {
  std::vector<NodePair> out;
  if (!parallelEnabled(exec)) {
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = a + 1; b < count; ++b)
        if (pred(a, b)) out.emplace_back(a, b);
    return out;
  }
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel
  {
    std::vector<NodePair> local;
#pragma omp for schedule(dynamic, 8) nowait
    for (std::ptrdiff_t a = 0; a < n; ++a)
      for (std::ptrdiff_t b = a + 1; b < n; ++b)
        if (pred(static_cast<std::size_t>(a), static_cast<std::size_t>(b)))
          local.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
#pragma omp critical(pareto_collect_pairs)
    out.insert(out.end(), local.begin(), local.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

AtlasSummary summarize(const Problem& p, const ParetoAtlas& atlas, Execution exec) {
  AtlasSummary s;
  s.corankHistogram.assign(static_cast<std::size_t>(std::min(p.n(), p.m()) + 1), 0);
  for (const ParetoPoint& pt : atlas.points) {
    if (!pt.converged()) ++s.failedNodes;
    s.maxKktResidual = std::max(s.maxKktResidual, pt.kktResidual);
    if (pt.corank >= 0 && pt.corank < static_cast<int>(s.corankHistogram.size()))
      ++s.corankHistogram[static_cast<std::size_t>(pt.corank)];
  }
  for (const auto& [a, b] : atlas.adjacency)
    s.maxAdjacentXDistance =
        std::max(s.maxAdjacentXDistance, (atlas.points[a].x - atlas.points[b].x).norm());
  s.minPairwiseXDistance = minPairwiseDistance(atlas, exec);
  return s;
}

}  // namespace

WarmStartPlan planWarmStarts(const SimplexGrid& grid) {
  WarmStartPlan plan;
  const std::size_t count = grid.size();
  plan.parent.assign(count, -1);

  // Root: node nearest the barycenter, smallest index on ties.
  std::size_t root = 0;
  long long best = std::numeric_limits<long long>::max();
  for (std::size_t node = 0; node < count; ++node) {
    long long d = 0;
    for (int k : grid.lattice(node)) {
      const long long t = static_cast<long long>(grid.m()) * k - grid.resolution();
      d += t * t;
    }
    if (d < best) {
      best = d;
      root = node;
    }
  }

  std::vector<int> depth(count, -1);
  std::deque<std::size_t> queue{root};
  depth[root] = 0;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const auto lvl = static_cast<std::size_t>(depth[cur]);
    if (plan.levels.size() <= lvl) plan.levels.resize(lvl + 1);
    plan.levels[lvl].push_back(cur);
    for (std::size_t nb : grid.neighbors(cur)) {
      if (depth[nb] >= 0) continue;
      depth[nb] = depth[cur] + 1;
      plan.parent[nb] = static_cast<std::ptrdiff_t>(cur);
      queue.push_back(nb);
    }
  }
  return plan;
}

ParetoAtlas buildAtlas(const Problem& p, int resolution, const SolverConfig& cfg, Execution exec) {
  ParetoAtlas atlas{SimplexGrid(p.m(), resolution), {}, {}, {}, cfg.gradTol, {}};
  atlas.adjacency = atlas.grid.adjacency();
  atlas.plan = planWarmStarts(atlas.grid);
  atlas.points.resize(atlas.grid.size());
  for (const auto& level : atlas.plan.levels) {
    if (parallelEnabled(exec))
      solveLevelParallel(p, atlas, level, cfg);
    else
      solveLevelSerial(p, atlas, level, cfg);
  }
  atlas.summary = summarize(p, atlas, exec);
  return atlas;
}

FaceConsistencyReport faceConsistency(const Problem& p, const ParetoAtlas& atlas,
                                      const SolverConfig& cfg, Execution exec) {
  const int m = p.m();
  struct Item {
    std::uint32_t face;
    std::size_t node;
  };
  std::vector<Item> items;
  const std::uint32_t full = fullFace(m);
  for (std::uint32_t face = 1; face <= full && face != 0; ++face) {
    for (std::size_t node = 0; node < atlas.grid.size(); ++node)
      if ((atlas.grid.faceTag(node) & ~face) == 0) items.push_back({face, node});
    if (face == full) break;
  }

  SolverConfig cold = cfg;
  cold.initialPoint.reset();
  std::vector<double> discrepancy(items.size(), 0.0);
  std::vector<double> tolerance(items.size(), 0.0);
  auto check = [&](std::size_t k) {
    const Item& it = items[k];
    const ParetoPoint& ref = atlas.points[it.node];
    const auto idx = faceIndices(it.face);
    try {
      const ParetoPoint sub = subproblemSolve(p, idx, ref.w, cold);
      discrepancy[k] = sub.converged() ? (sub.x - ref.x).norm() : std::numeric_limits<double>::infinity();
      tolerance[k] = 10.0 * std::max(sub.tolerance, ref.tolerance);
    } catch (const std::exception&) {
      discrepancy[k] = std::numeric_limits<double>::infinity();
    }
  };
  if (parallelEnabled(exec)) {
    const auto count = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t k = 0; k < count; ++k) check(static_cast<std::size_t>(k));
  } else {
    for (std::size_t k = 0; k < items.size(); ++k) check(k);
  }

  FaceConsistencyReport report;
  report.tolerance = 10.0 * cfg.gradTol;
  for (std::uint32_t face = 1; face <= full && face != 0; ++face) {
    report.faces.push_back({face, 0, 0.0});
    if (face == full) break;
  }
  for (std::size_t k = 0; k < items.size(); ++k) {
    FaceDiscrepancy& fd = report.faces[items[k].face - 1];
    ++fd.nodes;
    fd.maxDiscrepancy = std::max(fd.maxDiscrepancy, discrepancy[k]);
    report.maxDiscrepancy = std::max(report.maxDiscrepancy, discrepancy[k]);
    report.tolerance = std::max(report.tolerance, tolerance[k]);
    if (!(discrepancy[k] <= tolerance[k])) report.consistent = false;
  }
  return report;
}

InjectivityReport injectivityScan(const ParetoAtlas& atlas, double collapseTol, Execution exec) {
  InjectivityReport r;
  r.collapseTol = collapseTol;
  r.weightSeparation = 2.0 * atlas.grid.step();
  std::vector<VectorXd> w(atlas.grid.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = atlas.grid.weight(i);
  r.collapsedPairs = collectPairs(
      atlas.points.size(),
      [&](std::size_t a, std::size_t b) {
        return (atlas.points[a].x - atlas.points[b].x).norm() <= collapseTol &&
               (w[a] - w[b]).norm() > r.weightSeparation;
      },
      exec);
  r.injective = r.collapsedPairs.empty();
  return r;
}

bool dominates(const VectorXd& a, const VectorXd& b, double tol) {
  bool strict = false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) > b(i) + tol) return false;
    if (a(i) < b(i) - tol) strict = true;
  }
  return strict;
}

DominanceReport mutualNonDomination(const ParetoAtlas& atlas, double tol, Execution exec) {
  DominanceReport r;
  auto pairs = collectPairs(
      atlas.points.size(),
      [&](std::size_t a, std::size_t b) {
        const auto& fa = atlas.points[a].fx;
        const auto& fb = atlas.points[b].fx;
        return dominates(fa, fb, tol) || dominates(fb, fa, tol);
      },
      exec);
  for (auto [a, b] : pairs) {
    if (dominates(atlas.points[a].fx, atlas.points[b].fx, tol))
      r.dominatedPairs.emplace_back(a, b);
    else
      r.dominatedPairs.emplace_back(b, a);
  }
  r.nonDominated = r.dominatedPairs.empty();
  return r;
}

double minPairwiseDistance(const ParetoAtlas& atlas, Execution exec) {
  const auto n = static_cast<std::ptrdiff_t>(atlas.points.size());
  double best = std::numeric_limits<double>::infinity();
  if (parallelEnabled(exec)) {
#pragma omp parallel for schedule(dynamic, 8) reduction(min : best)
    for (std::ptrdiff_t a = 0; a < n; ++a)
      for (std::ptrdiff_t b = a + 1; b < n; ++b)
        best = std::min(best, (atlas.points[static_cast<std::size_t>(a)].x -
                               atlas.points[static_cast<std::size_t>(b)].x)
                                  .norm());
  } else {
    for (std::ptrdiff_t a = 0; a < n; ++a)
      for (std::ptrdiff_t b = a + 1; b < n; ++b)
        best = std::min(best, (atlas.points[static_cast<std::size_t>(a)].x -
                               atlas.points[static_cast<std::size_t>(b)].x)
                                  .norm());
  }
  return n < 2 ? 0.0 : best;
}

}  // namespace pareto
