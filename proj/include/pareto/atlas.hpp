#pragma once

// The Pareto atlas: every node of a simplex grid mapped through the
// scalarizer, stratified by face.

#include "pareto/parallel.hpp"
#include "pareto/simplex_grid.hpp"
#include "pareto/solver.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace pareto {

using NodePair = std::pair<std::size_t, std::size_t>;

struct AtlasSummary {
  double maxKktResidual = 0.0;
  std::vector<int> corankHistogram;  // index = corank
  double minPairwiseXDistance = 0.0;
  double maxAdjacentXDistance = 0.0;  // dispersion of the sample
  std::size_t failedNodes = 0;
};

/// Breadth-first solve order from the node nearest the barycenter. Every
/// non-root node warm-starts from its parent, which lies on the previous level.
struct WarmStartPlan {
  std::vector<std::vector<std::size_t>> levels;
  std::vector<std::ptrdiff_t> parent;  // -1 for the root
};

WarmStartPlan planWarmStarts(const SimplexGrid& grid);

struct ParetoAtlas {
  SimplexGrid grid;
  std::vector<ParetoPoint> points;  // one per grid node
  std::vector<NodePair> adjacency;
  WarmStartPlan plan;
  double gradTol = 0.0;
  AtlasSummary summary;
};

/// Solves every grid node, level by level. Parallel and serial execution give
/// bit-identical atlases. Solver failures are recorded per node.
ParetoAtlas buildAtlas(const Problem& p, int resolution, const SolverConfig& cfg = {},
                       Execution exec = Execution::Parallel);

struct FaceDiscrepancy {
  std::uint32_t face = 0;
  std::size_t nodes = 0;
  double maxDiscrepancy = 0.0;
};

struct FaceConsistencyReport {
  std::vector<FaceDiscrepancy> faces;  // every nonempty face, by bitmask
  double maxDiscrepancy = 0.0;
  double tolerance = 0.0;
  bool consistent = true;
};

/// Re-solves every node of every face Delta_I through the subproblem f_I
/// (cold start) and compares with the atlas. Tolerance is 10x the residual
/// tolerance of the solves.
FaceConsistencyReport faceConsistency(const Problem& p, const ParetoAtlas& atlas,
                                      const SolverConfig& cfg = {},
                                      Execution exec = Execution::Parallel);

struct InjectivityReport {
  bool injective = true;
  std::vector<NodePair> collapsedPairs;  // sorted
  double collapseTol = 0.0;
  double weightSeparation = 0.0;  // pairs closer than this in w are ignored
};

/// Flags node pairs with ||x_a - x_b|| <= collapseTol whose weights are more
/// than two grid steps apart.
InjectivityReport injectivityScan(const ParetoAtlas& atlas, double collapseTol = 1e-7,
                                  Execution exec = Execution::Parallel);

/// a dominates b: a_i <= b_i + tol for all i and a_j < b_j - tol for some j.
bool dominates(const VectorXd& a, const VectorXd& b, double tol = 1e-9);

struct DominanceReport {
  bool nonDominated = true;
  std::vector<NodePair> dominatedPairs;  // (dominating, dominated)
};

DominanceReport mutualNonDomination(const ParetoAtlas& atlas, double tol = 1e-9,
                                    Execution exec = Execution::Parallel);

double minPairwiseDistance(const ParetoAtlas& atlas, Execution exec = Execution::Parallel);

}  // namespace pareto
