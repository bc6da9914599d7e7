#pragma once

// Ready-made pipelines: multi-facility location, phenotypic divergence and
// the ridge regularization path.

#include "pareto/atlas.hpp"
#include "pareto/diagnostics.hpp"
#include "pareto/parallel.hpp"
#include "pareto/problem.hpp"
#include "pareto/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace pareto {

// Squaring y -> (y_1^2, ..., y_m^2) preserves the Pareto order on [0, inf)^m.
// All solving happens on the squared forms; these two helpers only exist so
// that property can be tested.
VectorXd squareTransform(const VectorXd& y);
/// a < b in the Pareto order: a_i <= b_i for all i and a != b.
bool paretoLess(const VectorXd& a, const VectorXd& b);

// ---------------------------------------------------------------------------
// Location

struct LocationInstance {
  std::vector<VectorXd> points;  // demand points p_1..p_m, all in R^n

  /// Throws ProblemError on an empty or ragged point set.
  static LocationInstance make(std::vector<VectorXd> points);
  /// Affine independence of {p_i - p_1}.
  bool generalPosition(double relTol = 1e-10) const;
};

struct LocationReport {
  ParetoAtlas atlas;
  bool generalPosition = false;
  double maxBarycentricError = 0.0;  // max_w || x*(w) - sum_i w_i p_i ||
  double maxHullResidual = 0.0;
  double hullFraction = 0.0;  // share of nodes within 1e-9 of conv{p_i}
  CorankCertificate corank;

  bool passed(double baryTol = 1e-8) const {
    return atlas.summary.failedNodes == 0 && maxBarycentricError <= baryTol && hullFraction == 1.0;
  }
};

LocationReport locationParetoSet(const LocationInstance& inst, int resolution,
                                 const SolverConfig& cfg = {}, double tau = 1e-8,
                                 Execution exec = Execution::Parallel);

// ---------------------------------------------------------------------------
// Phenotypic divergence

struct PhenotypicReport {
  ParetoAtlas atlas;
  CorankCertificate corank;
  FaceConsistencyReport faces;
  InjectivityReport injectivity;
  DominanceReport dominance;
  /// Present only when the sample has corank <= 1 everywhere; then true iff
  /// the faces are consistent and no collapse was found.
  std::optional<bool> simplicial;
};

/// f_i = ||A_i (x - p_i)||^2. Throws ProblemError if some A_i is not symmetric
/// positive definite.
PhenotypicReport phenotypicParetoSet(const Phenotypic& spec, int resolution,
                                     const SolverConfig& cfg = {}, double tau = 1e-8,
                                     Execution exec = Execution::Parallel);

// ---------------------------------------------------------------------------
// Ridge path

struct RidgeInstance {
  MatrixXd X;
  VectorXd y;
  double mu = 1.0;

  /// Throws ProblemError unless mu > 0 and the shapes agree.
  static RidgeInstance make(MatrixXd X, VectorXd y, double mu);
  /// Header row, last column is the response.
  static RidgeInstance fromCsv(const std::filesystem::path& path, double mu);
  /// Centers every column and y, and scales the columns of X to unit
  /// standard deviation. Never applied implicitly.
  RidgeInstance standardized() const;
  RidgePair spec() const { return RidgePair{X, y, mu}; }
};

/// Seeded Gaussian design with a Gaussian coefficient vector and noise.
RidgeInstance syntheticRidge(int rows, int cols, double mu, std::uint64_t seed);

/// Solves (X^T X + lambda I) theta = X^T y directly.
VectorXd ridgeClosedForm(const MatrixXd& X, const VectorXd& y, double lambda);

/// lambda(w) = mu + w_2 / w_1, with w_1 guarded below by machine epsilon;
/// infinite at w_1 = 0.
double ridgeLambda(double mu, double w1, double w2);

struct RidgePathRow {
  double w1 = 0.0;
  double w2 = 0.0;
  double lambda = 0.0;
  VectorXd theta;
  double residual = 0.0;     // KKT residual of the scalarized solve
  double oracleError = 0.0;  // relative error against ridgeClosedForm; 0 at w = (0, 1)
};

struct RidgePath {
  std::vector<RidgePathRow> rows;  // w_1 = 1, 1 - 1/r, ..., 1/r, then the (0, 1) endpoint
  double maxOracleError = 0.0;
  bool monotone = true;  // ||theta|| nonincreasing along the path
};

/// Throws std::invalid_argument if resolution < 1.
RidgePath ridgePath(const RidgeInstance& inst, int resolution, const SolverConfig& cfg = {});

/// Columns w1,w2,lambda,theta_1..theta_p,residual. Infinite lambda is "inf".
void writeRidgePathCsv(std::ostream& out, const RidgePath& path);

}  // namespace pareto
