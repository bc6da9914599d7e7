#pragma once

// Small dense linear-algebra helpers shared by the solver and diagnostics.

#include <Eigen/Dense>

namespace pareto::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct RankInfo {
  VectorXd singularValues;  // descending
  int rank = 0;
  double threshold = 0.0;  // absolute cutoff tau * sigma_max
};

/// Numerical rank: #{sigma > tau * sigma_max}; a zero matrix has rank 0.
RankInfo numericalRank(const MatrixXd& a, double relTol);

/// Orthonormal basis (columns) of ker(a) under the same rank rule.
MatrixXd nullSpace(const MatrixXd& a, double relTol);

/// Orthonormal basis (columns) of the range of a.
MatrixXd rangeBasis(const MatrixXd& a, double relTol);

/// Spectral norm of the difference of orthogonal projectors onto span(a) and
/// span(b). Zero iff the spans coincide; 1 when dimensions differ.
double subspaceDistance(const MatrixXd& a, const MatrixXd& b);

double minEigenvalue(const MatrixXd& symmetric);

bool isSymmetric(const MatrixXd& a, double relTol = 1e-12);

struct NnlsResult {
  VectorXd x;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Lawson-Hanson non-negative least squares: min ||a x - b|| s.t. x >= 0.
NnlsResult nnls(const MatrixXd& a, const VectorXd& b, int maxIter = 0);

/// Membership of x in the convex hull of the columns of `points`, by NNLS on
/// the barycentric system. Returns the residual of the best convex combination.
double convexHullResidual(const MatrixXd& points, const VectorXd& x);

struct InteriorPoint {
  bool found = false;
  double margin = 0.0;  // min_i v_i of the maximizer
  VectorXd point;       // v = basis * c with sum(v) = 1
};

/// Maximizes min_i v_i over v in span(basis) with sum(v) = 1. The subspace
/// meets the open positive orthant iff the optimal margin is positive.
/// Solved exactly by vertex enumeration, so only suitable for small sizes.
InteriorPoint maxMinSimplexPoint(const MatrixXd& basis, double marginTol = 1e-12);

}  // namespace pareto::linalg
