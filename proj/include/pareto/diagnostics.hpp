#pragma once

// Corank certification and the fold criterion on sampled Pareto sets.
//
// Jacobians here are m x n (row i = grad f_i). The lambda minors J_i are
// defined on the transposed, variables-by-objectives layout; the rank and
// kernels are the same either way.

#include "pareto/atlas.hpp"
#include "pareto/parallel.hpp"
#include "pareto/problem.hpp"

#include <span>
#include <string>
#include <vector>

namespace pareto {

struct RankReport {
  VectorXd singularValues;
  int rank = 0;
  int corank = 0;  // min(n, m) - rank
  double tolerance = 0.0;
};

RankReport rankReport(const MatrixXd& jacobian, double tau);
RankReport corankAt(const Problem& p, const VectorXd& x, double tau = 1e-8);

struct CorankWitness {
  std::size_t node = 0;
  int corank = 0;
  VectorXd w;
  VectorXd x;
};

struct CorankCertificate {
  int maxCorank = 0;
  std::vector<CorankWitness> witnesses;  // nodes with corank >= 2
  double tau = 0.0;
  /// min over nodes of sigma_{v-1} / sigma_max, v = min(n, m): the distance
  /// of the sample from corank 2. NaN when v < 2.
  double minSecondSingularRatio = 0.0;
  bool simplicialOnSample() const { return maxCorank <= 1; }
};

CorankCertificate certifyCorankOnAtlas(const Problem& p, const ParetoAtlas& atlas,
                                       double tau = 1e-8, Execution exec = Execution::Parallel);

enum class FoldStatus { Ok, NotCorankOne, NoRegularMinor, DimensionTooSmall };
std::string toString(FoldStatus s);

struct FoldReport {
  FoldStatus status = FoldStatus::Ok;
  std::vector<int> variableOrder;  // leading m-1 form the regular minor
  double minorSigmaMin = 0.0;
  MatrixXd lambdaJacobian;  // (n-m+1) x n
  int lambdaJacobianRank = 0;
  MatrixXd kernelDfBasis;
  MatrixXd kernelDLambdaBasis;
  bool directSum = false;
  bool isFold = false;
};

/// Fold test at x: corank 1, a variable order with a regular leading
/// (m-1)x(m-1) minor (chosen to maximize its smallest singular value), then
/// rank(d lambda) = n-m+1 and ker(d lambda) + ker(df) = R^n as a direct sum.
FoldReport foldCheck(const Problem& p, const VectorXd& x, double tau = 1e-8);

/// lambda_f(x) = (J_1(x), ..., J_{n-m+1}(x)) for a given variable order.
VectorXd lambdaMinors(const Problem& p, const VectorXd& x, std::span<const int> order);

/// d lambda_f from exact Hessians via cofactor expansion.
MatrixXd lambdaJacobian(const Problem& p, const VectorXd& x, std::span<const int> order);

/// Central finite-difference cross-check of lambdaJacobian.
MatrixXd lambdaJacobianFiniteDifference(const Problem& p, const VectorXd& x,
                                        std::span<const int> order, double h = 1e-6);

/// Rank of the n x (m-1) matrix with columns grad f_i - grad f_m equals m-1.
bool differenceRankTest(const MatrixXd& jacobian, double tau = 1e-8);

/// max_k |<w/|w|, u_k>| over an orthonormal basis u_k of img(df). Zero when
/// img(df) is the orthogonal complement of w.
double imageWeightAlignment(const MatrixXd& jacobian, const VectorXd& w, double tau = 1e-8);

}  // namespace pareto
