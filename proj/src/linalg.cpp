#include "pareto/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace pareto::linalg {

RankInfo numericalRank(const MatrixXd& a, double relTol) {
  RankInfo info;
  if (a.rows() == 0 || a.cols() == 0) {
    info.singularValues = VectorXd(0);
    return info;
  }
  Eigen::JacobiSVD<MatrixXd> svd(a);
  info.singularValues = svd.singularValues();
  const double sigmaMax = info.singularValues.size() ? info.singularValues(0) : 0.0;
  info.threshold = relTol * sigmaMax;
  if (sigmaMax <= 0.0) return info;
  for (Eigen::Index i = 0; i < info.singularValues.size(); ++i)
    if (info.singularValues(i) > info.threshold) ++info.rank;
  return info;
}

MatrixXd nullSpace(const MatrixXd& a, double relTol) {
  const auto n = a.cols();
  if (a.rows() == 0) return MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();
  const double sigmaMax = s.size() ? s(0) : 0.0;
  int rank = 0;
  if (sigmaMax > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > relTol * sigmaMax) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

MatrixXd rangeBasis(const MatrixXd& a, double relTol) {
  if (a.cols() == 0) return MatrixXd(a.rows(), 0);
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullU);
  const VectorXd& s = svd.singularValues();
  const double sigmaMax = s.size() ? s(0) : 0.0;
  int rank = 0;
  if (sigmaMax > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > relTol * sigmaMax) ++rank;
  return svd.matrixU().leftCols(rank);
}

namespace {

MatrixXd projector(const MatrixXd& a) {
  const MatrixXd q = rangeBasis(a, 1e-12);
  return q * q.transpose();
}

}  // namespace

double subspaceDistance(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows()) return 1.0;
  const MatrixXd diff = projector(a) - projector(b);
  if (diff.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(diff);
  return svd.singularValues()(0);
}

double minEigenvalue(const MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

bool isSymmetric(const MatrixXd& a, double relTol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= relTol * scale;
}

NnlsResult nnls(const MatrixXd& a, const VectorXd& b, int maxIter) {
  const auto n = a.cols();
  if (maxIter <= 0) maxIter = static_cast<int>(3 * n + 10);
  NnlsResult out;
  out.x = VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max<double>(1.0, a.cwiseAbs().colwise().sum().maxCoeff()) *
                     static_cast<double>(std::max(a.rows(), n));

  auto solvePassive = [&](VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    z = VectorXd::Zero(n);
    if (idx.empty()) return;
    MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    const VectorXd zp = ap.completeOrthogonalDecomposition().solve(b);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
  };

  VectorXd w = a.transpose() * (b - a * out.x);
  int outer = 0;
  while (outer < maxIter) {
    Eigen::Index best = -1;
    double bestVal = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w(j) > bestVal) {
        bestVal = w(j);
        best = j;
      }
    if (best < 0) {
      out.converged = true;
      break;
    }
    ++outer;
    passive[static_cast<std::size_t>(best)] = true;
    VectorXd z;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      solvePassive(z);
      bool allPositive = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) allPositive = false;
      if (allPositive) break;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0)
          alpha = std::min(alpha, out.x(j) / (out.x(j) - z(j)));
      out.x += alpha * (z - out.x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && out.x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          out.x(j) = 0.0;
        }
    }
    out.x = z.cwiseMax(0.0);
    w = a.transpose() * (b - a * out.x);
  }
  out.iterations = outer;
  out.residual = (a * out.x - b).norm();
  return out;
}

double convexHullResidual(const MatrixXd& points, const VectorXd& x) {
  const auto dim = points.rows();
  const auto count = points.cols();
  MatrixXd a(dim + 1, count);
  a.topRows(dim) = points;
  a.row(dim).setOnes();
  VectorXd b(dim + 1);
  b.head(dim) = x;
  b(dim) = 1.0;
  return nnls(a, b).residual;
}

InteriorPoint maxMinSimplexPoint(const MatrixXd& basis, double marginTol) {
  InteriorPoint best;
  best.margin = -std::numeric_limits<double>::infinity();
  const auto m = basis.rows();
  const auto k = basis.cols();
  if (k == 0 || k > m) return best;

  // Unknowns (c, t). Equality: 1^T B c = 1. Active inequalities: (B c)_i = t.
  const Eigen::RowVectorXd sumRow = basis.colwise().sum();
  std::vector<int> choose(static_cast<std::size_t>(k));
  std::iota(choose.begin(), choose.end(), 0);
  const double feasTol = 1e-12;
  for (;;) {
    MatrixXd sys(k + 1, k + 1);
    VectorXd rhs = VectorXd::Zero(k + 1);
    sys.row(0) << sumRow, 0.0;
    rhs(0) = 1.0;
    for (Eigen::Index r = 0; r < k; ++r) sys.row(r + 1) << basis.row(choose[static_cast<std::size_t>(r)]), -1.0;
    Eigen::FullPivLU<MatrixXd> lu(sys);
    if (lu.isInvertible()) {
      const VectorXd sol = lu.solve(rhs);
      const VectorXd v = basis * sol.head(k);
      const double t = sol(k);
      if ((v.array() - t).minCoeff() >= -feasTol * std::max(1.0, v.cwiseAbs().maxCoeff()) &&
          t > best.margin) {
        best.margin = t;
        best.point = v;
      }
    }
    // next combination
    Eigen::Index i = k - 1;
    while (i >= 0 && choose[static_cast<std::size_t>(i)] == static_cast<int>(m - k + i)) --i;
    if (i < 0) break;
    ++choose[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < k; ++j)
      choose[static_cast<std::size_t>(j)] = choose[static_cast<std::size_t>(j - 1)] + 1;
  }
  best.found = best.point.size() > 0 && best.margin > marginTol;
  return best;
}

}  // namespace pareto::linalg
