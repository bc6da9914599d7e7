#include "pareto/diagnostics.hpp"

#include "pareto/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pareto {

namespace {

// Minor of the jacobian in the variables-by-objectives layout: row r of the
// result is variable rows[r], column c is objective c.
MatrixXd minorMatrix(const MatrixXd& jac, std::span<const int> rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), jac.rows());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = jac.col(rows[r]).transpose();
  return out;
}

MatrixXd cofactors(const MatrixXd& a) {
  const auto k = a.rows();
  if (k == 1) return MatrixXd::Ones(1, 1);
  MatrixXd c(k, k);
  MatrixXd sub(k - 1, k - 1);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index col = 0; col < k; ++col) {
      for (Eigen::Index i = 0, si = 0; i < k; ++i) {
        if (i == r) continue;
        for (Eigen::Index j = 0, sj = 0; j < k; ++j) {
          if (j == col) continue;
          sub(si, sj++) = a(i, j);
        }
        ++si;
      }
      c(r, col) = (((r + col) % 2) ? -1.0 : 1.0) * sub.determinant();
    }
  return c;
}

std::vector<int> minorRows(std::span<const int> order, int m, int i) {
  std::vector<int> rows(order.begin(), order.begin() + (m - 1));
  rows.push_back(order[static_cast<std::size_t>(m - 1 + i)]);
  return rows;
}

void checkOrder(const Problem& p, std::span<const int> order) {
  if (static_cast<int>(order.size()) != p.n())
    throw std::invalid_argument("variable order must be a permutation of 0..n-1");
  std::vector<int> sorted(order.begin(), order.end());
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < p.n(); ++i)
    if (sorted[static_cast<std::size_t>(i)] != i)
      throw std::invalid_argument("variable order must be a permutation of 0..n-1");
  if (p.n() < p.m()) throw std::invalid_argument("lambda minors need n >= m");
}

}  // namespace

RankReport rankReport(const MatrixXd& jacobian, double tau) {
  const auto info = linalg::numericalRank(jacobian, tau);
  RankReport r;
  r.singularValues = info.singularValues;
  r.rank = info.rank;
  r.corank = static_cast<int>(std::min(jacobian.rows(), jacobian.cols())) - info.rank;
  r.tolerance = tau;
  return r;
}

RankReport corankAt(const Problem& p, const VectorXd& x, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("corankAt: tau must lie in (0, 1)");
  return rankReport(p.jacobian(x), tau);
}

CorankCertificate certifyCorankOnAtlas(const Problem& p, const ParetoAtlas& atlas, double tau,
                                       Execution exec) {
  const std::size_t count = atlas.points.size();
  std::vector<RankReport> reports(count);
  auto work = [&](std::size_t i) { reports[i] = corankAt(p, atlas.points[i].x, tau); };
  if (parallelEnabled(exec)) {
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) work(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) work(i);
  }

  CorankCertificate cert;
  cert.tau = tau;
  const int v = std::min(p.n(), p.m());
  cert.minSecondSingularRatio =
      v >= 2 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < count; ++i) {
    const RankReport& r = reports[i];
    cert.maxCorank = std::max(cert.maxCorank, r.corank);
    if (r.corank >= 2) cert.witnesses.push_back({i, r.corank, atlas.points[i].w.coords(), atlas.points[i].x});
    if (v >= 2) {
      const double smax = r.singularValues(0);
      const double ratio = smax > 0.0 ? r.singularValues(v - 2) / smax : 0.0;
      cert.minSecondSingularRatio = std::min(cert.minSecondSingularRatio, ratio);
    }
  }
  return cert;
}

std::string toString(FoldStatus s) {
  switch (s) {
    case FoldStatus::Ok: return "ok";
    case FoldStatus::NotCorankOne: return "not_corank_one";
    case FoldStatus::NoRegularMinor: return "no_regular_minor";
    case FoldStatus::DimensionTooSmall: return "dimension_too_small";
  }
  return "unknown";
}

VectorXd lambdaMinors(const Problem& p, const VectorXd& x, std::span<const int> order) {
  checkOrder(p, order);
  const MatrixXd jac = p.jacobian(x);
  const int m = p.m();
  const int k = p.n() - m + 1;
  VectorXd out(k);
  for (int i = 0; i < k; ++i) out(i) = minorMatrix(jac, minorRows(order, m, i)).determinant();
  return out;
}

MatrixXd lambdaJacobian(const Problem& p, const VectorXd& x, std::span<const int> order) {
  checkOrder(p, order);
  const Evaluation e = p.evaluate(x);
  const int m = p.m();
  const int n = p.n();
  const int k = n - m + 1;
  MatrixXd out = MatrixXd::Zero(k, n);
  for (int i = 0; i < k; ++i) {
    const auto rows = minorRows(order, m, i);
    const MatrixXd cof = cofactors(minorMatrix(e.jacobian, rows));
    // d det(M) = sum_{r,c} cof(r,c) dM(r,c), dM(r,c)/dx = row rows[r] of H_c.
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        out.row(i) += cof(r, c) * e.hessians[static_cast<std::size_t>(c)].row(rows[static_cast<std::size_t>(r)]);
  }
  return out;
}

MatrixXd lambdaJacobianFiniteDifference(const Problem& p, const VectorXd& x,
                                        std::span<const int> order, double h) {
  const int k = p.n() - p.m() + 1;
  MatrixXd out(k, p.n());
  for (int j = 0; j < p.n(); ++j) {
    VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    out.col(j) = (lambdaMinors(p, xp, order) - lambdaMinors(p, xm, order)) / (2.0 * h);
  }
  return out;
}

FoldReport foldCheck(const Problem& p, const VectorXd& x, double tau) {
  FoldReport rep;
  const int n = p.n();
  const int m = p.m();
  if (n < m) {
    rep.status = FoldStatus::DimensionTooSmall;
    return rep;
  }
  const MatrixXd jac = p.jacobian(x);
  const RankReport rank = rankReport(jac, tau);
  if (rank.corank != 1) {
    rep.status = FoldStatus::NotCorankOne;
    return rep;
  }

  // Choose the m-1 variables whose minor against f_1..f_{m-1} is best conditioned.
  const int lead = m - 1;
  std::vector<int> best;
  double bestSigma = lead == 0 ? std::numeric_limits<double>::infinity() : -1.0;
  if (lead > 0) {
    std::vector<int> comb(static_cast<std::size_t>(lead));
    std::iota(comb.begin(), comb.end(), 0);
    const MatrixXd leadRows = jac.topRows(lead);
    for (;;) {
      MatrixXd minor(lead, lead);
      for (int c = 0; c < lead; ++c) minor.col(c) = leadRows.col(comb[static_cast<std::size_t>(c)]);
      Eigen::JacobiSVD<MatrixXd> svd(minor);
      const double smin = svd.singularValues()(lead - 1);
      if (smin > bestSigma) {
        bestSigma = smin;
        best = comb;
      }
      int i = lead - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - lead + i) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < lead; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  rep.minorSigmaMin = bestSigma;
  const double sigmaMax = rank.singularValues.size() ? rank.singularValues(0) : 0.0;
  if (!(bestSigma > tau * sigmaMax)) {
    rep.status = FoldStatus::NoRegularMinor;
    return rep;
  }
  rep.variableOrder = best;
  for (int j = 0; j < n; ++j)
    if (std::find(best.begin(), best.end(), j) == best.end()) rep.variableOrder.push_back(j);

  rep.lambdaJacobian = lambdaJacobian(p, x, rep.variableOrder);
  rep.lambdaJacobianRank = linalg::numericalRank(rep.lambdaJacobian, tau).rank;
  rep.kernelDLambdaBasis = linalg::nullSpace(rep.lambdaJacobian, tau);
  rep.kernelDfBasis = linalg::nullSpace(jac, tau);
  const auto dims = rep.kernelDLambdaBasis.cols() + rep.kernelDfBasis.cols();
  if (dims == n) {
    MatrixXd both(n, dims);
    both << rep.kernelDLambdaBasis, rep.kernelDfBasis;
    rep.directSum = linalg::numericalRank(both, tau).rank == n;
  }
  rep.isFold = rep.lambdaJacobianRank == n - m + 1 && rep.directSum;
  return rep;
}

bool differenceRankTest(const MatrixXd& jacobian, double tau) {
  const auto m = jacobian.rows();
  if (m <= 1) return true;
  MatrixXd diff(jacobian.cols(), m - 1);
  for (Eigen::Index i = 0; i < m - 1; ++i) diff.col(i) = (jacobian.row(i) - jacobian.row(m - 1)).transpose();
  return linalg::numericalRank(diff, tau).rank == m - 1;
}

double imageWeightAlignment(const MatrixXd& jacobian, const VectorXd& w, double tau) {
  const MatrixXd u = linalg::rangeBasis(jacobian, tau);
  if (u.cols() == 0) return 0.0;
  return (u.transpose() * w.normalized()).cwiseAbs().maxCoeff();
}

}  // namespace pareto
