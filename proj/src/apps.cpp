#include "pareto/apps.hpp"

#include "pareto/linalg.hpp"
#include "pareto/problem_io.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace pareto {

VectorXd squareTransform(const VectorXd& y) { return y.array().square().matrix(); }

bool paretoLess(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paretoLess: size mismatch");
  return (a.array() <= b.array()).all() && a != b;
}

// ---------------------------------------------------------------------------

LocationInstance LocationInstance::make(std::vector<VectorXd> points) {
  if (points.empty()) throw ProblemError("location: at least one demand point required");
  for (const auto& p : points)
    if (p.size() != points.front().size() || p.size() == 0)
      throw ProblemError("location: dimension mismatch between demand points");
  return LocationInstance{std::move(points)};
}

bool LocationInstance::generalPosition(double relTol) const {
  if (points.size() <= 1) return true;
  const auto n = points.front().size();
  const auto k = static_cast<Eigen::Index>(points.size() - 1);
  if (k > n) return false;
  MatrixXd diff(n, k);
  for (Eigen::Index i = 0; i < k; ++i) diff.col(i) = points[static_cast<std::size_t>(i + 1)] - points.front();
  return linalg::numericalRank(diff, relTol).rank == k;
}

LocationReport locationParetoSet(const LocationInstance& inst, int resolution,
                                 const SolverConfig& cfg, double tau, Execution exec) {
  const Problem p = Problem::build(DistanceSquared{inst.points});
  LocationReport rep{buildAtlas(p, resolution, cfg, exec), inst.generalPosition(), 0.0, 0.0, 0.0, {}};

  MatrixXd hull(p.n(), p.m());
  for (int i = 0; i < p.m(); ++i) hull.col(i) = inst.points[static_cast<std::size_t>(i)];
  std::size_t inside = 0;
  for (const ParetoPoint& pt : rep.atlas.points) {
    const VectorXd bary = hull * pt.w.coords();
    rep.maxBarycentricError = std::max(rep.maxBarycentricError, (pt.x - bary).norm());
    const double r = linalg::convexHullResidual(hull, pt.x);
    rep.maxHullResidual = std::max(rep.maxHullResidual, r);
    if (r <= 1e-9) ++inside;
  }
  rep.hullFraction = static_cast<double>(inside) / static_cast<double>(rep.atlas.points.size());
  rep.corank = certifyCorankOnAtlas(p, rep.atlas, tau, exec);
  return rep;
}

// ---------------------------------------------------------------------------

PhenotypicReport phenotypicParetoSet(const Phenotypic& spec, int resolution,
                                     const SolverConfig& cfg, double tau, Execution exec) {
  const Problem p = Problem::build(spec);
  PhenotypicReport rep{buildAtlas(p, resolution, cfg, exec), {}, {}, {}, {}, std::nullopt};
  rep.corank = certifyCorankOnAtlas(p, rep.atlas, tau, exec);
  rep.faces = faceConsistency(p, rep.atlas, cfg, exec);
  rep.injectivity = injectivityScan(rep.atlas, 1e-7, exec);
  rep.dominance = mutualNonDomination(rep.atlas, 1e-9, exec);
  if (rep.corank.simplicialOnSample())
    rep.simplicial = rep.faces.consistent && rep.injectivity.injective && rep.atlas.summary.failedNodes == 0;
  return rep;
}

// ---------------------------------------------------------------------------

RidgeInstance RidgeInstance::make(MatrixXd X, VectorXd y, double mu) {
  RidgeInstance r{std::move(X), std::move(y), mu};
  validateSpec(r.spec());
  return r;
}

RidgeInstance RidgeInstance::fromCsv(const std::filesystem::path& path, double mu) {
  RidgePair r = loadRidgeCsv(path, mu);
  return RidgeInstance{std::move(r.X), std::move(r.y), r.mu};
}

RidgeInstance RidgeInstance::standardized() const {
  RidgeInstance out = *this;
  const double rows = static_cast<double>(X.rows());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    auto col = out.X.col(c);
    col.array() -= col.mean();
    const double sd = std::sqrt(col.squaredNorm() / rows);
    if (sd > 0.0) col /= sd;
  }
  out.y.array() -= out.y.mean();
  return out;
}

RidgeInstance syntheticRidge(int rows, int cols, double mu, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw ProblemError("ridge: dimension mismatch");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  MatrixXd X(rows, cols);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = normal(gen);
  VectorXd beta(cols);
  for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = normal(gen);
  VectorXd y = X * beta;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 0.1 * normal(gen);
  return RidgeInstance::make(std::move(X), std::move(y), mu);
}

VectorXd ridgeClosedForm(const MatrixXd& X, const VectorXd& y, double lambda) {
  const MatrixXd g = X.transpose() * X + lambda * MatrixXd::Identity(X.cols(), X.cols());
  return g.llt().solve(X.transpose() * y);
}

double ridgeLambda(double mu, double w1, double w2) {
  if (w1 == 0.0) return std::numeric_limits<double>::infinity();
  return mu + w2 / std::max(w1, std::numeric_limits<double>::epsilon());
}

RidgePath ridgePath(const RidgeInstance& inst, int resolution, const SolverConfig& cfg) {
  if (resolution < 1) throw std::invalid_argument("ridge path: resolution must be >= 1");
  const Problem p = Problem::build(inst.spec());
  RidgePath path;
  SolverConfig warm = cfg;
  double lastNorm = std::numeric_limits<double>::infinity();
  for (int k = resolution; k >= 0; --k) {
    RidgePathRow row;
    row.w1 = static_cast<double>(k) / resolution;
    row.w2 = 1.0 - row.w1;
    VectorXd w(2);
    w << row.w1, row.w2;
    if (k == 0) {
      // argmin ||theta||^2 is exactly the origin.
      row.lambda = std::numeric_limits<double>::infinity();
      row.theta = VectorXd::Zero(p.n());
      row.residual = (p.jacobian(row.theta).transpose() * w).norm();
      path.rows.push_back(std::move(row));
      break;
    }
    const ParetoPoint pt = scalarize(p, Weight::make(w), warm);
    if (!pt.converged())
      throw NumericalError(NumericalError::Kind::NewtonFailed,
                           "ridge path: solve failed at w1 = " + std::to_string(row.w1));
    warm.initialPoint = pt.x;
    row.theta = pt.x;
    row.residual = pt.kktResidual;
    row.lambda = ridgeLambda(inst.mu, row.w1, row.w2);
    const VectorXd oracle = ridgeClosedForm(inst.X, inst.y, row.lambda);
    const double scale = oracle.norm();
    row.oracleError = (pt.x - oracle).norm() / (scale > 0.0 ? scale : 1.0);
    path.maxOracleError = std::max(path.maxOracleError, row.oracleError);
    // Shrinkage is monotone up to solver accuracy.
    const double nrm = pt.x.norm();
    if (nrm > lastNorm * (1.0 + 1e-10) + 1e-12) path.monotone = false;
    lastNorm = nrm;
    path.rows.push_back(std::move(row));
  }
  return path;
}

void writeRidgePathCsv(std::ostream& out, const RidgePath& path) {
  const Eigen::Index dim = path.rows.empty() ? 0 : path.rows.front().theta.size();
  out << "w1,w2,lambda";
  for (Eigen::Index j = 1; j <= dim; ++j) out << ",theta_" << j;
  out << ",residual\n";
  out << std::setprecision(17);
  for (const auto& row : path.rows) {
    out << row.w1 << ',' << row.w2 << ',';
    if (std::isinf(row.lambda))
      out << "inf";
    else
      out << row.lambda;
    for (Eigen::Index j = 0; j < dim; ++j) out << ',' << row.theta(j);
    out << ',' << row.residual << '\n';
  }
}

}  // namespace pareto
