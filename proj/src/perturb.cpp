#include "pareto/perturb.hpp"

#include "pareto/linalg.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace pareto {

LinearPerturbation LinearPerturbation::sample(int m, int n, std::uint64_t seed, double scale) {
  if (m < 1 || n < 1) throw ProblemError("perturbation: dimension mismatch");
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ProblemError("perturbation: scale must be >= 0");
  LinearPerturbation pi;
  pi.seed = seed;
  pi.scale = scale;
  pi.coefficients.resize(m, n);
  // Raw engine bits rather than std::uniform_real_distribution, whose output
  // is implementation-defined.
  std::mt19937_64 gen(seed);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      pi.coefficients(i, j) = scale * (2.0 * u - 1.0);
    }
  return pi;
}

LinearPerturbation LinearPerturbation::zero(int m, int n) {
  LinearPerturbation pi;
  pi.coefficients = MatrixXd::Zero(m, n);
  return pi;
}

PerturbedProblem perturbProblem(const Problem& p, const LinearPerturbation& pi) {
  return PerturbedProblem{p, pi, p.withLinearTerm(pi.coefficients)};
}

GenericityReport genericityExperiment(const Problem& p, const GenericityOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("genericity: trials must be >= 1");
  if (opt.taus.empty()) throw std::invalid_argument("genericity: at least one tau required");
  GenericityReport rep;
  rep.taus = opt.taus;
  rep.trials.resize(static_cast<std::size_t>(opt.trials));

  auto runTrial = [&](int t) {
    GenericityTrial& trial = rep.trials[static_cast<std::size_t>(t)];
    trial.seed = opt.baseSeed + static_cast<std::uint64_t>(t);
    const auto pi = LinearPerturbation::sample(p.m(), p.n(), trial.seed, opt.scale);
    const Problem q = perturbProblem(p, pi).problem;
    const ParetoAtlas atlas = buildAtlas(q, opt.resolution, opt.solver, Execution::Serial);
    trial.failedNodes = atlas.summary.failedNodes;
    trial.minSecondSingularRatio = std::numeric_limits<double>::infinity();
    for (double tau : opt.taus) {
      const auto cert = certifyCorankOnAtlas(q, atlas, tau, Execution::Serial);
      trial.maxCorank.push_back(cert.maxCorank);
      trial.minSecondSingularRatio = std::min(trial.minSecondSingularRatio, cert.minSecondSingularRatio);
    }
  };
  if (parallelEnabled(opt.exec)) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < opt.trials; ++t) runTrial(t);
  } else {
    for (int t = 0; t < opt.trials; ++t) runTrial(t);
  }

  rep.trialsWithCorank2.assign(opt.taus.size(), 0);
  for (const auto& trial : rep.trials) {
    bool first = trial.maxCorank.front() >= 2;
    for (std::size_t k = 0; k < opt.taus.size(); ++k) {
      const bool hit = trial.maxCorank[k] >= 2;
      if (hit) ++rep.trialsWithCorank2[k];
      if (hit != first) rep.tausAgree = false;
    }
  }
  return rep;
}

namespace {

struct Blocks {
  Eigen::Matrix2d A, B, C, D;
};

Blocks blocksOf(const MatrixXd& jac) {
  const MatrixXd P = jac.transpose();  // variables x objectives
  return {P.block<2, 2>(0, 0), P.block<2, 2>(0, 2), P.block<2, 2>(2, 0), P.block<2, 2>(2, 2)};
}

void requireFourByFour(const Problem& p) {
  if (p.n() != 4 || p.m() != 4)
    throw std::invalid_argument("corank-2 tracker: needs a map R^4 -> R^4");
}

Eigen::Matrix2d invertD(const Eigen::Matrix2d& D, double condLimit) {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(D);
  const auto s = svd.singularValues();
  if (!(s(1) > 0.0) || s(0) / s(1) > condLimit)
    throw NumericalError(NumericalError::Kind::DBlockSingular, "D block is singular");
  return D.inverse();
}

}  // namespace

MatrixXd schurBlock(const Problem& p, const VectorXd& x) {
  requireFourByFour(p);
  const Blocks b = blocksOf(p.jacobian(x));
  const Eigen::Matrix2d E = b.A - b.B * invertD(b.D, 1e12) * b.C;
  return E;
}

MatrixXd schurBlockJacobian(const Problem& p, const VectorXd& x) {
  requireFourByFour(p);
  const Evaluation e = p.evaluate(x);
  const Blocks b = blocksOf(e.jacobian);
  const Eigen::Matrix2d Dinv = invertD(b.D, 1e12);
  MatrixXd out(4, 4);
  for (int k = 0; k < 4; ++k) {
    // d/dx_k of the variables-by-objectives matrix: entry (r, c) = H_c(r, k).
    MatrixXd dP(4, 4);
    for (int c = 0; c < 4; ++c) dP.col(c) = e.hessians[static_cast<std::size_t>(c)].col(k);
    const Eigen::Matrix2d dA = dP.block<2, 2>(0, 0), dB = dP.block<2, 2>(0, 2);
    const Eigen::Matrix2d dC = dP.block<2, 2>(2, 0), dD = dP.block<2, 2>(2, 2);
    const Eigen::Matrix2d dE =
        dA - dB * Dinv * b.C + b.B * Dinv * dD * Dinv * b.C - b.B * Dinv * dC;
    out.col(k) << dE(0, 0), dE(0, 1), dE(1, 0), dE(1, 1);
  }
  return out;
}

Corank2Track corank2Tracker(const Problem& base, const LinearPerturbation& pi,
                            const TrackerConfig& cfg) {
  requireFourByFour(base);
  const Problem q = perturbProblem(base, pi).problem;
  Corank2Track out;
  out.xHat = cfg.start ? *cfg.start : VectorXd::Zero(4);

  auto vecE = [&](const VectorXd& x) {
    const Eigen::Matrix2d E = schurBlock(q, x);
    return Eigen::Vector4d(E(0, 0), E(0, 1), E(1, 0), E(1, 1));
  };

  Eigen::Vector4d e = vecE(out.xHat);
  out.residual = e.norm();
  while (out.residual > cfg.tol && out.iterations < cfg.maxIter) {
    Eigen::FullPivLU<MatrixXd> lu(schurBlockJacobian(q, out.xHat));
    if (!lu.isInvertible())
      throw NumericalError(NumericalError::Kind::NewtonFailed, "corank-2 tracker: singular Newton system");
    const VectorXd next = out.xHat - lu.solve(VectorXd(e));
    const Eigen::Vector4d en = vecE(next);
    ++out.iterations;
    if (!(en.norm() < out.residual)) break;  // no further progress at rounding level
    out.xHat = next;
    e = en;
    out.residual = e.norm();
  }
  if (!(out.residual <= cfg.accept))
    throw NumericalError(NumericalError::Kind::NewtonFailed,
                         "corank-2 tracker: ||E|| = " + std::to_string(out.residual));

  const MatrixXd jac = q.jacobian(out.xHat);
  out.corank = corankAt(q, out.xHat, cfg.tau).corank;
  out.cokernelBasis = linalg::nullSpace(jac.transpose(), cfg.tau);
  const auto interior = linalg::maxMinSimplexPoint(out.cokernelBasis);
  out.meetsSimplexInterior = interior.found;
  out.interiorMargin = interior.margin;
  out.interiorWitness = interior.point;
  return out;
}

std::vector<StabilityRow> stabilityExperiment(const Problem& p, std::span<const double> scales,
                                              int resolution, std::uint64_t seed,
                                              const SolverConfig& cfg, Execution exec) {
  const ParetoAtlas reference = buildAtlas(p, resolution, cfg, exec);
  std::vector<StabilityRow> rows;
  for (double s : scales) {
    if (!(s >= 0.0)) throw std::invalid_argument("stability: scales must be nonnegative");
    const auto pi = LinearPerturbation::sample(p.m(), p.n(), seed, s);
    const ParetoAtlas moved = buildAtlas(perturbProblem(p, pi).problem, resolution, cfg, exec);
    StabilityRow row;
    row.scale = s;
    for (std::size_t i = 0; i < reference.points.size(); ++i) {
      const double d = (moved.points[i].x - reference.points[i].x).norm();
      if (d > row.maxDisplacement) {
        row.maxDisplacement = d;
        row.argmaxNode = i;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pareto
