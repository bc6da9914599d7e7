#include "pareto/solver.hpp"

#include "pareto/linalg.hpp"

#include <cmath>
#include <limits>

namespace pareto {

namespace {

constexpr double kSimplexSumTol = 1e-12;

std::uint32_t supportOf(const VectorXd& c) {
  std::uint32_t mask = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (c(i) > 0.0) mask |= (1u << i);
  return mask;
}

struct Scalarized {
  double value = 0.0;
  VectorXd gradient;
  MatrixXd hessian;
};

Scalarized scalarizedAt(const Problem& p, const VectorXd& w, const VectorXd& x) {
  const Evaluation e = p.evaluate(x);
  Scalarized s;
  s.value = w.dot(e.values);
  s.gradient = e.jacobian.transpose() * w;
  s.hessian = MatrixXd::Zero(p.n(), p.n());
  for (int i = 0; i < p.m(); ++i) s.hessian += w(i) * e.hessians[static_cast<std::size_t>(i)];
  return s;
}

void fillDiagnostics(const Problem& p, ParetoPoint& pt, double rankTol) {
  const Evaluation e = p.evaluate(pt.x);
  pt.fx = e.values;
  pt.kktResidual = (e.jacobian.transpose() * pt.w.coords()).norm();
  const auto info = linalg::numericalRank(e.jacobian, rankTol);
  pt.jacobianSV = info.singularValues;
  pt.corank = std::min(p.n(), p.m()) - info.rank;
}

}  // namespace

Weight Weight::make(VectorXd coords) {
  const auto m = coords.size();
  if (m < 1 || m > 32) throw std::invalid_argument("weight: need 1..32 coordinates");
  return onFace(std::move(coords), fullFace(static_cast<int>(m)));
}

Weight Weight::onFace(VectorXd coords, std::uint32_t face) {
  const auto m = coords.size();
  if (m < 1 || m > 32) throw std::invalid_argument("weight: need 1..32 coordinates");
  if (!coords.allFinite()) throw std::invalid_argument("weight: non-finite coordinate");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (coords(i) < 0.0) throw std::invalid_argument("weight: negative coordinate");
    if (coords(i) != 0.0 && !(face & (1u << i)))
      throw std::invalid_argument("weight: nonzero coordinate outside its face");
  }
  if (std::abs(coords.sum() - 1.0) > kSimplexSumTol)
    throw std::invalid_argument("weight: coordinates must sum to 1");
  return Weight(std::move(coords), face & fullFace(static_cast<int>(m)));
}

Weight Weight::barycenter(int m, std::uint32_t face) {
  VectorXd c = VectorXd::Zero(m);
  const auto idx = faceIndices(face & fullFace(m));
  if (idx.empty()) throw std::invalid_argument("weight: empty face");
  for (int i : idx) c(i) = 1.0 / static_cast<double>(idx.size());
  return Weight(std::move(c), face & fullFace(m));
}

std::uint32_t Weight::support() const { return supportOf(coords_); }

std::uint32_t fullFace(int m) { return m >= 32 ? 0xffffffffu : ((1u << m) - 1u); }

std::vector<int> faceIndices(std::uint32_t face) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (face & (1u << i)) out.push_back(i);
  return out;
}

std::string faceLabel(std::uint32_t face) {
  std::string s;
  for (int i : faceIndices(face)) {
    if (!s.empty()) s += '+';
    s += std::to_string(i + 1);
  }
  return s;
}

std::string toString(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterExceeded: return "max_iter_exceeded";
    case SolveStatus::SingularNewtonSystem: return "singular_newton_system";
  }
  return "unknown";
}

NewtonResult minimizeWeightedSum(const Problem& p, const VectorXd& weights,
                                 const SolverConfig& cfg, bool trace) {
  if (weights.size() != p.m()) throw std::invalid_argument("scalarize: weight length mismatch");
  if (cfg.gradTol <= 0.0 || cfg.maxIter < 1) throw std::invalid_argument("scalarize: bad config");

  NewtonResult out;
  out.x = cfg.initialPoint ? *cfg.initialPoint : VectorXd::Zero(p.n());
  if (out.x.size() != p.n()) throw std::invalid_argument("scalarize: initial point dimension mismatch");

  Scalarized cur = scalarizedAt(p, weights, out.x);
  double gnorm = cur.gradient.norm();
  out.tolerance = cfg.gradTol * std::max(1.0, gnorm);
  if (trace) out.objectiveTrace.push_back(cur.value);

  for (int it = 0;; ++it) {
    out.iterations = it;
    out.residual = gnorm;
    if (gnorm <= out.tolerance) {
      out.status = SolveStatus::Converged;
      return out;
    }
    if (it >= cfg.maxIter) {
      out.status = SolveStatus::MaxIterExceeded;
      return out;
    }
    Eigen::LLT<MatrixXd> llt(cur.hessian);
    if (llt.info() != Eigen::Success) {
      out.status = SolveStatus::SingularNewtonSystem;
      return out;
    }
    const VectorXd dir = -llt.solve(cur.gradient);
    const double slope = cur.gradient.dot(dir);
    if (!(slope < 0.0) || !dir.allFinite()) {
      out.status = SolveStatus::SingularNewtonSystem;
      return out;
    }

    double step = 1.0;
    bool accepted = false;
    VectorXd trial;
    for (int bt = 0; bt <= cfg.maxBacktracks; ++bt) {
      trial = out.x + step * dir;
      const double val = weights.dot(p.values(trial));
      if (val <= cur.value + cfg.armijoC * step * slope) {
        accepted = true;
        break;
      }
      step *= cfg.shrink;
    }
    Scalarized next;
    if (accepted) {
      next = scalarizedAt(p, weights, trial);
    } else {
      // Near the minimizer the decrease is below rounding; accept the full
      // step only if it still reduces the gradient.
      trial = out.x + dir;
      next = scalarizedAt(p, weights, trial);
      if (!(next.gradient.norm() < gnorm) || next.value > cur.value) {
        out.status = SolveStatus::MaxIterExceeded;
        return out;
      }
    }
    out.x = trial;
    cur = std::move(next);
    gnorm = cur.gradient.norm();
    if (trace) out.objectiveTrace.push_back(cur.value);
  }
}

ParetoPoint scalarize(const Problem& p, const Weight& w, const SolverConfig& cfg) {
  if (w.size() != p.m()) throw std::invalid_argument("scalarize: weight length mismatch");
  NewtonResult r = minimizeWeightedSum(p, w.coords(), cfg);
  ParetoPoint pt;
  pt.w = w;
  pt.x = std::move(r.x);
  pt.tolerance = r.tolerance;
  pt.status = r.status;
  pt.iterations = r.iterations;
  fillDiagnostics(p, pt, cfg.rankTol);
  return pt;
}

MatrixXd xStarDerivative(const Problem& p, const ParetoPoint& pt, int eliminated) {
  const int m = p.m();
  if (eliminated < 0) eliminated = m - 1;
  if (eliminated >= m) throw std::invalid_argument("xStarDerivative: eliminated index out of range");
  if (pt.x.size() != p.n() || pt.w.size() != m)
    throw std::invalid_argument("xStarDerivative: point does not match problem");
  if (m == 1) return MatrixXd(p.n(), 0);

  const Evaluation e = p.evaluate(pt.x);
  MatrixXd mixed = MatrixXd::Zero(p.n(), p.n());
  for (int i = 0; i < m; ++i) mixed += pt.w[i] * e.hessians[static_cast<std::size_t>(i)];
  Eigen::LLT<MatrixXd> llt(mixed);
  if (llt.info() != Eigen::Success)
    throw NumericalError(NumericalError::Kind::SingularMixedHessian,
                         "mixed Hessian is not positive definite");

  MatrixXd rhs(p.n(), m - 1);
  int col = 0;
  for (int j = 0; j < m; ++j) {
    if (j == eliminated) continue;
    rhs.col(col++) = (e.jacobian.row(j) - e.jacobian.row(eliminated)).transpose();
  }
  return -llt.solve(rhs);
}

ParetoPoint subproblemSolve(const Problem& p, std::span<const int> face, const Weight& wI,
                            const SolverConfig& cfg) {
  if (face.empty()) throw std::invalid_argument("subproblemSolve: face must be nonempty");
  if (wI.size() != p.m()) throw std::invalid_argument("subproblemSolve: weight length mismatch");
  std::uint32_t mask = 0;
  for (int i : face) mask |= (1u << i);
  if (wI.support() & ~mask) throw std::invalid_argument("subproblemSolve: weight not supported on face");

  const Problem sub = p.subproblem(face);
  VectorXd local(static_cast<Eigen::Index>(face.size()));
  for (std::size_t k = 0; k < face.size(); ++k) local(static_cast<Eigen::Index>(k)) = wI[face[k]];
  return scalarize(sub, Weight::make(local), cfg);
}

}  // namespace pareto
