#include "pareto/problem.hpp"

#include "pareto/linalg.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace pareto {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool sameMatrix(const MatrixXd& a, const MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

template <class M>
bool sameList(const std::vector<M>& a, const std::vector<M>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!sameMatrix(a[i], b[i])) return false;
  return true;
}

[[noreturn]] void fail(const std::string& msg) { throw ProblemError(msg); }

void requireFinite(const MatrixXd& a, const std::string& what) {
  if (!a.allFinite()) fail(what + ": non-finite entry");
}

void requireSpd(const MatrixXd& a, const std::string& what) {
  if (!linalg::isSymmetric(a)) fail(what + " must be symmetric");
  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || linalg::minEigenvalue(a) <= 0.0)
    fail(what + " must be positive definite");
}

Evaluation allocate(int n, int m) {
  Evaluation e;
  e.values = VectorXd::Zero(m);
  e.jacobian = MatrixXd::Zero(m, n);
  e.hessians.assign(static_cast<std::size_t>(m), MatrixXd::Zero(n, n));
  return e;
}

Evaluation evalExample31(const VectorXd& p, double eps) {
  const double x = p(0), y = p(1), z = p(2);
  Evaluation e = allocate(3, 3);
  e.values << x * x + y * y + z * z + eps * z, x + y + x * x + y * y + z * z,
      -(x + y) + x * x + 2 * y * y + z * z;
  e.jacobian << 2 * x, 2 * y, 2 * z + eps,  //
      1 + 2 * x, 1 + 2 * y, 2 * z,          //
      -1 + 2 * x, -1 + 4 * y, 2 * z;
  e.hessians[0] = 2.0 * MatrixXd::Identity(3, 3);
  e.hessians[1] = 2.0 * MatrixXd::Identity(3, 3);
  e.hessians[2] = Eigen::Vector3d(2, 4, 2).asDiagonal();
  return e;
}

Evaluation evalExample32(const VectorXd& p) {
  const double x = p(0), y = p(1), z = p(2);
  Evaluation e = allocate(3, 3);
  e.values << x * x + (x - y) * (x - y) + z * z,
      2 * (x - 1) * (x - 1) + (x - y - 1) * (x - y - 1) + z * z,
      (x - 2) * (x - 2) + (x + y - 2) * (x + y - 2) + z * z;
  e.jacobian << 4 * x - 2 * y, -2 * x + 2 * y, 2 * z,  //
      6 * x - 2 * y - 6, -2 * x + 2 * y + 2, 2 * z,    //
      4 * x + 2 * y - 8, 2 * x + 2 * y - 4, 2 * z;
  e.hessians[0] << 4, -2, 0, -2, 2, 0, 0, 0, 2;
  e.hessians[1] << 6, -2, 0, -2, 2, 0, 0, 0, 2;
  e.hessians[2] << 4, 2, 0, 2, 2, 0, 0, 0, 2;
  return e;
}

Evaluation evalRemarkG(const VectorXd& p) {
  const double x1 = p(0), x2 = p(1), x3 = p(2), x4 = p(3);
  const double g1 = x1 * x1 + x3 * x2 + 0.5 * (x2 * x2 + x4 * x1) + x3 * x3 + x4 * x4;
  const double g2 = x2 * x2 + x4 * x1 + 0.5 * (x1 * x1 + x3 * x2) + x3 * x3 + x4 * x4;
  Eigen::RowVector4d dg1(2 * x1 + 0.5 * x4, x3 + x2, x2 + 2 * x3, 0.5 * x1 + 2 * x4);
  Eigen::RowVector4d dg2(x4 + x1, 2 * x2 + 0.5 * x3, 0.5 * x2 + 2 * x3, x1 + 2 * x4);
  Eigen::Matrix4d h1, h2;
  h1 << 2, 0, 0, 0.5, 0, 1, 1, 0, 0, 1, 2, 0, 0.5, 0, 0, 2;
  h2 << 1, 0, 0, 1, 0, 2, 0.5, 0, 0, 0.5, 2, 0, 1, 0, 0, 2;
  const Eigen::RowVector4d e3(0, 0, 1, 0), e4(0, 0, 0, 1);

  Evaluation e = allocate(4, 4);
  e.values << g1 - x3, g2 - x4, g1 + x3, g2 + x4;
  e.jacobian.row(0) = dg1 - e3;
  e.jacobian.row(1) = dg2 - e4;
  e.jacobian.row(2) = dg1 + e3;
  e.jacobian.row(3) = dg2 + e4;
  e.hessians = {h1, h2, h1, h2};
  return e;
}

Evaluation evalFamily(const FamilySpec& spec, const VectorXd& x, int n, int m) {
  return std::visit(
      Overloaded{
          [&](const GenericQuadratic& q) {
            Evaluation e = allocate(n, m);
            for (int i = 0; i < m; ++i) {
              const VectorXd qx = q.Q[i] * x;
              e.values(i) = 0.5 * x.dot(qx) + q.b[i].dot(x) + q.c[i];
              e.jacobian.row(i) = (qx + q.b[i]).transpose();
              e.hessians[i] = q.Q[i];
            }
            return e;
          },
          [&](const Example31&) { return evalExample31(x, 0.0); },
          [&](const Example31Perturbed& s) { return evalExample31(x, s.epsilon); },
          [&](const Example32&) { return evalExample32(x); },
          [&](const RemarkG&) { return evalRemarkG(x); },
          [&](const DistanceSquared& d) {
            Evaluation e = allocate(n, m);
            for (int i = 0; i < m; ++i) {
              const VectorXd r = x - d.points[i];
              e.values(i) = r.squaredNorm();
              e.jacobian.row(i) = 2.0 * r.transpose();
              e.hessians[i] = 2.0 * MatrixXd::Identity(n, n);
            }
            return e;
          },
          [&](const Phenotypic& ph) {
            Evaluation e = allocate(n, m);
            for (int i = 0; i < m; ++i) {
              const VectorXd r = ph.A[i] * (x - ph.points[i]);
              const MatrixXd gram = ph.A[i].transpose() * ph.A[i];
              e.values(i) = r.squaredNorm();
              e.jacobian.row(i) = 2.0 * (ph.A[i].transpose() * r).transpose();
              e.hessians[i] = 2.0 * gram;
            }
            return e;
          },
          [&](const RidgePair& r) {
            Evaluation e = allocate(n, m);
            const VectorXd resid = r.X * x - r.y;
            e.values(0) = resid.squaredNorm() + r.mu * x.squaredNorm();
            e.values(1) = x.squaredNorm();
            e.jacobian.row(0) = (2.0 * (r.X.transpose() * resid) + 2.0 * r.mu * x).transpose();
            e.jacobian.row(1) = 2.0 * x.transpose();
            e.hessians[0] = 2.0 * (r.X.transpose() * r.X) + 2.0 * r.mu * MatrixXd::Identity(n, n);
            e.hessians[1] = 2.0 * MatrixXd::Identity(n, n);
            return e;
          },
      },
      spec);
}

}  // namespace

bool operator==(const GenericQuadratic& a, const GenericQuadratic& b) {
  return sameList(a.Q, b.Q) && sameList(a.b, b.b) && a.c == b.c;
}
bool operator==(const DistanceSquared& a, const DistanceSquared& b) {
  return sameList(a.points, b.points);
}
bool operator==(const Phenotypic& a, const Phenotypic& b) {
  return sameList(a.A, b.A) && sameList(a.points, b.points);
}
bool operator==(const RidgePair& a, const RidgePair& b) {
  return sameMatrix(a.X, b.X) && sameMatrix(a.y, b.y) && a.mu == b.mu;
}

std::string familyName(const FamilySpec& spec) {
  return std::visit(Overloaded{
                        [](const GenericQuadratic&) { return std::string("generic_quadratic"); },
                        [](const Example31&) { return std::string("example31"); },
                        [](const Example31Perturbed&) { return std::string("example31_perturbed"); },
                        [](const Example32&) { return std::string("example32"); },
                        [](const RemarkG&) { return std::string("remark_g"); },
                        [](const DistanceSquared&) { return std::string("distance_squared"); },
                        [](const Phenotypic&) { return std::string("phenotypic"); },
                        [](const RidgePair&) { return std::string("ridge_pair"); },
                    },
                    spec);
}

Dimensions dimensionsOf(const FamilySpec& spec) {
  return std::visit(
      Overloaded{
          [](const GenericQuadratic& q) {
            return Dimensions{q.Q.empty() ? 0 : static_cast<int>(q.Q[0].rows()),
                              static_cast<int>(q.Q.size())};
          },
          [](const Example31&) { return Dimensions{3, 3}; },
          [](const Example31Perturbed&) { return Dimensions{3, 3}; },
          [](const Example32&) { return Dimensions{3, 3}; },
          [](const RemarkG&) { return Dimensions{4, 4}; },
          [](const DistanceSquared& d) {
            return Dimensions{d.points.empty() ? 0 : static_cast<int>(d.points[0].size()),
                              static_cast<int>(d.points.size())};
          },
          [](const Phenotypic& p) {
            return Dimensions{p.points.empty() ? 0 : static_cast<int>(p.points[0].size()),
                              static_cast<int>(p.points.size())};
          },
          [](const RidgePair& r) { return Dimensions{static_cast<int>(r.X.cols()), 2}; },
      },
      spec);
}

void validateSpec(const FamilySpec& spec, bool requireDefinite) {
  std::visit(
      Overloaded{
          [&](const GenericQuadratic& q) {
            if (q.Q.empty()) fail("generic_quadratic: at least one objective required");
            const auto n = q.Q[0].rows();
            if (n < 1) fail("generic_quadratic: dimension mismatch (n must be positive)");
            if (q.b.size() != q.Q.size() || q.c.size() != q.Q.size())
              fail("generic_quadratic: dimension mismatch between Q, b and c");
            for (std::size_t i = 0; i < q.Q.size(); ++i) {
              const std::string tag = "Q[" + std::to_string(i) + "]";
              if (q.Q[i].rows() != n || q.Q[i].cols() != n)
                fail("generic_quadratic: dimension mismatch in " + tag);
              if (q.b[i].size() != n)
                fail("generic_quadratic: dimension mismatch in b[" + std::to_string(i) + "]");
              requireFinite(q.Q[i], tag);
              requireFinite(q.b[i], "b");
              if (!std::isfinite(q.c[i])) fail("generic_quadratic: non-finite c");
              if (requireDefinite) requireSpd(q.Q[i], tag);
            }
          },
          [](const Example31&) {},
          [](const Example31Perturbed& s) {
            if (!std::isfinite(s.epsilon) || s.epsilon == 0.0)
              fail("example31_perturbed: epsilon must be finite and nonzero");
          },
          [](const Example32&) {},
          [](const RemarkG&) {},
          [](const DistanceSquared& d) {
            if (d.points.empty()) fail("distance_squared: at least one demand point required");
            const auto n = d.points[0].size();
            if (n < 1) fail("distance_squared: dimension mismatch (n must be positive)");
            for (const auto& p : d.points) {
              if (p.size() != n) fail("distance_squared: dimension mismatch between demand points");
              requireFinite(p, "distance_squared point");
            }
          },
          [&](const Phenotypic& ph) {
            if (ph.points.empty()) fail("phenotypic: at least one objective required");
            if (ph.A.size() != ph.points.size())
              fail("phenotypic: dimension mismatch between A and points");
            const auto n = ph.points[0].size();
            if (n < 1) fail("phenotypic: dimension mismatch (n must be positive)");
            for (std::size_t i = 0; i < ph.A.size(); ++i) {
              const std::string tag = "A[" + std::to_string(i) + "]";
              if (ph.points[i].size() != n) fail("phenotypic: dimension mismatch in points");
              if (ph.A[i].rows() != n || ph.A[i].cols() != n)
                fail("phenotypic: dimension mismatch in " + tag);
              requireFinite(ph.A[i], tag);
              requireFinite(ph.points[i], "phenotypic point");
              if (requireDefinite) requireSpd(ph.A[i], tag);
            }
          },
          [](const RidgePair& r) {
            if (!(r.mu > 0.0) || !std::isfinite(r.mu)) fail("ridge_pair: μ must be positive");
            if (r.X.cols() < 1 || r.X.rows() < 1)
              fail("ridge_pair: dimension mismatch (empty observation matrix)");
            if (r.X.rows() != r.y.size())
              fail("ridge_pair: dimension mismatch between X rows and y length");
            requireFinite(r.X, "X");
            requireFinite(r.y, "y");
          },
      },
      spec);
}

Problem::Problem(FamilySpec family, int n, int fullM)
    : family_(std::move(family)), n_(n), fullM_(fullM), linear_(MatrixXd::Zero(fullM, n)) {
  objectives_.resize(static_cast<std::size_t>(fullM));
  for (int i = 0; i < fullM; ++i) objectives_[static_cast<std::size_t>(i)] = i;
}

Problem Problem::build(FamilySpec spec) {
  validateSpec(spec);
  const Dimensions d = dimensionsOf(spec);
  return Problem(std::move(spec), d.n, d.m);
}

Problem Problem::buildUnchecked(FamilySpec spec) {
  validateSpec(spec, false);
  const Dimensions d = dimensionsOf(spec);
  return Problem(std::move(spec), d.n, d.m);
}

Evaluation Problem::evaluate(const VectorXd& x) const {
  if (x.size() != n_) throw ProblemError("evaluate: dimension mismatch");
  Evaluation full = evalFamily(family_, x, n_, fullM_);
  const bool identity = static_cast<int>(objectives_.size()) == fullM_ &&
                        [&] {
                          for (int i = 0; i < fullM_; ++i)
                            if (objectives_[static_cast<std::size_t>(i)] != i) return false;
                          return true;
                        }();
  Evaluation out;
  if (identity) {
    out = std::move(full);
  } else {
    const int m = this->m();
    out = allocate(n_, m);
    for (int k = 0; k < m; ++k) {
      const int src = objectives_[static_cast<std::size_t>(k)];
      out.values(k) = full.values(src);
      out.jacobian.row(k) = full.jacobian.row(src);
      out.hessians[static_cast<std::size_t>(k)] = full.hessians[static_cast<std::size_t>(src)];
    }
  }
  out.values += linear_ * x;
  out.jacobian += linear_;
  return out;
}

VectorXd Problem::values(const VectorXd& x) const { return evaluate(x).values; }

MatrixXd Problem::jacobian(const VectorXd& x) const { return evaluate(x).jacobian; }

Problem Problem::withLinearTerm(const MatrixXd& pi) const {
  if (pi.rows() != m() || pi.cols() != n_)
    throw ProblemError("linear perturbation: dimension mismatch (expected " +
                       std::to_string(m()) + "x" + std::to_string(n_) + ")");
  Problem out = *this;
  out.linear_ += pi;
  return out;
}

Problem Problem::subproblem(std::span<const int> indices) const {
  if (indices.empty()) throw ProblemError("subproblem: index set must be nonempty");
  Problem out = *this;
  out.objectives_.clear();
  MatrixXd lin(static_cast<Eigen::Index>(indices.size()), n_);
  int prev = -1;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const int i = indices[k];
    if (i <= prev || i >= m()) throw ProblemError("subproblem: indices must be increasing and in range");
    prev = i;
    out.objectives_.push_back(objectives_[static_cast<std::size_t>(i)]);
    lin.row(static_cast<Eigen::Index>(k)) = linear_.row(i);
  }
  out.linear_ = lin;
  return out;
}

std::vector<VectorXd> GaussianSampler::draw(int n, std::size_t count) const {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<VectorXd> pts(count, VectorXd(n));
  for (auto& p : pts)
    for (int j = 0; j < n; ++j) p(j) = radius * normal(gen);
  return pts;
}

StrongConvexityCertificate checkStrongConvexity(const Problem& p,
                                                std::span<const VectorXd> points) {
  StrongConvexityCertificate cert;
  cert.betaMin = std::numeric_limits<double>::infinity();
  for (const VectorXd& x : points) {
    const Evaluation e = p.evaluate(x);
    for (int i = 0; i < p.m(); ++i) {
      const double lo = linalg::minEigenvalue(e.hessians[static_cast<std::size_t>(i)]);
      if (lo < cert.betaMin) {
        cert.betaMin = lo;
        cert.witness = x;
        cert.objective = i;
      }
    }
    ++cert.samples;
  }
  cert.passed = cert.samples > 0 && cert.betaMin > 0.0;
  return cert;
}

StrongConvexityCertificate checkStrongConvexity(const Problem& p, const GaussianSampler& sampler,
                                                std::size_t count) {
  if (count < 1) throw std::invalid_argument("checkStrongConvexity: count must be >= 1");
  const auto pts = sampler.draw(p.n(), count);
  return checkStrongConvexity(p, std::span<const VectorXd>(pts));
}

}  // namespace pareto
