#include "oracles.hpp"

#include "pareto/linalg.hpp"
#include "pareto/problem.hpp"
#include "pareto/problem_io.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <thread>

using namespace pareto;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(Problem, Example31AtOrigin) {
  const Problem p = Problem::build(Example31{});
  const Evaluation e = p.evaluate(VectorXd::Zero(3));
  EXPECT_EQ(e.values, VectorXd::Zero(3));
  MatrixXd expected(3, 3);
  expected << 0, 0, 0, 1, 1, 0, -1, -1, 0;
  EXPECT_EQ(e.jacobian, expected);
  MatrixXd h3 = 2.0 * MatrixXd::Identity(3, 3);
  h3(1, 1) = 4.0;
  EXPECT_EQ(e.hessians[0], 2.0 * MatrixXd::Identity(3, 3));
  EXPECT_EQ(e.hessians[1], 2.0 * MatrixXd::Identity(3, 3));
  EXPECT_EQ(e.hessians[2], h3);
}

TEST(Problem, DistanceSquaredAtOwnPoint) {
  const Problem p = Problem::build(DistanceSquared{{VectorXd::Zero(2)}});
  const Evaluation e = p.evaluate(VectorXd::Zero(2));
  EXPECT_EQ(e.values(0), 0.0);
  EXPECT_EQ(e.jacobian, MatrixXd::Zero(1, 2));
  EXPECT_EQ(e.hessians[0], 2.0 * MatrixXd::Identity(2, 2));
}

TEST(Problem, RemarkGDifferentialAtOrigin) {
  // Variables-by-objectives layout: (O O; -I I).
  const Problem p = Problem::build(RemarkG{});
  const MatrixXd layout = p.jacobian(VectorXd::Zero(4)).transpose();
  MatrixXd expected = MatrixXd::Zero(4, 4);
  expected.block(2, 0, 2, 2) = -MatrixXd::Identity(2, 2);
  expected.block(2, 2, 2, 2) = MatrixXd::Identity(2, 2);
  EXPECT_EQ(layout, expected);
}

TEST(Problem, HessiansSymmetric) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  for (const auto& f : oracle::fixtures()) {
    const Problem p = Problem::build(f.spec);
    VectorXd x(p.n());
    for (int j = 0; j < p.n(); ++j) x(j) = nd(gen);
    for (const auto& h : p.evaluate(x).hessians) EXPECT_TRUE(linalg::isSymmetric(h, 1e-12)) << f.name;
  }
}

TEST(Problem, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> nd;
  for (const auto& f : oracle::fixtures()) {
    const Problem p = Problem::build(f.spec);
    double worstGrad = 0.0, worstHess = 0.0;
    for (int s = 0; s < 100; ++s) {
      VectorXd x(p.n());
      for (int j = 0; j < p.n(); ++j) x(j) = nd(gen);
      const Evaluation e = p.evaluate(x);
      worstGrad = std::max(worstGrad, oracle::relErr(e.jacobian, oracle::fdJacobian(p, x)));
      for (int i = 0; i < p.m(); ++i)
        worstHess = std::max(worstHess, oracle::relErr(e.hessians[static_cast<std::size_t>(i)],
                                                       oracle::fdHessian(p, x, i)));
    }
    EXPECT_LE(worstGrad, 1e-6) << f.name;
    EXPECT_LE(worstHess, 1e-6) << f.name;
  }
}

TEST(Problem, EvaluationIsReentrant) {
  const Problem p = Problem::build(oracle::randomQuadratic(4, 3, 2));
  VectorXd x = VectorXd::LinSpaced(4, -1.0, 1.0);
  const Evaluation ref = p.evaluate(x);
  std::vector<std::thread> pool;
  std::vector<int> ok(8, 0);
  for (int t = 0; t < 8; ++t)
    pool.emplace_back([&, t] {
      bool same = true;
      for (int k = 0; k < 200; ++k) same = same && p.evaluate(x).jacobian == ref.jacobian;
      ok[static_cast<std::size_t>(t)] = same;
    });
  for (auto& th : pool) th.join();
  for (int v : ok) EXPECT_TRUE(v);
}

TEST(Problem, BuildRejectsInvalidSpecs) {
  GenericQuadratic q = oracle::randomQuadratic(2, 2, 1);
  q.Q[1] = -MatrixXd::Identity(2, 2);
  EXPECT_THROW(Problem::build(q), ProblemError);
  EXPECT_THROW(Problem::build(RidgePair{MatrixXd::Ones(3, 2), VectorXd::Ones(3), 0.0}), ProblemError);
  EXPECT_THROW(Problem::build(RidgePair{MatrixXd::Ones(3, 2), VectorXd::Ones(4), 1.0}), ProblemError);
  EXPECT_THROW(Problem::build(Example31Perturbed{0.0}), ProblemError);
  Phenotypic ph = oracle::example32AsPhenotypic();
  ph.A[0](0, 1) += 0.3;  // no longer symmetric
  EXPECT_THROW(Problem::build(ph), ProblemError);
  DistanceSquared ds = oracle::triangle();
  ds.points[1] = VectorXd::Zero(3);
  EXPECT_THROW(Problem::build(ds), ProblemError);
}

TEST(Problem, SubproblemAndLinearTerm) {
  const Problem p = Problem::build(Example31{});
  const std::vector<int> idx{0, 2};
  const Problem sub = p.subproblem(idx);
  VectorXd x(3);
  x << 0.3, -0.2, 0.7;
  EXPECT_EQ(sub.m(), 2);
  EXPECT_EQ(sub.values(x)(1), p.values(x)(2));
  MatrixXd pi = MatrixXd::Zero(3, 3);
  pi(0, 2) = 0.25;
  const Problem q = p.withLinearTerm(pi);
  EXPECT_DOUBLE_EQ(q.values(x)(0), p.values(x)(0) + 0.25 * 0.7);
  EXPECT_THROW(p.withLinearTerm(MatrixXd::Zero(2, 3)), ProblemError);
  const std::vector<int> bad{2, 0};
  EXPECT_THROW(p.subproblem(bad), ProblemError);
}

TEST(StrongConvexity, ConstantHessianGivesExactBeta) {
  GenericQuadratic q;
  for (int i = 0; i < 2; ++i) {
    q.Q.push_back(2.0 * MatrixXd::Identity(3, 3));
    q.b.push_back(VectorXd::Zero(3));
    q.c.push_back(0.0);
  }
  const auto cert = checkStrongConvexity(Problem::build(q), GaussianSampler{1.0, 3}, 50);
  EXPECT_TRUE(cert.passed);
  EXPECT_NEAR(cert.betaMin, 2.0, 1e-12);
  EXPECT_EQ(cert.samples, 50u);
}

TEST(StrongConvexity, Example31BetaIsTwo) {
  const auto cert = checkStrongConvexity(Problem::build(Example31{}), GaussianSampler{});
  EXPECT_TRUE(cert.passed);
  EXPECT_NEAR(cert.betaMin, 2.0, 1e-12);
}

TEST(StrongConvexity, IndefiniteFlaggedWithWitness) {
  GenericQuadratic q;
  MatrixXd bad = MatrixXd::Identity(2, 2);
  bad(1, 1) = -1.0;
  q.Q = {bad};
  q.b = {VectorXd::Zero(2)};
  q.c = {0.0};
  const auto cert = checkStrongConvexity(Problem::buildUnchecked(q), GaussianSampler{2.0, 1}, 10);
  EXPECT_FALSE(cert.passed);
  EXPECT_NEAR(cert.betaMin, -1.0, 1e-12);
  EXPECT_EQ(cert.objective, 0);
  EXPECT_EQ(cert.witness.size(), 2);
  EXPECT_THROW(checkStrongConvexity(Problem::build(Example31{}), GaussianSampler{}, 0),
               std::invalid_argument);
}

TEST(StrongConvexity, AffineSourceTransformPreservesCertificate) {
  // f(Ax + c) for invertible A: Hessians become A^T Q A.
  const GenericQuadratic q = oracle::randomQuadratic(3, 3, 23);
  MatrixXd a(3, 3);
  a << 1, 2, 0, 0, 1, -1, 3, 0, 1;
  VectorXd shift(3);
  shift << 0.5, -1.0, 2.0;
  GenericQuadratic t;
  for (std::size_t i = 0; i < q.Q.size(); ++i) {
    t.Q.push_back(a.transpose() * q.Q[i] * a);
    t.b.push_back(a.transpose() * (q.Q[i] * shift + q.b[i]));
    t.c.push_back(q.c[i] + 0.5 * shift.dot(q.Q[i] * shift) + q.b[i].dot(shift));
  }
  EXPECT_TRUE(checkStrongConvexity(Problem::build(q), GaussianSampler{}).passed);
  EXPECT_TRUE(checkStrongConvexity(Problem::build(t), GaussianSampler{}).passed);
  // And the two agree pointwise through the transform.
  VectorXd x(3);
  x << 0.1, 0.2, -0.3;
  EXPECT_LE((Problem::build(t).values(x) - Problem::build(q).values(a * x + shift)).norm(), 1e-10);
}

// --- serialization ---------------------------------------------------------

TEST(ProblemIo, RoundTripEveryFamily) {
  auto all = oracle::fixtures();
  all.push_back({"phenotypic31", oracle::example31AsPhenotypic()});
  for (const auto& f : all) {
    const FamilySpec back = parseProblem(serializeProblem(f.spec));
    EXPECT_TRUE(back == f.spec) << f.name;
    EXPECT_EQ(problemDigest(back), problemDigest(f.spec)) << f.name;
  }
}

TEST(ProblemIo, Errors) {
  try {
    parseProblem(R"({"family": "distance_squared", "n": 3, "m": 2, "points": [[0, 0], [1, 0]]})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("dimension mismatch"), std::string::npos) << e.what();
  }
  try {
    parseProblem(R"({"family": "ridge_pair", "n": 1, "m": 2, "X": [[1], [2]], "y": [1, 2], "mu": 0})");
    FAIL();
  } catch (const ProblemError& e) {
    EXPECT_NE(std::string(e.what()).find("μ must be positive"), std::string::npos) << e.what();
  }
  try {
    parseProblem("{\n  \"family\": \"example31\",\n  \"n\": 3,,\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parseProblem(R"({"family": "nope", "n": 1, "m": 1})"), ParseError);
  EXPECT_THROW(parseProblem(R"({"family": "example31", "n": 3, "m": 4})"), ParseError);
}

TEST(ProblemIo, RidgeCsv) {
  std::istringstream in("a,b,y\n1,2,3\n4,5,6\n7,8,10\n");
  const RidgePair r = readRidgeCsv(in, 0.5);
  EXPECT_EQ(r.X.rows(), 3);
  EXPECT_EQ(r.X.cols(), 2);
  EXPECT_EQ(r.y(2), 10.0);
  EXPECT_EQ(r.X(1, 1), 5.0);
  std::istringstream ragged("a,y\n1,2\n3\n");
  EXPECT_THROW(readRidgeCsv(ragged, 0.5), ParseError);
  std::istringstream text("a,y\n1,x\n");
  EXPECT_THROW(readRidgeCsv(text, 0.5), ParseError);
}
