#pragma once

// Linear perturbations f + pi, pi in L(R^n, R^m), and the experiments built
// on them.

#include "pareto/atlas.hpp"
#include "pareto/diagnostics.hpp"
#include "pareto/parallel.hpp"
#include "pareto/problem.hpp"
#include "pareto/solver.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pareto {

/// An m x n coefficient array with entries i.i.d. uniform on [-scale, scale].
/// The entries are a pure function of (m, n, seed, scale) on every platform.
struct LinearPerturbation {
  MatrixXd coefficients;
  std::uint64_t seed = 0;
  double scale = 0.0;

  static LinearPerturbation sample(int m, int n, std::uint64_t seed, double scale);
  static LinearPerturbation zero(int m, int n);
};

struct PerturbedProblem {
  Problem base;
  LinearPerturbation pi;
  Problem problem;  // base + pi
};

/// Throws ProblemError on dimension mismatch.
PerturbedProblem perturbProblem(const Problem& p, const LinearPerturbation& pi);

struct GenericityOptions {
  int trials = 20;
  double scale = 0.1;
  int resolution = 20;
  std::vector<double> taus{1e-8};
  std::uint64_t baseSeed = 0;  // trial t uses seed baseSeed + t
  SolverConfig solver;
  Execution exec = Execution::Parallel;  // across trials
};

struct GenericityTrial {
  std::uint64_t seed = 0;
  std::vector<int> maxCorank;  // per tau
  double minSecondSingularRatio = 0.0;
  std::size_t failedNodes = 0;
};

struct GenericityReport {
  std::vector<double> taus;
  std::vector<int> trialsWithCorank2;  // per tau
  std::vector<GenericityTrial> trials;
  bool tausAgree = true;  // every trial reaches the same verdict at every tau
};

GenericityReport genericityExperiment(const Problem& p, const GenericityOptions& opt);

struct TrackerConfig {
  int maxIter = 50;
  double tol = 1e-13;    // Newton stops once ||E||_F <= tol
  double accept = 1e-10; // required final ||E||_F
  double tau = 1e-8;
  std::optional<VectorXd> start;  // origin when unset
  double dBlockCondLimit = 1e12;
};

struct Corank2Track {
  VectorXd xHat;
  double residual = 0.0;  // ||E(xHat)||_F
  int iterations = 0;
  int corank = 0;
  MatrixXd cokernelBasis;  // columns span {v : sum_i v_i grad f_i = 0}
  bool meetsSimplexInterior = false;
  VectorXd interiorWitness;  // point of the cokernel in the open simplex
  double interiorMargin = 0.0;
};

/// Schur complement E(x) = A - B D^-1 C of the 4x4 differential written in the
/// variables-by-objectives layout with 2x2 blocks [[A, B], [C, D]].
MatrixXd schurBlock(const Problem& p, const VectorXd& x);
/// 4x4 Jacobian of vec(E) (row-major) with respect to x.
MatrixXd schurBlockJacobian(const Problem& p, const VectorXd& x);

/// Tracks the corank-2 point of a perturbed 4 -> 4 map by Newton on E = 0.
/// Throws NumericalError(NewtonFailed | DBlockSingular).
Corank2Track corank2Tracker(const Problem& base, const LinearPerturbation& pi,
                            const TrackerConfig& cfg = {});

struct StabilityRow {
  double scale = 0.0;
  double maxDisplacement = 0.0;  // max over grid nodes of ||Gamma(w, pi) - Gamma(w, 0)||
  std::size_t argmaxNode = 0;
};

/// One seeded direction, rescaled for each scale (so the rows differ only in
/// perturbation size).
std::vector<StabilityRow> stabilityExperiment(const Problem& p, std::span<const double> scales,
                                              int resolution, std::uint64_t seed = 0,
                                              const SolverConfig& cfg = {},
                                              Execution exec = Execution::Parallel);

}  // namespace pareto
