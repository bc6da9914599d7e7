#pragma once

// Objective mappings f = (f_1, ..., f_m): R^n -> R^m with analytic values,
// gradients and Hessians, plus the built-in problem families.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pareto {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raised for invalid problem specifications (non-PD matrices, bad sizes, ...).
class ProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Families

/// f_i(x) = 1/2 x^T Q_i x + b_i^T x + c_i with Q_i symmetric positive definite.
struct GenericQuadratic {
  std::vector<MatrixXd> Q;
  std::vector<VectorXd> b;
  std::vector<double> c;
};

/// Three quadratics on R^3 whose Pareto set contains a corank-2 point:
///   f_1 = x^2 + y^2 + z^2
///   f_2 = x + y + x^2 + y^2 + z^2
///   f_3 = -(x + y) + x^2 + 2y^2 + z^2
struct Example31 {};

/// Example31 with f_1 replaced by f_1 + epsilon * z.
struct Example31Perturbed {
  double epsilon = 0.1;
};

/// Three quadratics on R^3 with non-general minimizers but corank 1 on the
/// whole Pareto set:
///   f_1 = x^2 + (x - y)^2 + z^2
///   f_2 = 2(x - 1)^2 + (x - y - 1)^2 + z^2
///   f_3 = (x - 2)^2 + (x + y - 2)^2 + z^2
struct Example32 {};

/// G = (g_1 - x_3, g_2 - x_4, g_1 + x_3, g_2 + x_4) on R^4 with
///   g_1 = x_1^2 + x_3 x_2 + (x_2^2 + x_4 x_1)/2 + x_3^2 + x_4^2
///   g_2 = x_2^2 + x_4 x_1 + (x_1^2 + x_3 x_2)/2 + x_3^2 + x_4^2.
/// Corank 2 at the origin, and the corank-2 point survives small linear
/// perturbations.
struct RemarkG {};

/// f_i(x) = ||x - p_i||^2.
struct DistanceSquared {
  std::vector<VectorXd> points;
};

/// f_i(x) = ||A_i (x - p_i)||^2 with A_i symmetric positive definite.
struct Phenotypic {
  std::vector<MatrixXd> A;
  std::vector<VectorXd> points;
};

/// (f_1, f_2) = (||X theta - y||^2 + mu ||theta||^2, ||theta||^2), mu > 0.
struct RidgePair {
  MatrixXd X;
  VectorXd y;
  double mu = 1.0;
};

using FamilySpec = std::variant<GenericQuadratic, Example31, Example31Perturbed, Example32,
                                RemarkG, DistanceSquared, Phenotypic, RidgePair>;

bool operator==(const GenericQuadratic& a, const GenericQuadratic& b);
bool operator==(const DistanceSquared& a, const DistanceSquared& b);
bool operator==(const Phenotypic& a, const Phenotypic& b);
bool operator==(const RidgePair& a, const RidgePair& b);
inline bool operator==(const Example31&, const Example31&) { return true; }
inline bool operator==(const Example31Perturbed& a, const Example31Perturbed& b) {
  return a.epsilon == b.epsilon;
}
inline bool operator==(const Example32&, const Example32&) { return true; }
inline bool operator==(const RemarkG&, const RemarkG&) { return true; }

/// Stable family identifier used by the JSON format ("example31", ...).
std::string familyName(const FamilySpec& spec);

/// Source dimension n and objective count m implied by a spec.
struct Dimensions {
  int n = 0;
  int m = 0;
};
Dimensions dimensionsOf(const FamilySpec& spec);

/// Throws ProblemError if the spec violates its invariants. With
/// requireDefinite = false only shapes and finiteness are checked.
void validateSpec(const FamilySpec& spec, bool requireDefinite = true);

// ---------------------------------------------------------------------------
// Problem

struct Evaluation {
  VectorXd values;                 // f(x), length m
  MatrixXd jacobian;               // m x n, row i = grad f_i(x)
  std::vector<MatrixXd> hessians;  // m symmetric n x n
};

/// An objective mapping built from a family, optionally restricted to a subset
/// of its objectives and shifted by a linear term. Immutable; evaluation is
/// pure and safe to call concurrently.
class Problem {
 public:
  /// Validates the spec and builds the problem (throws ProblemError).
  static Problem build(FamilySpec spec);
  /// Like build() but skips the definiteness checks, so that indefinite
  /// inputs can be fed to checkStrongConvexity.
  static Problem buildUnchecked(FamilySpec spec);

  int n() const { return n_; }
  int m() const { return static_cast<int>(objectives_.size()); }
  const FamilySpec& family() const { return family_; }
  /// Indices into the family's objectives, in order.
  const std::vector<int>& objectives() const { return objectives_; }
  /// Linear term added to the selected objectives (m x n).
  const MatrixXd& linearTerm() const { return linear_; }

  Evaluation evaluate(const VectorXd& x) const;
  VectorXd values(const VectorXd& x) const;
  MatrixXd jacobian(const VectorXd& x) const;

  /// Returns the problem f + pi, where pi is an m x n matrix acting as
  /// x -> pi x. Hessians are unchanged.
  Problem withLinearTerm(const MatrixXd& pi) const;

  /// The subproblem f_I = (f_{i_1}, ..., f_{i_k}); indices are 0-based
  /// positions in this problem and must be strictly increasing.
  Problem subproblem(std::span<const int> indices) const;

 private:
  Problem(FamilySpec family, int n, int fullM);

  FamilySpec family_;
  int n_ = 0;
  int fullM_ = 0;
  std::vector<int> objectives_;
  MatrixXd linear_;
};

inline Problem buildProblem(FamilySpec spec) { return Problem::build(std::move(spec)); }

// ---------------------------------------------------------------------------
// Strong convexity spot check

struct StrongConvexityCertificate {
  double betaMin = 0.0;  // minimal Hessian eigenvalue over samples and objectives
  VectorXd witness;      // point attaining betaMin
  int objective = -1;    // objective attaining betaMin
  std::size_t samples = 0;
  bool passed = false;   // betaMin > 0; a sampled certificate, not a proof
};

/// Draws points from N(0, radius^2 I) with a seeded generator.
struct GaussianSampler {
  double radius = 1.0;
  std::uint64_t seed = 0;
  std::vector<VectorXd> draw(int n, std::size_t count) const;
};

StrongConvexityCertificate checkStrongConvexity(const Problem& p,
                                                std::span<const VectorXd> points);
StrongConvexityCertificate checkStrongConvexity(const Problem& p,
                                                const GaussianSampler& sampler,
                                                std::size_t count = 1000);

}  // namespace pareto
