#pragma once

// Weighted-sum scalarization: x*(w) = argmin_x sum_i w_i f_i(x) by damped
// Newton, plus the derivative of x* with respect to simplex coordinates.

#include "pareto/problem.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pareto {

/// Numerical failures that cannot be reported through a status field.
class NumericalError : public std::runtime_error {
 public:
  enum class Kind { SingularMixedHessian, NewtonFailed, DBlockSingular, InvalidPoint };
  NumericalError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// A point of the standard simplex, tagged with the face it lies on.
class Weight {
 public:
  /// Validates sum = 1 (within 1e-12), nonnegativity, and support inside face.
  static Weight make(VectorXd coords);
  static Weight onFace(VectorXd coords, std::uint32_t face);
  /// Uniform weight 1/|I| on the objectives of face I.
  static Weight barycenter(int m, std::uint32_t face);

  const VectorXd& coords() const { return coords_; }
  double operator[](int i) const { return coords_(i); }
  int size() const { return static_cast<int>(coords_.size()); }
  /// Bitmask of the face Delta_I (bit i set iff objective i may be nonzero).
  std::uint32_t face() const { return face_; }
  /// Bitmask of {i : w_i > 0}.
  std::uint32_t support() const;

 private:
  Weight(VectorXd c, std::uint32_t face) : coords_(std::move(c)), face_(face) {}
  VectorXd coords_;
  std::uint32_t face_ = 0;
};

std::uint32_t fullFace(int m);
std::vector<int> faceIndices(std::uint32_t face);
std::string faceLabel(std::uint32_t face);  // 1-based, e.g. "1+3"

struct SolverConfig {
  double gradTol = 1e-10;  // scaled by max(1, ||grad||) at the initial point
  int maxIter = 200;
  double armijoC = 1e-4;
  double shrink = 0.5;
  int maxBacktracks = 60;
  std::optional<VectorXd> initialPoint;  // origin when unset
  double rankTol = 1e-8;                 // for the corank recorded on each point
};

enum class SolveStatus { Converged, MaxIterExceeded, SingularNewtonSystem };
std::string toString(SolveStatus s);

struct ParetoPoint {
  Weight w = Weight::barycenter(1, 1);
  VectorXd x;
  VectorXd fx;
  double kktResidual = 0.0;  // || sum_i w_i grad f_i(x) ||
  double tolerance = 0.0;    // effective residual tolerance of the solve
  VectorXd jacobianSV;       // singular values of df_x, length min(n, m)
  int corank = 0;            // min(n, m) - rank(df_x)
  SolveStatus status = SolveStatus::Converged;
  int iterations = 0;

  bool converged() const { return status == SolveStatus::Converged; }
};

struct NewtonResult {
  VectorXd x;
  double residual = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::Converged;
  std::vector<double> objectiveTrace;  // scalarized value per iterate, when traced
};

/// Raw damped Newton on sum_i weights_i f_i. The weights are not required to
/// lie in the simplex; callers may probe slightly outside it as long as the
/// mixed Hessian stays positive definite.
NewtonResult minimizeWeightedSum(const Problem& p, const VectorXd& weights,
                                 const SolverConfig& cfg, bool trace = false);

ParetoPoint scalarize(const Problem& p, const Weight& w, const SolverConfig& cfg = {});

/// Jacobian (n x (m-1)) of the map from simplex coordinates to x*. The
/// coordinates are the weights of every objective except `eliminated`
/// (default: the last), whose weight is 1 minus their sum. Column for
/// objective j is -A (grad f_j - grad f_e) with A the inverse mixed Hessian.
/// Throws NumericalError(SingularMixedHessian).
MatrixXd xStarDerivative(const Problem& p, const ParetoPoint& pt, int eliminated = -1);

/// Solves the subproblem f_I at the restriction of wI to I. The result is a
/// Pareto point of f_I (weights and values of length |I|).
ParetoPoint subproblemSolve(const Problem& p, std::span<const int> face, const Weight& wI,
                            const SolverConfig& cfg = {});

}  // namespace pareto
