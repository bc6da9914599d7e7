#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace pareto {

/// Integer barycentric lattice on the standard simplex: all weights k / r with
/// nonnegative integers k summing to r. Nodes are stored in lexicographic
/// order of k.
class SimplexGrid {
 public:
  SimplexGrid(int m, int resolution);

  int m() const { return m_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return lattice_.size(); }

  std::span<const int> lattice(std::size_t node) const { return lattice_[node]; }
  Eigen::VectorXd weight(std::size_t node) const;
  /// Support set {i : w_i > 0} as a bitmask.
  std::uint32_t faceTag(std::size_t node) const { return faceTags_[node]; }
  std::optional<std::size_t> find(std::span<const int> k) const;

  /// Nodes differing by one unit moved between two coordinates.
  const std::vector<std::size_t>& neighbors(std::size_t node) const { return neighbors_[node]; }
  std::vector<std::pair<std::size_t, std::size_t>> adjacency() const;

  /// Euclidean distance between adjacent nodes, sqrt(2) / r.
  double step() const;

  /// C(r + m - 1, m - 1).
  static std::uint64_t expectedSize(int m, int resolution);

 private:
  int m_;
  int resolution_;
  std::vector<std::vector<int>> lattice_;
  std::vector<std::uint32_t> faceTags_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::map<std::vector<int>, std::size_t> index_;
};

}  // namespace pareto
