#include "pareto/simplex_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pareto {

namespace {

// Visits compositions of `total` into `parts` nonnegative integers in
// lexicographic order.
template <class F>
void compositions(int parts, int total, std::vector<int>& prefix, F&& visit) {
  if (parts == 1) {
    prefix.push_back(total);
    visit(prefix);
    prefix.pop_back();
    return;
  }
  for (int k = 0; k <= total; ++k) {
    prefix.push_back(k);
    compositions(parts - 1, total - k, prefix, visit);
    prefix.pop_back();
  }
}

}  // namespace

SimplexGrid::SimplexGrid(int m, int resolution) : m_(m), resolution_(resolution) {
  if (m < 1 || m > 32) throw std::invalid_argument("simplex grid: m must be in 1..32");
  if (resolution < 1) throw std::invalid_argument("simplex grid: resolution must be >= 1");
  std::vector<int> prefix;
  compositions(m, resolution, prefix, [&](const std::vector<int>& k) {
    std::uint32_t tag = 0;
    for (int i = 0; i < m; ++i)
      if (k[static_cast<std::size_t>(i)] > 0) tag |= (1u << i);
    index_.emplace(k, lattice_.size());
    lattice_.push_back(k);
    faceTags_.push_back(tag);
  });

  neighbors_.resize(lattice_.size());
  for (std::size_t a = 0; a < lattice_.size(); ++a) {
    std::vector<int> k = lattice_[a];
    for (int i = 0; i < m; ++i) {
      if (k[static_cast<std::size_t>(i)] == 0) continue;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        --k[static_cast<std::size_t>(i)];
        ++k[static_cast<std::size_t>(j)];
        neighbors_[a].push_back(index_.at(k));
        ++k[static_cast<std::size_t>(i)];
        --k[static_cast<std::size_t>(j)];
      }
    }
    std::sort(neighbors_[a].begin(), neighbors_[a].end());
  }
}

Eigen::VectorXd SimplexGrid::weight(std::size_t node) const {
  Eigen::VectorXd w(m_);
  for (int i = 0; i < m_; ++i)
    w(i) = static_cast<double>(lattice_[node][static_cast<std::size_t>(i)]) / resolution_;
  return w;
}

std::optional<std::size_t> SimplexGrid::find(std::span<const int> k) const {
  auto it = index_.find(std::vector<int>(k.begin(), k.end()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::size_t, std::size_t>> SimplexGrid::adjacency() const {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < neighbors_.size(); ++a)
    for (std::size_t b : neighbors_[a])
      if (a < b) edges.emplace_back(a, b);
  return edges;
}

double SimplexGrid::step() const { return std::sqrt(2.0) / resolution_; }

std::uint64_t SimplexGrid::expectedSize(int m, int resolution) {
  // C(r + m - 1, m - 1) computed incrementally; exact for the sizes used here.
  std::uint64_t c = 1;
  for (int i = 1; i <= m - 1; ++i)
    c = c * static_cast<std::uint64_t>(resolution + i) / static_cast<std::uint64_t>(i);
  return c;
}

}  // namespace pareto
