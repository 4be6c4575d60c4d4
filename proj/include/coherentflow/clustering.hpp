#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace cf {

/// Hard partition of n items into k labels.
struct Labeling {
  std::vector<int> labels;
  int k = 0;
  double inertia = 0.0;

  std::size_t size() const { return labels.size(); }
  bool operator==(const Labeling& other) const {
    return k == other.k && labels == other.labels;
  }
};

/// Lloyd's algorithm from k-means++ seeds; the lowest-inertia restart wins
/// (ties go to the earlier restart). Convergence: center movement < 1e-9 or
/// 300 iterations. An emptied cluster is reseeded at the point farthest from
/// its assigned center.
Labeling kmeans(const Eigen::MatrixXd& points, int k, int restarts, std::uint64_t seed);

/// Permutes the labels of `other` to maximize agreement with `ref`
/// (optimal assignment on the contingency table).
Labeling align_labels(const Labeling& ref, const Labeling& other);

/// Aligns every labeling to the first, then takes a per-item majority vote;
/// ties go to the lowest label.
Labeling consensus(const std::vector<Labeling>& labelings);

/// Minimum-cost assignment on a square cost matrix; result[row] = column.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace cf
