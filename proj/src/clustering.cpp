#include "coherentflow/clustering.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "coherentflow/error.hpp"

namespace cf {
namespace {

constexpr int kMaxIterations = 300;
constexpr double kMoveTol = 1e-9;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Run {
  std::vector<int> labels;
  double inertia = 0.0;
};

// points is m x n here: one column per point.
Eigen::MatrixXd plus_plus_centers(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.cols();
  Eigen::MatrixXd centers(points.rows(), k);
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.col(0) = points.col(first(rng));

  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (points.col(i) - centers.col(0)).squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = first(rng);
    }
    centers.col(c) = points.col(chosen);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], (points.col(i) - centers.col(c)).squaredNorm());
  }
  return centers;
}

Run lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centers) {
  const Eigen::Index n = points.cols();
  const int k = static_cast<int>(centers.cols());
  Run run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd dist(n);

  auto assign = [&] {
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.col(i) - centers.col(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      run.labels[static_cast<std::size_t>(i)] = best;
      dist[i] = best_d;
      inertia += best_d;
    }
    return inertia;
  };

  run.inertia = assign();
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(points.rows(), k);
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = run.labels[static_cast<std::size_t>(i)];
      sums.col(c) += points.col(i);
      ++counts[static_cast<std::size_t>(c)];
    }

    Eigen::MatrixXd updated = centers;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        updated.col(c) = sums.col(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        Eigen::Index far = 0;
        dist.maxCoeff(&far);
        updated.col(c) = points.col(far);
        dist[far] = 0.0;
      }
    }

    double moved = 0.0;
    for (int c = 0; c < k; ++c) moved = std::max(moved, (updated.col(c) - centers.col(c)).norm());
    centers = std::move(updated);
    run.inertia = assign();
    if (moved < kMoveTol) break;
  }
  return run;
}

// Renumbers labels by first appearance so equal partitions print identically.
std::vector<int> canonical(const std::vector<int>& labels, int k) {
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  int next = 0;
  for (int l : labels)
    if (remap[static_cast<std::size_t>(l)] < 0) remap[static_cast<std::size_t>(l)] = next++;
  for (auto& r : remap)
    if (r < 0) r = next++;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[static_cast<std::size_t>(labels[i])];
  return out;
}

}  // namespace

Labeling kmeans(const Eigen::MatrixXd& points, int k, int restarts, std::uint64_t seed) {
  const Eigen::Index n = points.rows();
  require(k >= 1, ErrorCode::invalid_argument, "kmeans: k must be >= 1");
  require(restarts >= 1, ErrorCode::invalid_argument, "kmeans: restarts must be >= 1");
  require(n >= k, ErrorCode::invalid_argument,
          "kmeans: need at least k=" + std::to_string(k) + " points, got " + std::to_string(n));

  const Eigen::MatrixXd cols = points.transpose();
  Run best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    Run run = lloyd(cols, plus_plus_centers(cols, k, rng));
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return Labeling{canonical(best.labels, k), k, best.inertia};
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  // Hungarian method with potentials, O(k^3); 1-based internal indexing.
  const int n = static_cast<int>(cost.rows());
  require(cost.cols() == n, ErrorCode::dimension_mismatch, "assignment: cost must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), 0);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  return row_to_col;
}

Labeling align_labels(const Labeling& ref, const Labeling& other) {
  require(ref.size() == other.size(), ErrorCode::dimension_mismatch,
          "align_labels: labelings have different sizes");
  require(ref.k == other.k, ErrorCode::dimension_mismatch,
          "align_labels: labelings have different k");
  const int k = ref.k;
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(k, k);  // rows: other label, cols: ref label
  for (std::size_t i = 0; i < ref.size(); ++i) cost(other.labels[i], ref.labels[i]) -= 1.0;
  const std::vector<int> map = solve_assignment(cost);

  Labeling out = other;
  for (auto& l : out.labels) l = map[static_cast<std::size_t>(l)];
  return out;
}

Labeling consensus(const std::vector<Labeling>& labelings) {
  require(!labelings.empty(), ErrorCode::invalid_argument, "consensus: no labelings");
  const Labeling& ref = labelings.front();
  const int k = ref.k;
  const std::size_t n = ref.size();
  Eigen::MatrixXi votes = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), k);
  for (const auto& lab : labelings) {
    const Labeling aligned = align_labels(ref, lab);
    for (std::size_t i = 0; i < n; ++i) ++votes(static_cast<Eigen::Index>(i), aligned.labels[i]);
  }

  Labeling out{std::vector<int>(n, 0), k, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    for (int c = 1; c < k; ++c)
      if (votes(static_cast<Eigen::Index>(i), c) > votes(static_cast<Eigen::Index>(i), best)) best = c;
    out.labels[i] = best;
  }
  return out;
}

}  // namespace cf
