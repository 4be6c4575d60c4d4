#include "coherentflow/kernel_ops.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "coherentflow/error.hpp"
#include "coherentflow/parallel.hpp"

namespace cf {
namespace {

constexpr std::size_t kMaxPairs = 1'000'000;

double median_of(std::vector<double>& values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

void KernelSpec::validate() const {
  if (kind == KernelKind::gaussian)
    require(sigma > 0.0, ErrorCode::invalid_argument, "gaussian kernel needs sigma > 0");
  else
    require(degree >= 1 && offset >= 0.0, ErrorCode::invalid_argument,
            "polynomial kernel needs degree >= 1 and offset >= 0");
}

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
  require(x.size() == y.size(), ErrorCode::dimension_mismatch,
          "eval_kernel: points have different dimensions");
  if (spec.kind == KernelKind::gaussian)
    return std::exp(-(x - y).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
  return std::pow(x.dot(y) + spec.offset, spec.degree);
}

GramMatrix gram(const KernelSpec& spec, const Eigen::MatrixXd& points) {
  spec.validate();
  const Eigen::Index n = points.rows();
  require(n >= 1, ErrorCode::invalid_argument, "gram: need at least one point");

  // Column-major copy so each point is a contiguous column.
  const Eigen::MatrixXd cols = points.transpose();
  GramMatrix g{Eigen::MatrixXd(n, n)};
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    for (Eigen::Index i = 0; i <= j; ++i) g.entries(i, j) = eval_kernel(spec, cols.col(i), cols.col(j));
  });
  g.entries.triangularView<Eigen::StrictlyLower>() = g.entries.transpose();
  return g;
}

double median_heuristic(const Eigen::MatrixXd& points, std::uint64_t seed) {
  const Eigen::Index n = points.rows();
  require(n >= 2, ErrorCode::invalid_argument, "median_heuristic: need at least two points");

  const auto total =
      static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  std::vector<double> dists;
  if (total <= kMaxPairs) {
    dists.reserve(total);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) dists.push_back((points.row(i) - points.row(j)).norm());
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    dists.reserve(kMaxPairs);
    while (dists.size() < kMaxPairs) {
      const Eigen::Index i = pick(rng);
      const Eigen::Index j = pick(rng);
      if (i != j) dists.push_back((points.row(i) - points.row(j)).norm());
    }
  }
  require(*std::max_element(dists.begin(), dists.end()) > 0.0, ErrorCode::invalid_argument,
          "median_heuristic: all points are identical");
  return median_of(dists);
}

}  // namespace cf
