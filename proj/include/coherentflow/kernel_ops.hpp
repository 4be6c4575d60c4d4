#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace cf {

enum class KernelKind { gaussian, polynomial };

struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  double sigma = 1.0;  // gaussian bandwidth
  int degree = 2;      // polynomial degree
  double offset = 1.0; // polynomial additive constant

  static KernelSpec gaussian(double sigma) { return {KernelKind::gaussian, sigma, 2, 1.0}; }
  static KernelSpec polynomial(int degree, double offset = 1.0) {
    return {KernelKind::polynomial, 1.0, degree, offset};
  }

  void validate() const;
};

/// Dense symmetric kernel matrix over one point set.
struct GramMatrix {
  Eigen::MatrixXd entries;

  Eigen::Index size() const { return entries.rows(); }
};

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

/// points: n x d, one row per point. Each unordered pair is evaluated once.
GramMatrix gram(const KernelSpec& spec, const Eigen::MatrixXd& points);

/// Median pairwise Euclidean distance. Enumerates all pairs when there are at
/// most 10^6 of them, otherwise samples 10^6 pairs with a fixed seed.
double median_heuristic(const Eigen::MatrixXd& points, std::uint64_t seed = 0x5eed);

}  // namespace cf
