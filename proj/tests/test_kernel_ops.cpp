#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "coherentflow/error.hpp"
#include "coherentflow/kernel_ops.hpp"
#include "doctest.h"

using namespace cf;

namespace {
Eigen::MatrixXd random_points(std::mt19937_64& rng, int n, int d, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXd p(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) p(i, j) = g(rng);
  return p;
}
}  // namespace

TEST_CASE("kernel values") {
  const Eigen::Vector2d o(0, 0), a(0.75, 0), b(1, 2), c(2, 1);
  CHECK(eval_kernel(KernelSpec::gaussian(0.75), b, b) == 1.0);
  CHECK(std::abs(eval_kernel(KernelSpec::gaussian(0.75), o, a) - std::exp(-0.5)) < 1e-15);
  CHECK(std::abs(eval_kernel(KernelSpec::gaussian(0.75), o, a) - 0.60653) < 1e-5);
  CHECK(eval_kernel(KernelSpec::polynomial(2, 1.0), b, c) == 25.0);
  CHECK(eval_kernel(KernelSpec::polynomial(3, 0.5), b, c) == 4.5 * 4.5 * 4.5);
}

TEST_CASE("kernel spec validation") {
  CHECK_THROWS_AS(KernelSpec::gaussian(0.0).validate(), Error);
  CHECK_THROWS_AS(KernelSpec::gaussian(-1.0).validate(), Error);
  CHECK_THROWS_AS(KernelSpec::polynomial(0).validate(), Error);
  CHECK_NOTHROW(KernelSpec::polynomial(2).validate());
}

TEST_CASE("kernel symmetry") {
  std::mt19937_64 rng(31);
  const KernelSpec specs[] = {KernelSpec::gaussian(0.75), KernelSpec::polynomial(2, 1.0)};
  for (int i = 0; i < 1000; ++i) {
    const Eigen::MatrixXd p = random_points(rng, 2, 2);
    for (const auto& s : specs)
      CHECK(eval_kernel(s, p.row(0).transpose(), p.row(1).transpose()) ==
            eval_kernel(s, p.row(1).transpose(), p.row(0).transpose()));
  }
}

TEST_CASE("gram matches pointwise evaluation") {
  std::mt19937_64 rng(32);
  const Eigen::MatrixXd p = random_points(rng, 17, 2);
  for (const auto& s : {KernelSpec::gaussian(0.6), KernelSpec::polynomial(2, 1.0)}) {
    const GramMatrix g = gram(s, p);
    REQUIRE(g.size() == 17);
    for (int i = 0; i < 17; ++i)
      for (int j = 0; j < 17; ++j) {
        CHECK(g.entries(i, j) == g.entries(j, i));
        const double ref = s.kind == KernelKind::gaussian
                               ? std::exp(-(p.row(i) - p.row(j)).squaredNorm() / (2 * s.sigma * s.sigma))
                               : std::pow(p.row(i).dot(p.row(j)) + s.offset, s.degree);
        CHECK(std::abs(g.entries(i, j) - ref) <= 1e-14 * std::max(1.0, std::abs(ref)));
      }
  }
  Eigen::MatrixXd one(1, 2);
  one << 3, 4;
  CHECK(gram(KernelSpec::gaussian(1.0), one).entries(0, 0) == 1.0);
}

TEST_CASE("collinear points spaced one bandwidth apart") {
  Eigen::MatrixXd p(3, 2);
  p << 0, 0, 0.75, 0, 1.5, 0;
  const GramMatrix g = gram(KernelSpec::gaussian(0.75), p);
  CHECK(std::abs(g.entries(0, 1) - std::exp(-0.5)) < 1e-15);
  CHECK(std::abs(g.entries(1, 2) - std::exp(-0.5)) < 1e-15);
  CHECK(std::abs(g.entries(0, 2) - std::exp(-2.0)) < 1e-15);
}

TEST_CASE("gaussian gram is positive semidefinite") {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> size(2, 60);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = size(rng);
    const Eigen::MatrixXd p = random_points(rng, n, 2);
    const GramMatrix g = gram(KernelSpec::gaussian(0.5 + trial * 0.02), p);
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g.entries).eigenvalues().minCoeff();
    CHECK(lmin >= -1e-9 * n);
  }
}

TEST_CASE("gaussian gram is translation invariant") {
  std::mt19937_64 rng(34);
  const Eigen::MatrixXd p = random_points(rng, 25, 2);
  Eigen::MatrixXd q = p;
  q.rowwise() += Eigen::RowVector2d(3.7, -11.2);
  const GramMatrix a = gram(KernelSpec::gaussian(0.9), p);
  const GramMatrix b = gram(KernelSpec::gaussian(0.9), q);
  CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("median heuristic") {
  Eigen::MatrixXd two(2, 2);
  two << 0, 0, 2, 0;
  CHECK(median_heuristic(two) == 2.0);
  Eigen::MatrixXd sq(4, 2);
  sq << 0, 0, 1, 0, 0, 1, 1, 1;
  CHECK(median_heuristic(sq) == 1.0);
  Eigen::MatrixXd moved = sq;
  moved.rowwise() += Eigen::RowVector2d(-5, 8.5);
  CHECK(median_heuristic(moved) == doctest::Approx(1.0).epsilon(1e-14));

  // Brute-force oracle on an odd pair count.
  std::mt19937_64 rng(35);
  const Eigen::MatrixXd p = random_points(rng, 11, 2);
  std::vector<double> d;
  for (int i = 0; i < 11; ++i)
    for (int j = i + 1; j < 11; ++j) d.push_back((p.row(i) - p.row(j)).norm());
  std::sort(d.begin(), d.end());
  CHECK(median_heuristic(p) == doctest::Approx(d[d.size() / 2]).epsilon(1e-14));
}
