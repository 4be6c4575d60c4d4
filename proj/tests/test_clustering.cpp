#include <algorithm>
#include <random>

#include "coherentflow/clustering.hpp"
#include "coherentflow/error.hpp"
#include "doctest.h"

using namespace cf;

namespace {

// Co-membership matrix: which pairs share a label.
std::vector<bool> comembership(const Labeling& l) {
  const std::size_t n = l.size();
  std::vector<bool> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = l.labels[i] == l.labels[j];
  return m;
}

Labeling permuted(const Labeling& l, const std::vector<int>& perm) {
  Labeling out = l;
  for (int& v : out.labels) v = perm[v];
  return out;
}

}  // namespace

TEST_CASE("single cluster") {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> g;
  Eigen::MatrixXd p(40, 2);
  for (int i = 0; i < 80; ++i) p.data()[i] = g(rng);
  const Labeling l = kmeans(p, 1, 3, 1);
  CHECK(std::all_of(l.labels.begin(), l.labels.end(), [](int v) { return v == 0; }));
  const Eigen::RowVector2d mean = p.colwise().mean();
  const double ss = (p.rowwise() - mean).squaredNorm();
  CHECK(l.inertia == doctest::Approx(ss).epsilon(1e-12));
}

TEST_CASE("separated clouds") {
  Eigen::MatrixXd two(6, 2);
  two << 0, 0, 0.1, 0, 0, 0.1, 100, 100, 100.1, 100, 100, 100.1;
  const Labeling l = kmeans(two, 2, 5, 3);
  CHECK(l.labels[0] == l.labels[1]);
  CHECK(l.labels[0] == l.labels[2]);
  CHECK(l.labels[3] == l.labels[4]);
  CHECK(l.labels[0] != l.labels[3]);

  // Nearest generating centre is the oracle partition.
  std::mt19937_64 rng(52);
  std::normal_distribution<double> g(0.0, 0.1);
  const Eigen::Vector2d centres[3] = {{0, 0}, {10, 0}, {0, 10}};
  Eigen::MatrixXd p(30, 2);
  std::vector<int> truth(30);
  for (int i = 0; i < 30; ++i) {
    const Eigen::Vector2d x = centres[i % 3] + Eigen::Vector2d(g(rng), g(rng));
    p.row(i) = x.transpose();
    int best = 0;
    for (int c = 1; c < 3; ++c)
      if ((x - centres[c]).norm() < (x - centres[best]).norm()) best = c;
    truth[i] = best;
  }
  const Labeling fit = kmeans(p, 3, 10, 4);
  CHECK(comembership(fit) == comembership(Labeling{truth, 3}));
}

TEST_CASE("more restarts never raise the inertia") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd p(120, 2);
  for (int i = 0; i < 240; ++i) p.data()[i] = u(rng);
  double prev = kmeans(p, 5, 1, 9).inertia;
  for (int r = 2; r <= 20; ++r) {
    const double cur = kmeans(p, 5, r, 9).inertia;
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("kmeans is deterministic and validates input") {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd p(50, 3);
  for (int i = 0; i < 150; ++i) p.data()[i] = u(rng);
  CHECK(kmeans(p, 4, 5, 11) == kmeans(p, 4, 5, 11));
  CHECK_THROWS_AS(kmeans(p, 0, 5, 1), Error);
  CHECK_THROWS_AS(kmeans(p, 51, 5, 1), Error);
}

TEST_CASE("align labels") {
  const Labeling ref{{0, 0, 1, 1, 2, 2}, 3};
  CHECK(align_labels(ref, ref) == ref);
  CHECK(align_labels(ref, permuted(ref, {2, 0, 1})).labels == ref.labels);
  CHECK(align_labels(Labeling{{0, 0, 1, 1}, 2}, Labeling{{1, 1, 0, 1}, 2}).labels ==
        std::vector<int>{0, 0, 1, 0});

  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> lab(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    Labeling a{std::vector<int>(25), 4}, b{std::vector<int>(25), 4};
    for (int i = 0; i < 25; ++i) {
      a.labels[i] = lab(rng);
      b.labels[i] = lab(rng);
    }
    CHECK(comembership(align_labels(a, b)) == comembership(b));
  }
}

TEST_CASE("assignment solver against enumeration") {
  std::mt19937_64 rng(56);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd cost(5, 5);
    for (int i = 0; i < 25; ++i) cost.data()[i] = u(rng);
    std::vector<int> perm{0, 1, 2, 3, 4};
    double best = 1e300;
    do {
      double c = 0;
      for (int i = 0; i < 5; ++i) c += cost(i, perm[i]);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto got = solve_assignment(cost);
    double c = 0;
    for (int i = 0; i < 5; ++i) c += cost(i, got[i]);
    CHECK(c == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("consensus") {
  const Labeling x{{0, 1, 1, 2, 0, 2}, 3};
  for (int b = 1; b <= 5; ++b) CHECK(consensus(std::vector<Labeling>(b, x)).labels == x.labels);
  CHECK(consensus({x, permuted(x, {1, 2, 0}), permuted(x, {2, 1, 0})}).labels == x.labels);
  Labeling odd = x;
  odd.labels[3] = 1;
  // Particle 3 disagrees once out of three votes.
  CHECK(consensus({x, odd, x}).labels == x.labels);
  CHECK(consensus({x, odd, odd}).labels == odd.labels);
}
