#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "coherentflow/coherence.hpp"
#include "coherentflow/error.hpp"
#include "coherentflow/validation.hpp"
#include "doctest.h"

using namespace cf;

namespace {

GramMatrix random_gram(std::mt19937_64& rng, int n, double sigma = 0.8) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd p(n, 2);
  for (int i = 0; i < n; ++i) p.row(i) << g(rng), g(rng);
  return gram(KernelSpec::gaussian(sigma), p);
}

GramMatrix scalar_gram(double v) {
  GramMatrix g;
  g.entries = Eigen::MatrixXd::Constant(1, 1, v);
  return g;
}

// Oracle: explicit inverses, no factorization sharing.
Eigen::MatrixXd surrogate_oracle(const Eigen::MatrixXd& gx, const Eigen::MatrixXd& gy, double eps) {
  const auto n = gx.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const double c = static_cast<double>(n) * eps;
  return (gx + c * I).inverse() * (gy + c * I).inverse() * gy * gx;
}

OperatorConfig op(double eps, int k = 3) {
  OperatorConfig c;
  c.epsilon = eps;
  c.n_eigen = k;
  return c;
}

// Columns equal up to sign.
double column_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    worst = std::max(worst, std::min((a.col(j) - b.col(j)).norm(), (a.col(j) + b.col(j)).norm()));
  return worst;
}

}  // namespace

TEST_CASE("scalar surrogate") {
  const Eigen::MatrixXd m = surrogate_matrix(scalar_gram(1.0), scalar_gram(1.0), op(0.1, 1));
  CHECK(std::abs(m(0, 0) - 1.0 / 1.21) < 1e-12);
  CHECK(std::abs(m(0, 0) - 0.8264) < 1e-4);
}

TEST_CASE("surrogate matches explicit inverses") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const GramMatrix gx = random_gram(rng, 15), gy = random_gram(rng, 15);
    const Eigen::MatrixXd m = surrogate_matrix(gx, gy, op(1e-2));
    const Eigen::MatrixXd ref = surrogate_oracle(gx.entries, gy.entries, 1e-2);
    CHECK((m - ref).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("identity dynamics has squared shrinkage spectrum") {
  std::mt19937_64 rng(42);
  const GramMatrix g = random_gram(rng, 5);
  const double eps = 0.05;
  const Eigen::MatrixXd m = surrogate_matrix(g, g, op(eps, 5));
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  std::vector<double> got;
  for (int i = 0; i < 5; ++i) got.push_back(es.eigenvalues()[i].real());
  const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g.entries).eigenvalues();
  std::vector<double> want;
  for (int i = 0; i < 5; ++i) {
    const double r = lam[i] / (lam[i] + 5 * eps);
    want.push_back(r * r);
  }
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (int i = 0; i < 5; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-10);
}

TEST_CASE("heavy regularization drives the spectrum to zero") {
  std::mt19937_64 rng(43);
  const GramMatrix gx = random_gram(rng, 12), gy = random_gram(rng, 12);
  const Eigen::MatrixXd m = surrogate_matrix(gx, gy, op(1e6));
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  CHECK(es.eigenvalues().cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("online update running mean") {
  std::mt19937_64 rng(44);
  const int n = 20, T = 5;
  const double eps = 1e-2;
  const GramMatrix gx = random_gram(rng, n);
  std::vector<GramMatrix> gys;
  for (int t = 0; t < T; ++t) gys.push_back(random_gram(rng, n, 0.5 + 0.1 * t));

  OperatorState s = OperatorState::start(gx, op(eps));
  CHECK_THROWS_AS(assemble_online_operator(s), Error);

  s = online_update(s, gys[0], op(eps));
  CHECK(s.t == 1);
  const Eigen::MatrixXd c = gys[0].entries + n * eps * Eigen::MatrixXd::Identity(n, n);
  CHECK((s.running_mean - c.inverse() * gys[0].entries).cwiseAbs().maxCoeff() < 1e-10);
  // One term: the online operator is the single-lag surrogate.
  CHECK((assemble_online_operator(s) - surrogate_matrix(gx, gys[0], op(eps))).cwiseAbs().maxCoeff() < 1e-10);

  const OperatorState twice = online_update(s, gys[0], op(eps));
  CHECK((twice.running_mean - s.running_mean).cwiseAbs().maxCoeff() < 1e-12);

  // Batch mean and factorization identity against explicit matrices.
  OperatorState all = OperatorState::start(gx, op(eps));
  Eigen::MatrixXd batch = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd surrogate_mean = Eigen::MatrixXd::Zero(n, n);
  for (const auto& g : gys) {
    all = online_update(all, g, op(eps));
    const Eigen::MatrixXd ci = g.entries + n * eps * Eigen::MatrixXd::Identity(n, n);
    batch += ci.inverse() * g.entries / T;
    surrogate_mean += surrogate_oracle(gx.entries, g.entries, eps) / T;
  }
  CHECK((all.running_mean - batch).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((assemble_online_operator(all) - surrogate_mean).cwiseAbs().maxCoeff() < 1e-10);

  // Any order gives the same mean.
  std::vector<int> order(T);
  std::iota(order.begin(), order.end(), 0);
  for (int perm = 0; perm < 10; ++perm) {
    std::shuffle(order.begin(), order.end(), rng);
    OperatorState p = OperatorState::start(gx, op(eps));
    for (int i : order) p = online_update(p, gys[i], op(eps));
    CHECK((p.running_mean - all.running_mean).cwiseAbs().maxCoeff() < 1e-10);
  }

  CHECK_THROWS_AS(online_update(all, random_gram(rng, n + 1), op(eps)), Error);
}

TEST_CASE("scalar online operator") {
  OperatorState s = OperatorState::start(scalar_gram(1.0), op(0.1, 1));
  s = online_update(s, scalar_gram(1.0), op(0.1, 1));
  s = online_update(s, scalar_gram(1.0), op(0.1, 1));
  CHECK(std::abs(assemble_online_operator(s)(0, 0) - 1.0 / 1.21) < 1e-12);
}

TEST_CASE("dense dominant eigenpairs") {
  SUBCASE("identity") {
    const SpectralResult r = dominant_eigens(Eigen::MatrixXd::Identity(4, 4), 2, op(0.1, 2));
    CHECK(r.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(r.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(r.residuals.maxCoeff() < 1e-12);
  }
  SUBCASE("diagonal") {
    const Eigen::MatrixXd d = Eigen::Vector3d(3, 2, 1).asDiagonal();
    const SpectralResult r = dominant_eigens(d, 2, op(0.1, 2));
    CHECK(r.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(r.eigenvalues[1] == doctest::Approx(2.0));
    CHECK((r.eigenvectors.col(0) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-12);
    CHECK((r.eigenvectors.col(1) - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
  }
  SUBCASE("random SPD against a symmetric solver") {
    std::mt19937_64 rng(45);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(5, 5);
    for (int i = 0; i < 25; ++i) a.data()[i] = g(rng);
    const Eigen::MatrixXd spd = a * a.transpose() + Eigen::MatrixXd::Identity(5, 5);
    const SpectralResult r = dominant_eigens(spd, 5, op(0.1, 5));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spd);
    for (int i = 0; i < 5; ++i) {
      CHECK(std::abs(r.eigenvalues[i] - es.eigenvalues()[4 - i]) < 1e-8);
      const Eigen::VectorXd v = es.eigenvectors().col(4 - i);
      CHECK(std::min((r.eigenvectors.col(i) - v).norm(), (r.eigenvectors.col(i) + v).norm()) < 1e-8);
    }
  }
  SUBCASE("rotation has a complex spectrum") {
    Eigen::MatrixXd rot(2, 2);
    rot << 0, -1, 1, 0;
    CHECK_THROWS_AS(dominant_eigens(rot, 1, op(0.1, 1)), Error);
  }
  SUBCASE("bad k") {
    CHECK_THROWS_AS(dominant_eigens(Eigen::MatrixXd::Identity(3, 3), 4, op(0.1, 4)), Error);
  }
}

TEST_CASE("reduced route matches the dense solver") {
  std::mt19937_64 rng(46);
  const int n = 40, T = 6;
  const double eps = 1e-3;
  const GramMatrix gx = random_gram(rng, n, 0.6);
  std::vector<GramMatrix> gys;
  for (int t = 0; t < T; ++t) gys.push_back(random_gram(rng, n, 0.6));

  OperatorState state = OperatorState::start(gx, op(eps, 4));
  const SpectralBasis basis(gx, eps);
  ReducedOnlineOperator reduced(basis);
  for (const auto& g : gys) {
    state = online_update(state, g, op(eps, 4));
    reduced.absorb(g);
  }
  SpectralResult dense = dominant_eigens(assemble_online_operator(state), 4, op(eps, 4));
  attach_eigenfunctions(dense, gx);
  const SpectralResult fast = reduced.dominant_eigens(4, op(eps, 4));
  REQUIRE(fast.count() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(fast.eigenvalues[i] - dense.eigenvalues[i]) < 1e-9);
  CHECK(column_gap(fast.eigenvectors, dense.eigenvectors) < 1e-6);
  CHECK(column_gap(fast.eigenfunctions, dense.eigenfunctions) < 1e-6);
  CHECK(fast.residuals.maxCoeff() < 1e-8);

  // Single snapshot: reduced route equals the dense single-lag surrogate.
  ReducedOnlineOperator one(basis);
  one.absorb(gys[2]);
  const SpectralResult single = one.dominant_eigens(3, op(eps, 3));
  const SpectralResult ref = dominant_eigens(surrogate_matrix(gx, gys[2], op(eps, 3)), 3, op(eps, 3));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(single.eigenvalues[i] - ref.eigenvalues[i]) < 1e-9);
  CHECK(column_gap(single.eigenvectors, ref.eigenvectors) < 1e-6);
}

TEST_CASE("surrogate spectrum lies in the unit interval") {
  std::mt19937_64 rng(47);
  const GramMatrix gx = random_gram(rng, 30), gy = random_gram(rng, 30);
  const SpectralBasis basis(gx, 1e-3);
  ReducedOnlineOperator r(basis);
  r.absorb(gy);
  const SpectralResult s = r.dominant_eigens(10, op(1e-3, 10));
  CHECK(s.eigenvalues.minCoeff() >= -1e-6);
  CHECK(s.eigenvalues.maxCoeff() <= 1 + 1e-3);
}

TEST_CASE("clusters from eigenfunctions") {
  // Three well separated clouds in a 3-column embedding.
  std::mt19937_64 rng(48);
  std::normal_distribution<double> g(0.0, 0.01);
  SpectralResult s;
  s.eigenvalues = Eigen::Vector3d(1, 0.9, 0.8);
  s.eigenfunctions.resize(30, 3);
  std::vector<int> truth;
  for (int i = 0; i < 30; ++i) {
    const int c = i % 3;
    truth.push_back(c);
    for (int j = 0; j < 3; ++j) s.eigenfunctions(i, j) = (j == c ? 1.0 : 0.0) + g(rng);
  }
  s.eigenvectors = s.eigenfunctions;
  const Labeling lab = detect_coherent_sets(s, 3, 7);
  CHECK(adjusted_rand(lab, Labeling{truth, 3}) == 1.0);

  SpectralResult flipped = s;
  flipped.eigenfunctions *= -1.0;
  flipped.eigenvectors *= -1.0;
  CHECK(adjusted_rand(detect_coherent_sets(flipped, 3, 7), lab) == 1.0);
  CHECK_THROWS_AS(detect_coherent_sets(s, 4, 7), Error);
}

TEST_CASE("operator config validation") {
  CHECK_THROWS_AS(op(0.0).validate(), Error);
  OperatorConfig c = op(0.1);
  c.n_eigen = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}
