#include "coherentflow/coherence.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "coherentflow/error.hpp"

namespace cf {
namespace {

Eigen::LLT<Eigen::MatrixXd> regularized_factor(const GramMatrix& g, double epsilon,
                                               const char* name) {
  const auto n = g.size();
  Eigen::MatrixXd a = g.entries;
  a.diagonal().array() += static_cast<double>(n) * epsilon;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  require(llt.info() == Eigen::Success, ErrorCode::solve_failure,
          std::string("regularized ") + name + " is not positive definite");
  return llt;
}

// Flips v so its largest-magnitude entry is positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v[idx] < 0.0) v = -v;
}

void normalize(Eigen::Ref<Eigen::VectorXd> v) {
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
}

}  // namespace

void OperatorConfig::validate() const {
  require(epsilon > 0.0, ErrorCode::invalid_argument, "operator epsilon must be positive");
  require(n_eigen >= 1, ErrorCode::invalid_argument, "operator n_eigen must be >= 1");
  require(imag_tol > 0.0, ErrorCode::invalid_argument, "operator imag_tol must be positive");
}

OperatorState OperatorState::start(GramMatrix g_xx, const OperatorConfig& cfg) {
  cfg.validate();
  OperatorState state;
  const auto n = g_xx.size();
  state.g_xx = std::move(g_xx);
  state.running_mean = Eigen::MatrixXd::Zero(n, n);
  state.epsilon = cfg.epsilon;
  return state;
}

Eigen::MatrixXd normalized_gramian(const GramMatrix& g, double epsilon, const char* name) {
  return regularized_factor(g, epsilon, name).solve(g.entries);
}

Eigen::MatrixXd surrogate_matrix(const GramMatrix& g_xx, const GramMatrix& g_yy,
                                 const OperatorConfig& cfg) {
  cfg.validate();
  require(g_xx.size() == g_yy.size(), ErrorCode::dimension_mismatch,
          "surrogate_matrix: G_XX and G_YY differ in size");
  const auto fx = regularized_factor(g_xx, cfg.epsilon, "G_XX");
  const auto fy = regularized_factor(g_yy, cfg.epsilon, "G_YY");
  const Eigen::MatrixXd yx = g_yy.entries * g_xx.entries;
  return fx.solve(fy.solve(yx));
}

OperatorState online_update(const OperatorState& state, const GramMatrix& g_yy_t,
                            const OperatorConfig& cfg) {
  cfg.validate();
  require(g_yy_t.size() == state.g_xx.size(), ErrorCode::dimension_mismatch,
          "online_update: snapshot Gramian does not match G_XX");
  require(cfg.epsilon == state.epsilon, ErrorCode::invalid_argument,
          "online_update: epsilon differs from the state's epsilon");
  const Eigen::MatrixXd term = normalized_gramian(g_yy_t, cfg.epsilon, "G_YY");
  OperatorState next = state;
  const double t = static_cast<double>(state.t);
  next.running_mean = (t * state.running_mean + term) / (t + 1.0);
  next.t = state.t + 1;
  return next;
}

Eigen::MatrixXd assemble_online_operator(const OperatorState& state) {
  require(state.t >= 1, ErrorCode::empty_state,
          "assemble_online_operator: no snapshots absorbed yet");
  const auto fx = regularized_factor(state.g_xx, state.epsilon, "G_XX");
  return fx.solve(state.running_mean * state.g_xx.entries);
}

SpectralResult dominant_eigens(const Eigen::MatrixXd& m, int k, const OperatorConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = m.rows();
  require(m.cols() == n, ErrorCode::dimension_mismatch, "dominant_eigens: matrix must be square");
  require(k >= 1 && k <= n, ErrorCode::invalid_argument,
          "dominant_eigens: k must be in [1, n], got " + std::to_string(k));

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, true);
  require(solver.info() == Eigen::Success, ErrorCode::eigen_failure,
          "dominant_eigens: eigensolver did not converge");
  const Eigen::VectorXcd values = solver.eigenvalues();
  const Eigen::MatrixXcd vectors = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return values[a].real() > values[b].real();
  });

  const double scale = std::max(values.cwiseAbs().maxCoeff(), 1e-300);
  SpectralResult out;
  out.eigenvalues.resize(k);
  out.eigenvectors.resize(n, k);
  out.residuals.resize(k);
  for (int j = 0; j < k; ++j) {
    const Eigen::Index idx = order[static_cast<std::size_t>(j)];
    const std::complex<double> lambda = values[idx];
    require(std::abs(lambda.imag()) < cfg.imag_tol * scale, ErrorCode::complex_spectrum,
            "dominant_eigens: eigenvalue " + std::to_string(j) + " has imaginary part " +
                std::to_string(lambda.imag()) + " (check epsilon and kernel)");
    const Eigen::VectorXcd vc = vectors.col(idx);
    require(vc.imag().norm() < cfg.imag_tol * std::max(vc.norm(), 1e-300),
            ErrorCode::complex_spectrum,
            "dominant_eigens: eigenvector " + std::to_string(j) + " is not real");
    Eigen::VectorXd v = vc.real();
    normalize(v);
    fix_sign(v);
    out.eigenvalues[j] = lambda.real();
    out.eigenvectors.col(j) = v;
    out.residuals[j] = (m * v - lambda.real() * v).norm();
  }
  out.eigenfunctions = out.eigenvectors;
  return out;
}

void attach_eigenfunctions(SpectralResult& spectral, const GramMatrix& g_xx) {
  require(g_xx.size() == spectral.eigenvectors.rows(), ErrorCode::dimension_mismatch,
          "attach_eigenfunctions: Gramian does not match eigenvectors");
  spectral.eigenfunctions = g_xx.entries * spectral.eigenvectors;
  for (Eigen::Index j = 0; j < spectral.eigenfunctions.cols(); ++j)
    normalize(spectral.eigenfunctions.col(j));
}

Labeling detect_coherent_sets(const SpectralResult& spectral, int k_clusters,
                              std::uint64_t seed, int restarts) {
  require(k_clusters >= 1 && k_clusters <= spectral.eigenfunctions.cols(),
          ErrorCode::invalid_argument,
          "detect_coherent_sets: need at least k_clusters eigenfunctions");
  return kmeans(spectral.eigenfunctions.leftCols(k_clusters), k_clusters, restarts, seed);
}

SpectralBasis::SpectralBasis(const GramMatrix& g_xx, double epsilon, double rank_tol) {
  require(epsilon > 0.0, ErrorCode::invalid_argument, "SpectralBasis: epsilon must be positive");
  const Eigen::Index n = g_xx.size();
  require(n >= 1, ErrorCode::invalid_argument, "SpectralBasis: empty Gramian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g_xx.entries);
  require(solver.info() == Eigen::Success, ErrorCode::eigen_failure,
          "SpectralBasis: symmetric eigensolver did not converge on G_XX");
  u_ = solver.eigenvectors().rowwise().reverse();
  lambda_ = solver.eigenvalues().reverse().cwiseMax(0.0);
  shift_ = static_cast<double>(n) * epsilon;
  const double cutoff = rank_tol * lambda_[0];
  rank_ = 0;
  while (rank_ < n && lambda_[rank_] > cutoff) ++rank_;
  require(rank_ >= 1, ErrorCode::invalid_argument, "SpectralBasis: G_XX is numerically zero");
}

Eigen::MatrixXd SpectralBasis::project_snapshot(const GramMatrix& g_yy) const {
  require(g_yy.size() == size(), ErrorCode::dimension_mismatch,
          "project_snapshot: snapshot Gramian does not match G_XX");
  Eigen::MatrixXd a = g_yy.entries;
  a.diagonal().array() += shift_;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  require(llt.info() == Eigen::Success, ErrorCode::solve_failure,
          "regularized G_YY is not positive definite");
  // (G + cI)^-1 G = I - c (G + cI)^-1
  const auto basis = leading();
  return basis - shift_ * llt.solve(Eigen::MatrixXd(basis));
}

Eigen::MatrixXd SpectralBasis::apply_inverse(const Eigen::MatrixXd& x) const {
  const Eigen::VectorXd inv = (lambda_.array() + shift_).inverse();
  return u_ * (inv.asDiagonal() * (u_.transpose() * x));
}

Eigen::MatrixXd SpectralBasis::apply_gram(const Eigen::MatrixXd& x) const {
  return u_ * (lambda_.asDiagonal() * (u_.transpose() * x));
}

SpectralResult SpectralBasis::dominant_eigens(const Eigen::MatrixXd& projected, int k,
                                              const OperatorConfig& cfg) const {
  cfg.validate();
  const Eigen::Index n = size();
  const Eigen::Index r = rank_;
  require(projected.rows() == n && projected.cols() == r, ErrorCode::dimension_mismatch,
          "SpectralBasis::dominant_eigens: projected operator has the wrong shape");
  require(k >= 1 && k <= r, ErrorCode::invalid_argument,
          "SpectralBasis::dominant_eigens: k=" + std::to_string(k) +
              " exceeds the numerical rank " + std::to_string(r) + " of G_XX");

  const Eigen::VectorXd lam = lambda_.head(r);
  const Eigen::VectorXd d = (lam.array() / (lam.array() + shift_)).sqrt();
  Eigen::MatrixXd reduced = leading().transpose() * projected;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  const Eigen::MatrixXd sym = d.asDiagonal() * reduced * d.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  require(solver.info() == Eigen::Success, ErrorCode::eigen_failure,
          "SpectralBasis::dominant_eigens: eigensolver did not converge");

  SpectralResult out;
  out.eigenvalues.resize(k);
  out.eigenvectors.resize(n, k);
  out.eigenfunctions.resize(n, k);
  out.residuals.resize(k);
  const Eigen::VectorXd scale = (lam.array() * (lam.array() + shift_)).sqrt().inverse();
  for (int j = 0; j < k; ++j) {
    const Eigen::Index idx = r - 1 - j;  // ascending order from the solver
    const double rho2 = solver.eigenvalues()[idx];
    const Eigen::VectorXd coords = scale.cwiseProduct(solver.eigenvectors().col(idx));

    // M v = rho2 v, so v = (G_XX + cI)^-1 P G_XX v / rho2 with G_XX v = U_r diag(l) coords.
    Eigen::VectorXd v;
    if (rho2 > 1e-14) {
      v = apply_inverse(projected * lam.cwiseProduct(coords)) / rho2;
    } else {
      v = leading() * coords;
    }
    normalize(v);
    fix_sign(v);

    const Eigen::VectorXd mv =
        apply_inverse(projected * lam.cwiseProduct(leading().transpose() * v));
    out.eigenvalues[j] = rho2;
    out.eigenvectors.col(j) = v;
    out.residuals[j] = (mv - rho2 * v).norm();

    Eigen::VectorXd f = apply_gram(v);
    normalize(f);
    out.eigenfunctions.col(j) = f;
  }
  return out;
}

void ReducedOnlineOperator::absorb_projected(const Eigen::MatrixXd& projected) {
  require(projected.rows() == basis_->size() && projected.cols() == basis_->rank(),
          ErrorCode::dimension_mismatch, "ReducedOnlineOperator: projected shape mismatch");
  if (t_ == 0) {
    mean_ = projected;
  } else {
    const double t = static_cast<double>(t_);
    mean_ = (t * mean_ + projected) / (t + 1.0);
  }
  ++t_;
}

SpectralResult ReducedOnlineOperator::dominant_eigens(int k, const OperatorConfig& cfg) const {
  require(t_ >= 1, ErrorCode::empty_state, "ReducedOnlineOperator: no snapshots absorbed yet");
  return basis_->dominant_eigens(mean_, k, cfg);
}

}  // namespace cf
