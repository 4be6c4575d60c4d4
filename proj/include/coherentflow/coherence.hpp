#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "coherentflow/clustering.hpp"
#include "coherentflow/kernel_ops.hpp"

namespace cf {

/// Regularization and eigen-extraction settings. The regularized Gramians
/// are G + n*epsilon*I.
struct OperatorConfig {
  double epsilon = 1e-2;
  int n_eigen = 3;
  double imag_tol = 1e-6;

  void validate() const;
};

/// Running time average of the normalized snapshot operators
/// (G_YY + n eps I)^-1 G_YY, anchored at the initial Gramian.
struct OperatorState {
  GramMatrix g_xx;
  Eigen::MatrixXd running_mean;  // zero until the first update
  std::size_t t = 0;
  double epsilon = 1e-2;

  static OperatorState start(GramMatrix g_xx, const OperatorConfig& cfg);
};

/// Dominant eigenpairs, descending. `eigenvectors` holds the coordinate
/// vectors v (unit columns, largest-magnitude entry positive);
/// `eigenfunctions` holds the eigenfunctions sampled at the data points,
/// G_XX v normalized the same way, when the Gramian is known, and a copy of
/// the eigenvectors otherwise. Rows are particles.
struct SpectralResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::MatrixXd eigenfunctions;
  Eigen::VectorXd residuals;

  Eigen::Index count() const { return eigenvalues.size(); }
};

/// (G_XX + n eps I)^-1 (G_YY + n eps I)^-1 G_YY G_XX via Cholesky solves.
Eigen::MatrixXd surrogate_matrix(const GramMatrix& g_xx, const GramMatrix& g_yy,
                                 const OperatorConfig& cfg);

/// (G + n eps I)^-1 G via a Cholesky solve; `name` labels solve failures.
Eigen::MatrixXd normalized_gramian(const GramMatrix& g, double epsilon, const char* name);

/// Absorbs one more snapshot into the running mean and returns the new state.
OperatorState online_update(const OperatorState& state, const GramMatrix& g_yy_t,
                            const OperatorConfig& cfg);

/// (G_XX + n eps I)^-1 * running_mean * G_XX.
Eigen::MatrixXd assemble_online_operator(const OperatorState& state);

/// Top-k eigenpairs of a general real matrix by real part, using a dense
/// nonsymmetric eigensolver. Retained pairs must be real within
/// imag_tol * max|eigenvalue|.
SpectralResult dominant_eigens(const Eigen::MatrixXd& m, int k, const OperatorConfig& cfg);

/// Replaces the eigenfunction samples with G_XX v, normalized and sign-aligned
/// with v.
void attach_eigenfunctions(SpectralResult& spectral, const GramMatrix& g_xx);

/// k-means on the first k_clusters eigenfunction columns.
Labeling detect_coherent_sets(const SpectralResult& spectral, int k_clusters,
                              std::uint64_t seed, int restarts = 20);

/// Eigenbasis of the initial Gramian, used to solve the surrogate problem at
/// the cost of one Cholesky factorization per snapshot.
///
/// With G_XX = U diag(l) U^T and P = running mean of normalized snapshot
/// operators, the surrogate operator M = (G_XX + cI)^-1 P G_XX satisfies
/// U^T M U = diag(1/(l+c)) (U^T P U) diag(l). Columns with l below
/// rank_tol * l_max are below working precision and are dropped; the
/// remaining r x r block is similar to the symmetric matrix
/// D (U_r^T P U_r) D with D = diag(sqrt(l/(l+c))), whose eigenvectors map
/// back to eigenvectors of M exactly.
class SpectralBasis {
 public:
  SpectralBasis(const GramMatrix& g_xx, double epsilon, double rank_tol = 1e-12);

  Eigen::Index size() const { return u_.rows(); }
  Eigen::Index rank() const { return rank_; }
  double shift() const { return shift_; }
  const Eigen::VectorXd& gram_eigenvalues() const { return lambda_; }

  /// Leading r eigenvectors of G_XX (n x r).
  auto leading() const { return u_.leftCols(rank_); }

  /// (G_YY + cI)^-1 G_YY U_r, the normalized snapshot operator applied to
  /// the retained basis (n x r).
  Eigen::MatrixXd project_snapshot(const GramMatrix& g_yy) const;

  /// Top-k eigenpairs of the surrogate operator whose averaged normalized
  /// snapshot operator, applied to U_r, is `projected` (n x r).
  SpectralResult dominant_eigens(const Eigen::MatrixXd& projected, int k,
                                 const OperatorConfig& cfg) const;

  /// (G_XX + cI)^-1 x.
  Eigen::MatrixXd apply_inverse(const Eigen::MatrixXd& x) const;
  /// G_XX x.
  Eigen::MatrixXd apply_gram(const Eigen::MatrixXd& x) const;

 private:
  Eigen::MatrixXd u_;       // all eigenvectors, descending eigenvalue order
  Eigen::VectorXd lambda_;  // descending, clamped at zero
  Eigen::Index rank_ = 0;
  double shift_ = 0.0;
};

/// Online averaging of projected snapshot operators against a fixed basis.
class ReducedOnlineOperator {
 public:
  explicit ReducedOnlineOperator(const SpectralBasis& basis) : basis_(&basis) {}

  void absorb_projected(const Eigen::MatrixXd& projected);
  void absorb(const GramMatrix& g_yy) { absorb_projected(basis_->project_snapshot(g_yy)); }

  std::size_t count() const { return t_; }
  const Eigen::MatrixXd& mean() const { return mean_; }
  SpectralResult dominant_eigens(int k, const OperatorConfig& cfg) const;

 private:
  const SpectralBasis* basis_;
  Eigen::MatrixXd mean_;
  std::size_t t_ = 0;
};

}  // namespace cf
