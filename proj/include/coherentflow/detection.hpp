#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <vector>

#include "coherentflow/clustering.hpp"
#include "coherentflow/coherence.hpp"
#include "coherentflow/integrator.hpp"
#include "coherentflow/kernel_ops.hpp"

namespace cf {

/// offline: the single-lag operator between snapshot 0 and each snapshot.
/// online: the running time average over snapshots 1..t.
enum class DetectMode { offline, online };

struct DetectionConfig {
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  OperatorConfig op;
  int k_clusters = 3;
  int restarts = 20;
  std::uint64_t seed = 1;
  double rank_tol = 1e-12;

  void validate() const;
  int eigen_count() const { return std::max(op.n_eigen, k_clusters); }
};

struct StepDetection {
  std::size_t step = 0;
  double t = 0.0;
  Labeling labels;
  Eigen::VectorXd eigenvalues;
};

struct DetectionRun {
  DetectMode mode = DetectMode::online;
  std::vector<StepDetection> steps;
  SpectralResult final_spectral;
};

/// Clusters every snapshot index >= 1 for each requested mode, sharing one
/// Gramian factorization per snapshot across modes. The k-means seed is the
/// same at every step.
std::vector<DetectionRun> detect_runs(const Ensemble& ensemble, const DetectionConfig& cfg,
                                      const std::vector<DetectMode>& modes);

/// Time-averaged spectrum over all snapshots, without per-step clustering.
SpectralResult online_spectrum(const Ensemble& ensemble, const DetectionConfig& cfg);

const char* to_string(DetectMode mode);

}  // namespace cf
