#include "coherentflow/detection.hpp"

#include <algorithm>
#include <string>

#include "coherentflow/error.hpp"

namespace cf {

const char* to_string(DetectMode mode) {
  return mode == DetectMode::offline ? "offline" : "online";
}

void DetectionConfig::validate() const {
  kernel.validate();
  op.validate();
  require(k_clusters >= 1, ErrorCode::invalid_argument, "k_clusters must be >= 1");
  require(restarts >= 1, ErrorCode::invalid_argument, "restarts must be >= 1");
  require(rank_tol > 0.0 && rank_tol < 1.0, ErrorCode::invalid_argument,
          "rank_tol must be in (0, 1)");
}

std::vector<DetectionRun> detect_runs(const Ensemble& ensemble, const DetectionConfig& cfg,
                                      const std::vector<DetectMode>& modes) {
  cfg.validate();
  require(ensemble.steps() >= 2, ErrorCode::invalid_argument,
          "detect: ensemble needs at least two snapshots");
  require(ensemble.particles() >= static_cast<std::size_t>(cfg.k_clusters),
          ErrorCode::invalid_argument, "detect: fewer particles than clusters");

  const SpectralBasis basis(gram(cfg.kernel, ensemble.snapshot(0)), cfg.op.epsilon, cfg.rank_tol);
  ReducedOnlineOperator online(basis);

  std::vector<DetectionRun> runs(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) runs[m].mode = modes[m];

  const int n_eigen = cfg.eigen_count();
  for (std::size_t step = 1; step < ensemble.steps(); ++step) {
    try {
      const Eigen::MatrixXd projected =
          basis.project_snapshot(gram(cfg.kernel, ensemble.snapshot(step)));
      online.absorb_projected(projected);
      for (auto& run : runs) {
        SpectralResult spectral = run.mode == DetectMode::online
                                      ? online.dominant_eigens(n_eigen, cfg.op)
                                      : basis.dominant_eigens(projected, n_eigen, cfg.op);
        StepDetection det;
        det.step = step;
        det.t = ensemble.time(step);
        det.labels = detect_coherent_sets(spectral, cfg.k_clusters, cfg.seed, cfg.restarts);
        det.eigenvalues = spectral.eigenvalues;
        run.steps.push_back(std::move(det));
        if (step + 1 == ensemble.steps()) run.final_spectral = std::move(spectral);
      }
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(step) + ": " + e.what());
    }
  }
  return runs;
}

SpectralResult online_spectrum(const Ensemble& ensemble, const DetectionConfig& cfg) {
  cfg.validate();
  require(ensemble.steps() >= 2, ErrorCode::invalid_argument,
          "detect: ensemble needs at least two snapshots");
  const SpectralBasis basis(gram(cfg.kernel, ensemble.snapshot(0)), cfg.op.epsilon, cfg.rank_tol);
  ReducedOnlineOperator online(basis);
  for (std::size_t step = 1; step < ensemble.steps(); ++step)
    online.absorb(gram(cfg.kernel, ensemble.snapshot(step)));
  return online.dominant_eigens(cfg.eigen_count(), cfg.op);
}

}  // namespace cf
