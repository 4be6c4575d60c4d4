#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coherentflow/clustering.hpp"
#include "coherentflow/coherence.hpp"
#include "coherentflow/integrator.hpp"
#include "coherentflow/kernel_ops.hpp"

namespace cf {

struct StepScore {
  double t = 0.0;
  double rand_adjusted = 0.0;
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v_measure = 0.0;
};

struct ScoreReport {
  std::string method;
  std::string environment;
  std::vector<StepScore> per_step;
  StepScore averaged;  // t holds the number of scored steps
};

struct HomogeneityCompleteness {
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v_measure = 0.0;
};

/// Pair-counting adjusted Rand index. Labels are compared as partitions; the
/// two labelings may use different k.
double adjusted_rand(const Labeling& a, const Labeling& b);

/// Entropy-based scores with natural logs. H(true)=0 gives h=1, H(pred)=0
/// gives c=1, and h+c=0 gives v=0.
HomogeneityCompleteness homogeneity_completeness_v(const Labeling& truth, const Labeling& pred);

/// Consensus labeling from the single-lag operator between snapshot 0 and
/// `tau_index`: `runs` k-means runs with distinct seeds, aligned and voted.
Labeling ground_truth(const Ensemble& ensemble, const KernelSpec& kernel,
                      const OperatorConfig& cfg, int k, std::size_t tau_index, int runs,
                      std::uint64_t seed, int restarts = 20);

/// Scores every step against the truth and averages.
ScoreReport evaluate_run(const std::vector<std::pair<double, Labeling>>& per_step_labels,
                         const Labeling& truth);

}  // namespace cf
