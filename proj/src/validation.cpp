#include "coherentflow/validation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coherentflow/error.hpp"

namespace cf {
namespace {

struct Contingency {
  std::vector<std::int64_t> cells;  // rows x cols, row-major
  std::vector<std::int64_t> row_sums;
  std::vector<std::int64_t> col_sums;
  int rows = 0;
  int cols = 0;
  std::int64_t n = 0;

  std::int64_t at(int r, int c) const { return cells[static_cast<std::size_t>(r * cols + c)]; }
};

int label_span(const std::vector<int>& labels) {
  int top = -1;
  for (int l : labels) {
    require(l >= 0, ErrorCode::invalid_argument, "labels must be non-negative");
    top = std::max(top, l);
  }
  return top + 1;
}

Contingency contingency(const std::vector<int>& a, const std::vector<int>& b) {
  require(a.size() == b.size(), ErrorCode::dimension_mismatch,
          "labelings have different sizes: " + std::to_string(a.size()) + " vs " +
              std::to_string(b.size()));
  Contingency c;
  c.rows = label_span(a);
  c.cols = label_span(b);
  c.n = static_cast<std::int64_t>(a.size());
  c.cells.assign(static_cast<std::size_t>(c.rows * c.cols), 0);
  c.row_sums.assign(static_cast<std::size_t>(c.rows), 0);
  c.col_sums.assign(static_cast<std::size_t>(c.cols), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++c.cells[static_cast<std::size_t>(a[i] * c.cols + b[i])];
    ++c.row_sums[static_cast<std::size_t>(a[i])];
    ++c.col_sums[static_cast<std::size_t>(b[i])];
  }
  return c;
}

std::int64_t pairs(std::int64_t m) { return m * (m - 1) / 2; }

double entropy(const std::vector<std::int64_t>& counts, std::int64_t n) {
  double h = 0.0;
  for (auto c : counts)
    if (c > 0) {
      const double p = static_cast<double>(c) / static_cast<double>(n);
      h -= p * std::log(p);
    }
  return h;
}

// H(X | Y) with X the labels of `x`.
double conditional_entropy(const std::vector<int>& x, const std::vector<int>& y) {
  const Contingency c = contingency(x, y);
  double h = 0.0;
  for (int j = 0; j < c.cols; ++j) {
    const auto col = c.col_sums[static_cast<std::size_t>(j)];
    for (int i = 0; i < c.rows; ++i) {
      const auto nij = c.at(i, j);
      if (nij == 0) continue;
      h -= static_cast<double>(nij) / static_cast<double>(c.n) *
           std::log(static_cast<double>(nij) / static_cast<double>(col));
    }
  }
  return h;
}

double label_entropy(const std::vector<int>& x) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(label_span(x)), 0);
  for (int l : x) ++counts[static_cast<std::size_t>(l)];
  return entropy(counts, static_cast<std::int64_t>(x.size()));
}

double homogeneity(const std::vector<int>& truth, const std::vector<int>& pred) {
  const double h_truth = label_entropy(truth);
  if (h_truth == 0.0) return 1.0;
  return 1.0 - conditional_entropy(truth, pred) / h_truth;
}

}  // namespace

double adjusted_rand(const Labeling& a, const Labeling& b) {
  const Contingency c = contingency(a.labels, b.labels);
  if (c.n < 2) return 1.0;
  std::int64_t index = 0;
  for (auto v : c.cells) index += pairs(v);
  std::int64_t sum_a = 0;
  for (auto v : c.row_sums) sum_a += pairs(v);
  std::int64_t sum_b = 0;
  for (auto v : c.col_sums) sum_b += pairs(v);

  const double total = static_cast<double>(pairs(c.n));
  const double expected = static_cast<double>(sum_a) * static_cast<double>(sum_b) / total;
  const double maximum = 0.5 * static_cast<double>(sum_a + sum_b);
  if (maximum == expected) return 1.0;
  return (static_cast<double>(index) - expected) / (maximum - expected);
}

HomogeneityCompleteness homogeneity_completeness_v(const Labeling& truth, const Labeling& pred) {
  require(truth.size() == pred.size(), ErrorCode::dimension_mismatch,
          "homogeneity_completeness_v: labelings have different sizes");
  HomogeneityCompleteness out;
  out.homogeneity = homogeneity(truth.labels, pred.labels);
  out.completeness = homogeneity(pred.labels, truth.labels);
  const double sum = out.homogeneity + out.completeness;
  out.v_measure = sum == 0.0 ? 0.0 : 2.0 * (out.homogeneity * out.completeness) / sum;
  return out;
}

ScoreReport evaluate_run(const std::vector<std::pair<double, Labeling>>& per_step_labels,
                         const Labeling& truth) {
  require(!per_step_labels.empty(), ErrorCode::invalid_argument, "evaluate_run: no steps to score");
  ScoreReport report;
  for (const auto& [t, labels] : per_step_labels) {
    require(labels.size() == truth.size(), ErrorCode::dimension_mismatch,
            "evaluate_run: step at t=" + std::to_string(t) + " has the wrong particle count");
    StepScore s;
    s.t = t;
    s.rand_adjusted = adjusted_rand(truth, labels);
    const auto hcv = homogeneity_completeness_v(truth, labels);
    s.homogeneity = hcv.homogeneity;
    s.completeness = hcv.completeness;
    s.v_measure = hcv.v_measure;
    report.per_step.push_back(s);
  }
  const auto count = static_cast<double>(report.per_step.size());
  if (count > 0) {
    for (const auto& s : report.per_step) {
      report.averaged.rand_adjusted += s.rand_adjusted;
      report.averaged.homogeneity += s.homogeneity;
      report.averaged.completeness += s.completeness;
      report.averaged.v_measure += s.v_measure;
    }
    report.averaged.rand_adjusted /= count;
    report.averaged.homogeneity /= count;
    report.averaged.completeness /= count;
    report.averaged.v_measure /= count;
  }
  report.averaged.t = count;
  return report;
}

Labeling ground_truth(const Ensemble& ensemble, const KernelSpec& kernel,
                      const OperatorConfig& cfg, int k, std::size_t tau_index, int runs,
                      std::uint64_t seed, int restarts) {
  cfg.validate();
  require(tau_index < ensemble.steps(), ErrorCode::invalid_argument,
          "ground_truth: tau index " + std::to_string(tau_index) + " out of range");
  require(runs >= 1, ErrorCode::invalid_argument, "ground_truth: runs must be >= 1");

  const SpectralBasis basis(gram(kernel, ensemble.snapshot(0)), cfg.epsilon);
  const auto projected = basis.project_snapshot(gram(kernel, ensemble.snapshot(tau_index)));
  const SpectralResult spectral = basis.dominant_eigens(projected, k, cfg);

  std::vector<Labeling> labelings;
  labelings.reserve(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r)
    labelings.push_back(
        detect_coherent_sets(spectral, k, seed + static_cast<std::uint64_t>(r), restarts));
  return consensus(labelings);
}

}  // namespace cf
