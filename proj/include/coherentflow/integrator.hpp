#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "coherentflow/flow_models.hpp"

namespace cf {

enum class IntegratorMethod { rk4_fixed, rk45_adaptive };

/// For rk4_fixed, `max_step` is the substep length. For rk45_adaptive it caps
/// the Dormand-Prince step; a non-positive value means "no cap".
struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::rk45_adaptive;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.0;
};

/// Particle positions at uniformly spaced snapshots, stored particle-major:
/// positions[(p * steps + s) * dim + axis].
class Ensemble {
 public:
  Ensemble() = default;
  Ensemble(std::size_t particles, std::size_t steps, std::size_t dim, double t0,
           double dt_out);

  std::size_t particles() const { return particles_; }
  std::size_t steps() const { return steps_; }
  std::size_t dim() const { return dim_; }
  double t0() const { return t0_; }
  double dt_out() const { return dt_out_; }
  double time(std::size_t step) const { return t0_ + dt_out_ * static_cast<double>(step); }

  double& at(std::size_t particle, std::size_t step, std::size_t axis) {
    return positions_[(particle * steps_ + step) * dim_ + axis];
  }
  double at(std::size_t particle, std::size_t step, std::size_t axis) const {
    return positions_[(particle * steps_ + step) * dim_ + axis];
  }

  /// Positions of every particle at one snapshot, particles x dim.
  Eigen::MatrixXd snapshot(std::size_t step) const;

  const std::vector<double>& raw() const { return positions_; }
  std::vector<double>& raw() { return positions_; }

  /// External identifiers (agent ids for ingested data); 0..n-1 by default.
  const std::vector<std::int64_t>& ids() const { return ids_; }
  void set_ids(std::vector<std::int64_t> ids);

  const std::optional<Domain>& domain() const { return domain_; }
  void set_domain(std::optional<Domain> domain) { domain_ = std::move(domain); }

  bool operator==(const Ensemble& other) const;

 private:
  std::size_t particles_ = 0;
  std::size_t steps_ = 0;
  std::size_t dim_ = 0;
  double t0_ = 0.0;
  double dt_out_ = 1.0;
  std::vector<double> positions_;
  std::vector<std::int64_t> ids_;
  std::optional<Domain> domain_;
};

/// Position after flowing for `dt` > 0 starting at time t.
Vec2 advance(const FlowField& field, const Vec2& pos, double t, double dt,
             const IntegratorConfig& cfg);

/// Maps wrapped coordinates into [lower, upper); other axes are untouched.
Eigen::VectorXd wrap(const Eigen::VectorXd& pos, const Domain& domain);
Vec2 wrap(const Vec2& pos, const Domain& domain);

/// Advects every seed from t0 to t_end, recording a snapshot every dt_out.
/// Wrapping is applied at snapshots only. Particles run in parallel; the
/// result does not depend on the worker count.
Ensemble integrate_ensemble(const FlowField& field, const std::vector<Vec2>& seeds, double t0,
                            double t_end, double dt_out, const IntegratorConfig& cfg,
                            const std::optional<Domain>& domain = std::nullopt);

/// Snapshot count for a window, validating that dt_out divides it.
std::size_t snapshot_count(double t0, double t_end, double dt_out);

}  // namespace cf
