#include "coherentflow/scenario.hpp"

#include <cmath>
#include <limits>

#include "coherentflow/error.hpp"
#include "coherentflow/integrator.hpp"

namespace cf {

DetectionConfig plan_detect_defaults() {
  DetectionConfig cfg;
  cfg.kernel = KernelSpec::gaussian(1.25);
  cfg.k_clusters = 3;
  cfg.op.n_eigen = 3;
  return cfg;
}

void PlanScenario::validate() const {
  require(tank.dim() == 2 && tank.valid(), ErrorCode::invalid_argument, "plan: invalid tank");
  require(amp >= 0.0, ErrorCode::invalid_argument, "plan: amp must be >= 0");
  vehicle.validate();
  require(tracer_nx >= 2 && tracer_ny >= 2, ErrorCode::invalid_argument,
          "plan: tracer grid needs at least 2 x 2 seeds");
  require(tracer_dt_out > 0.0 && tracer_t_end > 0.0, ErrorCode::invalid_argument,
          "plan: tracer window must be positive");
  detect.validate();
  require(dt > 0.0 && t_max > 0.0, ErrorCode::invalid_argument, "plan: dt and t_max must be positive");
  require(drift_timeout_factor > 0.0, ErrorCode::invalid_argument,
          "plan: drift_timeout_factor must be positive");
  require(tank.contains(start) && tank.contains(goal), ErrorCode::invalid_argument,
          "plan: start and goal must lie inside the tank");
}

FlowField PlanScenario::field() const {
  if (still_water) return FlowField::zero();
  return FlowField(SingleGyreParams{amp, tank});
}

PlanOutcome run_plan_scenario(const PlanScenario& sc) {
  sc.validate();
  const FlowField field = sc.field();
  const Ensemble tracers =
      integrate_ensemble(field, seed_grid(sc.tank, {sc.tracer_nx, sc.tracer_ny}), 0.0,
                         sc.tracer_t_end, sc.tracer_dt_out, IntegratorConfig{});
  const Eigen::MatrixXd seeds = tracers.snapshot(0);

  PlanOutcome out;
  const SpectralResult spectral = online_spectrum(tracers, sc.detect);
  out.labels = detect_coherent_sets(spectral, sc.detect.k_clusters, sc.detect.seed, sc.detect.restarts);

  if (sc.core_cluster >= 0) {
    require(sc.core_cluster < out.labels.k, ErrorCode::invalid_argument,
            "plan: core_cluster out of range");
    out.core_cluster = sc.core_cluster;
  } else {
    const Vec2 centre = 0.5 * (sc.tank.lower + sc.tank.upper).head<2>();
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < out.labels.k; ++c) {
      Vec2 sum = Vec2::Zero();
      int n = 0;
      for (std::size_t i = 0; i < out.labels.size(); ++i)
        if (out.labels.labels[i] == c) {
          sum += seeds.row(static_cast<Eigen::Index>(i)).transpose();
          ++n;
        }
      if (n == 0) continue;
      const double d = (sum / n - centre).norm();
      if (d < best) {
        best = d;
        out.core_cluster = c;
      }
    }
  }

  const double diag = (sc.tank.upper - sc.tank.lower).norm();
  const double cell = sc.cell_size > 0.0 ? sc.cell_size : diag / 60.0;
  out.region = extract_region(out.labels, seeds, out.core_cluster, sc.tank, cell);
  out.plan = plan_waypoints(out.region, sc.start, sc.goal, sc.vehicle.waypoint_radius);
  out.revolution_period = estimate_revolution_period(out.region, field, 0.0);
  // Without a finite revolution estimate a drift leg can never be expected
  // to finish, so it turns into thrust at once.
  out.plan.drift_timeout = std::isfinite(out.revolution_period)
                               ? sc.drift_timeout_factor * out.revolution_period
                               : sc.dt;

  out.aware = simulate_mission(field, out.plan, sc.start, sc.vehicle, sc.dt, sc.t_max);
  out.naive = naive_controller(field, sc.start, sc.goal, sc.vehicle, sc.dt, sc.t_max);
  return out;
}

}  // namespace cf
