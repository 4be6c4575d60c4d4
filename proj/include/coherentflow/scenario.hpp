#pragma once

#include "coherentflow/detection.hpp"
#include "coherentflow/planner.hpp"

namespace cf {

/// Gaussian sigma 1.25, k = 3.
DetectionConfig plan_detect_defaults();

/// Single-gyre tank mission: detect coherent sets from tracers, rasterize
/// the core set, plan, and fly both the planned and the naive vehicle.
struct PlanScenario {
  Domain tank = Domain::box2(0.0, 4.5, 0.0, 3.0);
  /// Stream-function amplitude; the default puts the peak speed at 1.5 * u_max.
  double amp = 0.9 / 3.141592653589793;
  bool still_water = false;
  VehicleParams vehicle;
  int tracer_nx = 54;
  int tracer_ny = 36;
  double tracer_t_end = 75.0;
  double tracer_dt_out = 0.5;
  DetectionConfig detect = plan_detect_defaults();
  /// Cluster to navigate by; -1 picks the one whose seed centroid is nearest
  /// the tank centre.
  int core_cluster = -1;
  double cell_size = 0.0;  ///< <= 0: tank diagonal / 60
  Vec2 start = Vec2(4.0, 0.4);
  Vec2 goal = Vec2(4.0, 2.6);
  double dt = 0.05;
  double t_max = 300.0;
  double drift_timeout_factor = 3.0;

  void validate() const;
  FlowField field() const;
};

struct PlanOutcome {
  Labeling labels;  ///< online labeling of the tracer seeds
  int core_cluster = 0;
  RegionMask region;
  MissionPlan plan;
  double revolution_period = 0.0;
  MissionResult aware;
  MissionResult naive;
};

PlanOutcome run_plan_scenario(const PlanScenario& scenario);

}  // namespace cf
