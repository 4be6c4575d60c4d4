#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "coherentflow/clustering.hpp"
#include "coherentflow/flow_models.hpp"

namespace cf {

/// Rasterized coherent set. Cells are row-major with row 0 at the lower edge.
struct RegionMask {
  Domain domain;
  int rows = 0;
  int cols = 0;
  double cell_size = 0.0;  ///< requested size; actual cell extents are below
  double cell_w = 0.0;
  double cell_h = 0.0;
  int cluster_id = 0;
  std::vector<unsigned char> grid;

  bool at(int r, int c) const;
  Vec2 cell_center(int r, int c) const;
  std::size_t count() const;
  /// True cell with a false or out-of-grid 4-neighbour.
  bool is_boundary(int r, int c) const;
  bool contains(const Vec2& p) const;
};

enum class LegMode { thrust, drift };
const char* to_string(LegMode mode);

struct Leg {
  Vec2 target = Vec2::Zero();
  LegMode mode = LegMode::thrust;
};

struct MissionPlan {
  std::vector<Leg> legs;
  /// Drift legs longer than this switch to thrust toward their endpoint (<= 0: never).
  double drift_timeout = 0.0;
};

struct VehicleParams {
  double u_max = 0.2;
  double omega_max = 1.0;
  double goal_radius = 0.1;
  double waypoint_radius = 0.25;

  void validate() const;
};

struct TrajectorySample {
  double t = 0.0;
  Vec2 pos = Vec2::Zero();
  double heading = 0.0;
  double thrust = 0.0;
  int leg = 0;
};

struct MissionResult {
  std::vector<TrajectorySample> trajectory;
  bool reached = false;
  double energy = 0.0;
  double duration = 0.0;
  std::vector<double> leg_energy;
  std::vector<double> leg_duration;
  double drift_time = 0.0;
  /// A drift leg timed out and the vehicle thrusted to its endpoint instead.
  bool recovery = false;
};

/// Cells whose seeds are mostly `cluster_id`, reduced to the largest
/// 4-connected component. `seed_positions` is n x 2.
RegionMask extract_region(const Labeling& labels, const Eigen::MatrixXd& seed_positions,
                          int cluster_id, const Domain& domain, double cell_size);

/// Three-leg plan start->entry (thrust), entry->exit (drift), exit->goal
/// (thrust). Legs shorter than `waypoint_radius` collapse; the last leg
/// always targets the goal.
MissionPlan plan_waypoints(const RegionMask& region, const Vec2& start, const Vec2& goal,
                           double waypoint_radius);

/// Boundary length of the region over the mean flow speed on its boundary
/// cells at time t.
double estimate_revolution_period(const RegionMask& region, const FlowField& field, double t);

MissionResult simulate_mission(const FlowField& field, const MissionPlan& plan, const Vec2& start,
                               const VehicleParams& vp, double dt, double t_max, double t0 = 0.0);

/// Always thrusts straight at the goal.
MissionResult naive_controller(const FlowField& field, const Vec2& start, const Vec2& goal,
                               const VehicleParams& vp, double dt, double t_max, double t0 = 0.0);

void write_mission_csv(const MissionResult& mission, const std::filesystem::path& path);
std::string mission_json(const MissionResult& mission, const MissionPlan& plan);
/// 8-bit PGM, one byte per cell, top row = upper edge of the domain.
/// Region cells are 96; cells visited by the i-th mission are 255 - 64 i.
void write_region_pgm(const RegionMask& region, const std::vector<const MissionResult*>& missions,
                      const std::filesystem::path& path);

}  // namespace cf
