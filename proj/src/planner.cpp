#include "coherentflow/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>

#include "coherentflow/error.hpp"
#include "coherentflow/text.hpp"
#include "json.hpp"

namespace cf {
namespace {

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

// Dynamics with controls held fixed over one step.
struct State {
  Vec2 pos;
  double heading;
};

State rk4_step(const FlowField& field, const State& s, double t, double dt, double u, double omega) {
  auto deriv = [&](const State& x, double tt) {
    const Vec2 flow = field.velocity(x.pos, tt);
    return State{Vec2(u * std::cos(x.heading) + flow.x(), u * std::sin(x.heading) + flow.y()), omega};
  };
  auto add = [](const State& a, const State& d, double h) {
    return State{a.pos + h * d.pos, a.heading + h * d.heading};
  };
  const State k1 = deriv(s, t);
  const State k2 = deriv(add(s, k1, dt / 2), t + dt / 2);
  const State k3 = deriv(add(s, k2, dt / 2), t + dt / 2);
  const State k4 = deriv(add(s, k3, dt), t + dt);
  return State{s.pos + dt / 6 * (k1.pos + 2 * k2.pos + 2 * k3.pos + k4.pos),
               s.heading + dt / 6 * (k1.heading + 2 * k2.heading + 2 * k3.heading + k4.heading)};
}

}  // namespace

const char* to_string(LegMode mode) { return mode == LegMode::thrust ? "THRUST" : "DRIFT"; }

bool RegionMask::at(int r, int c) const {
  if (r < 0 || c < 0 || r >= rows || c >= cols) return false;
  return grid[static_cast<std::size_t>(r) * cols + c] != 0;
}

Vec2 RegionMask::cell_center(int r, int c) const {
  return {domain.lower[0] + (c + 0.5) * cell_w, domain.lower[1] + (r + 0.5) * cell_h};
}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(std::count(grid.begin(), grid.end(), 1));
}

bool RegionMask::is_boundary(int r, int c) const {
  if (!at(r, c)) return false;
  return !at(r - 1, c) || !at(r + 1, c) || !at(r, c - 1) || !at(r, c + 1);
}

bool RegionMask::contains(const Vec2& p) const {
  const int c = static_cast<int>(std::floor((p.x() - domain.lower[0]) / cell_w));
  const int r = static_cast<int>(std::floor((p.y() - domain.lower[1]) / cell_h));
  return at(r, c);
}

void VehicleParams::validate() const {
  require(u_max > 0.0 && omega_max > 0.0 && goal_radius > 0.0 && waypoint_radius > 0.0,
          ErrorCode::invalid_argument, "vehicle parameters must be positive");
}

RegionMask extract_region(const Labeling& labels, const Eigen::MatrixXd& seed_positions,
                          int cluster_id, const Domain& domain, double cell_size) {
  require(domain.dim() == 2 && domain.valid(), ErrorCode::invalid_argument,
          "extract_region: need a valid 2-D domain");
  require(cell_size > 0.0, ErrorCode::invalid_argument, "extract_region: cell_size must be positive");
  require(seed_positions.cols() == 2 &&
              static_cast<std::size_t>(seed_positions.rows()) == labels.size(),
          ErrorCode::dimension_mismatch, "extract_region: positions do not match labels");
  require(std::find(labels.labels.begin(), labels.labels.end(), cluster_id) != labels.labels.end(),
          ErrorCode::empty_result,
          "extract_region: cluster " + std::to_string(cluster_id) + " has no members");

  RegionMask mask;
  mask.domain = domain;
  mask.cluster_id = cluster_id;
  mask.cell_size = cell_size;
  const double lx = domain.upper[0] - domain.lower[0];
  const double ly = domain.upper[1] - domain.lower[1];
  mask.cols = std::max(1, static_cast<int>(std::lround(lx / cell_size)));
  mask.rows = std::max(1, static_cast<int>(std::lround(ly / cell_size)));
  mask.cell_w = lx / mask.cols;
  mask.cell_h = ly / mask.rows;
  const std::size_t cells = static_cast<std::size_t>(mask.rows) * mask.cols;

  std::vector<int> total(cells, 0), hits(cells, 0);
  for (Eigen::Index i = 0; i < seed_positions.rows(); ++i) {
    const int c = std::clamp(
        static_cast<int>(std::floor((seed_positions(i, 0) - domain.lower[0]) / mask.cell_w)), 0,
        mask.cols - 1);
    const int r = std::clamp(
        static_cast<int>(std::floor((seed_positions(i, 1) - domain.lower[1]) / mask.cell_h)), 0,
        mask.rows - 1);
    const std::size_t idx = static_cast<std::size_t>(r) * mask.cols + c;
    ++total[idx];
    if (labels.labels[static_cast<std::size_t>(i)] == cluster_id) ++hits[idx];
  }
  std::vector<unsigned char> raw(cells, 0);
  for (std::size_t i = 0; i < cells; ++i) raw[i] = total[i] > 0 && 2 * hits[i] > total[i];

  // Largest 4-connected component; ties go to the component found first.
  std::vector<int> comp(cells, -1);
  int best = -1;
  std::size_t best_size = 0;
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < cells; ++s) {
    if (!raw[s] || comp[s] >= 0) continue;
    std::size_t size = 0;
    stack.assign(1, s);
    comp[s] = next;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      ++size;
      const int r = static_cast<int>(cur) / mask.cols;
      const int c = static_cast<int>(cur) % mask.cols;
      const int nr[4] = {r - 1, r + 1, r, r};
      const int nc[4] = {c, c, c - 1, c + 1};
      for (int k = 0; k < 4; ++k) {
        if (nr[k] < 0 || nc[k] < 0 || nr[k] >= mask.rows || nc[k] >= mask.cols) continue;
        const std::size_t nb = static_cast<std::size_t>(nr[k]) * mask.cols + nc[k];
        if (raw[nb] && comp[nb] < 0) {
          comp[nb] = next;
          stack.push_back(nb);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best = next;
    }
    ++next;
  }
  require(best >= 0, ErrorCode::empty_result,
          "extract_region: cluster " + std::to_string(cluster_id) + " holds no cell majority");
  mask.grid.assign(cells, 0);
  for (std::size_t i = 0; i < cells; ++i) mask.grid[i] = comp[i] == best;
  return mask;
}

MissionPlan plan_waypoints(const RegionMask& region, const Vec2& start, const Vec2& goal,
                           double waypoint_radius) {
  require(region.count() > 0, ErrorCode::empty_result, "plan_waypoints: region is empty");
  require(waypoint_radius > 0.0, ErrorCode::invalid_argument,
          "plan_waypoints: waypoint_radius must be positive");
  MissionPlan plan;
  if ((goal - start).norm() <= waypoint_radius) {
    plan.legs.push_back({goal, LegMode::thrust});
    return plan;
  }

  auto nearest_boundary = [&](const Vec2& p) {
    Vec2 best = Vec2::Zero();
    double best_d = std::numeric_limits<double>::infinity();
    for (int r = 0; r < region.rows; ++r)
      for (int c = 0; c < region.cols; ++c) {
        if (!region.is_boundary(r, c)) continue;
        const Vec2 centre = region.cell_center(r, c);
        const double d = (centre - p).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = centre;
        }
      }
    return best;
  };
  const Vec2 entry = nearest_boundary(start);
  const Vec2 exit = nearest_boundary(goal);

  if ((exit - entry).norm() <= waypoint_radius) {
    // No useful drift; go straight.
    plan.legs.push_back({goal, LegMode::thrust});
    return plan;
  }
  if ((entry - start).norm() > waypoint_radius) plan.legs.push_back({entry, LegMode::thrust});
  if ((goal - exit).norm() > waypoint_radius) {
    plan.legs.push_back({exit, LegMode::drift});
    plan.legs.push_back({goal, LegMode::thrust});
  } else {
    plan.legs.push_back({goal, LegMode::drift});
  }
  return plan;
}

double estimate_revolution_period(const RegionMask& region, const FlowField& field, double t) {
  double perimeter = 0.0;
  double speed = 0.0;
  int n = 0;
  for (int r = 0; r < region.rows; ++r)
    for (int c = 0; c < region.cols; ++c) {
      if (!region.is_boundary(r, c)) continue;
      perimeter += 0.5 * (region.cell_w + region.cell_h);
      speed += field.velocity(region.cell_center(r, c), t).norm();
      ++n;
    }
  require(n > 0, ErrorCode::empty_result, "estimate_revolution_period: region is empty");
  speed /= n;
  return speed > 0.0 ? perimeter / speed : std::numeric_limits<double>::infinity();
}

MissionResult simulate_mission(const FlowField& field, const MissionPlan& plan, const Vec2& start,
                               const VehicleParams& vp, double dt, double t_max, double t0) {
  require(dt > 0.0, ErrorCode::invalid_argument, "simulate_mission: dt must be positive");
  require(vp.u_max >= 0.0 && vp.omega_max >= 0.0 && vp.goal_radius > 0.0 &&
              vp.waypoint_radius > 0.0,
          ErrorCode::invalid_argument, "simulate_mission: invalid vehicle parameters");
  require(!plan.legs.empty(), ErrorCode::invalid_argument, "simulate_mission: empty plan");

  MissionResult out;
  out.leg_energy.assign(plan.legs.size(), 0.0);
  out.leg_duration.assign(plan.legs.size(), 0.0);
  const Vec2 goal = plan.legs.back().target;

  std::size_t leg = 0;
  double leg_start = t0;
  bool leg_recovering = false;
  State s{start, std::atan2(plan.legs[0].target.y() - start.y(), plan.legs[0].target.x() - start.x())};
  double t = t0;
  const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));

  auto leg_done = [&](std::size_t l, const Vec2& p) {
    const double radius = l + 1 == plan.legs.size() ? vp.goal_radius : vp.waypoint_radius;
    return (plan.legs[l].target - p).norm() <= radius;
  };

  for (std::size_t i = 0;; ++i) {
    if ((s.pos - goal).norm() <= vp.goal_radius) {
      out.reached = true;
      out.trajectory.push_back({t, s.pos, s.heading, 0.0, static_cast<int>(leg)});
      break;
    }
    while (leg + 1 < plan.legs.size() && leg_done(leg, s.pos)) {
      ++leg;
      leg_start = t;
      leg_recovering = false;
    }
    const Leg& cur = plan.legs[leg];
    if (cur.mode == LegMode::drift && !leg_recovering && plan.drift_timeout > 0.0 &&
        t - leg_start >= plan.drift_timeout) {
      leg_recovering = true;
      out.recovery = true;
    }
    const bool thrusting = cur.mode == LegMode::thrust || leg_recovering;
    double u = 0.0;
    double omega = 0.0;
    if (thrusting) {
      const Vec2 d = cur.target - s.pos;
      const double err = wrap_angle(std::atan2(d.y(), d.x()) - s.heading);
      u = vp.u_max;
      omega = vp.omega_max * std::clamp(err / std::numbers::pi, -1.0, 1.0);
    }
    out.trajectory.push_back({t, s.pos, s.heading, u, static_cast<int>(leg)});
    if (i >= steps) break;

    s = rk4_step(field, s, t, dt, u, omega);
    s.heading = wrap_angle(s.heading);
    t = t0 + static_cast<double>(i + 1) * dt;
    out.leg_energy[leg] += u * dt;
    out.leg_duration[leg] += dt;
    if (!thrusting) out.drift_time += dt;
  }
  out.duration = t - t0;
  for (double e : out.leg_energy) out.energy += e;
  return out;
}

MissionResult naive_controller(const FlowField& field, const Vec2& start, const Vec2& goal,
                               const VehicleParams& vp, double dt, double t_max, double t0) {
  MissionPlan plan;
  plan.legs.push_back({goal, LegMode::thrust});
  return simulate_mission(field, plan, start, vp, dt, t_max, t0);
}

void write_mission_csv(const MissionResult& mission, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  require(out.good(), ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out << "t,x,y,theta,u\n";
  for (const auto& s : mission.trajectory)
    out << format_double(s.t) << ',' << format_double(s.pos.x()) << ',' << format_double(s.pos.y())
        << ',' << format_double(s.heading) << ',' << format_double(s.thrust) << '\n';
  require(out.good(), ErrorCode::io_error, "failed writing " + path.string());
}

std::string mission_json(const MissionResult& mission, const MissionPlan& plan) {
  nlohmann::ordered_json j;
  j["reached"] = mission.reached;
  j["energy"] = mission.energy;
  j["duration"] = mission.duration;
  j["drift_time"] = mission.drift_time;
  j["recovery"] = mission.recovery;
  j["legs"] = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < plan.legs.size(); ++l)
    j["legs"].push_back({{"mode", to_string(plan.legs[l].mode)},
                         {"target", {plan.legs[l].target.x(), plan.legs[l].target.y()}},
                         {"energy", l < mission.leg_energy.size() ? mission.leg_energy[l] : 0.0},
                         {"duration", l < mission.leg_duration.size() ? mission.leg_duration[l] : 0.0}});
  return j.dump(2) + "\n";
}

void write_region_pgm(const RegionMask& region, const std::vector<const MissionResult*>& missions,
                      const std::filesystem::path& path) {
  std::vector<unsigned char> pixels(region.grid.size(), 0);
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = region.grid[i] ? 96 : 0;
  // Later missions are drawn first so the first one stays on top.
  for (std::size_t m = missions.size(); m-- > 0;) {
    const auto value = static_cast<unsigned char>(std::max(0, 255 - 64 * static_cast<int>(m)));
    for (const auto& s : missions[m]->trajectory) {
      const int c = static_cast<int>(std::floor((s.pos.x() - region.domain.lower[0]) / region.cell_w));
      const int r = static_cast<int>(std::floor((s.pos.y() - region.domain.lower[1]) / region.cell_h));
      if (r >= 0 && c >= 0 && r < region.rows && c < region.cols)
        pixels[static_cast<std::size_t>(r) * region.cols + c] = value;
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out << "P5\n" << region.cols << ' ' << region.rows << "\n255\n";
  for (int r = region.rows - 1; r >= 0; --r)
    out.write(reinterpret_cast<const char*>(&pixels[static_cast<std::size_t>(r) * region.cols]),
              region.cols);
}

}  // namespace cf
