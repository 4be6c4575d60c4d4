#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "coherentflow/error.hpp"
#include "coherentflow/planner.hpp"
#include "doctest.h"

using namespace cf;

namespace {

// Seeds on a regular grid with labels from a predicate.
struct Seeded {
  Eigen::MatrixXd pos;
  Labeling labels;
};

template <class F>
Seeded seeded(const Domain& d, int nx, int ny, F label_of) {
  const auto seeds = seed_grid(d, {nx, ny});
  Seeded s;
  s.pos.resize(static_cast<Eigen::Index>(seeds.size()), 2);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    s.pos.row(static_cast<Eigen::Index>(i)) = seeds[i].transpose();
    s.labels.labels.push_back(label_of(seeds[i]));
  }
  s.labels.k = 2;
  return s;
}

RegionMask disc_region(const Domain& d, const Vec2& c, double r, double cell) {
  const auto s = seeded(d, 91, 61, [&](const Vec2& p) { return (p - c).norm() < r ? 1 : 0; });
  return extract_region(s.labels, s.pos, 1, d, cell);
}

VehicleParams vehicle() { return VehicleParams{}; }

}  // namespace

TEST_CASE("region from a single cluster covers every occupied cell") {
  const Domain d = Domain::box2(0, 3, 0, 2);
  const auto s = seeded(d, 31, 21, [](const Vec2&) { return 0; });
  const RegionMask m = extract_region(s.labels, s.pos, 0, d, 0.25);
  CHECK(m.cols == 12);
  CHECK(m.rows == 8);
  CHECK(m.count() == 96);
  CHECK_THROWS_AS(extract_region(s.labels, s.pos, 1, d, 0.25), Error);
  CHECK_THROWS_AS(extract_region(s.labels, s.pos, 0, d, 0.0), Error);
}

TEST_CASE("half-plane labels give a half-plane mask") {
  const Domain d = Domain::box2(0, 4, 0, 2);
  const auto s = seeded(d, 81, 41, [](const Vec2& p) { return p.x() < 1.5 ? 1 : 0; });
  const RegionMask m = extract_region(s.labels, s.pos, 1, d, 0.25);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) {
      const double cx = m.cell_center(r, c).x();
      if (cx < 1.5 - m.cell_w) CHECK(m.at(r, c));
      if (cx > 1.5 + m.cell_w) CHECK_FALSE(m.at(r, c));
    }
}

TEST_CASE("only the largest component survives") {
  const Domain d = Domain::box2(0, 4, 0, 2);
  const auto s = seeded(d, 81, 41, [](const Vec2& p) {
    return (p - Vec2(1, 1)).norm() < 0.6 || (p - Vec2(3.2, 1)).norm() < 0.3 ? 1 : 0;
  });
  const RegionMask m = extract_region(s.labels, s.pos, 1, d, 0.1);
  CHECK(m.contains({1.0, 1.0}));
  CHECK_FALSE(m.contains({3.2, 1.0}));
}

TEST_CASE("trivial and boundary-to-boundary plans") {
  const Domain d = Domain::box2(0, 4.5, 0, 3);
  const RegionMask m = disc_region(d, {2.25, 1.5}, 1.0, 0.075);
  const auto near = plan_waypoints(m, {4.0, 0.4}, {4.1, 0.45}, 0.25);
  REQUIRE(near.legs.size() == 1);
  CHECK(near.legs[0].mode == LegMode::thrust);

  // Boundary cell centres on opposite sides of the disc.
  Vec2 left(0, 0), right(0, 0);
  double lx = 1e9, rx = -1e9;
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c)
      if (m.is_boundary(r, c)) {
        const Vec2 p = m.cell_center(r, c);
        if (std::abs(p.y() - 1.5) < m.cell_h && p.x() < lx) lx = p.x(), left = p;
        if (std::abs(p.y() - 1.5) < m.cell_h && p.x() > rx) rx = p.x(), right = p;
      }
  const auto across = plan_waypoints(m, left, right, 0.25);
  REQUIRE(across.legs.size() == 1);
  CHECK(across.legs[0].mode == LegMode::drift);
  CHECK((across.legs[0].target - right).norm() < 1e-12);

  const auto full = plan_waypoints(m, {4.0, 0.4}, {4.3, 2.8}, 0.25);
  REQUIRE(full.legs.size() == 3);
  CHECK(full.legs[0].mode == LegMode::thrust);
  CHECK(full.legs[1].mode == LegMode::drift);
  CHECK(full.legs[2].mode == LegMode::thrust);
  CHECK(full.legs[2].target == Vec2(4.3, 2.8));
  CHECK(m.contains(full.legs[0].target));
  CHECK(m.contains(full.legs[1].target));
}

TEST_CASE("plans never chain drift legs") {
  const Domain d = Domain::box2(0, 4.5, 0, 3);
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> ux(0, 4.5), uy(0, 3), ur(0.3, 1.2);
  for (int trial = 0; trial < 30; ++trial) {
    const RegionMask m = disc_region(d, {2.25, 1.5}, ur(rng), 0.1);
    const auto plan = plan_waypoints(m, {ux(rng), uy(rng)}, {ux(rng), uy(rng)}, 0.25);
    REQUIRE_FALSE(plan.legs.empty());
    for (std::size_t i = 1; i < plan.legs.size(); ++i)
      CHECK_FALSE((plan.legs[i].mode == LegMode::drift && plan.legs[i - 1].mode == LegMode::drift));
  }
}

TEST_CASE("still water missions") {
  const VehicleParams vp = vehicle();
  const Vec2 start(0, 0), goal(3, 0);
  const MissionResult m = naive_controller(FlowField::zero(), start, goal, vp, 0.05, 100);
  CHECK(m.reached);
  // Energy is thrust times time, i.e. path length, up to the goal tolerance.
  CHECK(std::abs(m.energy - 3.0) <= vp.goal_radius + vp.u_max * 0.05 + 1e-9);
  for (const auto& s : m.trajectory) CHECK(std::abs(s.pos.y()) < 1e-12);

  MissionPlan drift;
  drift.legs = {{{1, 1}, LegMode::drift}};
  const MissionResult idle = simulate_mission(FlowField::zero(), drift, start, vp, 0.05, 5);
  CHECK(idle.energy == 0.0);
  CHECK_FALSE(idle.reached);
  for (const auto& s : idle.trajectory) CHECK(s.pos == start);

  VehicleParams off = vp;
  off.u_max = 0.0;
  const MissionResult stuck = naive_controller(FlowField::zero(), start, goal, off, 0.05, 5);
  CHECK_FALSE(stuck.reached);
  for (const auto& s : stuck.trajectory) CHECK(s.pos == start);
}

TEST_CASE("weak uniform current is beaten by the heading controller") {
  const VehicleParams vp = vehicle();
  const FlowField cross = FlowField::uniform({0.0, 0.12});
  const MissionResult m = naive_controller(cross, {0, 0}, {3, 0}, vp, 0.05, 200);
  CHECK(m.reached);
  const MissionResult slow = naive_controller(FlowField::uniform({-0.15, 0.0}), {0, 0}, {3, 0}, vp, 0.05, 200);
  CHECK(slow.reached);
  // A head current at full thrust speed never lets it close.
  const MissionResult blocked = naive_controller(FlowField::uniform({-0.2, 0.0}), {0, 0}, {3, 0}, vp, 0.05, 50);
  CHECK_FALSE(blocked.reached);
}

TEST_CASE("energy is the sum of leg energies and drift is free") {
  SingleGyreParams sg;
  sg.amp = 0.9 / 3.141592653589793;
  sg.domain = Domain::box2(0, 4.5, 0, 3);
  const FlowField f(sg);
  MissionPlan plan;
  plan.legs = {{{3.5, 1.0}, LegMode::thrust}, {{3.5, 2.2}, LegMode::drift}, {{4.0, 2.6}, LegMode::thrust}};
  plan.drift_timeout = 40.0;
  const MissionResult m = simulate_mission(f, plan, {4.0, 0.4}, vehicle(), 0.05, 300);
  double sum = 0.0;
  for (double e : m.leg_energy) sum += e;
  CHECK(m.energy == sum);
  double thrust_time = 0.0;
  for (std::size_t i = 1; i < m.trajectory.size(); ++i) thrust_time += m.trajectory[i - 1].thrust * 0.05;
  CHECK(m.energy == doctest::Approx(thrust_time).epsilon(1e-12));
  if (!m.recovery) CHECK(m.leg_energy[1] == 0.0);
  CHECK(m.duration == doctest::Approx(std::accumulate(m.leg_duration.begin(), m.leg_duration.end(), 0.0)));
  CHECK_THROWS_AS(simulate_mission(f, MissionPlan{}, {4, 0.4}, vehicle(), 0.05, 10), Error);
  CHECK_THROWS_AS(simulate_mission(f, plan, {4, 0.4}, vehicle(), 0.0, 10), Error);
}

TEST_CASE("drift timeout switches to thrust") {
  MissionPlan plan;
  plan.legs = {{{2, 0}, LegMode::drift}};
  plan.drift_timeout = 1.0;
  const MissionResult m = simulate_mission(FlowField::zero(), plan, {0, 0}, vehicle(), 0.05, 60);
  CHECK(m.recovery);
  CHECK(m.reached);
  CHECK(m.drift_time == doctest::Approx(1.0));
}

TEST_CASE("revolution period of a uniform current") {
  const Domain d = Domain::box2(0, 2, 0, 2);
  const auto s = seeded(d, 41, 41, [](const Vec2&) { return 0; });
  const RegionMask m = extract_region(s.labels, s.pos, 0, d, 0.5);
  // 12 boundary cells of a 4x4 block, each 0.5 long, at speed 0.25.
  CHECK(estimate_revolution_period(m, FlowField::uniform({0.25, 0.0}), 0.0) == doctest::Approx(24.0));
  CHECK(std::isinf(estimate_revolution_period(m, FlowField::zero(), 0.0)));
}

TEST_CASE("mission outputs") {
  const Domain d = Domain::box2(0, 4.5, 0, 3);
  const RegionMask m = disc_region(d, {2.25, 1.5}, 1.0, 0.075);
  const MissionResult r = naive_controller(FlowField::zero(), {0.5, 0.5}, {4, 2.5}, vehicle(), 0.05, 100);
  const auto dir = std::filesystem::temp_directory_path() / "coherentflow_unit";
  write_mission_csv(r, dir / "m.csv");
  std::ifstream in(dir / "m.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x,y,theta,u");
  write_region_pgm(m, {&r}, dir / "r.pgm");
  std::ifstream pgm(dir / "r.pgm", std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxv = 0;
  pgm >> magic >> w >> h >> maxv;
  CHECK(magic == "P5");
  CHECK(w == m.cols);
  CHECK(h == m.rows);
  CHECK(maxv == 255);
  const std::string json = mission_json(r, MissionPlan{{{{4, 2.5}, LegMode::thrust}}, 0.0});
  CHECK(json.find("\"reached\"") != std::string::npos);
  CHECK(json.find("THRUST") != std::string::npos);
}
