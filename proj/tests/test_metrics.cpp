#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tetherplan/metrics.hpp"

using namespace tetherplan;

namespace {

ObstacleMap make_map(std::vector<ObstaclePrimitive> obs) {
  ObstacleMap m;
  m.bounds = Box{{-10, -10, -10}, {10, 10, 0}};
  m.surface_z = 0.0;
  m.seabed_z = -10.0;
  m.obstacles = std::move(obs);
  return m;
}

// A synthetic trajectory: both bodies slide along +x at fixed depth, sampled
// uniformly in time. Only the fields evaluate_run reads are populated.
SyncedTrajectory slide_trajectory(int ticks, double total_time, double auv_z) {
  SyncedTrajectory traj;
  for (int k = 0; k <= ticks; ++k) {
    const double t = total_time * k / ticks;
    const double x = -4.0 + 8.0 * k / ticks;
    TrajectorySample s;
    s.time = t;
    s.asv_position = {x, 0.0, 0.0};
    s.auv_position = {x, 0.0, auv_z};
    s.asv_speed = 8.0 / total_time;
    s.auv_speed = 8.0 / total_time;
    s.chord = std::abs(auv_z);
    traj.samples.push_back(s);
  }
  return traj;
}

}  // namespace

TEST_CASE("population std of hand-picked samples") {
  CHECK(detail::population_std({}) == 0.0);
  CHECK(detail::population_std({3.0}) == 0.0);
  CHECK(detail::population_std({1.0, 1.0, 1.0}) == Catch::Approx(0.0).margin(1e-15));
  // {2, 4, 4, 4, 5, 5, 7, 9}: classic example with population std exactly 2.
  CHECK(detail::population_std({2, 4, 4, 4, 5, 5, 7, 9}) == Catch::Approx(2.0));
}

TEST_CASE("collision-free run reports NC = 0 and positive DOBS") {
  const auto map = make_map({Sphere{{0, 5, -2}, 1.0}});
  const TetherModel tether{6.0, 11, 0.1, 0.2};
  PlanResult plan;
  plan.replan_count = 2;
  plan.planning_time_asv = 0.25;
  plan.planning_time_auv = 0.5;

  const auto traj = slide_trajectory(100, 10.0, -2.0);
  const auto r = evaluate_run(plan, traj, map, tether);
  CHECK(r.nc == 0);
  CHECK(r.dobs > 0.0);
  CHECK(r.rfrq == 2);
  CHECK(r.casv == 0.25);
  CHECK(r.cauv == 0.5);
  CHECK(r.lasv == Catch::Approx(8.0).epsilon(1e-9));
  CHECK(r.lauv == Catch::Approx(8.0).epsilon(1e-9));
  // Constant speeds: zero std for both vehicles and the tether midpoint.
  CHECK(r.stds == Catch::Approx(0.0).margin(1e-12));
  CHECK(r.stdu == Catch::Approx(0.0).margin(1e-12));
  CHECK(r.stdt == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("each contiguous incursion counts as one entry event") {
  // Two spheres on the AUV's track: the path dips inside each exactly once.
  const auto map = make_map({Sphere{{-2, 0, -2}, 0.5}, Sphere{{2, 0, -2}, 0.5}});
  const TetherModel tether{6.0, 11, 0.1, 0.2};
  PlanResult plan;

  const auto traj = slide_trajectory(400, 10.0, -2.0);
  const auto r = evaluate_run(plan, traj, map, tether);
  CHECK(r.nc == 2);
  CHECK(r.dobs < 0.0);
}

TEST_CASE("dobs scans the tether shape, not just the vehicles") {
  // An obstacle between the vehicles: both bodies stay clear but the hanging
  // cable passes close to it.
  const auto map = make_map({Sphere{{0, 0, -3}, 0.4}});
  const TetherModel tether{7.0, 21, 0.1, 0.2};
  PlanResult plan;

  const auto traj = slide_trajectory(100, 10.0, -5.0);
  const auto r = evaluate_run(plan, traj, map, tether);

  double vehicle_min = 1e9;
  for (const auto& s : traj.samples) {
    vehicle_min = std::min(vehicle_min, signed_distance(s.asv_position, map));
    vehicle_min = std::min(vehicle_min, signed_distance(s.auv_position, map));
  }
  CHECK(r.dobs < vehicle_min - 1e-9);
}

TEST_CASE("aggregate means and deviations across runs") {
  MetricsReport a, b;
  a.lasv = 10.0;
  b.lasv = 14.0;
  a.stds = 0.2;
  b.stds = 0.4;
  a.nc = 1;
  b.nc = 3;
  a.rfrq = 0;
  b.rfrq = 2;
  const auto agg = aggregate({a, b});
  CHECK(agg.count == 2);
  CHECK(agg.mean.lasv == Catch::Approx(12.0));
  CHECK(agg.stddev.lasv == Catch::Approx(2.0));
  CHECK(agg.mean.stds == Catch::Approx(0.3));
  CHECK(agg.nc_total == 4);
  CHECK(agg.nc_max == 3);
  CHECK(agg.mean.rfrq == 1);
}

TEST_CASE("aggregating nothing is an error") {
  CHECK_THROWS_AS(aggregate({}), Error);
}
