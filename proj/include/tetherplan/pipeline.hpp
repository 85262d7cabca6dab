#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tetherplan/metrics.hpp"
#include "tetherplan/planner.hpp"
#include "tetherplan/scenario.hpp"
#include "tetherplan/smoothing.hpp"
#include "tetherplan/sync_opt.hpp"
#include "tetherplan/trajectory.hpp"

namespace tetherplan {

struct RunResult {
  PlanResult plan;
  SyncedTrajectory trajectory;
  OptResult optimization;
  MetricsReport metrics;
};

// Full pipeline: sequential tether-aware planning, paired Bezier smoothing
// with a collision re-check, synchronized scheduling, penalty optimization,
// re-synchronization on the optimized geometry, velocity-spline smoothing and
// trajectory assembly.
inline RunResult run_pipeline(const Scenario& sc) {
  validate_scenario(sc);

  PlannerConfig cfg = sc.planner;
  cfg.tether = sc.tether;
  cfg.first_robot = sc.first_robot;

  RunResult rr;
  rr.plan = plan_pair({sc.asv_start, sc.asv_goal, sc.auv_start, sc.auv_goal}, sc.map, cfg);

  std::vector<Point3> asv_pts = positions(rr.plan.asv_path);
  std::vector<Point3> auv_pts = positions(rr.plan.auv_path);

  // Zero-motion mission: nothing to schedule.
  if (path_length(rr.plan.asv_path.waypoints) <= 1e-12 &&
      path_length(rr.plan.auv_path.waypoints) <= 1e-12) {
    SyncedTrajectory traj;
    traj.schedule.times = {0.0};
    traj.asv_segments = {{std::vector<Point3>{asv_pts.front(), asv_pts.front()}}};
    traj.auv_segments = {{std::vector<Point3>{auv_pts.front(), auv_pts.front()}}};
    traj.samples.push_back({0.0, asv_pts.front(), auv_pts.front(), 0.0, 0.0,
                            distance(asv_pts.front(), auv_pts.front())});
    rr.trajectory = std::move(traj);
    rr.metrics = evaluate_run(rr.plan, rr.trajectory, sc.map, sc.tether);
    return rr;
  }
  if (asv_pts.size() < 2) asv_pts.push_back(asv_pts.back());
  if (auv_pts.size() < 2) auv_pts.push_back(auv_pts.back());

  // Step 2: paired smoothing (splits stay index-synchronized).
  const auto smoothed =
      smooth_waypoints_safe({asv_pts, auv_pts}, sc.map, sc.tether.clearance);
  std::vector<BezierSegment> asv_segs = smoothed.segments[0];
  std::vector<BezierSegment> auv_segs = smoothed.segments[1];

  const auto distances = [](const std::vector<BezierSegment>& segs) {
    std::vector<double> d;
    d.reserve(segs.size());
    for (const auto& s : segs) d.push_back(segment_length(s));
    return d;
  };

  // Step 3: synchronize, then optimize the control points.
  SyncSchedule schedule =
      make_schedule(distances(asv_segs), distances(auv_segs), sc.asv_limits, sc.auv_limits);
  rr.optimization = optimize_trajectories(asv_segs, auv_segs, schedule, sc.map, sc.tether,
                                          sc.asv_limits, sc.auv_limits, sc.optimization);
  asv_segs = rr.optimization.asv_segments;
  auv_segs = rr.optimization.auv_segments;

  // Re-synchronize on the optimized geometry so V_i <= v_max holds exactly.
  schedule =
      make_schedule(distances(asv_segs), distances(auv_segs), sc.asv_limits, sc.auv_limits);

  // Step 4: velocity smoothing.
  const VelocitySpline asv_spline =
      smooth_velocity(velocity_knots(schedule.times, schedule.asv_speeds));
  const VelocitySpline auv_spline =
      smooth_velocity(velocity_knots(schedule.times, schedule.auv_speeds));

  rr.trajectory = assemble_trajectory(asv_segs, auv_segs, schedule, asv_spline, auv_spline,
                                      sc.tether, sc.asv_limits, sc.auv_limits);
  rr.metrics = evaluate_run(rr.plan, rr.trajectory, sc.map, sc.tether);
  return rr;
}

// Ablation used for the velocity-smoothness comparison: raw index-paired
// planned waypoints with per-segment time synchronization only -- no control
// point optimization and no velocity spline. Each interval is paced by the
// slower vehicle, so the piecewise-constant segment speeds are what the
// planner would command before any smoothing. Returns the speed standard
// deviations sampled on the shared timeline (ASV first, AUV second).
inline std::pair<double, double> ablation_speed_stds(const PlanResult& plan,
                                                     const KinodynamicLimits& asv_lim,
                                                     const KinodynamicLimits& auv_lim,
                                                     int ticks = 1000) {
  const auto asv_pts = positions(plan.asv_path);
  const auto auv_pts = positions(plan.auv_path);
  if (asv_pts.size() != auv_pts.size() || asv_pts.size() < 2) return {0.0, 0.0};

  std::vector<double> asv_d, auv_d;
  for (std::size_t i = 1; i < asv_pts.size(); ++i) {
    asv_d.push_back(distance(asv_pts[i - 1], asv_pts[i]));
    auv_d.push_back(distance(auv_pts[i - 1], auv_pts[i]));
  }
  const SyncSchedule schedule = make_schedule(asv_d, auv_d, asv_lim, auv_lim);

  const double total = schedule.total_time();
  std::vector<double> asv_samples, auv_samples;
  asv_samples.reserve(ticks + 1);
  auv_samples.reserve(ticks + 1);
  std::size_t seg = 0;
  for (int k = 0; k <= ticks; ++k) {
    const double time = total * k / ticks;
    while (seg + 1 < schedule.segment_count() && time > schedule.times[seg + 1] + 1e-12)
      ++seg;
    asv_samples.push_back(schedule.asv_speeds[seg]);
    auv_samples.push_back(schedule.auv_speeds[seg]);
  }
  return {detail::population_std(asv_samples), detail::population_std(auv_samples)};
}

// ---------------------------------------------------------------------------
// Run artifacts. Everything written here is deterministic for a fixed
// scenario; wall-clock planning times go to the separate timings.json.

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline Json segments_json(const std::vector<BezierSegment>& segs) {
  Json arr = Json::array();
  for (const auto& s : segs) {
    Json ctrl = Json::array();
    for (const auto& p : s.ctrl) ctrl.push_back(point_json(p));
    arr.push_back(ctrl);
  }
  return arr;
}

}  // namespace detail

inline Json metrics_json(const MetricsReport& r) {
  return Json{{"LASV_m", r.lasv}, {"LAUV_m", r.lauv}, {"NC", r.nc},
              {"STDS_mps", r.stds}, {"STDU_mps", r.stdu}, {"STDT_mps", r.stdt},
              {"DOBS_m", r.dobs},  {"RFRQ", r.rfrq}};
}

inline const char* metrics_csv_header() {
  return "LASV,LAUV,NC,STDS,STDU,STDT,DOBS,RFRQ";
}

inline std::string metrics_csv_row(const MetricsReport& r) {
  using detail::fmt;
  return fmt(r.lasv) + "," + fmt(r.lauv) + "," + std::to_string(r.nc) + "," + fmt(r.stds) +
         "," + fmt(r.stdu) + "," + fmt(r.stdt) + "," + fmt(r.dobs) + "," +
         std::to_string(r.rfrq);
}

inline void write_run_artifacts(const std::filesystem::path& dir, const Scenario& sc,
                                const RunResult& rr) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  save_scenario(sc, (dir / "scenario.json").string());

  Json traj;
  traj["total_time_s"] = rr.trajectory.schedule.total_time();
  traj["segment_times_s"] = rr.trajectory.schedule.times;
  traj["asv_segment_speeds_mps"] = rr.trajectory.schedule.asv_speeds;
  traj["auv_segment_speeds_mps"] = rr.trajectory.schedule.auv_speeds;
  traj["asv_segments_ctrl_m"] = detail::segments_json(rr.trajectory.asv_segments);
  traj["auv_segments_ctrl_m"] = detail::segments_json(rr.trajectory.auv_segments);
  traj["replan_count"] = rr.plan.replan_count;
  traj["objective_history"] = rr.optimization.objective_history;
  {
    std::ofstream out(dir / "trajectory.json");
    out << traj.dump(2) << "\n";
  }

  {
    std::ofstream out(dir / "samples.csv");
    out << "time_s,asv_x_m,asv_y_m,asv_z_m,auv_x_m,auv_y_m,auv_z_m,"
           "asv_speed_mps,auv_speed_mps,chord_m\n";
    for (const auto& s : rr.trajectory.samples) {
      using detail::fmt;
      out << fmt(s.time) << "," << fmt(s.asv_position.x) << "," << fmt(s.asv_position.y)
          << "," << fmt(s.asv_position.z) << "," << fmt(s.auv_position.x) << ","
          << fmt(s.auv_position.y) << "," << fmt(s.auv_position.z) << ","
          << fmt(s.asv_speed) << "," << fmt(s.auv_speed) << "," << fmt(s.chord) << "\n";
    }
  }

  {
    std::ofstream out(dir / "tether_ticks.csv");
    out << "sample_index,time_s,point_index,x_m,y_m,z_m\n";
    for (std::size_t k = 0; k < rr.trajectory.samples.size(); ++k) {
      const auto& s = rr.trajectory.samples[k];
      const TetherShape shape = hang_tether(s.asv_position, s.auv_position, sc.tether);
      for (std::size_t i = 0; i < shape.points.size(); ++i) {
        using detail::fmt;
        out << k << "," << fmt(s.time) << "," << i << "," << fmt(shape.points[i].x) << ","
            << fmt(shape.points[i].y) << "," << fmt(shape.points[i].z) << "\n";
      }
    }
  }

  {
    std::ofstream out(dir / "metrics.json");
    out << metrics_json(rr.metrics).dump(2) << "\n";
  }
  {
    std::ofstream out(dir / "metrics.csv");
    out << metrics_csv_header() << "\n" << metrics_csv_row(rr.metrics) << "\n";
  }
  {
    Json t{{"CASV_s", rr.metrics.casv}, {"CAUV_s", rr.metrics.cauv}};
    std::ofstream out(dir / "timings.json");
    out << t.dump(2) << "\n";
  }

  Json manifest;
  manifest["format_version"] = 1;
  manifest["seed"] = sc.seed;
  manifest["first_robot"] = to_string(sc.first_robot);
  manifest["scenario_file"] = "scenario.json";
  manifest["artifacts"] = {"scenario.json", "trajectory.json", "samples.csv",
                           "tether_ticks.csv", "metrics.json", "metrics.csv"};
  manifest["timing_file"] = "timings.json";
  {
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
}

}  // namespace tetherplan
