#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tetherplan/error.hpp"
#include "tetherplan/geometry.hpp"
#include "tetherplan/smoothing.hpp"
#include "tetherplan/sync_opt.hpp"
#include "tetherplan/tether.hpp"

namespace tetherplan {

struct TrajectorySample {
  double time = 0.0;
  Point3 asv_position;
  Point3 auv_position;
  double asv_speed = 0.0;
  double auv_speed = 0.0;
  double chord = 0.0;
};

struct SyncedTrajectory {
  std::vector<BezierSegment> asv_segments;
  std::vector<BezierSegment> auv_segments;
  SyncSchedule schedule;
  VelocitySpline asv_speed_spline;
  VelocitySpline auv_speed_spline;
  std::vector<TrajectorySample> samples;
  double tick = 0.0;
  int speed_clips = 0;  // spline samples clamped into [0, v_max]
};

namespace detail {

// Arc-length indexed position lookup along one segment chain: within each
// schedule interval the vehicle moves at its constant synchronized speed.
class TimedCurve {
 public:
  TimedCurve(const std::vector<BezierSegment>& segs, const SyncSchedule& schedule,
             const std::vector<double>& speeds, int table_size = 64)
      : segs_(segs), schedule_(schedule), speeds_(speeds) {
    tables_.resize(segs.size());
    for (std::size_t s = 0; s < segs.size(); ++s) {
      auto& tab = tables_[s];
      tab.resize(table_size + 1, 0.0);
      Point3 prev = bezier_point(segs[s], 0.0);
      for (int i = 1; i <= table_size; ++i) {
        const Point3 cur = bezier_point(segs[s], static_cast<double>(i) / table_size);
        tab[i] = tab[i - 1] + distance(prev, cur);
        prev = cur;
      }
    }
  }

  Point3 position(double time) const {
    const auto& times = schedule_.times;
    if (time <= times.front()) return bezier_point(segs_.front(), 0.0);
    if (time >= times.back()) return bezier_point(segs_.back(), 1.0);
    auto it = std::upper_bound(times.begin(), times.end(), time);
    const std::size_t s = static_cast<std::size_t>(it - times.begin()) - 1;
    const auto& tab = tables_[s];
    const double total = tab.back();
    if (total <= 1e-12) return bezier_point(segs_[s], 0.0);
    const double travelled =
        std::min(total, speeds_[s] * (time - times[s]));
    const auto jt = std::lower_bound(tab.begin(), tab.end(), travelled);
    std::size_t j = static_cast<std::size_t>(jt - tab.begin());
    if (j == 0) j = 1;
    const double seg = tab[j] - tab[j - 1];
    const double frac = seg > 1e-15 ? (travelled - tab[j - 1]) / seg : 0.0;
    const double t = (static_cast<double>(j - 1) + frac) / (tab.size() - 1);
    return bezier_point(segs_[s], std::clamp(t, 0.0, 1.0));
  }

 private:
  const std::vector<BezierSegment>& segs_;
  const SyncSchedule& schedule_;
  const std::vector<double>& speeds_;
  std::vector<std::vector<double>> tables_;
};

}  // namespace detail

// Materializes the synchronized trajectory: both vehicles sampled at shared
// ticks, with per-tick chord and clamped speed-spline values. Throws when a
// tick breaks the slack-chord invariant.
inline SyncedTrajectory assemble_trajectory(std::vector<BezierSegment> asv_segments,
                                            std::vector<BezierSegment> auv_segments,
                                            SyncSchedule schedule,
                                            VelocitySpline asv_spline,
                                            VelocitySpline auv_spline,
                                            const TetherModel& tether,
                                            const KinodynamicLimits& asv_lim,
                                            const KinodynamicLimits& auv_lim,
                                            double tick = 0.0) {
  SyncedTrajectory traj;
  traj.schedule = std::move(schedule);
  traj.asv_segments = std::move(asv_segments);
  traj.auv_segments = std::move(auv_segments);
  traj.asv_speed_spline = std::move(asv_spline);
  traj.auv_speed_spline = std::move(auv_spline);

  const double total = traj.schedule.total_time();
  if (total <= 0.0) {
    const Point3 a = bezier_point(traj.asv_segments.front(), 0.0);
    const Point3 u = bezier_point(traj.auv_segments.front(), 0.0);
    traj.samples.push_back({0.0, a, u, 0.0, 0.0, distance(a, u)});
    return traj;
  }
  if (tick <= 0.0) tick = total / 1000.0;
  traj.tick = tick;

  const detail::TimedCurve asv_curve(traj.asv_segments, traj.schedule,
                                     traj.schedule.asv_speeds);
  const detail::TimedCurve auv_curve(traj.auv_segments, traj.schedule,
                                     traj.schedule.auv_speeds);

  const int ticks = static_cast<int>(std::ceil(total / tick - 1e-9));
  const double chord_limit = tether.max_chord() + 1e-9;
  for (int k = 0; k <= ticks; ++k) {
    const double time = std::min(total, k * tick);
    TrajectorySample s;
    s.time = k == ticks ? total : time;
    s.asv_position = asv_curve.position(s.time);
    s.auv_position = auv_curve.position(s.time);
    s.chord = distance(s.asv_position, s.auv_position);
    if (s.chord > chord_limit)
      fail(ErrorClass::InvariantViolation,
           "tether chord exceeds slack limit at t=" + std::to_string(s.time));

    const double va = traj.asv_speed_spline(s.time);
    const double vu = traj.auv_speed_spline(s.time);
    s.asv_speed = std::clamp(va, 0.0, asv_lim.v_max);
    s.auv_speed = std::clamp(vu, 0.0, auv_lim.v_max);
    if (s.asv_speed != va) ++traj.speed_clips;
    if (s.auv_speed != vu) ++traj.speed_clips;
    traj.samples.push_back(s);
  }
  return traj;
}

// Velocity knots for a schedule: segment speeds anchored at interval
// midpoints plus flat end knots, deduplicated on time.
inline std::vector<std::pair<double, double>> velocity_knots(
    const std::vector<double>& times, const std::vector<double>& speeds) {
  std::vector<std::pair<double, double>> knots;
  knots.emplace_back(times.front(), speeds.front());
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    const double mid = 0.5 * (times[i] + times[i + 1]);
    if (mid > knots.back().first + 1e-9) knots.emplace_back(mid, speeds[i]);
  }
  if (times.back() > knots.back().first + 1e-9)
    knots.emplace_back(times.back(), speeds.back());
  return knots;
}

}  // namespace tetherplan
