#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tetherplan/error.hpp"
#include "tetherplan/planner.hpp"
#include "tetherplan/tether.hpp"
#include "tetherplan/trajectory.hpp"

namespace tetherplan {

// Table-style evaluation metrics for one run.
struct MetricsReport {
  double lasv = 0.0;  // sampled ASV path length [m]
  double lauv = 0.0;  // sampled AUV path length [m]
  double casv = 0.0;  // ASV planning time [s]
  double cauv = 0.0;  // AUV planning time [s]
  double stds = 0.0;  // std of sampled ASV speeds [m/s]
  double stdu = 0.0;  // std of sampled AUV speeds [m/s]
  double stdt = 0.0;  // std of the tether midpoint speed [m/s]
  double dobs = 0.0;  // overall minimum obstacle distance [m]
  int nc = 0;         // collision entry events
  int rfrq = 0;       // leader replans in this run
};

namespace detail {

inline double population_std(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / xs.size());
}

}  // namespace detail

// Computes all run metrics from the sampled trajectory. DOBS scans the ASV,
// the AUV, and every tether lumped mass at every tick; NC counts distinct
// entry events into collision (any checked body going negative).
inline MetricsReport evaluate_run(const PlanResult& plan, const SyncedTrajectory& traj,
                                  const ObstacleMap& map, const TetherModel& tether) {
  MetricsReport r;
  r.casv = plan.planning_time_asv;
  r.cauv = plan.planning_time_auv;
  r.rfrq = plan.replan_count;

  double min_sd = map.diagonal();
  bool inside = false;
  std::vector<double> asv_speeds, auv_speeds, mid_speeds;
  Point3 prev_mid{};
  bool have_prev_mid = false;
  double prev_time = 0.0;

  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& s = traj.samples[k];
    if (k > 0) {
      r.lasv += distance(traj.samples[k - 1].asv_position, s.asv_position);
      r.lauv += distance(traj.samples[k - 1].auv_position, s.auv_position);
    }
    asv_speeds.push_back(s.asv_speed);
    auv_speeds.push_back(s.auv_speed);

    double tick_sd = std::min(signed_distance(s.asv_position, map),
                              signed_distance(s.auv_position, map));
    const TetherShape shape = hang_tether(s.asv_position, s.auv_position, tether);
    for (const auto& p : shape.points) tick_sd = std::min(tick_sd, signed_distance(p, map));
    min_sd = std::min(min_sd, tick_sd);

    if (tick_sd < 0.0) {
      if (!inside) ++r.nc;
      inside = true;
    } else {
      inside = false;
    }

    const Point3 mid = shape.points[shape.points.size() / 2];
    if (have_prev_mid && s.time > prev_time)
      mid_speeds.push_back(distance(mid, prev_mid) / (s.time - prev_time));
    prev_mid = mid;
    have_prev_mid = true;
    prev_time = s.time;
  }

  r.stds = detail::population_std(asv_speeds);
  r.stdu = detail::population_std(auv_speeds);
  r.stdt = detail::population_std(mid_speeds);
  r.dobs = min_sd;
  return r;
}

struct MetricsAggregate {
  MetricsReport mean;
  MetricsReport stddev;
  int nc_total = 0;
  int nc_max = 0;
  std::size_t count = 0;
};

inline MetricsAggregate aggregate(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) fail(ErrorClass::NoData, "no reports to aggregate");
  MetricsAggregate agg;
  agg.count = reports.size();

  std::vector<double MetricsReport::*> fields = {
      &MetricsReport::lasv, &MetricsReport::lauv, &MetricsReport::casv,
      &MetricsReport::cauv, &MetricsReport::stds, &MetricsReport::stdu,
      &MetricsReport::stdt, &MetricsReport::dobs};
  for (auto f : fields) {
    double mean = 0.0;
    for (const auto& r : reports) mean += r.*f;
    mean /= reports.size();
    double var = 0.0;
    for (const auto& r : reports) var += (r.*f - mean) * (r.*f - mean);
    agg.mean.*f = mean;
    agg.stddev.*f = std::sqrt(var / reports.size());
  }

  double rfrq_mean = 0.0;
  for (const auto& r : reports) {
    agg.nc_total += r.nc;
    agg.nc_max = std::max(agg.nc_max, r.nc);
    rfrq_mean += r.rfrq;
  }
  agg.mean.rfrq = static_cast<int>(std::lround(rfrq_mean / reports.size()));
  agg.mean.nc = agg.nc_total;
  return agg;
}

}  // namespace tetherplan
