#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "tetherplan/error.hpp"
#include "tetherplan/geometry.hpp"
#include "tetherplan/tether.hpp"

namespace tetherplan {

enum class VehicleKind { Asv, Auv };

inline const char* to_string(VehicleKind k) { return k == VehicleKind::Asv ? "asv" : "auv"; }

struct VehiclePose {
  Point3 position;
  double heading = 0.0;  // radians in [0, 2pi); meaningful for the ASV only
};

inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  return a;
}

// Signed smallest difference between two headings, in (-pi, pi].
inline double heading_delta(double from, double to) {
  double d = wrap_angle(to - from);
  if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
  return d;
}

struct PlannerConfig {
  double grid_resolution = 0.5;
  int heading_count = 16;
  double max_turn_per_step = std::numbers::pi / 4.0;
  TetherModel tether;
  VehicleKind first_robot = VehicleKind::Asv;
  double follower_search_radius = 1.5;
  int replanning_limit = 50;
  double smoothness_weight = 0.5;  // w_s in the follower step cost
};

struct PlannedPath {
  std::vector<VehiclePose> waypoints;
  double total_length = 0.0;
};

inline std::vector<Point3> positions(const PlannedPath& p) {
  std::vector<Point3> out;
  out.reserve(p.waypoints.size());
  for (const auto& w : p.waypoints) out.push_back(w.position);
  return out;
}

inline double path_length(const std::vector<VehiclePose>& wps) {
  double len = 0.0;
  for (std::size_t i = 1; i < wps.size(); ++i)
    len += distance(wps[i - 1].position, wps[i].position);
  return len;
}

struct ReplanEvent {
  std::size_t leader_index = 0;
  Point3 leader_position;
};

struct PlanResult {
  PlannedPath asv_path;
  PlannedPath auv_path;
  int replan_count = 0;
  std::vector<TetherShape> tether_shapes;  // one per index-paired waypoint
  double planning_time_asv = 0.0;          // seconds
  double planning_time_auv = 0.0;
};

// Leader edge-cost inflation zone used by the replanning loop.
struct CostInflation {
  Point3 center;
  double radius = 0.0;
  double factor = 10.0;
};

namespace detail {

inline double inflation_factor(const Point3& p, const std::vector<CostInflation>& zones) {
  double f = 1.0;
  for (const auto& z : zones)
    if (distance(p, z.center) <= z.radius) f = std::max(f, z.factor);
  return f;
}

// 26-connected 3D grid for the AUV. Node (ix,iy,iz) sits at
// bounds.min + resolution * index; z is limited to [seabed, surface].
struct AuvGrid {
  const ObstacleMap& map;
  double res;
  double clearance;
  std::vector<CostInflation> inflations;
  int nx, ny, nz0, nz1;  // index extents; z index range [nz0, nz1]
  std::int64_t goal_key = 0;
  Point3 goal_pos;

  using State = std::array<int, 3>;

  AuvGrid(const ObstacleMap& m, double r, double cl, std::vector<CostInflation> inf)
      : map(m), res(r), clearance(cl), inflations(std::move(inf)) {
    nx = static_cast<int>(std::floor((m.bounds.max.x - m.bounds.min.x) / res + 1e-9));
    ny = static_cast<int>(std::floor((m.bounds.max.y - m.bounds.min.y) / res + 1e-9));
    nz0 = static_cast<int>(std::ceil((std::max(m.seabed_z, m.bounds.min.z) - m.bounds.min.z) / res - 1e-9));
    nz1 = static_cast<int>(std::floor((std::min(m.surface_z, m.bounds.max.z) - m.bounds.min.z) / res + 1e-9));
  }

  Point3 world(const State& s) const {
    return {map.bounds.min.x + res * s[0], map.bounds.min.y + res * s[1],
            map.bounds.min.z + res * s[2]};
  }

  State snap(const Point3& p) const {
    return {static_cast<int>(std::lround((p.x - map.bounds.min.x) / res)),
            static_cast<int>(std::lround((p.y - map.bounds.min.y) / res)),
            static_cast<int>(std::lround((p.z - map.bounds.min.z) / res))};
  }

  std::int64_t encode(const State& s) const {
    return (static_cast<std::int64_t>(s[0]) << 42) | (static_cast<std::int64_t>(s[1]) << 21) |
           static_cast<std::int64_t>(s[2] - nz0);
  }

  bool valid(const State& s) const {
    if (s[0] < 0 || s[0] > nx || s[1] < 0 || s[1] > ny || s[2] < nz0 || s[2] > nz1)
      return false;
    return signed_distance(world(s), map) >= clearance;
  }

  void successors(const State& s, std::vector<std::pair<State, double>>& out) const {
    out.clear();
    const Point3 from = world(s);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const State t{s[0] + dx, s[1] + dy, s[2] + dz};
          if (!valid(t)) continue;
          const Point3 to = world(t);
          if (!segment_clear(from, to, map, clearance, res)) continue;
          out.emplace_back(t, distance(from, to) * inflation_factor(to, inflations));
        }
  }

  double heuristic(const State& s) const { return distance(world(s), goal_pos); }
  bool is_goal(const State& s) const { return encode(s) == goal_key; }
};

// Surface-plane state lattice (x, y, theta) for the nonholonomic ASV.
// Primitives: keep heading, or turn one heading increment left/right; each
// moves one grid-cell chord along the new heading, snapped back to the grid.
struct AsvLattice {
  const ObstacleMap& map;
  double res;
  double clearance;
  int heading_count;
  double max_turn;
  std::vector<CostInflation> inflations;
  int nx, ny;
  Point3 goal_pos;

  using State = std::array<int, 3>;  // ix, iy, heading index

  AsvLattice(const ObstacleMap& m, double r, double cl, int hc, double mt,
             std::vector<CostInflation> inf)
      : map(m), res(r), clearance(cl), heading_count(hc), max_turn(mt),
        inflations(std::move(inf)) {
    nx = static_cast<int>(std::floor((m.bounds.max.x - m.bounds.min.x) / res + 1e-9));
    ny = static_cast<int>(std::floor((m.bounds.max.y - m.bounds.min.y) / res + 1e-9));
  }

  double heading(int k) const { return 2.0 * std::numbers::pi * k / heading_count; }

  Point3 world(const State& s) const {
    return {map.bounds.min.x + res * s[0], map.bounds.min.y + res * s[1], map.surface_z};
  }

  State snap(const Point3& p, double theta) const {
    const int k = static_cast<int>(std::lround(wrap_angle(theta) * heading_count /
                                               (2.0 * std::numbers::pi))) %
                  heading_count;
    return {static_cast<int>(std::lround((p.x - map.bounds.min.x) / res)),
            static_cast<int>(std::lround((p.y - map.bounds.min.y) / res)), k};
  }

  std::int64_t encode(const State& s) const {
    return (static_cast<std::int64_t>(s[0]) << 32) | (static_cast<std::int64_t>(s[1]) << 8) |
           static_cast<std::int64_t>(s[2]);
  }

  bool valid(const State& s) const {
    if (s[0] < 0 || s[0] > nx || s[1] < 0 || s[1] > ny) return false;
    return signed_distance(world(s), map) >= clearance;
  }

  void successors(const State& s, std::vector<std::pair<State, double>>& out) const {
    out.clear();
    const Point3 from = world(s);
    const double turn_step = 2.0 * std::numbers::pi / heading_count;
    for (int dth : {0, 1, -1}) {
      if (dth != 0 && turn_step > max_turn + 1e-9) continue;
      const int k = ((s[2] + dth) % heading_count + heading_count) % heading_count;
      const double th = heading(k);
      const Point3 target{from.x + res * std::cos(th), from.y + res * std::sin(th),
                          map.surface_z};
      State t = snap(target, th);
      t[2] = k;
      if (t[0] == s[0] && t[1] == s[1]) continue;
      if (!valid(t)) continue;
      const Point3 to = world(t);
      if (!segment_clear(from, to, map, clearance, res)) continue;
      out.emplace_back(t, distance(from, to) * inflation_factor(to, inflations));
    }
  }

  // Goal is a position disc (one cell), heading free; the heuristic stays
  // admissible and consistent for that region.
  double heuristic(const State& s) const {
    return std::max(0.0, distance(world(s), goal_pos) - res);
  }
  bool is_goal(const State& s) const { return distance(world(s), goal_pos) <= res + 1e-9; }
};

// Deterministic A*: ties broken on lower f, then lower h, then the packed
// lexicographic state key.
template <class Graph>
std::optional<std::vector<typename Graph::State>> astar(const Graph& g,
                                                        typename Graph::State start) {
  using State = typename Graph::State;
  struct Entry {
    double f, h;
    std::int64_t key;
    State s;
  };
  const auto worse = [](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.key > b.key;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
  std::unordered_map<std::int64_t, double> g_cost;
  std::unordered_map<std::int64_t, std::int64_t> parent;
  std::unordered_map<std::int64_t, State> states;

  const std::int64_t sk = g.encode(start);
  g_cost[sk] = 0.0;
  states[sk] = start;
  open.push({g.heuristic(start), g.heuristic(start), sk, start});

  std::vector<std::pair<State, double>> succ;
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    const double cur_g = e.f - e.h;
    if (cur_g > g_cost[e.key] + 1e-12) continue;  // stale entry
    if (g.is_goal(e.s)) {
      std::vector<State> path;
      std::int64_t k = e.key;
      while (true) {
        path.push_back(states[k]);
        const auto it = parent.find(k);
        if (it == parent.end()) break;
        k = it->second;
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    g.successors(e.s, succ);
    for (const auto& [t, c] : succ) {
      const std::int64_t tk = g.encode(t);
      const double ng = cur_g + c;
      const auto it = g_cost.find(tk);
      if (it == g_cost.end() || ng < it->second - 1e-12) {
        g_cost[tk] = ng;
        parent[tk] = e.key;
        states[tk] = t;
        const double h = g.heuristic(t);
        open.push({ng + h, h, tk, t});
      }
    }
  }
  return std::nullopt;
}

// Plain Dijkstra cost over the same graph; used by tests as an oracle and by
// nothing on the production path.
template <class Graph>
std::optional<double> dijkstra_cost(const Graph& g, typename Graph::State start) {
  struct NoHeuristic : Graph {
    explicit NoHeuristic(const Graph& g) : Graph(g) {}
    double heuristic(const typename Graph::State&) const { return 0.0; }
  };
  NoHeuristic plain(g);
  const auto path = astar(plain, start);
  if (!path) return std::nullopt;
  double cost = 0.0;
  std::vector<std::pair<typename Graph::State, double>> succ;
  for (std::size_t i = 1; i < path->size(); ++i) {
    plain.successors((*path)[i - 1], succ);
    for (const auto& [t, c] : succ)
      if (plain.encode(t) == plain.encode((*path)[i])) {
        cost += c;
        break;
      }
  }
  return cost;
}

}  // namespace detail

// A* for the first-planned vehicle. AUV: 26-connected 3D grid, Euclidean
// costs and heuristic. ASV: (x, y, theta) surface lattice with straight /
// arc-left / arc-right primitives, goal reached within one cell, heading free.
inline PlannedPath plan_leader(const VehiclePose& start, const VehiclePose& goal,
                               const ObstacleMap& map, VehicleKind kind,
                               const PlannerConfig& config,
                               const std::vector<CostInflation>& inflations = {}) {
  const double cl = config.tether.clearance;
  if (!map.contains(start.position) || !map.contains(goal.position))
    fail(ErrorClass::InvalidEndpoint, "start or goal outside workspace bounds");

  PlannedPath out;
  if (kind == VehicleKind::Auv) {
    detail::AuvGrid g(map, config.grid_resolution, cl, inflations);
    const auto s = g.snap(start.position);
    const auto t = g.snap(goal.position);
    if (!g.valid(s) || !g.valid(t))
      fail(ErrorClass::InvalidEndpoint, "start or goal violates clearance");
    g.goal_key = g.encode(t);
    g.goal_pos = g.world(t);
    const auto path = detail::astar(g, s);
    if (!path) fail(ErrorClass::NoPathFound, "auv search exhausted the open set");
    for (const auto& st : *path) out.waypoints.push_back({g.world(st), 0.0});
  } else {
    detail::AsvLattice g(map, config.grid_resolution, cl, config.heading_count,
                         config.max_turn_per_step, inflations);
    const auto s = g.snap(start.position, start.heading);
    const auto gs = g.snap(goal.position, goal.heading);
    if (!g.valid(s) || !g.valid(gs))
      fail(ErrorClass::InvalidEndpoint, "start or goal violates clearance");
    g.goal_pos = g.world(gs);
    const auto path = detail::astar(g, s);
    if (!path) fail(ErrorClass::NoPathFound, "asv search exhausted the open set");
    for (const auto& st : *path) out.waypoints.push_back({g.world(st), g.heading(st[2])});
  }
  out.total_length = path_length(out.waypoints);
  return out;
}

// Resamples a path to m waypoints; ASV headings are rebuilt from the motion
// direction, AUV headings stay zero.
inline PlannedPath resample_planned(const PlannedPath& path, int m, VehicleKind kind) {
  PlannedPath out;
  if (path.waypoints.size() == 1) {
    out.waypoints.assign(m, path.waypoints.front());
    return out;
  }
  const auto pts = resample_path(positions(path), m);
  out.waypoints.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double th = 0.0;
    if (kind == VehicleKind::Asv) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i == 0 ? 1 : i;
      const Point3 d = pts[b] - pts[a];
      th = (d.norm2d() > 1e-12) ? wrap_angle(std::atan2(d.y, d.x))
                                : (i > 0 ? out.waypoints.back().heading : path.waypoints.front().heading);
    }
    out.waypoints.push_back({pts[i], th});
  }
  out.total_length = path_length(out.waypoints);
  return out;
}

struct FollowerResult {
  PlannedPath path;
  PlannedPath resampled_leader;
  std::vector<ReplanEvent> events;
  bool stuck = false;
  std::size_t fail_index = 0;
};

// Greedy tether-constrained follower: the leader is resampled to M waypoints
// and for each leader waypoint k the follower picks the grid candidate within
// the search radius that minimizes goal distance plus a smoothness term,
// subject to clearance, segment clearance, tether feasibility and (for the
// ASV) the heading-rate limit. If the follower ends away from its goal, a
// goal-approach search is appended with the leader held at its goal.
inline FollowerResult compute_follower_path(const PlannedPath& leader,
                                            const VehiclePose& follower_start,
                                            const VehiclePose& follower_goal,
                                            VehicleKind kind, const TetherModel& tether,
                                            const ObstacleMap& map,
                                            const PlannerConfig& cfg) {
  if (leader.waypoints.empty()) fail(ErrorClass::DomainError, "empty leader path");
  const double res = cfg.grid_resolution;
  const VehicleKind leader_kind = kind == VehicleKind::Asv ? VehicleKind::Auv : VehicleKind::Asv;
  const int m = std::max<int>(static_cast<int>(leader.waypoints.size()),
                              static_cast<int>(std::ceil(leader.total_length / res)) + 1);

  FollowerResult fr;
  fr.resampled_leader = resample_planned(leader, m, leader_kind);

  if (!tether_feasible(fr.resampled_leader.waypoints.front().position,
                       follower_start.position, tether, map))
    fail(ErrorClass::InfeasibleAtStart, "tether infeasible at the start pair");

  const double cl = tether.clearance;
  const double radius = cfg.follower_search_radius;
  const int span = static_cast<int>(std::ceil(radius / res));
  const Point3 origin = map.bounds.min;

  fr.path.waypoints.push_back(follower_start);
  for (int k = 1; k < m; ++k) {
    const VehiclePose& prev = fr.path.waypoints.back();
    const Point3 lead = fr.resampled_leader.waypoints[k].position;

    bool found = false;
    VehiclePose best;
    double best_cost = 0.0;
    std::array<long, 3> best_key{};

    const auto consider = [&](const Point3& cand, const std::array<long, 3>& key) {
      if (distance(cand, prev.position) > radius + 1e-9) return;
      if (!map.contains(cand)) return;
      double th = prev.heading;
      if (kind == VehicleKind::Asv) {
        const Point3 d = cand - prev.position;
        if (d.norm2d() > 1e-12) {
          th = wrap_angle(std::atan2(d.y, d.x));
          if (std::abs(heading_delta(prev.heading, th)) > cfg.max_turn_per_step + 1e-9)
            return;
        }
      }
      if (signed_distance(cand, map) < cl) return;
      if (!segment_clear(prev.position, cand, map, cl, res)) return;
      if (!tether_feasible(lead, cand, tether, map)) return;
      const double cost = distance(cand, follower_goal.position) +
                          cfg.smoothness_weight * distance(cand, prev.position);
      if (!found || cost < best_cost - 1e-12 ||
          (std::abs(cost - best_cost) <= 1e-12 && key < best_key)) {
        found = true;
        best_cost = cost;
        best = {cand, th};
        best_key = key;
      }
    };

    // Dwell candidate first, then the grid window around the previous waypoint.
    consider(prev.position, {std::numeric_limits<long>::max(), 0, 0});
    const long ix0 = std::lround((prev.position.x - origin.x) / res);
    const long iy0 = std::lround((prev.position.y - origin.y) / res);
    if (kind == VehicleKind::Asv) {
      for (long ix = ix0 - span; ix <= ix0 + span; ++ix)
        for (long iy = iy0 - span; iy <= iy0 + span; ++iy)
          consider({origin.x + res * ix, origin.y + res * iy, map.surface_z}, {ix, iy, 0});
    } else {
      const long iz0 = std::lround((prev.position.z - origin.z) / res);
      for (long ix = ix0 - span; ix <= ix0 + span; ++ix)
        for (long iy = iy0 - span; iy <= iy0 + span; ++iy)
          for (long iz = iz0 - span; iz <= iz0 + span; ++iz) {
            const double z = origin.z + res * iz;
            if (z < map.seabed_z - 1e-9 || z > map.surface_z + 1e-9) continue;
            consider({origin.x + res * ix, origin.y + res * iy, z}, {ix, iy, iz});
          }
    }

    if (!found) {
      fr.stuck = true;
      fr.fail_index = static_cast<std::size_t>(k);
      fr.events.push_back({fr.fail_index, lead});
      fr.path.total_length = path_length(fr.path.waypoints);
      return fr;
    }
    fr.path.waypoints.push_back(best);
  }

  // Goal approach with the leader parked at its final waypoint.
  const Point3 leader_goal = fr.resampled_leader.waypoints.back().position;
  if (distance(fr.path.waypoints.back().position, follower_goal.position) > res + 1e-9) {
    const PlannedPath approach =
        plan_leader(fr.path.waypoints.back(), follower_goal, map, kind, cfg);
    for (std::size_t i = 1; i < approach.waypoints.size(); ++i) {
      if (!tether_feasible(leader_goal, approach.waypoints[i].position, tether, map)) {
        fr.stuck = true;
        fr.fail_index = static_cast<std::size_t>(m - 1);
        fr.events.push_back({fr.fail_index, leader_goal});
        fr.path.total_length = path_length(fr.path.waypoints);
        return fr;
      }
      fr.path.waypoints.push_back(approach.waypoints[i]);
    }
  }
  fr.path.total_length = path_length(fr.path.waypoints);
  return fr;
}

struct PairEndpoints {
  VehiclePose asv_start, asv_goal;
  VehiclePose auv_start, auv_goal;
};

// Sequential leader/follower planning with cost-inflation replanning. When
// the follower gets stuck at leader index k, the leader edge costs around
// that waypoint are inflated x10 within 2*resolution and the leader is
// re-planned from the last mutually feasible waypoint pair.
inline PlanResult plan_pair(const PairEndpoints& ep, const ObstacleMap& map,
                            const PlannerConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const VehicleKind leader_kind = cfg.first_robot;
  const VehicleKind follower_kind =
      leader_kind == VehicleKind::Asv ? VehicleKind::Auv : VehicleKind::Asv;
  const VehiclePose leader_start = leader_kind == VehicleKind::Asv ? ep.asv_start : ep.auv_start;
  const VehiclePose leader_goal = leader_kind == VehicleKind::Asv ? ep.asv_goal : ep.auv_goal;
  const VehiclePose follower_start =
      follower_kind == VehicleKind::Asv ? ep.asv_start : ep.auv_start;
  const VehiclePose follower_goal = follower_kind == VehicleKind::Asv ? ep.asv_goal : ep.auv_goal;

  std::vector<CostInflation> zones;
  std::vector<VehiclePose> prefix;
  VehiclePose cur_start = leader_start;
  int replans = 0;
  double leader_time = 0.0;
  double follower_time = 0.0;
  FollowerResult fr;

  while (true) {
    const auto t0 = clock::now();
    PlannedPath suffix = plan_leader(cur_start, leader_goal, map, leader_kind, cfg, zones);
    leader_time += std::chrono::duration<double>(clock::now() - t0).count();

    PlannedPath full;
    full.waypoints = prefix;
    for (std::size_t i = 0; i < suffix.waypoints.size(); ++i) {
      if (!full.waypoints.empty() && i == 0 &&
          distance(full.waypoints.back().position, suffix.waypoints[i].position) < 1e-9)
        continue;
      full.waypoints.push_back(suffix.waypoints[i]);
    }
    full.total_length = path_length(full.waypoints);

    const auto t1 = clock::now();
    fr = compute_follower_path(full, follower_start, follower_goal, follower_kind,
                               cfg.tether, map, cfg);
    follower_time += std::chrono::duration<double>(clock::now() - t1).count();
    if (!fr.stuck) break;

    if (replans >= cfg.replanning_limit)
      fail(ErrorClass::FollowerStuck, "replanning limit exhausted");
    ++replans;
    zones.push_back({fr.resampled_leader.waypoints[fr.fail_index].position,
                     2.0 * cfg.grid_resolution, 10.0});
    const std::size_t k0 = fr.fail_index > 0 ? fr.fail_index - 1 : 0;
    prefix.assign(fr.resampled_leader.waypoints.begin(),
                  fr.resampled_leader.waypoints.begin() + k0 + 1);
    cur_start = fr.resampled_leader.waypoints[k0];
  }

  // Pad the leader with its goal pose so waypoint counts stay index-paired.
  PlannedPath leader_final = fr.resampled_leader;
  while (leader_final.waypoints.size() < fr.path.waypoints.size())
    leader_final.waypoints.push_back(leader_final.waypoints.back());
  leader_final.total_length = path_length(leader_final.waypoints);

  PlanResult result;
  result.replan_count = replans;
  if (leader_kind == VehicleKind::Asv) {
    result.asv_path = leader_final;
    result.auv_path = fr.path;
    result.planning_time_asv = leader_time;
    result.planning_time_auv = follower_time;
  } else {
    result.auv_path = leader_final;
    result.asv_path = fr.path;
    result.planning_time_auv = leader_time;
    result.planning_time_asv = follower_time;
  }

  // Post-hoc feasibility audit and per-waypoint tether shapes.
  result.tether_shapes.reserve(result.asv_path.waypoints.size());
  for (std::size_t i = 0; i < result.asv_path.waypoints.size(); ++i) {
    const Point3 a = result.asv_path.waypoints[i].position;
    const Point3 b = result.auv_path.waypoints[i].position;
    const auto check = tether_feasible(a, b, cfg.tether, map);
    if (!check)
      fail(ErrorClass::InternalInconsistency,
           std::string("waypoint pair lost tether feasibility: ") + to_string(check.clause));
    result.tether_shapes.push_back(hang_tether(a, b, cfg.tether));
  }
  return result;
}

}  // namespace tetherplan
