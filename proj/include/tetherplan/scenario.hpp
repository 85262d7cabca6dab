#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tetherplan/error.hpp"
#include "tetherplan/geometry.hpp"
#include "tetherplan/planner.hpp"
#include "tetherplan/sync_opt.hpp"
#include "tetherplan/tether.hpp"

namespace tetherplan {

using Json = nlohmann::ordered_json;

enum class ScenarioKind { ObstacleFree, SeabedStructure, SurfacePiercing, Combined };

inline char kind_letter(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::ObstacleFree: return 'a';
    case ScenarioKind::SeabedStructure: return 'b';
    case ScenarioKind::SurfacePiercing: return 'c';
    case ScenarioKind::Combined: return 'd';
  }
  return '?';
}

inline ScenarioKind kind_from_letter(char c) {
  switch (c) {
    case 'a': return ScenarioKind::ObstacleFree;
    case 'b': return ScenarioKind::SeabedStructure;
    case 'c': return ScenarioKind::SurfacePiercing;
    case 'd': return ScenarioKind::Combined;
  }
  fail(ErrorClass::ParseError, std::string("unknown scenario kind '") + c + "'");
}

struct Scenario {
  ObstacleMap map;
  VehiclePose asv_start, asv_goal;
  VehiclePose auv_start, auv_goal;
  TetherModel tether;
  KinodynamicLimits asv_limits{2.0, 0.5};
  KinodynamicLimits auv_limits{1.5, 0.5};
  PlannerConfig planner;
  OptimizationConfig optimization;
  std::uint64_t seed = 0;
  VehicleKind first_robot = VehicleKind::Asv;
};

// ---------------------------------------------------------------------------
// JSON serialization. Field names carry SI units.

namespace detail {

inline Json point_json(const Point3& p) { return Json::array({p.x, p.y, p.z}); }

inline Point3 point_from(const Json& j, const char* field) {
  if (!j.is_array() || j.size() != 3)
    fail(ErrorClass::ParseError, std::string(field) + ": expected [x, y, z]");
  Point3 p{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  if (!p.finite()) fail(ErrorClass::ParseError, std::string(field) + ": non-finite value");
  return p;
}

template <class T>
T get_field(const Json& j, const char* field) {
  if (!j.contains(field))
    fail(ErrorClass::ParseError, std::string("missing field '") + field + "'");
  try {
    return j.at(field).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorClass::ParseError, std::string("field '") + field + "': " + e.what());
  }
}

}  // namespace detail

inline Json to_json(const Scenario& sc) {
  Json j;
  j["workspace"] = {{"min_m", detail::point_json(sc.map.bounds.min)},
                    {"max_m", detail::point_json(sc.map.bounds.max)}};
  j["surface_z_m"] = sc.map.surface_z;
  j["seabed_z_m"] = sc.map.seabed_z;

  Json obstacles = Json::array();
  for (const auto& obs : sc.map.obstacles) {
    Json o;
    if (const auto* s = std::get_if<Sphere>(&obs)) {
      o["type"] = "sphere";
      o["center_m"] = detail::point_json(s->center);
      o["radius_m"] = s->radius;
    } else if (const auto* b = std::get_if<Box>(&obs)) {
      o["type"] = "box";
      o["min_m"] = detail::point_json(b->min);
      o["max_m"] = detail::point_json(b->max);
    } else if (const auto* c = std::get_if<Cylinder>(&obs)) {
      o["type"] = "cylinder";
      o["base_m"] = detail::point_json(c->base);
      o["radius_m"] = c->radius;
      o["height_m"] = c->height;
    }
    obstacles.push_back(o);
  }
  j["obstacles"] = obstacles;

  j["asv_start_m"] = detail::point_json(sc.asv_start.position);
  j["asv_start_heading_rad"] = sc.asv_start.heading;
  j["asv_goal_m"] = detail::point_json(sc.asv_goal.position);
  j["asv_goal_heading_rad"] = sc.asv_goal.heading;
  j["auv_start_m"] = detail::point_json(sc.auv_start.position);
  j["auv_goal_m"] = detail::point_json(sc.auv_goal.position);

  j["tether"] = {{"length_m", sc.tether.length},
                 {"lumped_mass_count", sc.tether.lumped_mass_count},
                 {"slack_margin", sc.tether.slack_margin},
                 {"clearance_m", sc.tether.clearance}};
  j["asv_limits"] = {{"v_max_mps", sc.asv_limits.v_max}, {"a_max_mps2", sc.asv_limits.a_max}};
  j["auv_limits"] = {{"v_max_mps", sc.auv_limits.v_max}, {"a_max_mps2", sc.auv_limits.a_max}};
  j["planner"] = {{"grid_resolution_m", sc.planner.grid_resolution},
                  {"heading_count", sc.planner.heading_count},
                  {"max_turn_per_step_rad", sc.planner.max_turn_per_step},
                  {"follower_search_radius_m", sc.planner.follower_search_radius},
                  {"replanning_limit", sc.planner.replanning_limit},
                  {"smoothness_weight", sc.planner.smoothness_weight}};
  j["optimization"] = {{"alpha", sc.optimization.alpha},
                       {"beta", sc.optimization.beta},
                       {"penalty_weight", sc.optimization.penalty_weight},
                       {"step_size", sc.optimization.step_size},
                       {"max_iterations", sc.optimization.max_iterations},
                       {"convergence_tolerance", sc.optimization.convergence_tolerance},
                       {"samples_per_segment", sc.optimization.samples_per_segment}};
  j["seed"] = sc.seed;
  j["first_robot"] = to_string(sc.first_robot);
  return j;
}

inline Scenario scenario_from_json(const Json& j) {
  Scenario sc;
  const Json& ws = j.contains("workspace") ? j.at("workspace") : Json();
  if (ws.is_null()) fail(ErrorClass::ParseError, "missing field 'workspace'");
  sc.map.bounds.min = detail::point_from(detail::get_field<Json>(ws, "min_m"), "workspace.min_m");
  sc.map.bounds.max = detail::point_from(detail::get_field<Json>(ws, "max_m"), "workspace.max_m");
  sc.map.surface_z = detail::get_field<double>(j, "surface_z_m");
  sc.map.seabed_z = detail::get_field<double>(j, "seabed_z_m");
  if (sc.map.seabed_z >= sc.map.surface_z)
    fail(ErrorClass::ParseError, "seabed_z_m must lie below surface_z_m");

  for (const auto& o : detail::get_field<Json>(j, "obstacles")) {
    const auto type = detail::get_field<std::string>(o, "type");
    if (type == "sphere") {
      Sphere s{detail::point_from(detail::get_field<Json>(o, "center_m"), "center_m"),
               detail::get_field<double>(o, "radius_m")};
      if (s.radius <= 0.0) fail(ErrorClass::ParseError, "sphere radius_m must be > 0");
      sc.map.obstacles.push_back(s);
    } else if (type == "box") {
      Box b{detail::point_from(detail::get_field<Json>(o, "min_m"), "min_m"),
            detail::point_from(detail::get_field<Json>(o, "max_m"), "max_m")};
      if (!(b.min.x < b.max.x && b.min.y < b.max.y && b.min.z < b.max.z))
        fail(ErrorClass::ParseError, "box min_m must be componentwise below max_m");
      sc.map.obstacles.push_back(b);
    } else if (type == "cylinder") {
      Cylinder c{detail::point_from(detail::get_field<Json>(o, "base_m"), "base_m"),
                 detail::get_field<double>(o, "radius_m"),
                 detail::get_field<double>(o, "height_m")};
      if (c.radius <= 0.0 || c.height <= 0.0)
        fail(ErrorClass::ParseError, "cylinder radius_m and height_m must be > 0");
      sc.map.obstacles.push_back(c);
    } else {
      fail(ErrorClass::ParseError, "unknown obstacle type '" + type + "'");
    }
  }

  sc.asv_start.position = detail::point_from(detail::get_field<Json>(j, "asv_start_m"), "asv_start_m");
  sc.asv_start.heading = j.value("asv_start_heading_rad", 0.0);
  sc.asv_goal.position = detail::point_from(detail::get_field<Json>(j, "asv_goal_m"), "asv_goal_m");
  sc.asv_goal.heading = j.value("asv_goal_heading_rad", 0.0);
  sc.auv_start.position = detail::point_from(detail::get_field<Json>(j, "auv_start_m"), "auv_start_m");
  sc.auv_goal.position = detail::point_from(detail::get_field<Json>(j, "auv_goal_m"), "auv_goal_m");

  const Json t = detail::get_field<Json>(j, "tether");
  sc.tether.length = detail::get_field<double>(t, "length_m");
  sc.tether.lumped_mass_count = detail::get_field<int>(t, "lumped_mass_count");
  sc.tether.slack_margin = detail::get_field<double>(t, "slack_margin");
  sc.tether.clearance = detail::get_field<double>(t, "clearance_m");
  if (sc.tether.length <= 0.0 || sc.tether.lumped_mass_count < 2 ||
      sc.tether.slack_margin < 0.0 || sc.tether.slack_margin >= 1.0)
    fail(ErrorClass::ParseError, "invalid tether block");

  const Json al = detail::get_field<Json>(j, "asv_limits");
  sc.asv_limits = {detail::get_field<double>(al, "v_max_mps"),
                   detail::get_field<double>(al, "a_max_mps2")};
  const Json ul = detail::get_field<Json>(j, "auv_limits");
  sc.auv_limits = {detail::get_field<double>(ul, "v_max_mps"),
                   detail::get_field<double>(ul, "a_max_mps2")};
  if (sc.asv_limits.v_max <= 0.0 || sc.asv_limits.a_max <= 0.0 ||
      sc.auv_limits.v_max <= 0.0 || sc.auv_limits.a_max <= 0.0)
    fail(ErrorClass::ParseError, "vehicle limits must be positive");

  const Json p = detail::get_field<Json>(j, "planner");
  sc.planner.grid_resolution = detail::get_field<double>(p, "grid_resolution_m");
  sc.planner.heading_count = detail::get_field<int>(p, "heading_count");
  sc.planner.max_turn_per_step = detail::get_field<double>(p, "max_turn_per_step_rad");
  sc.planner.follower_search_radius = detail::get_field<double>(p, "follower_search_radius_m");
  sc.planner.replanning_limit = detail::get_field<int>(p, "replanning_limit");
  sc.planner.smoothness_weight = detail::get_field<double>(p, "smoothness_weight");
  if (sc.planner.grid_resolution <= 0.0 || sc.planner.heading_count < 4 ||
      sc.planner.replanning_limit < 0)
    fail(ErrorClass::ParseError, "invalid planner block");
  sc.planner.tether = sc.tether;

  const Json oc = detail::get_field<Json>(j, "optimization");
  sc.optimization.alpha = detail::get_field<double>(oc, "alpha");
  sc.optimization.beta = detail::get_field<double>(oc, "beta");
  sc.optimization.penalty_weight = detail::get_field<double>(oc, "penalty_weight");
  sc.optimization.step_size = detail::get_field<double>(oc, "step_size");
  sc.optimization.max_iterations = detail::get_field<int>(oc, "max_iterations");
  sc.optimization.convergence_tolerance = detail::get_field<double>(oc, "convergence_tolerance");
  sc.optimization.samples_per_segment = detail::get_field<int>(oc, "samples_per_segment");
  if (sc.optimization.alpha < 0.0 || sc.optimization.beta < 0.0 ||
      sc.optimization.max_iterations < 1)
    fail(ErrorClass::ParseError, "invalid optimization block");

  sc.seed = detail::get_field<std::uint64_t>(j, "seed");
  const auto fr = detail::get_field<std::string>(j, "first_robot");
  if (fr == "asv")
    sc.first_robot = VehicleKind::Asv;
  else if (fr == "auv")
    sc.first_robot = VehicleKind::Auv;
  else
    fail(ErrorClass::ParseError, "first_robot must be 'asv' or 'auv'");
  sc.planner.first_robot = sc.first_robot;
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorClass::ParseError, "cannot open scenario file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorClass::ParseError, path + ": " + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorClass::ParseError, "cannot write scenario file " + path);
  out << to_json(sc).dump(2) << "\n";
}

// Start/goal placement sanity plus initial and final tether feasibility.
inline void validate_scenario(const Scenario& sc) {
  const auto check_endpoint = [&](const Point3& p, const char* name, bool surface) {
    if (!sc.map.contains(p))
      fail(ErrorClass::InvalidEndpoint, std::string(name) + " outside workspace");
    if (surface && std::abs(p.z - sc.map.surface_z) > 1e-9)
      fail(ErrorClass::InvalidEndpoint, std::string(name) + " must sit on the surface plane");
    if (signed_distance(p, sc.map) < sc.tether.clearance)
      fail(ErrorClass::InvalidEndpoint, std::string(name) + " violates clearance");
  };
  check_endpoint(sc.asv_start.position, "asv_start", true);
  check_endpoint(sc.asv_goal.position, "asv_goal", true);
  check_endpoint(sc.auv_start.position, "auv_start", false);
  check_endpoint(sc.auv_goal.position, "auv_goal", false);

  const auto start = tether_feasible(sc.asv_start.position, sc.auv_start.position,
                                     sc.tether, sc.map);
  if (!start)
    fail(ErrorClass::InfeasibleAtStart,
         std::string("start pair infeasible: ") + to_string(start.clause));
  const auto goal = tether_feasible(sc.asv_goal.position, sc.auv_goal.position,
                                    sc.tether, sc.map);
  if (!goal)
    fail(goal.clause == TetherClause::Taut ? ErrorClass::TautTether
                                           : ErrorClass::InfeasibleGeometry,
         std::string("goal pair infeasible: ") + to_string(goal.clause));
}

// ---------------------------------------------------------------------------
// Built-in scenario generators. Fully determined by (kind, seed).

inline Scenario generate_scenario(ScenarioKind kind, std::uint64_t seed,
                                  const Box& bounds = {{0, 0, -10}, {20, 20, 0}}) {
  Scenario sc;
  sc.seed = seed;
  sc.map.bounds = bounds;
  sc.map.surface_z = bounds.max.z;
  sc.map.seabed_z = bounds.min.z;
  sc.tether = TetherModel{7.0, 51, 0.1, 0.2};
  sc.planner.tether = sc.tether;

  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(kind));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const double margin = 1.5;
  const double x0 = bounds.min.x + margin, x1 = bounds.max.x - margin;
  const double y0 = bounds.min.y + margin, y1 = bounds.max.y - margin;

  for (int attempt = 0; attempt < 1000; ++attempt) {
    sc.map.obstacles.clear();

    // AUV endpoints in opposite x bands, mid-depth.
    const Point3 auv_start{uniform(x0, x0 + 3.0), uniform(y0, y1), uniform(-4.5, -3.0)};
    const Point3 auv_goal{uniform(x1 - 3.0, x1), uniform(y0, y1), uniform(-4.5, -3.0)};

    // ASV endpoints near-above the AUV, inside the slack chord budget.
    const auto place_asv = [&](const Point3& auv) {
      const double depth = sc.map.surface_z - auv.z;
      const double reach =
          0.7 * std::sqrt(std::max(sc.tether.max_chord() * sc.tether.max_chord() -
                                       depth * depth, 0.25));
      const double ang = uniform(0.0, 2.0 * std::numbers::pi);
      const double rad = uniform(0.0, reach);
      Point3 p{auv.x + rad * std::cos(ang), auv.y + rad * std::sin(ang), sc.map.surface_z};
      p.x = std::clamp(p.x, x0, x1);
      p.y = std::clamp(p.y, y0, y1);
      return p;
    };
    const Point3 asv_start = place_asv(auv_start);
    const Point3 asv_goal = place_asv(auv_goal);

    const Point3 mid = lerp(auv_start, auv_goal, 0.5);
    if (kind == ScenarioKind::SeabedStructure || kind == ScenarioKind::Combined) {
      // A cluster of seabed boxes blocking the direct underwater route.
      const int count = 2 + static_cast<int>(uniform(0.0, 3.0));
      for (int i = 0; i < count; ++i) {
        const double cx = mid.x + uniform(-2.0, 2.0);
        const double cy = mid.y + uniform(-2.0, 2.0);
        const double sx = uniform(0.8, 1.8), sy = uniform(0.8, 1.8);
        const double height = uniform(2.0, 3.5);
        Box b{{cx - sx, cy - sy, sc.map.seabed_z},
              {cx + sx, cy + sy, sc.map.seabed_z + height}};
        b.min.x = std::max(b.min.x, bounds.min.x);
        b.min.y = std::max(b.min.y, bounds.min.y);
        b.max.x = std::min(b.max.x, bounds.max.x);
        b.max.y = std::min(b.max.y, bounds.max.y);
        sc.map.obstacles.push_back(b);
      }
    }
    if (kind == ScenarioKind::SurfacePiercing || kind == ScenarioKind::Combined) {
      // A full-column cylinder piercing the surface, offset from the midline.
      const Cylinder c{{mid.x + uniform(-2.0, 2.0), mid.y + uniform(-2.0, 2.0),
                        sc.map.seabed_z},
                       uniform(1.0, 1.8),
                       sc.map.surface_z - sc.map.seabed_z};

      // A full column is impassable for the tether, so both vehicles must
      // round it on the same side. Reject layouts where the two direct
      // corridors would dodge it in opposite directions (or where the column
      // sits so close to a corridor's centerline that the side is a toss-up):
      // the greedy follower cannot recover from a wrong-side commitment.
      const auto side_offset = [&](const Point3& a, const Point3& b) {
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double len = std::hypot(dx, dy);
        if (len < 1e-9) return std::pair<double, double>{0.0, 1e9};
        const double cross = dx * (c.base.y - a.y) - dy * (c.base.x - a.x);
        const double t = std::clamp(
            ((c.base.x - a.x) * dx + (c.base.y - a.y) * dy) / (len * len), 0.0, 1.0);
        const double d = std::hypot(c.base.x - (a.x + t * dx), c.base.y - (a.y + t * dy));
        return std::pair<double, double>{cross / len, d};
      };
      const auto [off_asv, dist_asv] = side_offset(asv_start, asv_goal);
      const auto [off_auv, dist_auv] = side_offset(auv_start, auv_goal);
      const double influence = c.radius + sc.tether.clearance + 0.5;
      if (dist_asv < influence || dist_auv < influence) {
        if (std::abs(off_asv) < 0.3 || std::abs(off_auv) < 0.3) continue;
        if (off_asv * off_auv < 0.0) continue;
      }
      sc.map.obstacles.push_back(c);
    }

    sc.asv_start = {asv_start, 0.0};
    sc.asv_goal = {asv_goal, 0.0};
    sc.auv_start = {auv_start, 0.0};
    sc.auv_goal = {auv_goal, 0.0};
    const Point3 d = asv_goal - asv_start;
    if (d.norm2d() > 1e-9) {
      sc.asv_start.heading = wrap_angle(std::atan2(d.y, d.x));
      sc.asv_goal.heading = sc.asv_start.heading;
    }

    // Grid snapping can shift an endpoint by up to half a cell and the ASV
    // lattice needs a valid forward cell at the start heading, so demand a
    // margin beyond the bare clearance before accepting the sample.
    const double res = sc.planner.grid_resolution;
    const double cl = sc.tether.clearance;
    if (signed_distance(asv_start, sc.map) < cl + 2.0 * res ||
        signed_distance(asv_goal, sc.map) < cl + 2.0 * res ||
        signed_distance(auv_start, sc.map) < cl + res ||
        signed_distance(auv_goal, sc.map) < cl + res)
      continue;

    try {
      validate_scenario(sc);
      return sc;
    } catch (const Error&) {
      continue;  // resample
    }
  }
  fail(ErrorClass::GenerationFailed, "could not sample a valid scenario in 1000 attempts");
}

}  // namespace tetherplan
