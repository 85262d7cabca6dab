#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tetherplan/error.hpp"
#include "tetherplan/geometry.hpp"

namespace tetherplan {

struct TetherModel {
  double length = 10.0;        // fixed cable length l [m]
  int lumped_mass_count = 51;  // N discretization points along the cable
  double slack_margin = 0.1;   // chord must satisfy chord <= l * (1 - slack_margin)
  double clearance = 0.2;      // minimum obstacle distance for every lumped mass [m]

  double max_chord() const { return length * (1.0 - slack_margin); }
};

struct TetherShape {
  std::vector<Point3> points;      // lumped masses, endpoints included
  double catenary_constant = 0.0;  // a; 0 marks the degenerate vertical branch
  double vertical_offset = 0.0;    // c in z(u) = a*cosh((u - u_v)/a) + c
  double arc_length = 0.0;         // cable length the shape was hung with

  Point3 lowest_point() const {
    Point3 best = points.front();
    for (const auto& p : points)
      if (p.z < best.z) best = p;
    return best;
  }
};

// Symmetric catenary between two equal-height endpoints:
//   x,y linear in t, z(t) = a*cosh(d*(t-0.5)/a) + z0 - a*cosh(d/(2a)),
// so z(0) = z(1) = z0.
inline Point3 catenary_point(const Point3& p1, const Point3& p2, double a, double z0,
                             double t) {
  if (a <= 0.0) fail(ErrorClass::InvalidCatenary, "catenary constant must be positive");
  const double d = planar_distance(p1, p2);
  return {p1.x + (p2.x - p1.x) * t, p1.y + (p2.y - p1.y) * t,
          a * std::cosh(d * (t - 0.5) / a) + z0 - a * std::cosh(d / (2.0 * a))};
}

// Solves 2a*sinh(d/(2a)) = l for the catenary constant a by bisection.
// The left side decreases monotonically from +inf (a -> 0) to d (a -> inf).
inline double solve_catenary_constant(double d, double l) {
  if (d <= 0.0) fail(ErrorClass::DomainError, "planar distance must be positive");
  if (l <= d) fail(ErrorClass::TautTether, "cable length must exceed planar span");

  const auto arc = [&](double a) {
    const double x = d / (2.0 * a);
    if (x > 700.0) return std::numeric_limits<double>::infinity();  // sinh overflow guard
    return 2.0 * a * std::sinh(x);
  };

  double lo = d * 1e-4;
  double hi = d * 1e4;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (arc(mid) > l)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) <= 1e-12 * hi) break;
  }
  const double a = 0.5 * (lo + hi);
  if (std::abs(arc(a) - l) > 1e-6 * l)
    fail(ErrorClass::InternalInconsistency, "catenary bisection failed to converge");
  return a;
}

namespace detail {

// N points spaced equally in arc length along the two-leg vertical polyline
// p1 -> low -> p2 (all sharing x,y). Used when the catenary plane is undefined.
inline TetherShape vertical_hang(const Point3& p1, const Point3& p2, double l, int n) {
  const double dz = std::abs(p2.z - p1.z);
  const double sag = 0.5 * (l - dz);
  const Point3 low{p1.x, p1.y, std::min(p1.z, p2.z) - sag};
  const double leg1 = p1.z - low.z;

  TetherShape shape;
  shape.arc_length = l;
  shape.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double s = l * i / (n - 1);
    if (s <= leg1)
      shape.points.push_back({p1.x, p1.y, p1.z - s});
    else
      shape.points.push_back({p1.x, p1.y, low.z + (s - leg1)});
  }
  shape.points.front() = p1;
  shape.points.back() = p2;
  return shape;
}

inline TetherShape straight_hang(const Point3& p1, const Point3& p2, double l, int n) {
  TetherShape shape;
  shape.arc_length = l;
  shape.points.reserve(n);
  for (int i = 0; i < n; ++i)
    shape.points.push_back(lerp(p1, p2, static_cast<double>(i) / (n - 1)));
  return shape;
}

}  // namespace detail

// Hangs a cable of length l between two attachment points of arbitrary
// heights. The shape lies in the vertical plane through the chord:
//   z(u) = a*cosh((u - u_v)/a) + c,  u in [0, d],
// where a solves 2a*sinh(d/(2a)) = sqrt(l^2 - dz^2) and u_v, c follow in
// closed form from the endpoint heights. Reduces to catenary_point when the
// endpoints share a height. Lumped masses are sampled at i/(N-1).
inline TetherShape hang_tether(const Point3& p1, const Point3& p2,
                               const TetherModel& tether) {
  const double l = tether.length;
  const int n = std::max(2, tether.lumped_mass_count);
  const double dz = p2.z - p1.z;
  const double chord = distance(p1, p2);

  if (l < std::abs(dz))
    fail(ErrorClass::InfeasibleGeometry, "cable shorter than endpoint height difference");
  if (chord > tether.max_chord() + 1e-12)
    fail(ErrorClass::TautTether, "chord exceeds slack-adjusted cable length");

  const double d = planar_distance(p1, p2);
  if (d < 1e-6) return detail::vertical_hang(p1, p2, l, n);

  const double l_eff = std::sqrt(std::max(l * l - dz * dz, 0.0));
  if (l_eff <= d * (1.0 + 1e-12)) return detail::straight_hang(p1, p2, l, n);

  const double a = solve_catenary_constant(d, l_eff);
  const double u_v = 0.5 * d - a * std::asinh(dz / l_eff);
  const double c = p1.z - a * std::cosh(u_v / a);

  TetherShape shape;
  shape.catenary_constant = a;
  shape.vertical_offset = c;
  shape.arc_length = l;
  shape.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    const double u = t * d;
    shape.points.push_back({p1.x + (p2.x - p1.x) * t, p1.y + (p2.y - p1.y) * t,
                            a * std::cosh((u - u_v) / a) + c});
  }
  shape.points.front() = p1;
  shape.points.back() = p2;
  return shape;
}

enum class TetherClause { Ok, Taut, Geometry, TetherCollision, Seabed };

inline const char* to_string(TetherClause c) {
  switch (c) {
    case TetherClause::Ok: return "OK";
    case TetherClause::Taut: return "TAUT";
    case TetherClause::Geometry: return "GEOMETRY";
    case TetherClause::TetherCollision: return "TETHER_COLLISION";
    case TetherClause::Seabed: return "SEABED";
  }
  return "UNKNOWN";
}

struct TetherCheck {
  bool feasible = false;
  TetherClause clause = TetherClause::Ok;
  double worst_margin = 0.0;  // most violated quantity, for diagnostics

  explicit operator bool() const { return feasible; }
};

// Feasibility predicate for an attachment pair: slack chord, a valid hang,
// clearance at every lumped mass, and nothing below the seabed.
inline TetherCheck tether_feasible(const Point3& p1, const Point3& p2,
                                   const TetherModel& tether, const ObstacleMap& map) {
  const double chord = distance(p1, p2);
  if (chord > tether.max_chord()) return {false, TetherClause::Taut, chord - tether.max_chord()};
  if (tether.length < std::abs(p2.z - p1.z))
    return {false, TetherClause::Geometry, std::abs(p2.z - p1.z) - tether.length};

  TetherShape shape;
  try {
    shape = hang_tether(p1, p2, tether);
  } catch (const Error& e) {
    return {false,
            e.cls() == ErrorClass::TautTether ? TetherClause::Taut : TetherClause::Geometry,
            0.0};
  }

  double min_sd = std::numeric_limits<double>::infinity();
  double min_z = std::numeric_limits<double>::infinity();
  for (const auto& p : shape.points) {
    min_sd = std::min(min_sd, signed_distance(p, map));
    min_z = std::min(min_z, p.z);
  }
  if (min_sd < tether.clearance)
    return {false, TetherClause::TetherCollision, tether.clearance - min_sd};
  if (min_z < map.seabed_z) return {false, TetherClause::Seabed, map.seabed_z - min_z};
  return {true, TetherClause::Ok, 0.0};
}

}  // namespace tetherplan
