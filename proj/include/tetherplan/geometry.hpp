#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "tetherplan/error.hpp"

namespace tetherplan {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Point3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Point3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double norm2d() const { return std::sqrt(x * x + y * y); }

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline Point3 operator*(double s, const Point3& p) { return p * s; }

inline double distance(const Point3& a, const Point3& b) { return (a - b).norm(); }

inline double planar_distance(const Point3& a, const Point3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline Point3 lerp(const Point3& a, const Point3& b, double t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, a.z + (b.z - a.z) * t};
}

struct Sphere {
  Point3 center;
  double radius = 1.0;
};

struct Box {
  Point3 min;
  Point3 max;
};

// Axis-aligned vertical cylinder. The axis runs from base upward (+z) by height.
struct Cylinder {
  Point3 base;
  double radius = 1.0;
  double height = 1.0;
};

using ObstaclePrimitive = std::variant<Sphere, Box, Cylinder>;

struct ObstacleMap {
  Box bounds;
  std::vector<ObstaclePrimitive> obstacles;
  double surface_z = 0.0;
  double seabed_z = -10.0;

  double diagonal() const { return (bounds.max - bounds.min).norm(); }
  bool contains(const Point3& p) const {
    return p.x >= bounds.min.x && p.x <= bounds.max.x && p.y >= bounds.min.y &&
           p.y <= bounds.max.y && p.z >= bounds.min.z && p.z <= bounds.max.z;
  }
};

inline double signed_distance(const Point3& p, const Sphere& s) {
  return distance(p, s.center) - s.radius;
}

inline double signed_distance(const Point3& p, const Box& b) {
  const double qx = std::max(b.min.x - p.x, p.x - b.max.x);
  const double qy = std::max(b.min.y - p.y, p.y - b.max.y);
  const double qz = std::max(b.min.z - p.z, p.z - b.max.z);
  const double ox = std::max(qx, 0.0);
  const double oy = std::max(qy, 0.0);
  const double oz = std::max(qz, 0.0);
  const double outside = std::sqrt(ox * ox + oy * oy + oz * oz);
  const double inside = std::min(std::max({qx, qy, qz}), 0.0);
  return outside + inside;
}

inline double signed_distance(const Point3& p, const Cylinder& c) {
  const double radial = std::hypot(p.x - c.base.x, p.y - c.base.y) - c.radius;
  const double axial = std::max(c.base.z - p.z, p.z - (c.base.z + c.height));
  const double or_ = std::max(radial, 0.0);
  const double oa = std::max(axial, 0.0);
  const double outside = std::sqrt(or_ * or_ + oa * oa);
  const double inside = std::min(std::max(radial, axial), 0.0);
  return outside + inside;
}

// Positive outside all obstacles, negative inside the nearest one. With an
// empty obstacle list, returns the workspace diagonal as a finite sentinel.
inline double signed_distance(const Point3& p, const ObstacleMap& map) {
  if (map.obstacles.empty()) return map.diagonal();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& obs : map.obstacles) {
    const double d =
        std::visit([&](const auto& prim) { return signed_distance(p, prim); }, obs);
    best = std::min(best, d);
  }
  return best;
}

// Smallest geometric feature among the obstacles; used to pick a conservative
// sampling step for segment checks. Infinity for an empty map.
inline double min_feature_size(const ObstacleMap& map) {
  double f = std::numeric_limits<double>::infinity();
  for (const auto& obs : map.obstacles) {
    if (const auto* s = std::get_if<Sphere>(&obs)) {
      f = std::min(f, s->radius);
    } else if (const auto* b = std::get_if<Box>(&obs)) {
      f = std::min(f, 0.5 * std::min({b->max.x - b->min.x, b->max.y - b->min.y,
                                      b->max.z - b->min.z}));
    } else if (const auto* c = std::get_if<Cylinder>(&obs)) {
      f = std::min(f, std::min(c->radius, 0.5 * c->height));
    }
  }
  return f;
}

// True iff the whole segment keeps signed_distance >= clearance. Samples at a
// step no larger than a quarter of the smallest obstacle feature and, when
// max_step > 0, no larger than max_step. Conservative near grazing contact.
inline bool segment_clear(const Point3& p, const Point3& q, const ObstacleMap& map,
                          double clearance, double max_step = 0.0) {
  if (map.obstacles.empty()) return map.diagonal() >= clearance;
  double step = 0.25 * min_feature_size(map);
  if (max_step > 0.0) step = std::min(step, max_step);
  step = std::max(step, 1e-4);
  const double len = distance(p, q);
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int i = 0; i <= n; ++i) {
    const Point3 s = lerp(p, q, static_cast<double>(i) / n);
    if (signed_distance(s, map) < clearance) return false;
  }
  return true;
}

// Resamples a polyline to exactly m points at equal arc-length spacing.
// First and last input points are preserved exactly.
inline std::vector<Point3> resample_path(const std::vector<Point3>& waypoints, int m) {
  if (waypoints.size() < 2) fail(ErrorClass::DegeneratePath, "resample needs >= 2 waypoints");
  if (m < 2) fail(ErrorClass::DomainError, "resample needs M >= 2");

  std::vector<double> cum(waypoints.size(), 0.0);
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    cum[i] = cum[i - 1] + distance(waypoints[i - 1], waypoints[i]);
  }
  const double total = cum.back();

  std::vector<Point3> out;
  out.reserve(m);
  out.push_back(waypoints.front());
  std::size_t seg = 0;
  for (int k = 1; k < m - 1; ++k) {
    const double target = total * k / (m - 1);
    while (seg + 1 < cum.size() - 1 && cum[seg + 1] < target) ++seg;
    const double seg_len = cum[seg + 1] - cum[seg];
    const double t = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
    out.push_back(lerp(waypoints[seg], waypoints[seg + 1], t));
  }
  out.push_back(waypoints.back());
  return out;
}

inline double polyline_length(const std::vector<Point3>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  return len;
}

}  // namespace tetherplan
