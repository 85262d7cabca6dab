#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tetherplan/error.hpp"
#include "tetherplan/geometry.hpp"

namespace tetherplan {

struct BezierSegment {
  std::vector<Point3> ctrl;  // degree + 1 control points

  int degree() const { return static_cast<int>(ctrl.size()) - 1; }
};

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Bernstein basis b_n^i(t) = C(n,i) (1-t)^(n-i) t^i.
inline double bernstein(int n, int i, double t) {
  return binomial(n, i) * std::pow(1.0 - t, n - i) * std::pow(t, i);
}

// B(t) = sum_i b_n^i(t) P_i for t in [0,1].
inline Point3 bezier_point(const BezierSegment& seg, double t) {
  if (t < 0.0 || t > 1.0) fail(ErrorClass::DomainError, "bezier parameter outside [0,1]");
  const int n = seg.degree();
  Point3 p{0, 0, 0};
  for (int i = 0; i <= n; ++i) p += bernstein(n, i, t) * seg.ctrl[i];
  return p;
}

// Control points of dB/dt, a degree n-1 Bezier.
inline BezierSegment derivative_segment(const BezierSegment& seg) {
  const int n = seg.degree();
  BezierSegment d;
  if (n == 0) {
    d.ctrl = {Point3{0, 0, 0}};
    return d;
  }
  d.ctrl.reserve(n);
  for (int i = 0; i < n; ++i) d.ctrl.push_back(static_cast<double>(n) * (seg.ctrl[i + 1] - seg.ctrl[i]));
  return d;
}

inline Point3 bezier_derivative(const BezierSegment& seg, double t) {
  return bezier_point(derivative_segment(seg), t);
}

inline Point3 bezier_second_derivative(const BezierSegment& seg, double t) {
  return bezier_point(derivative_segment(derivative_segment(seg)), t);
}

// Chordal arc length with a fixed uniform subdivision; deterministic.
inline double segment_length(const BezierSegment& seg, int samples = 64) {
  double len = 0.0;
  Point3 prev = bezier_point(seg, 0.0);
  for (int i = 1; i <= samples; ++i) {
    const Point3 cur = bezier_point(seg, static_cast<double>(i) / samples);
    len += distance(prev, cur);
    prev = cur;
  }
  return len;
}

// One cubic per waypoint pair with Catmull-Rom style tangents:
//   P1 = w_j + T_j/3, P2 = w_{j+1} - T_{j+1}/3, T_j = (w_{j+1} - w_{j-1})/2,
// one-sided differences at the ends. The composite curve interpolates every
// waypoint and is C1 at the joins.
inline std::vector<BezierSegment> build_segments(const std::vector<Point3>& waypoints) {
  const std::size_t m = waypoints.size();
  if (m < 2) fail(ErrorClass::DegeneratePath, "need >= 2 waypoints to smooth");

  const auto tangent = [&](std::size_t j) -> Point3 {
    if (j == 0) return waypoints[1] - waypoints[0];
    if (j == m - 1) return waypoints[m - 1] - waypoints[m - 2];
    return (waypoints[j + 1] - waypoints[j - 1]) * 0.5;
  };

  std::vector<BezierSegment> segs;
  segs.reserve(m - 1);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    BezierSegment s;
    s.ctrl = {waypoints[j], waypoints[j] + tangent(j) / 3.0,
              waypoints[j + 1] - tangent(j + 1) / 3.0, waypoints[j + 1]};
    segs.push_back(std::move(s));
  }
  return segs;
}

// Samples the composite curve; join points appear exactly once.
inline std::vector<Point3> sample_curve(const std::vector<BezierSegment>& segments,
                                        int samples_per_segment) {
  if (samples_per_segment < 2)
    fail(ErrorClass::DomainError, "need >= 2 samples per segment");
  std::vector<Point3> out;
  out.reserve(segments.size() * (samples_per_segment - 1) + 1);
  for (std::size_t j = 0; j < segments.size(); ++j) {
    const int i0 = j == 0 ? 0 : 1;
    for (int i = i0; i < samples_per_segment; ++i)
      out.push_back(bezier_point(segments[j], static_cast<double>(i) / (samples_per_segment - 1)));
  }
  return out;
}

struct SafeSmoothResult {
  std::vector<std::vector<Point3>> waypoints;          // refined, per path
  std::vector<std::vector<BezierSegment>> segments;    // per path
  int subdivision_rounds = 0;
  int straight_fallbacks = 0;
};

// Builds smoothed segments for one or more index-paired waypoint lists and
// re-checks them against the map. A violating segment triggers a midpoint
// subdivision of that span in every path (pairing is by index, so splits must
// stay synchronized); after three rounds the offending span falls back to the
// straight chord, which the planner already verified clear.
inline SafeSmoothResult smooth_waypoints_safe(std::vector<std::vector<Point3>> paths,
                                              const ObstacleMap& map, double clearance,
                                              int check_samples = 20) {
  SafeSmoothResult res;
  const auto violating = [&](const BezierSegment& s) {
    for (int i = 0; i <= check_samples; ++i) {
      const Point3 p = bezier_point(s, static_cast<double>(i) / check_samples);
      if (signed_distance(p, map) < clearance) return true;
    }
    return false;
  };

  std::vector<std::vector<BezierSegment>> segs;
  for (int round = 0;; ++round) {
    segs.clear();
    for (const auto& wps : paths) segs.push_back(build_segments(wps));

    std::vector<std::size_t> bad;
    for (const auto& ps : segs)
      for (std::size_t j = 0; j < ps.size(); ++j)
        if (violating(ps[j]) &&
            std::find(bad.begin(), bad.end(), j) == bad.end())
          bad.push_back(j);
    if (bad.empty() || round == 3) {
      if (!bad.empty()) {
        // Straight fallback: collapse the span onto its chord.
        for (auto& ps : segs)
          for (std::size_t j : bad) {
            ps[j].ctrl[1] = lerp(ps[j].ctrl[0], ps[j].ctrl[3], 1.0 / 3.0);
            ps[j].ctrl[2] = lerp(ps[j].ctrl[0], ps[j].ctrl[3], 2.0 / 3.0);
            ++res.straight_fallbacks;
          }
      }
      res.subdivision_rounds = round;
      break;
    }

    // Insert chord midpoints so refined waypoints stay on the planned polyline.
    std::sort(bad.begin(), bad.end(), std::greater<std::size_t>());
    for (auto& wps : paths)
      for (std::size_t j : bad)
        wps.insert(wps.begin() + j + 1, lerp(wps[j], wps[j + 1], 0.5));
  }

  res.waypoints = std::move(paths);
  res.segments = std::move(segs);
  return res;
}

// ---------------------------------------------------------------------------
// Velocity smoothing

struct VelocitySpline {
  std::vector<double> times;
  std::vector<double> speeds;
  std::vector<double> second_derivs;  // natural: zero at both ends
  double min_value = 0.0;             // most negative raw value seen on a fine scan
  bool clips = false;                 // whether evaluation ever clamps below zero

  // Clamped-to-zero natural cubic spline evaluation; constant beyond the ends.
  double operator()(double t) const {
    if (times.size() == 1) return std::max(speeds[0], 0.0);
    if (t <= times.front()) return std::max(speeds.front(), 0.0);
    if (t >= times.back()) return std::max(speeds.back(), 0.0);
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double h = times[i + 1] - times[i];
    const double a = (times[i + 1] - t) / h;
    const double b = (t - times[i]) / h;
    const double v = a * speeds[i] + b * speeds[i + 1] +
                     ((a * a * a - a) * second_derivs[i] + (b * b * b - b) * second_derivs[i + 1]) *
                         h * h / 6.0;
    return std::max(v, 0.0);
  }
};

// Natural cubic spline through (time, speed) knots. Negative overshoot is
// clipped at evaluation time and flagged in the diagnostics fields.
inline VelocitySpline smooth_velocity(const std::vector<std::pair<double, double>>& knots) {
  if (knots.size() < 2) fail(ErrorClass::InvalidKnots, "need >= 2 velocity knots");
  VelocitySpline sp;
  sp.times.reserve(knots.size());
  sp.speeds.reserve(knots.size());
  for (const auto& [t, v] : knots) {
    if (!sp.times.empty() && t <= sp.times.back())
      fail(ErrorClass::InvalidKnots, "knot times must be strictly increasing");
    if (v < 0.0) fail(ErrorClass::InvalidKnots, "knot speeds must be >= 0");
    sp.times.push_back(t);
    sp.speeds.push_back(v);
  }

  const std::size_t n = sp.times.size();
  sp.second_derivs.assign(n, 0.0);
  if (n > 2) {
    // Thomas solve of the tridiagonal natural-spline system.
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = sp.times[i] - sp.times[i - 1];
      const double h1 = sp.times[i + 1] - sp.times[i];
      diag[i] = 2.0 * (h0 + h1);
      upper[i] = h1;
      rhs[i] = 6.0 * ((sp.speeds[i + 1] - sp.speeds[i]) / h1 -
                      (sp.speeds[i] - sp.speeds[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double h0 = sp.times[i] - sp.times[i - 1];
      const double w = h0 / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      sp.second_derivs[i] = (rhs[i] - upper[i] * sp.second_derivs[i + 1]) / diag[i];
      if (i == 1) break;
    }
  }

  // Diagnostics scan for negative overshoot.
  const int scan = 200;
  for (int k = 0; k <= scan; ++k) {
    const double t = sp.times.front() + (sp.times.back() - sp.times.front()) * k / scan;
    // Raw value without the clamp:
    double raw;
    {
      const auto it = std::upper_bound(sp.times.begin(), sp.times.end(), t);
      std::size_t i = it == sp.times.begin() ? 0 : static_cast<std::size_t>(it - sp.times.begin()) - 1;
      if (i + 1 >= n) i = n - 2;
      const double h = sp.times[i + 1] - sp.times[i];
      const double a = (sp.times[i + 1] - t) / h;
      const double b = (t - sp.times[i]) / h;
      raw = a * sp.speeds[i] + b * sp.speeds[i + 1] +
            ((a * a * a - a) * sp.second_derivs[i] + (b * b * b - b) * sp.second_derivs[i + 1]) *
                h * h / 6.0;
    }
    sp.min_value = std::min(sp.min_value, raw);
  }
  sp.clips = sp.min_value < 0.0;
  return sp;
}

}  // namespace tetherplan
