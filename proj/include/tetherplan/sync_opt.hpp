#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tetherplan/error.hpp"
#include "tetherplan/geometry.hpp"
#include "tetherplan/smoothing.hpp"
#include "tetherplan/tether.hpp"

namespace tetherplan {

struct KinodynamicLimits {
  double v_max = 2.0;   // m/s
  double a_max = 0.5;   // m/s^2

  double accel_distance() const { return v_max * v_max / (2.0 * a_max); }
};

// Accelerate-from-rest traversal time over distance d: sqrt(2d/a) while still
// accelerating, then cruise at v_max. The branch switches where both formulas
// agree exactly, d = v_max^2/(2a), keeping t(d) continuous.
inline double traverse_time(double d, const KinodynamicLimits& lim) {
  if (d < 0.0) fail(ErrorClass::DomainError, "negative distance");
  const double d_accel = lim.accel_distance();
  if (d <= d_accel) return std::sqrt(2.0 * d / lim.a_max);
  return lim.v_max / lim.a_max + (d - d_accel) / lim.v_max;
}

struct SyncSchedule {
  std::vector<double> times;       // cumulative, size n+1, times[0] = 0
  std::vector<double> asv_speeds;  // V_i per segment
  std::vector<double> auv_speeds;

  double total_time() const { return times.empty() ? 0.0 : times.back(); }
  double segment_duration(std::size_t i) const { return times[i + 1] - times[i]; }
  std::size_t segment_count() const { return times.empty() ? 0 : times.size() - 1; }
};

// Per-segment synchronized times: the slower vehicle dictates each interval.
// Zero-length segments contribute a minimum dwell so times stay increasing.
inline std::vector<double> sync_times(const std::vector<double>& asv_d,
                                      const std::vector<double>& auv_d,
                                      const KinodynamicLimits& asv_lim,
                                      const KinodynamicLimits& auv_lim,
                                      double min_dwell = 1e-3) {
  if (asv_d.size() != auv_d.size())
    fail(ErrorClass::DomainError, "segment lists must have equal length");
  std::vector<double> times;
  times.reserve(asv_d.size() + 1);
  times.push_back(0.0);
  for (std::size_t i = 0; i < asv_d.size(); ++i) {
    const double dt = std::max({traverse_time(asv_d[i], asv_lim),
                                traverse_time(auv_d[i], auv_lim), min_dwell});
    times.push_back(times.back() + dt);
  }
  return times;
}

// V_i = d_i / (T_i - T_{i-1}).
inline std::vector<double> segment_speeds(const std::vector<double>& d,
                                          const std::vector<double>& times) {
  if (times.size() != d.size() + 1)
    fail(ErrorClass::DomainError, "schedule does not match segment list");
  std::vector<double> v;
  v.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double dt = times[i + 1] - times[i];
    if (dt <= 0.0 && d[i] > 0.0)
      fail(ErrorClass::InternalInconsistency, "zero interval with nonzero distance");
    v.push_back(dt > 0.0 ? d[i] / dt : 0.0);
  }
  return v;
}

inline SyncSchedule make_schedule(const std::vector<double>& asv_d,
                                  const std::vector<double>& auv_d,
                                  const KinodynamicLimits& asv_lim,
                                  const KinodynamicLimits& auv_lim,
                                  double min_dwell = 1e-3) {
  SyncSchedule s;
  s.times = sync_times(asv_d, auv_d, asv_lim, auv_lim, min_dwell);
  s.asv_speeds = segment_speeds(asv_d, s.times);
  s.auv_speeds = segment_speeds(auv_d, s.times);
  return s;
}

// ---------------------------------------------------------------------------
// Smoothness energy: exact closed form via Bernstein product integrals.

// int_0^1 b_m^i(t) b_m^j(t) dt = C(m,i) C(m,j) / ((2m+1) C(2m,i+j)).
inline double bernstein_product_integral(int m, int i, int j) {
  return binomial(m, i) * binomial(m, j) / ((2 * m + 1) * binomial(2 * m, i + j));
}

// int_0^1 |C(t)|^2 dt for a Bezier with the given control points.
inline double bezier_norm2_integral(const std::vector<Point3>& ctrl) {
  const int m = static_cast<int>(ctrl.size()) - 1;
  double s = 0.0;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      s += bernstein_product_integral(m, i, j) * ctrl[i].dot(ctrl[j]);
  return s;
}

struct EnergyComponents {
  double velocity = 0.0;
  double acceleration = 0.0;
  double total = 0.0;
};

// J = alpha * sum_i int |dB/dtau|^2 dtau + beta * sum_i int |d2B/dtau^2|^2 dtau,
// with each segment mapped affinely onto its schedule interval. The chain rule
// turns the parameter-space integrals into 1/dt and 1/dt^3 factors.
inline EnergyComponents smoothness_energy(const std::vector<BezierSegment>& segments,
                                          const std::vector<double>& durations,
                                          double alpha, double beta) {
  if (segments.size() != durations.size())
    fail(ErrorClass::DomainError, "one duration per segment required");
  EnergyComponents e;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const double dt = durations[i];
    const BezierSegment d1 = derivative_segment(segments[i]);
    e.velocity += bezier_norm2_integral(d1.ctrl) / dt;
    if (segments[i].degree() >= 2) {
      const BezierSegment d2 = derivative_segment(d1);
      e.acceleration += bezier_norm2_integral(d2.ctrl) / (dt * dt * dt);
    }
  }
  e.velocity *= alpha;
  e.acceleration *= beta;
  e.total = e.velocity + e.acceleration;
  return e;
}

struct OptimizationConfig {
  double alpha = 1.0;
  double beta = 0.1;
  double penalty_weight = 1e3;  // shared weight for obstacle/speed/accel/tether hinges
  double step_size = 0.05;
  int max_iterations = 500;
  double convergence_tolerance = 1e-6;
  int samples_per_segment = 20;
};

struct OptResult {
  std::vector<BezierSegment> asv_segments;
  std::vector<BezierSegment> auv_segments;
  std::vector<double> objective_history;  // accepted iterates, non-increasing
  int iterations = 0;
  bool converged = false;
  double worst_residual = 0.0;  // largest post-hoc hard-constraint violation
  std::string residual_kind = "none";
};

namespace detail {

inline double hinge(double x) { return x > 0.0 ? x : 0.0; }

// Central-difference gradient of the map's signed distance field.
inline Point3 sd_gradient(const Point3& p, const ObstacleMap& map, double h = 1e-5) {
  return {(signed_distance({p.x + h, p.y, p.z}, map) - signed_distance({p.x - h, p.y, p.z}, map)) / (2 * h),
          (signed_distance({p.x, p.y + h, p.z}, map) - signed_distance({p.x, p.y - h, p.z}, map)) / (2 * h),
          (signed_distance({p.x, p.y, p.z + h}, map) - signed_distance({p.x, p.y, p.z - h}, map)) / (2 * h)};
}

struct OptProblem {
  std::vector<BezierSegment> asv;
  std::vector<BezierSegment> auv;
  const SyncSchedule& schedule;
  const ObstacleMap& map;
  const TetherModel& tether;
  KinodynamicLimits asv_lim, auv_lim;
  OptimizationConfig cfg;

  // Free coordinates: interior control points of every segment; ASV points
  // keep z pinned to the surface plane.
  struct Var {
    int vehicle;  // 0 asv, 1 auv
    std::size_t seg;
    int ctrl;
    int axis;  // 0..2
  };
  std::vector<Var> vars;

  void build_vars() {
    vars.clear();
    for (int veh = 0; veh < 2; ++veh) {
      const auto& segs = veh == 0 ? asv : auv;
      for (std::size_t s = 0; s < segs.size(); ++s)
        for (int c = 1; c < segs[s].degree(); ++c)
          for (int ax = 0; ax < 3; ++ax) {
            if (veh == 0 && ax == 2) continue;  // ASV stays on the surface
            vars.push_back({veh, s, c, ax});
          }
    }
  }

  double get(const Var& v) const {
    const Point3& p = (v.vehicle == 0 ? asv : auv)[v.seg].ctrl[v.ctrl];
    return v.axis == 0 ? p.x : v.axis == 1 ? p.y : p.z;
  }
  void set(const Var& v, double value) {
    Point3& p = (v.vehicle == 0 ? asv : auv)[v.seg].ctrl[v.ctrl];
    (v.axis == 0 ? p.x : v.axis == 1 ? p.y : p.z) = value;
  }

  std::vector<double> pack() const {
    std::vector<double> x(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) x[i] = get(vars[i]);
    return x;
  }
  void unpack(const std::vector<double>& x) {
    for (std::size_t i = 0; i < vars.size(); ++i) set(vars[i], x[i]);
  }

  // Objective plus hinge^2 penalties; optionally accumulates the analytic
  // gradient into per-control-point slots.
  double evaluate(std::vector<std::vector<Point3>>* grad_asv,
                  std::vector<std::vector<Point3>>* grad_auv) const {
    const double w = cfg.penalty_weight;
    double total = 0.0;

    const auto energy_of = [&](const std::vector<BezierSegment>& segs,
                               std::vector<std::vector<Point3>>* grad) {
      for (std::size_t s = 0; s < segs.size(); ++s) {
        const double dt = schedule.segment_duration(s);
        const int n = segs[s].degree();
        const BezierSegment d1 = derivative_segment(segs[s]);
        total += cfg.alpha * bezier_norm2_integral(d1.ctrl) / dt;
        BezierSegment d2;
        if (n >= 2) {
          d2 = derivative_segment(d1);
          total += cfg.beta * bezier_norm2_integral(d2.ctrl) / (dt * dt * dt);
        }
        if (!grad) continue;
        const int m1 = n - 1;
        std::vector<Point3> g1(m1 + 1, Point3{});
        for (int i = 0; i <= m1; ++i)
          for (int j = 0; j <= m1; ++j)
            g1[i] += 2.0 * bernstein_product_integral(m1, i, j) * d1.ctrl[j];
        for (int k = 0; k <= n; ++k) {
          Point3 g{};
          if (k - 1 >= 0 && k - 1 <= m1) g += g1[k - 1] * n;
          if (k <= m1) g += g1[k] * (-n);
          (*grad)[s][k] += (cfg.alpha / dt) * g;
        }
        if (n >= 2) {
          const int m2 = n - 2;
          std::vector<Point3> g2(m2 + 1, Point3{});
          for (int i = 0; i <= m2; ++i)
            for (int j = 0; j <= m2; ++j)
              g2[i] += 2.0 * bernstein_product_integral(m2, i, j) * d2.ctrl[j];
          const double f = static_cast<double>(n) * (n - 1);
          for (int k = 0; k <= n; ++k) {
            Point3 g{};
            if (k - 2 >= 0 && k - 2 <= m2) g += g2[k - 2] * f;
            if (k - 1 >= 0 && k - 1 <= m2) g += g2[k - 1] * (-2.0 * f);
            if (k <= m2) g += g2[k] * f;
            (*grad)[s][k] += (cfg.beta / (dt * dt * dt)) * g;
          }
        }
      }
    };
    energy_of(asv, grad_asv);
    energy_of(auv, grad_auv);

    const int S = cfg.samples_per_segment;
    const double max_chord = tether.max_chord();
    for (std::size_t s = 0; s < asv.size(); ++s) {
      const double dt = schedule.segment_duration(s);
      const double wfac = w * dt / S;
      const int n_asv = asv[s].degree();
      const int n_auv = auv[s].degree();
      for (int q = 1; q <= S; ++q) {
        const double t = (q - 0.5) / S;

        const Point3 pa = bezier_point(asv[s], t);
        const Point3 pu = bezier_point(auv[s], t);

        // Per-vehicle obstacle / speed / accel hinges.
        for (int veh = 0; veh < 2; ++veh) {
          const auto& seg = veh == 0 ? asv[s] : auv[s];
          const Point3& pos = veh == 0 ? pa : pu;
          const KinodynamicLimits& lim = veh == 0 ? asv_lim : auv_lim;
          auto* grad = veh == 0 ? grad_asv : grad_auv;
          const int n = seg.degree();

          const double sd = signed_distance(pos, map);
          const double vo = hinge(tether.clearance - sd);
          total += wfac * vo * vo;
          if (grad && vo > 0.0) {
            const Point3 coeff = (-2.0 * wfac * vo) * sd_gradient(pos, map);
            for (int k = 0; k <= n; ++k) (*grad)[s][k] += bernstein(n, k, t) * coeff;
          }

          const Point3 vel = bezier_derivative(seg, t) / dt;
          const double speed = vel.norm();
          const double vs = hinge(speed - lim.v_max);
          total += wfac * vs * vs;
          if (grad && vs > 0.0 && speed > 1e-12) {
            const Point3 coeff = (2.0 * wfac * vs / (speed * dt)) * vel;
            for (int k = 0; k <= n; ++k) {
              double b = 0.0;
              if (k - 1 >= 0 && k - 1 <= n - 1) b += bernstein(n - 1, k - 1, t);
              if (k <= n - 1) b -= bernstein(n - 1, k, t);
              (*grad)[s][k] += (b * n) * coeff;
            }
          }

          if (n >= 2) {
            const Point3 acc = bezier_second_derivative(seg, t) / (dt * dt);
            const double amag = acc.norm();
            const double va = hinge(amag - lim.a_max);
            total += wfac * va * va;
            if (grad && va > 0.0 && amag > 1e-12) {
              const Point3 coeff = (2.0 * wfac * va / (amag * dt * dt)) * acc;
              const double f = static_cast<double>(n) * (n - 1);
              for (int k = 0; k <= n; ++k) {
                double b = 0.0;
                if (k - 2 >= 0 && k - 2 <= n - 2) b += bernstein(n - 2, k - 2, t);
                if (k - 1 >= 0 && k - 1 <= n - 2) b -= 2.0 * bernstein(n - 2, k - 1, t);
                if (k <= n - 2) b += bernstein(n - 2, k, t);
                (*grad)[s][k] += (b * f) * coeff;
              }
            }
          }
        }

        // Shared-time tether chord hinge.
        const Point3 diff = pu - pa;
        const double chord = diff.norm();
        const double vc = hinge(chord - max_chord);
        total += wfac * vc * vc;
        if (vc > 0.0 && chord > 1e-12 && (grad_asv || grad_auv)) {
          const Point3 unit = diff / chord;
          const Point3 coeff = (2.0 * wfac * vc) * unit;
          if (grad_auv)
            for (int k = 0; k <= n_auv; ++k)
              (*grad_auv)[s][k] += bernstein(n_auv, k, t) * coeff;
          if (grad_asv)
            for (int k = 0; k <= n_asv; ++k)
              (*grad_asv)[s][k] += bernstein(n_asv, k, t) * (-1.0 * coeff);
        }
      }
    }
    return total;
  }

  double objective(std::vector<double>* gradient) {
    if (!gradient) return evaluate(nullptr, nullptr);
    std::vector<std::vector<Point3>> ga(asv.size()), gu(auv.size());
    for (std::size_t s = 0; s < asv.size(); ++s) ga[s].assign(asv[s].ctrl.size(), Point3{});
    for (std::size_t s = 0; s < auv.size(); ++s) gu[s].assign(auv[s].ctrl.size(), Point3{});
    const double j = evaluate(&ga, &gu);
    gradient->assign(vars.size(), 0.0);
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto& v = vars[i];
      const Point3& g = (v.vehicle == 0 ? ga : gu)[v.seg][v.ctrl];
      (*gradient)[i] = v.axis == 0 ? g.x : v.axis == 1 ? g.y : g.z;
    }
    return j;
  }
};

}  // namespace detail

// Penalized gradient descent over the interior control points of both
// vehicles' segment chains. Endpoint control points (the waypoints) never
// move. Backtracking line search only ever accepts descent steps, so the
// recorded objective history is non-increasing.
inline OptResult optimize_trajectories(const std::vector<BezierSegment>& asv_segments,
                                       const std::vector<BezierSegment>& auv_segments,
                                       const SyncSchedule& schedule, const ObstacleMap& map,
                                       const TetherModel& tether,
                                       const KinodynamicLimits& asv_lim,
                                       const KinodynamicLimits& auv_lim,
                                       const OptimizationConfig& cfg) {
  if (asv_segments.size() != auv_segments.size() ||
      asv_segments.size() != schedule.segment_count())
    fail(ErrorClass::DomainError, "segment chains and schedule must align");

  detail::OptProblem prob{asv_segments, auv_segments, schedule, map,
                          tether,       asv_lim,      auv_lim,  cfg};
  prob.build_vars();

  OptResult res;
  std::vector<double> x = prob.pack();
  std::vector<double> grad;
  double j = prob.objective(&grad);
  res.objective_history.push_back(j);

  for (int it = 0; it < cfg.max_iterations; ++it) {
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm < 1e-14) {
      res.converged = true;
      break;
    }

    double step = cfg.step_size / std::max(gnorm, 1.0);
    bool accepted = false;
    std::vector<double> xn(x.size());
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t i = 0; i < x.size(); ++i) xn[i] = x[i] - step * grad[i];
      prob.unpack(xn);
      const double jn = prob.objective(nullptr);
      if (jn < j) {
        const double improvement = (j - jn) / std::max(1.0, std::abs(j));
        x = xn;
        j = jn;
        res.objective_history.push_back(j);
        accepted = true;
        ++res.iterations;
        if (improvement < cfg.convergence_tolerance) res.converged = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || res.converged) {
      res.converged = true;
      break;
    }
    prob.unpack(x);
    prob.objective(&grad);
  }

  prob.unpack(x);
  res.asv_segments = prob.asv;
  res.auv_segments = prob.auv;

  // Hard-check audit at a fine sampling; report the worst violation.
  const auto audit = [&](double value, const char* kind) {
    if (value > res.worst_residual) {
      res.worst_residual = value;
      res.residual_kind = kind;
    }
  };
  const int fine = 50;
  for (std::size_t s = 0; s < res.asv_segments.size(); ++s) {
    const double dt = schedule.segment_duration(s);
    for (int q = 0; q <= fine; ++q) {
      const double t = static_cast<double>(q) / fine;
      const Point3 pa = bezier_point(res.asv_segments[s], t);
      const Point3 pu = bezier_point(res.auv_segments[s], t);
      audit(tether.clearance - signed_distance(pa, map), "asv_clearance");
      audit(tether.clearance - signed_distance(pu, map), "auv_clearance");
      audit(bezier_derivative(res.asv_segments[s], t).norm() / dt - asv_lim.v_max, "asv_speed");
      audit(bezier_derivative(res.auv_segments[s], t).norm() / dt - auv_lim.v_max, "auv_speed");
      audit(distance(pa, pu) - tether.max_chord(), "tether_chord");
    }
  }
  if (res.worst_residual <= 0.0) {
    res.worst_residual = 0.0;
    res.residual_kind = "none";
  }
  return res;
}

}  // namespace tetherplan
