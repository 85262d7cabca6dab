#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "tetherplan/sync_opt.hpp"

using namespace tetherplan;

namespace {

// Independent traversal-time oracle: bisection on t against a trapezoidal
// quadrature of v(tau) = min(a*tau, v_max). The speed profile is piecewise
// linear, so the quadrature error is confined to the single kink interval.
double oracle_traverse_time(double d, const KinodynamicLimits& lim) {
  if (d == 0.0) return 0.0;
  const auto dist_at = [&](double t) {
    const int n = 20000;
    double s = 0.0;
    double prev_v = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double tau = t * i / n;
      const double v = std::min(lim.a_max * tau, lim.v_max);
      s += 0.5 * (prev_v + v) * (t / n);
      prev_v = v;
    }
    return s;
  };
  double lo = 0.0, hi = 2.0 * std::sqrt(2.0 * d / lim.a_max) + 2.0 * d / lim.v_max + 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (dist_at(mid) < d)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Gauss-free 1000-point midpoint quadrature of int_0^1 f(t) dt.
template <class F>
double quadrature(F&& f) {
  const int n = 1000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f((i + 0.5) / n);
  return s / n;
}

std::vector<BezierSegment> random_chain(std::mt19937& rng, int count, double surface_z,
                                        bool pin_z) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Point3> wps;
  for (int i = 0; i <= count; ++i) {
    Point3 p{3.0 * i + u(rng), u(rng), pin_z ? surface_z : -3.0 + u(rng)};
    wps.push_back(p);
  }
  return build_segments(wps);
}

}  // namespace

TEST_CASE("traverse_time matches the forward-integration oracle") {
  const KinodynamicLimits lim{2.0, 0.5};
  for (double d : {0.01, 0.5, 1.0, 3.9, 4.0, 4.1, 10.0, 42.0}) {
    CHECK(traverse_time(d, lim) == Catch::Approx(oracle_traverse_time(d, lim)).margin(1e-6));
  }
}

TEST_CASE("traverse_time is continuous and monotone across the branch point") {
  const KinodynamicLimits lim{1.5, 0.75};
  const double d_star = lim.accel_distance();
  const double eps = 1e-9;
  CHECK(std::abs(traverse_time(d_star + eps, lim) - traverse_time(d_star - eps, lim)) < 1e-8);
  double prev = 0.0;
  for (double d = 0.0; d <= 3.0 * d_star; d += d_star / 50.0) {
    const double t = traverse_time(d, lim);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("traverse_time rejects negative distances") {
  CHECK_THROWS_AS(traverse_time(-1.0, KinodynamicLimits{}), Error);
}

TEST_CASE("sync schedule: the slower vehicle dictates every interval") {
  const KinodynamicLimits fast{2.0, 1.0}, slow{0.5, 0.25};
  const std::vector<double> da{1.0, 2.0, 0.5};
  const std::vector<double> du{1.0, 0.2, 3.0};
  const auto s = make_schedule(da, du, fast, slow);
  REQUIRE(s.segment_count() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double expect =
        std::max({traverse_time(da[i], fast), traverse_time(du[i], slow), 1e-3});
    CHECK(s.segment_duration(i) == Catch::Approx(expect));
    CHECK(s.asv_speeds[i] <= fast.v_max + 1e-12);
    CHECK(s.auv_speeds[i] <= slow.v_max + 1e-12);
    CHECK(s.asv_speeds[i] * s.segment_duration(i) == Catch::Approx(da[i]));
    CHECK(s.auv_speeds[i] * s.segment_duration(i) == Catch::Approx(du[i]));
  }
}

TEST_CASE("zero-length segments get the minimum dwell and zero speed") {
  const KinodynamicLimits lim{2.0, 0.5};
  const auto s = make_schedule({0.0, 1.0}, {0.0, 0.0}, lim, lim);
  CHECK(s.segment_duration(0) == Catch::Approx(1e-3));
  CHECK(s.asv_speeds[0] == 0.0);
  CHECK(s.auv_speeds[1] == 0.0);
}

TEST_CASE("mismatched segment lists are rejected") {
  const KinodynamicLimits lim{2.0, 0.5};
  CHECK_THROWS_AS(make_schedule({1.0}, {1.0, 2.0}, lim, lim), Error);
}

TEST_CASE("bernstein product integrals match numerical quadrature") {
  for (int m : {1, 2, 3}) {
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) {
        const double closed = bernstein_product_integral(m, i, j);
        const double quad = quadrature([&](double t) {
          return bernstein(m, i, t) * bernstein(m, j, t);
        });
        CHECK(closed == Catch::Approx(quad).margin(1e-6));
      }
  }
}

TEST_CASE("bezier norm-squared integral matches quadrature on random curves") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point3> ctrl;
    for (int i = 0; i < 4; ++i) ctrl.push_back({u(rng), u(rng), u(rng)});
    BezierSegment seg{ctrl};
    const double closed = bezier_norm2_integral(ctrl);
    const double quad = quadrature([&](double t) {
      const Point3 p = bezier_point(seg, t);
      return p.dot(p);
    });
    CHECK(closed == Catch::Approx(quad).margin(1e-5));
  }
}

TEST_CASE("smoothness energy matches quadrature over a two-segment chain") {
  std::mt19937 rng(37);
  const auto segs = random_chain(rng, 2, 0.0, false);
  const std::vector<double> durations{1.7, 2.3};
  const double alpha = 1.0, beta = 0.1;
  const auto e = smoothness_energy(segs, durations, alpha, beta);

  double vel = 0.0, acc = 0.0;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    vel += quadrature([&](double t) {
      const Point3 d = bezier_derivative(segs[s], t);
      return d.dot(d);
    }) / durations[s];
    acc += quadrature([&](double t) {
      const Point3 d = bezier_second_derivative(segs[s], t);
      return d.dot(d);
    }) / (durations[s] * durations[s] * durations[s]);
  }
  CHECK(e.velocity == Catch::Approx(alpha * vel).epsilon(1e-6));
  CHECK(e.acceleration == Catch::Approx(beta * acc).epsilon(1e-6));
  CHECK(e.total == Catch::Approx(e.velocity + e.acceleration));
}

TEST_CASE("straightening a bent chain lowers the smoothness energy") {
  const auto bent = build_segments({{0, 0, 0}, {1, 1, 0}, {2, 0, 0}});
  const auto straight = build_segments({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  const std::vector<double> durations{1.0, 1.0};
  CHECK(smoothness_energy(straight, durations, 1.0, 0.1).total <
        smoothness_energy(bent, durations, 1.0, 0.1).total);
}

TEST_CASE("analytic objective gradient matches central finite differences") {
  ObstacleMap map;
  map.bounds = Box{{-5, -5, -8}, {15, 5, 0}};
  map.surface_z = 0.0;
  map.seabed_z = -8.0;
  map.obstacles.push_back(Sphere{{4.0, 0.5, -2.5}, 1.0});

  TetherModel tether{8.0, 11, 0.1, 0.2};
  const KinodynamicLimits asv_lim{2.0, 0.5}, auv_lim{1.5, 0.5};
  OptimizationConfig cfg;
  cfg.samples_per_segment = 8;

  std::mt19937 rng(43);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto asv = random_chain(rng, 2, 0.0, true);
    auto auv = random_chain(rng, 2, 0.0, false);

    std::vector<double> da, du;
    for (const auto& s : asv) da.push_back(segment_length(s));
    for (const auto& s : auv) du.push_back(segment_length(s));
    const SyncSchedule schedule = make_schedule(da, du, asv_lim, auv_lim);

    detail::OptProblem prob{asv, auv, schedule, map, tether, asv_lim, auv_lim, cfg};
    prob.build_vars();
    std::vector<double> grad;
    prob.objective(&grad);

    std::vector<double> x = prob.pack();
    const double h = 1e-6;
    for (std::size_t i = 0; i < prob.vars.size(); i += 3) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      prob.unpack(xp);
      const double jp = prob.objective(nullptr);
      prob.unpack(xm);
      const double jm = prob.objective(nullptr);
      prob.unpack(x);
      const double fd = (jp - jm) / (2.0 * h);
      const double scale = std::max({1.0, std::abs(fd), std::abs(grad[i])});
      CHECK(std::abs(grad[i] - fd) / scale < 1e-5);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("optimizer history is non-increasing and endpoints stay fixed") {
  ObstacleMap map;
  map.bounds = Box{{-5, -5, -8}, {15, 5, 0}};
  map.surface_z = 0.0;
  map.seabed_z = -8.0;

  TetherModel tether{8.0, 11, 0.1, 0.2};
  const KinodynamicLimits asv_lim{2.0, 0.5}, auv_lim{1.5, 0.5};
  OptimizationConfig cfg;
  cfg.max_iterations = 60;
  cfg.samples_per_segment = 10;

  const auto asv = build_segments({{0, 0, 0}, {2, 1.5, 0}, {4, -1.0, 0}, {6, 0, 0}});
  const auto auv = build_segments({{0, 0, -3}, {2, -1.0, -3.5}, {4, 1.0, -2.5}, {6, 0, -3}});
  std::vector<double> da, du;
  for (const auto& s : asv) da.push_back(segment_length(s));
  for (const auto& s : auv) du.push_back(segment_length(s));
  const SyncSchedule schedule = make_schedule(da, du, asv_lim, auv_lim);

  const auto res = optimize_trajectories(asv, auv, schedule, map, tether, asv_lim,
                                         auv_lim, cfg);
  REQUIRE(res.objective_history.size() >= 2);
  for (std::size_t i = 1; i < res.objective_history.size(); ++i)
    CHECK(res.objective_history[i] <= res.objective_history[i - 1] + 1e-12);
  CHECK(res.objective_history.back() < res.objective_history.front());

  for (std::size_t s = 0; s < asv.size(); ++s) {
    CHECK(distance(res.asv_segments[s].ctrl.front(), asv[s].ctrl.front()) == 0.0);
    CHECK(distance(res.asv_segments[s].ctrl.back(), asv[s].ctrl.back()) == 0.0);
    CHECK(distance(res.auv_segments[s].ctrl.front(), auv[s].ctrl.front()) == 0.0);
    CHECK(distance(res.auv_segments[s].ctrl.back(), auv[s].ctrl.back()) == 0.0);
  }
  // ASV control points never leave the surface plane.
  for (const auto& seg : res.asv_segments)
    for (const auto& p : seg.ctrl) CHECK(p.z == 0.0);
}

TEST_CASE("optimizer rejects misaligned inputs") {
  const auto asv = build_segments({{0, 0, 0}, {1, 0, 0}});
  const auto auv = build_segments({{0, 0, -2}, {1, 0, -2}, {2, 0, -2}});
  SyncSchedule schedule;
  schedule.times = {0.0, 1.0};
  CHECK_THROWS_AS(optimize_trajectories(asv, auv, schedule, ObstacleMap{}, TetherModel{},
                                        KinodynamicLimits{}, KinodynamicLimits{},
                                        OptimizationConfig{}),
                  Error);
}
