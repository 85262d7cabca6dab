#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "tetherplan/geometry.hpp"
#include "tetherplan/tether.hpp"

using namespace tetherplan;

namespace {

ObstacleMap empty_map() {
  ObstacleMap m;
  m.bounds = Box{{-20, -20, -20}, {20, 20, 20}};
  m.surface_z = 20;
  m.seabed_z = -20;
  return m;
}

// Independent two-parameter shooting oracle for the asymmetric hang: sweeps
// the catenary constant and vertex location on a fine grid refined twice,
// matching endpoint heights by construction and minimizing the arc-length
// residual |L(a) - l|.
double oracle_lowest_z(const Point3& p1, const Point3& p2, double l) {
  const double d = planar_distance(p1, p2);
  const double dz = p2.z - p1.z;
  double best_a = 0.0, best_uv = 0.0, best_res = 1e30;
  double a_lo = d * 1e-3, a_hi = d * 1e3;
  for (int round = 0; round < 6; ++round) {
    const int steps = 400;
    for (int i = 0; i <= steps; ++i) {
      const double a = a_lo * std::pow(a_hi / a_lo, static_cast<double>(i) / steps);
      // For fixed a, pick u_v so the height difference matches.
      // L = a(sinh((d-uv)/a) + sinh(uv/a)), dz = a(cosh((d-uv)/a) - cosh(uv/a)).
      // Solve dz condition by bisection on uv in [-5d, 6d].
      double lo = -5.0 * d, hi = 6.0 * d;
      for (int it = 0; it < 80; ++it) {
        const double uv = 0.5 * (lo + hi);
        const double f = a * (std::cosh((d - uv) / a) - std::cosh(uv / a)) - dz;
        if (f > 0.0)
          lo = uv;
        else
          hi = uv;
      }
      const double uv = 0.5 * (lo + hi);
      const double L = a * (std::sinh((d - uv) / a) + std::sinh(uv / a));
      const double res = std::abs(L - l);
      if (res < best_res) {
        best_res = res;
        best_a = a;
        best_uv = uv;
      }
    }
    a_lo = best_a * 0.7;
    a_hi = best_a * 1.4;
  }
  const double c = p1.z - best_a * std::cosh(best_uv / best_a);
  const double u_low = std::clamp(best_uv, 0.0, d);
  return best_a * std::cosh((u_low - best_uv) / best_a) + c;
}

}  // namespace

TEST_CASE("catenary_point hits the endpoints and the closed-form sag") {
  const Point3 p1{0, 0, 0}, p2{2, 0, 0};
  const Point3 a = catenary_point(p1, p2, 1.0, 0.0, 0.0);
  CHECK(distance(a, p1) < 1e-12);
  const Point3 b = catenary_point(p1, p2, 1.0, 0.0, 1.0);
  CHECK(distance(b, p2) < 1e-12);
  const Point3 m = catenary_point(p1, p2, 1.0, 0.0, 0.5);
  CHECK(m.x == Catch::Approx(1.0));
  CHECK(m.z == Catch::Approx(1.0 - std::cosh(1.0)).epsilon(1e-9));  // ~ -0.5431
}

TEST_CASE("catenary_point rejects non-positive catenary constants") {
  CHECK_THROWS_AS(catenary_point({0, 0, 0}, {1, 0, 0}, 0.0, 0.0, 0.5), Error);
}

TEST_CASE("solve_catenary_constant recovers a known constant") {
  const double l = 2.0 * std::sinh(1.0);
  const double a = solve_catenary_constant(2.0, l);
  CHECK(a == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("solve_catenary_constant rejects a taut cable") {
  CHECK_THROWS_AS(solve_catenary_constant(2.0, 2.0), Error);
}

TEST_CASE("solve_catenary_constant leaves a tiny residual on a slack cable") {
  const double a = solve_catenary_constant(1.0, 10.0);
  const double residual = std::abs(2.0 * a * std::sinh(1.0 / (2.0 * a)) - 10.0);
  CHECK(residual < 1e-9 * 10.0);
}

TEST_CASE("hang_tether equal heights matches the symmetric closed form") {
  TetherModel tether;
  tether.length = 2.0 * std::sinh(1.0);
  tether.lumped_mass_count = 101;
  tether.slack_margin = 0.0;
  const Point3 p1{0, 0, 0}, p2{2, 0, 0};
  const auto shape = hang_tether(p1, p2, tether);
  REQUIRE(shape.points.size() == 101);
  CHECK(distance(shape.points.front(), p1) < 1e-9);
  CHECK(distance(shape.points.back(), p2) < 1e-9);
  CHECK(shape.points[50].z == Catch::Approx(1.0 - std::cosh(1.0)).epsilon(1e-6));
  for (int i = 0; i < 101; ++i) {
    const Point3 ref = catenary_point(p1, p2, shape.catenary_constant, 0.0, i / 100.0);
    CHECK(distance(shape.points[i], ref) < 1e-6);
  }
}

TEST_CASE("hang_tether vertical degenerate branch") {
  TetherModel tether;
  tether.length = 3.0 + 1e-9;
  tether.lumped_mass_count = 11;
  tether.slack_margin = 0.0;
  const auto shape = hang_tether({0, 0, 0}, {0, 0, -3}, tether);
  for (const auto& p : shape.points) {
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
    CHECK(p.z <= 1e-12);
    CHECK(p.z >= -3.0 - 1e-6);
  }
  CHECK(distance(shape.points.back(), {0, 0, -3}) < 1e-9);
}

TEST_CASE("hang_tether asymmetric case against the shooting oracle") {
  TetherModel tether;
  tether.length = 2.0;
  tether.lumped_mass_count = 201;
  tether.slack_margin = 0.0;
  const Point3 p1{0, 0, 0}, p2{1, 0, -1};
  const auto shape = hang_tether(p1, p2, tether);
  const double len = polyline_length(shape.points);
  CHECK(len >= 1.99);
  CHECK(len <= 2.0);
  CHECK(shape.lowest_point().z < -1.0);
  const double oracle_z = oracle_lowest_z(p1, p2, 2.0);
  CHECK(shape.lowest_point().z == Catch::Approx(oracle_z).margin(2e-3));
}

TEST_CASE("hang_tether errors: taut chord and impossible geometry") {
  TetherModel tether;
  tether.length = 2.0;
  tether.slack_margin = 0.1;
  CHECK_THROWS_AS(hang_tether({0, 0, 0}, {1.9, 0, 0}, tether), Error);
  CHECK_THROWS_AS(hang_tether({0, 0, 0}, {0, 0, -2.5}, tether), Error);
}

TEST_CASE("hang_tether arc length stays within 0.5% of l at N >= 100") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::uniform_real_distribution<double> slack(1.05, 3.0);
  TetherModel tether;
  tether.lumped_mass_count = 101;
  tether.slack_margin = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Point3 p1{u(rng), u(rng), u(rng)};
    const Point3 p2{u(rng), u(rng), u(rng)};
    const double chord = distance(p1, p2);
    if (chord < 0.1) continue;
    tether.length = chord * slack(rng);
    const auto shape = hang_tether(p1, p2, tether);
    const double len = polyline_length(shape.points);
    CHECK(len <= tether.length + 1e-9);
    CHECK(len >= tether.length * 0.995);
  }
}

TEST_CASE("longer cable hangs strictly lower") {
  TetherModel tether;
  tether.lumped_mass_count = 101;
  tether.slack_margin = 0.0;
  const Point3 p1{0, 0, 0}, p2{3, 1, -1};
  double prev = 1e9;
  for (double l : {3.5, 4.0, 5.0, 7.0}) {
    tether.length = l;
    const double low = hang_tether(p1, p2, tether).lowest_point().z;
    CHECK(low < prev);
    prev = low;
  }
}

TEST_CASE("tether_feasible clause diagnostics") {
  TetherModel tether;
  tether.length = 4.0;
  tether.slack_margin = 0.1;
  tether.clearance = 0.2;
  auto map = empty_map();

  SECTION("taut pair") {
    const auto c = tether_feasible({0, 0, 0}, {3.9, 0, 0}, tether, map);
    CHECK_FALSE(c.feasible);
    CHECK(c.clause == TetherClause::Taut);
  }

  SECTION("empty map, half-length chord") {
    const auto c = tether_feasible({0, 0, 0}, {2, 0, 0}, tether, map);
    CHECK(c.feasible);
  }

  SECTION("sphere at the sag minimum collides with the cable") {
    const Point3 p1{0, 0, 0}, p2{2, 0, 0};
    const Point3 low = hang_tether(p1, p2, tether).lowest_point();
    map.obstacles.push_back(Sphere{low, 0.3});
    const auto c = tether_feasible(p1, p2, tether, map);
    CHECK_FALSE(c.feasible);
    CHECK(c.clause == TetherClause::TetherCollision);
  }

  SECTION("sag below the seabed") {
    map.seabed_z = -0.5;
    const auto c = tether_feasible({0, 0, 0}, {2, 0, 0}, tether, map);
    CHECK_FALSE(c.feasible);
    CHECK(c.clause == TetherClause::Seabed);
  }
}

TEST_CASE("tether_feasible is monotone in clearance") {
  TetherModel loose;
  loose.length = 6.0;
  loose.slack_margin = 0.1;
  auto map = empty_map();
  map.obstacles.push_back(Sphere{{1.5, 0.2, -1.8}, 0.6});
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Point3 p1{u(rng), u(rng), 0.0};
    const Point3 p2{u(rng), u(rng), -2.0};
    loose.clearance = 0.5;
    const bool at_large = static_cast<bool>(tether_feasible(p1, p2, loose, map));
    loose.clearance = 0.1;
    const bool at_small = static_cast<bool>(tether_feasible(p1, p2, loose, map));
    if (at_large) CHECK(at_small);
  }
}
