#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tetherplan/geometry.hpp"

using namespace tetherplan;

namespace {

ObstacleMap make_map(std::vector<ObstaclePrimitive> obs) {
  ObstacleMap m;
  m.bounds = Box{{-10, -10, -10}, {10, 10, 10}};
  m.surface_z = 10;
  m.seabed_z = -10;
  m.obstacles = std::move(obs);
  return m;
}

}  // namespace

TEST_CASE("signed distance to a sphere is the analytic point distance") {
  const auto m = make_map({Sphere{{0, 0, 0}, 1.0}});
  CHECK(signed_distance({2, 0, 0}, m) == Catch::Approx(1.0));
  CHECK(signed_distance({0, 0, 0}, m) == Catch::Approx(-1.0));
  CHECK(signed_distance({0, 3, 4}, m) == Catch::Approx(4.0));
}

TEST_CASE("empty map returns the workspace-diagonal sentinel") {
  const auto m = make_map({});
  const double sentinel = signed_distance({1, 2, 3}, m);
  CHECK(sentinel >= m.diagonal() - 1e-12);
}

TEST_CASE("box signed distance is exact inside and outside") {
  const auto m = make_map({Box{{-1, -1, -1}, {1, 1, 1}}});
  CHECK(signed_distance({3, 0, 0}, m) == Catch::Approx(2.0));
  CHECK(signed_distance({0, 0, 0}, m) == Catch::Approx(-1.0));
  // Corner region: Euclidean distance to the corner.
  CHECK(signed_distance({2, 2, 2}, m) == Catch::Approx(std::sqrt(3.0)));
}

TEST_CASE("cylinder signed distance covers lateral, cap and interior regions") {
  const auto m = make_map({Cylinder{{0, 0, -2}, 1.0, 4.0}});
  CHECK(signed_distance({3, 0, 0}, m) == Catch::Approx(2.0));   // lateral
  CHECK(signed_distance({0, 0, 5}, m) == Catch::Approx(3.0));   // cap
  CHECK(signed_distance({0, 0, 0}, m) == Catch::Approx(-1.0));  // interior
}

TEST_CASE("signed distance is 1-Lipschitz") {
  const auto m = make_map({Sphere{{1, 2, -3}, 1.5}, Box{{-4, -4, -4}, {-2, -1, -2}},
                           Cylinder{{3, -3, -5}, 0.8, 6.0}});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int i = 0; i < 500; ++i) {
    const Point3 p{u(rng), u(rng), u(rng)};
    const Point3 q{u(rng), u(rng), u(rng)};
    const double lhs = std::abs(signed_distance(p, m) - signed_distance(q, m));
    CHECK(lhs <= distance(p, q) + 1e-9);
  }
}

TEST_CASE("segment through a sphere is rejected, segment above it passes") {
  const auto m = make_map({Sphere{{0, 0, 0}, 1.0}});
  CHECK_FALSE(segment_clear({-2, 0, 0}, {2, 0, 0}, m, 0.0));
  CHECK(segment_clear({-2, 0, 2}, {2, 0, 2}, m, 0.5));
  CHECK_FALSE(segment_clear({-2, 0, 2}, {2, 0, 2}, m, 1.1));
}

TEST_CASE("degenerate segment reduces to a point check") {
  const auto m = make_map({Sphere{{0, 0, 0}, 1.0}});
  CHECK(segment_clear({4, 0, 0}, {4, 0, 0}, m, 1.0));
  CHECK_FALSE(segment_clear({1.1, 0, 0}, {1.1, 0, 0}, m, 0.5));
}

TEST_CASE("segment_clear is symmetric") {
  const auto m = make_map({Sphere{{0.3, -0.2, 0.1}, 1.0}, Box{{2, 2, -1}, {4, 5, 2}}});
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const Point3 p{u(rng), u(rng), u(rng)};
    const Point3 q{u(rng), u(rng), u(rng)};
    CHECK(segment_clear(p, q, m, 0.3) == segment_clear(q, p, m, 0.3));
  }
}

TEST_CASE("resample_path: straight segment midpoint") {
  const auto out = resample_path({{0, 0, 0}, {1, 0, 0}}, 3);
  REQUIRE(out.size() == 3);
  CHECK(out[1].x == Catch::Approx(0.5));
  CHECK(out[0].x == 0.0);
  CHECK(out[2].x == 1.0);
}

TEST_CASE("resample_path: identity on equally spaced input") {
  const std::vector<Point3> in{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  const auto out = resample_path(in, 3);
  for (std::size_t i = 0; i < in.size(); ++i) {
    CHECK(distance(in[i], out[i]) < 1e-12);
  }
}

TEST_CASE("resample_path: arc-length midpoint of an L-shaped polyline") {
  const auto out = resample_path({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}, 3);
  REQUIRE(out.size() == 3);
  CHECK(distance(out[1], {1, 0, 0}) < 1e-12);
}

TEST_CASE("resample_path rejects degenerate input") {
  CHECK_THROWS_AS(resample_path({{0, 0, 0}}, 3), Error);
}

TEST_CASE("resampling never lengthens the polyline and converges with M") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point3> wps;
    for (int i = 0; i < 6; ++i) wps.push_back({u(rng), u(rng), u(rng)});
    const double len = polyline_length(wps);
    const auto coarse = resample_path(wps, 4);
    CHECK(polyline_length(coarse) <= len + 1e-9);
    // Corner cutting at sharp random bends loses a little length; dense
    // resampling must stay close and never beat the original.
    const auto fine = resample_path(wps, 400);
    CHECK(polyline_length(fine) >= 0.97 * len);
    CHECK(polyline_length(fine) >= polyline_length(coarse));
  }
}
