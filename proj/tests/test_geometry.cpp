#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ptnet/polyline.hpp"
#include "ptnet/types.hpp"
#include "test_util.hpp"

using namespace ptnet;
using namespace ptnet::testing;

TEST_CASE("heading normalization maps into [-pi, pi) and is idempotent") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const double h = uniform(rng, -M_PI, M_PI - 1e-9);
    for (int k = -2; k <= 2; ++k) {
      const double n = normalize_heading(h + 2.0 * M_PI * k);
      CHECK(n >= -M_PI);
      CHECK(n < M_PI);
      CHECK(n == doctest::Approx(h).epsilon(0).scale(1).epsilon(1e-9));
      CHECK(normalize_heading(n) == n);
    }
  }
  CHECK(normalize_heading(M_PI) == doctest::Approx(-M_PI));
}

TEST_CASE("vec2 rejects non-finite components") {
  CHECK_THROWS_AS(Vec2(std::nan(""), 0.0), NumericError);
  CHECK_THROWS_AS(Vec2(0.0, std::numeric_limits<double>::infinity()),
                  NumericError);
}

TEST_CASE("transform_to_frame maps the frame origin to zero") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const Pose frame{{uniform(rng, -50, 50), uniform(rng, -50, 50)},
                     uniform(rng, -M_PI, M_PI)};
    const Vec2 local = transform_to_frame(frame.position, frame);
    CHECK(local.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(local.y == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("transform_to_frame identity frame keeps coordinates") {
  // Frame at the origin facing +y: the actor frame axes coincide with world.
  const Pose frame{{0.0, 0.0}, 0.0};
  const Vec2 out = transform_to_frame({1.0, 0.0}, frame);
  CHECK(out.x == doctest::Approx(1.0));
  CHECK(out.y == doctest::Approx(0.0));
}

TEST_CASE("transform_to_frame rotates by the frame heading") {
  // Frame facing -x (heading pi/2, counterclockwise from +y). World north is
  // to the right of a west-facing frame, so local x is positive.
  const Pose frame{{0.0, 0.0}, M_PI / 2.0};
  const Vec2 out = transform_to_frame({0.0, 1.0}, frame);
  CHECK(out.x == doctest::Approx(1.0));
  CHECK(out.y == doctest::Approx(0.0).epsilon(1e-12));

  // Forward of the frame maps to +y.
  const Vec2 fwd = transform_to_frame({-2.0, 0.0}, frame);
  CHECK(fwd.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fwd.y == doctest::Approx(2.0));
}

TEST_CASE("transform round trip is the identity") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const Pose frame{{uniform(rng, -100, 100), uniform(rng, -100, 100)},
                     uniform(rng, -M_PI, M_PI)};
    const Vec2 p{uniform(rng, -100, 100), uniform(rng, -100, 100)};
    const Vec2 back = transform_from_frame(transform_to_frame(p, frame), frame);
    CHECK(std::abs(back.x - p.x) < 1e-9);
    CHECK(std::abs(back.y - p.y) < 1e-9);
  }
}

TEST_CASE("actor history pads by repeating the oldest observation") {
  ActorState a({{0, 0}, 0.0}, 1.0, 0.0, {{3.0, 4.0}, {5.0, 6.0}});
  REQUIRE(static_cast<int>(a.history.size()) == kHistoryLen);
  CHECK(a.history.front().x == 3.0);
  CHECK(a.history[kHistoryLen - 2].x == 3.0);
  CHECK(a.history.back().x == 5.0);
  CHECK_THROWS_AS(ActorState({{0, 0}, 0.0}, -1.0, 0.0, {}), NumericError);
}

TEST_CASE("polyline construction dedupes and validates") {
  CHECK_THROWS_AS(Polyline({{0, 0}}), DegeneratePathError);
  CHECK_THROWS_AS(Polyline({{0, 0}, {0, 0}}), DegeneratePathError);
  const Polyline p({{0, 0}, {0, 0}, {1, 0}, {1, 0}, {1, 1}});
  CHECK(p.points().size() == 3);
  CHECK(p.length() == doctest::Approx(2.0));
  CHECK(p.cumulative_arclength()[1] == doctest::Approx(1.0));
}

TEST_CASE("resample on a straight segment places uniform points") {
  const Polyline line({{0, 0}, {0, 1}});
  const Polyline r = resample_polyline(line, 0.1);
  REQUIRE(r.points().size() == 11);
  for (int i = 0; i < 11; ++i) {
    CHECK(r.points()[i].x == doctest::Approx(0.0));
    CHECK(r.points()[i].y == doctest::Approx(0.1 * i).epsilon(1e-9));
  }
}

TEST_CASE("resample walks arc length through corners") {
  const Polyline bend({{0, 0}, {1, 0}, {1, 1}});
  const Polyline r = resample_polyline(bend, 0.5);
  REQUIRE(r.points().size() == 5);
  const std::vector<Vec2> expect{{0, 0}, {0.5, 0}, {1, 0}, {1, 0.5}, {1, 1}};
  for (int i = 0; i < 5; ++i) {
    CHECK(r.points()[i].x == doctest::Approx(expect[i].x));
    CHECK(r.points()[i].y == doctest::Approx(expect[i].y));
  }
}

TEST_CASE("resample with resolution beyond total length keeps endpoints") {
  const Polyline p({{0, 0}, {3, 0}, {3, 1}});
  const Polyline r = resample_polyline(p, 100.0);
  REQUIRE(r.points().size() == 2);
  CHECK(r.points()[0].x == 0.0);
  CHECK(r.points()[1].x == 3.0);
  CHECK(r.points()[1].y == 1.0);
}

TEST_CASE("resample preserves arc length within one resolution step") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    const Polyline p = random_smooth_polyline(rng);
    const double res = uniform(rng, 0.05, 1.0);
    const Polyline r = resample_polyline(p, res);
    CHECK(std::abs(r.length() - p.length()) <= res);
  }
}

TEST_CASE("project_point recovers points on the path with zero offset") {
  const Polyline p({{0, 0}, {10, 0}, {10, 10}});
  const Projection pr = project_point({10.0, 3.0}, p);
  CHECK(pr.arclength == doctest::Approx(13.0));
  CHECK(pr.lateral == doctest::Approx(0.0));
}

TEST_CASE("project_point signs the lateral offset, right of direction "
          "positive") {
  const Polyline p({{0, 0}, {2, 0}});
  // (1, 0.5) lies left of the +x path direction, so the offset is negative.
  const Projection pr = project_point({1.0, 0.5}, p);
  CHECK(pr.arclength == doctest::Approx(1.0));
  CHECK(pr.lateral == doctest::Approx(-0.5));
  const Projection pr2 = project_point({1.0, -0.5}, p);
  CHECK(pr2.lateral == doctest::Approx(0.5));
}

TEST_CASE("project_point clamps beyond the end to the final arc length") {
  const Polyline p({{0, 0}, {2, 0}});
  const Projection pr = project_point({3.0, 1.0}, p);
  CHECK(pr.arclength == doctest::Approx(2.0));
  // Lateral component relative to the final segment direction.
  CHECK(pr.lateral == doctest::Approx(-1.0));
}

TEST_CASE("project_point matches dense brute-force search") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const Polyline p = random_smooth_polyline(rng, 40);
    const Vec2 q{uniform(rng, -40, 120), uniform(rng, -40, 120)};
    const Projection pr = project_point(q, p);
    const BruteProjection bp = brute_force_project(q, p);
    const double analytic = (p.point_at(pr.arclength) - q).norm();
    CHECK(analytic <= bp.distance + 1e-6);
    // Interior projections: |lateral| equals the minimum distance.
    if (pr.arclength > 0.5 && pr.arclength < p.length() - 0.5 &&
        pr.t > 1e-9 && pr.t < 1.0 - 1e-9)
      CHECK(std::abs(std::abs(pr.lateral) - bp.distance) < 1e-3);
  }
}

TEST_CASE("project_point breaks ties toward the smaller arc length") {
  // A U-shaped path: the probe is equidistant from both straights.
  const Polyline p({{0, 0}, {10, 0}, {10, 4}, {0, 4}});
  const Projection pr = project_point({5.0, 2.0}, p);
  CHECK(pr.arclength == doctest::Approx(5.0));
  CHECK(pr.lateral == doctest::Approx(-2.0));
}
