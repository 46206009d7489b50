#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "caring/errors.hpp"
#include "caring/guidance.hpp"
#include "caring/metrics.hpp"
#include "test_util.hpp"

using namespace caring;

TEST(PointAtArcLength, WalksThePolyline) {
  const Trajectory t{{{0, 0, 0}, {1, 3, 0}, {2, 3, 4}}};
  EXPECT_EQ(point_at_arc_length(t, 0.0), (Vec2{0, 0}));
  EXPECT_NEAR(point_at_arc_length(t, 1.5).x, 1.5, 1e-12);
  EXPECT_NEAR(point_at_arc_length(t, 5.0).y, 2.0, 1e-12);
  EXPECT_EQ(point_at_arc_length(t, 99.0), (Vec2{3, 4}));
  EXPECT_EQ(point_at_arc_length(t, -1.0), (Vec2{0, 0}));
}

TEST(Resample, EndpointsExactAndEvenlySpaced) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int trial = 0; trial < 50; ++trial) {
    Trajectory t;
    for (int i = 0; i < 6; ++i) t.samples.push_back({double(i), u(rng), u(rng)});
    const std::size_t n = 10 + trial;
    const auto g = resample_trajectory(t, n);
    ASSERT_EQ(g.size(), n);
    EXPECT_EQ(g.per_frame_xy.front(), t.samples.front().xy());
    EXPECT_EQ(g.per_frame_xy.back(), t.samples.back().xy());
    EXPECT_DOUBLE_EQ(g.strength.front(), 0.0);
    EXPECT_DOUBLE_EQ(g.strength.back(), 1.0);
    // Each target equals the point at its arc-length fraction.
    const double len = t.arc_length();
    for (std::size_t i = 0; i < n; ++i) {
      const auto want = point_at_arc_length(t, len * double(i) / double(n - 1));
      EXPECT_NEAR((g.per_frame_xy[i] - want).norm(), 0.0, 1e-9);
    }
  }
}

TEST(Resample, ConstantScheduleAndDegeneratePath) {
  const Trajectory still{{{0, 2, 2}, {1, 2, 2}}};
  const auto g = resample_trajectory(still, 5, StrengthSchedule::constant);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(g.per_frame_xy[i], (Vec2{2, 2}));
    EXPECT_DOUBLE_EQ(g.strength[i], 1.0);
  }
  EXPECT_THROW(resample_trajectory(still, 1), ValidationError);
}

TEST(TrajectoryBetween, SlicesByArcLength) {
  const auto t = testkit::line_trajectory({0, 0}, {10, 0}, 11);
  const auto s = trajectory_between(t, 2.5, 7.5);
  EXPECT_NEAR(s.arc_length(), 5.0, 1e-12);
  EXPECT_NEAR(s.samples.front().x_m, 2.5, 1e-12);
  EXPECT_NEAR(s.samples.back().x_m, 7.5, 1e-12);
  EXPECT_NO_THROW(s.validate());
  const auto empty = trajectory_between(t, 4.0, 4.0);
  EXPECT_NO_THROW(empty.validate());
  EXPECT_NEAR(empty.arc_length(), 0.0, 1e-12);
}

TEST(RootGuidance, FullStrengthHitsTargetsAndKeepsLimbOffsets) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = testkit::random_clip(rng, 30, 4, 2.0);
    const auto g = resample_trajectory(testkit::line_trajectory({-1, 0}, {3, 2}, 5), 30,
                                       StrengthSchedule::constant);
    const auto out = apply_root_guidance(c, g);
    for (std::size_t f = 0; f < 30; ++f) {
      EXPECT_NEAR(out.root(f).x, g.per_frame_xy[f].x, 1e-12);
      EXPECT_NEAR(out.root(f).y, g.per_frame_xy[f].y, 1e-12);
      EXPECT_DOUBLE_EQ(out.root(f).z, c.root(f).z);
      for (std::size_t j = 1; j < 4; ++j) {
        const auto before = c.frame(f)[j] - c.frame(f)[0];
        const auto after = out.frame(f)[j] - out.frame(f)[0];
        EXPECT_NEAR((before - after).norm(), 0.0, 1e-12);
      }
    }
  }
}

TEST(RootGuidance, RampLeavesFirstFrameAndLandsLast) {
  std::mt19937_64 rng(33);
  const auto c = testkit::random_clip(rng, 20, 2);
  const auto g = resample_trajectory(testkit::line_trajectory({5, 5}, {9, 5}, 3), 20);
  const auto out = apply_root_guidance(c, g);
  EXPECT_EQ(out.frame(0), c.frame(0));
  EXPECT_NEAR((Vec2{out.root(19).x, out.root(19).y} - Vec2{9, 5}).norm(), 0.0, 1e-12);
  const SpatialSpec last{{{19, {9, 5}}}};
  EXPECT_LT(spatial_distance(out, last), 1e-9);
}

TEST(RootGuidance, RejectsMismatchedTargets) {
  std::mt19937_64 rng(34);
  const auto c = testkit::random_clip(rng, 10, 1);
  EXPECT_THROW(apply_root_guidance(c, resample_trajectory(testkit::line_trajectory({0, 0}, {1, 0}, 2), 9)),
               ValidationError);
  GuidanceTargets bad{std::vector<Vec2>(10), std::vector<double>(10, 1.5)};
  EXPECT_THROW(apply_root_guidance(c, bad), ValidationError);
}

TEST(PinRootTargets, ExactAtTargetsAndLocal) {
  std::mt19937_64 rng(35);
  const auto c = testkit::random_clip(rng, 100, 3);
  const std::vector<SpatialTarget> targets{{40, {5, 5}}, {47, {-3, 1}}};
  const auto out = pin_root_targets(c, targets, 15);
  EXPECT_LT(spatial_distance(out, SpatialSpec{targets}), 1e-12);
  // Half-width shrinks to the 7-frame gap.
  for (std::size_t f = 0; f < 100; ++f) {
    if (f > 33 && f < 54) continue;
    EXPECT_EQ(out.frame(f), c.frame(f)) << f;
  }
  EXPECT_THROW(pin_root_targets(c, {{100, {0, 0}}}, 5), ValidationError);
  EXPECT_THROW(pin_root_targets(c, {{3, {0, 0}}, {3, {1, 1}}}, 5), ValidationError);
}
