#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "caring/errors.hpp"
#include "caring/metrics.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace caring;
using caring::testkit::brute_spatial;
using caring::testkit::brute_transition;


TEST(TransitionDistance, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> joints(1, 8);
  std::uniform_int_distribution<int> nb(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = testkit::random_clip(rng, 40, joints(rng), 3.0);
    std::vector<std::size_t> firsts;
    std::uniform_int_distribution<std::size_t> pick(1, 39);
    for (int k = nb(rng); k > 0; --k) firsts.push_back(pick(rng));
    std::sort(firsts.begin(), firsts.end());
    firsts.erase(std::unique(firsts.begin(), firsts.end()), firsts.end());
    EXPECT_NEAR(transition_distance(c, TransitionSpec::from_first_frames(firsts)),
                brute_transition(c, firsts), 1e-12);
  }
}

TEST(TransitionDistance, KnownValue) {
  std::vector<Frame> f{Frame{{0, 0, 0}, {0, 0, 0}}, Frame{{3, 4, 0}, {0, 0, 1}}};
  const MotionClip c(point_skeleton(2), 20, f);
  EXPECT_DOUBLE_EQ(transition_distance(c, TransitionSpec::from_first_frames({1})), 3.0);
}

TEST(TransitionDistance, RejectsBadPairs) {
  std::mt19937_64 rng(22);
  const auto c = testkit::random_clip(rng, 10, 1);
  EXPECT_THROW(transition_distance(c, TransitionSpec{}), ValidationError);
  EXPECT_THROW(transition_distance(c, TransitionSpec{{{3, 5}}}), ValidationError);
  EXPECT_THROW(transition_distance(c, TransitionSpec{{{9, 10}}}), ValidationError);
  EXPECT_THROW(TransitionSpec::from_first_frames({0}), ValidationError);
}

TEST(SpatialDistance, MatchesBruteForceAndIgnoresHeight) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = testkit::random_clip(rng, 30, 1 + trial % 8, 3.0);
    SpatialSpec s;
    for (int k = 0; k < 1 + trial % 6; ++k) s.targets.push_back({static_cast<std::size_t>(k * 5), {u(rng), u(rng)}});
    EXPECT_NEAR(spatial_distance(c, s), brute_spatial(c, s), 1e-12);
  }
}

TEST(SpatialDistance, RejectsEmptyAndOutOfRange) {
  std::mt19937_64 rng(24);
  const auto c = testkit::random_clip(rng, 10, 1);
  EXPECT_THROW(spatial_distance(c, SpatialSpec{}), ValidationError);
  EXPECT_THROW(spatial_distance(c, SpatialSpec{{{10, {0, 0}}}}), ValidationError);
}

TEST(Report, RatioPlausibilityAndJson) {
  std::vector<Frame> naive{Frame{{0, 0, 0}}, Frame{{0.3, 0, 0}}};
  std::vector<Frame> smooth{Frame{{0, 0, 0}}, Frame{{0.1, 0, 0}}};
  const auto spec = TransitionSpec::from_first_frames({1});
  const SpatialSpec sp{{{1, {0.15, 0.0}}}};
  const auto r = report(MotionClip(point_skeleton(1), 20, naive, "", {1}),
                        MotionClip(point_skeleton(1), 20, smooth, "", {1}), spec, sp);
  EXPECT_NEAR(r.ratio, 3.0, 1e-12);
  ASSERT_TRUE(r.plausible.has_value());
  EXPECT_TRUE(*r.plausible);
  EXPECT_NEAR(*r.after.spatial_m, 0.05, 1e-12);
  EXPECT_EQ(parse_report(serialize_report(r)), r);
}

TEST(Report, InfiniteRatioSerializesAsNull) {
  std::vector<Frame> naive{Frame{{0, 0, 0}}, Frame{{1, 0, 0}}};
  std::vector<Frame> flat{Frame{{0, 0, 0}}, Frame{{0, 0, 0}}};
  const auto r = report(MotionClip(point_skeleton(1), 20, naive, "", {1}),
                        MotionClip(point_skeleton(1), 20, flat, "", {1}), TransitionSpec::from_first_frames({1}));
  EXPECT_TRUE(std::isinf(r.ratio));
  EXPECT_FALSE(r.plausible.has_value());
  EXPECT_TRUE(to_json(r)["ratio"].is_null());
  EXPECT_EQ(parse_report(serialize_report(r)), r);
}

TEST(Report, RequiresMatchingVariants) {
  std::mt19937_64 rng(25);
  const auto a = testkit::random_clip(rng, 10, 1, 1.0, {5});
  const auto b = testkit::random_clip(rng, 11, 1, 1.0, {5});
  EXPECT_THROW(report(a, b, TransitionSpec::from_first_frames({5})), ValidationError);
}
