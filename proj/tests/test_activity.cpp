#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "scenmine/activity.hpp"
#include "scenmine/errors.hpp"
#include "test_support.hpp"

namespace scenmine {
namespace {

using LA = LongitudinalActivity;
using Lat = LateralActivity;

Trajectory accel_track(const std::vector<double>& ax, double vx = 20.0) {
  return testing::from_profile(1, 0, ax, std::vector<int>(ax.size(), 3), vx);
}

Trajectory lane_track(const std::vector<int>& lanes, double vx) {
  return testing::from_profile(1, 0, std::vector<double>(lanes.size(), 0.0), lanes, vx);
}

TEST(ClassifyLongitudinal, Branches) {
  EXPECT_EQ(classify_longitudinal(-0.5, 0.2), LA::Deceleration);
  EXPECT_EQ(classify_longitudinal(0.5, 0.2), LA::Acceleration);
  EXPECT_EQ(classify_longitudinal(0.0, 0.2), LA::KeepVelocity);
  // boundaries belong to keep velocity
  EXPECT_EQ(classify_longitudinal(0.2, 0.2), LA::KeepVelocity);
  EXPECT_EQ(classify_longitudinal(-0.2, 0.2), LA::KeepVelocity);
}

TEST(ClassifyLongitudinal, RejectsBadInput) {
  EXPECT_THROW((void)classify_longitudinal(std::nan(""), 0.2), InputError);
  EXPECT_THROW((void)classify_longitudinal(0.1, 0.0), InputError);
  EXPECT_THROW((void)classify_longitudinal(0.1, -1.0), InputError);
}

TEST(ClassifyLongitudinal, MatchesLiteralOracleOnRandomPairs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(-5.0, 5.0);
  std::uniform_real_distribution<double> thr(0.01, 2.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = a(rng);
    const double t = thr(rng);
    ASSERT_EQ(classify_longitudinal(x, t), oracle::eq1(x, t)) << x << ' ' << t;
  }
}

TEST(ClassifyLateral, Branches) {
  EXPECT_EQ(classify_lateral(0, 30.0), Lat::FollowLane);
  EXPECT_EQ(classify_lateral(1, 30.0), Lat::LaneChangeRight);
  EXPECT_EQ(classify_lateral(1, -30.0), Lat::LaneChangeLeft);
  EXPECT_EQ(classify_lateral(-1, -30.0), Lat::LaneChangeRight);
  EXPECT_EQ(classify_lateral(0, 0.0), Lat::FollowLane);
  EXPECT_THROW((void)classify_lateral(1, 0.0), UndecidableDirectionError);
}

TEST(ClassifyLateral, OracleAndMirror) {
  for (int dl = -2; dl <= 2; ++dl) {
    for (const double v : {-30.0, 30.0}) {
      EXPECT_EQ(classify_lateral(dl, v), oracle::eq2(dl, v));
      EXPECT_EQ(classify_lateral(dl, v), classify_lateral(-dl, -v));
    }
  }
}

TEST(SegmentLongitudinal, ConstantSeriesIsOneSegment) {
  const auto segs = segment_longitudinal(accel_track(std::vector<double>(100, 0.0)), {}, 25.0);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0], (LongitudinalSegment{LA::KeepVelocity, 0, 99}));
}

TEST(SegmentLongitudinal, TwoPhases) {
  std::vector<double> ax(100, -1.0);
  std::fill(ax.begin() + 50, ax.end(), 1.0);
  DetectionParams p;
  p.min_activity_duration = 0.0;
  const auto segs = segment_longitudinal(accel_track(ax), p, 25.0);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0], (LongitudinalSegment{LA::Deceleration, 0, 49}));
  EXPECT_EQ(segs[1], (LongitudinalSegment{LA::Acceleration, 50, 99}));
}

TEST(SegmentLongitudinal, UsesTravelDirection) {
  // x acceleration +1 while moving towards -x is braking
  const auto segs = segment_longitudinal(accel_track(std::vector<double>(60, 1.0), -30.0), {}, 25.0);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].kind, LA::Deceleration);
}

TEST(SegmentLongitudinal, ShortBlipIsAbsorbed) {
  std::vector<double> ax(100, 0.0);
  for (int i = 40; i < 45; ++i) ax[static_cast<std::size_t>(i)] = 1.0;
  const auto segs = segment_longitudinal(accel_track(ax), {}, 25.0);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0], (LongitudinalSegment{LA::KeepVelocity, 0, 99}));
}

TEST(SegmentLongitudinal, TieGoesToPrecedingNeighbour) {
  // 30 decel, 5 keep, 30 accel: the short run joins the deceleration
  std::vector<double> ax(65, -1.0);
  for (int i = 30; i < 35; ++i) ax[static_cast<std::size_t>(i)] = 0.0;
  for (int i = 35; i < 65; ++i) ax[static_cast<std::size_t>(i)] = 1.0;
  const auto segs = segment_longitudinal(accel_track(ax), {}, 25.0);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0], (LongitudinalSegment{LA::Deceleration, 0, 34}));
  EXPECT_EQ(segs[1], (LongitudinalSegment{LA::Acceleration, 35, 64}));
}

TEST(SegmentLongitudinal, RandomSeriesMatchBruteForceAndTile) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> len(1, 400);
  std::uniform_int_distribution<int> run(1, 60);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> mag(0.0, 2.0);
  std::uniform_real_distribution<double> dur(0.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    std::vector<double> ax;
    while (static_cast<int>(ax.size()) < n) {
      const int k = kind(rng);
      const int r = run(rng);
      for (int i = 0; i < r && static_cast<int>(ax.size()) < n; ++i) {
        const double m = mag(rng);
        ax.push_back(k == 0 ? 0.1 * (m - 1.0) : (k == 1 ? 0.21 + m : -0.21 - m));
      }
    }
    DetectionParams p;
    p.min_activity_duration = dur(rng);
    const auto t = testing::from_profile(1, 1000, ax, std::vector<int>(ax.size(), 2), 25.0);
    const auto segs = segment_longitudinal(t, p, 25.0);
    ASSERT_EQ(segs, oracle::segment_longitudinal(ax, 1000, p.a_lon_threshold,
                                                 p.min_activity_duration * 25.0))
        << "trial " << trial;
    ASSERT_TRUE(oracle::tiles(segs, t.frames()));
    ASSERT_TRUE(oracle::alternates(segs));
    if (segs.size() > 1) {
      for (const auto& s : segs) ASSERT_GE(static_cast<double>(s.length()), p.min_activity_duration * 25.0);
    }
  }
}

TEST(SegmentLateral, ConstantLane) {
  const auto segs = segment_lateral(lane_track(std::vector<int>(80, 2), 30.0), {}, 25.0);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0], (LateralSegment{Lat::FollowLane, 0, 79}));
}

TEST(SegmentLateral, WindowAroundCrossing) {
  std::vector<int> lanes(200, 2);
  std::fill(lanes.begin() + 100, lanes.end(), 3);
  const auto segs = segment_lateral(lane_track(lanes, 30.0), {}, 25.0);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[0], (LateralSegment{Lat::FollowLane, 0, 49}));
  EXPECT_EQ(segs[1], (LateralSegment{Lat::LaneChangeRight, 50, 150}));
  EXPECT_EQ(segs[2], (LateralSegment{Lat::FollowLane, 151, 199}));
}

TEST(SegmentLateral, NegativeDirection) {
  std::vector<int> lanes(200, 3);
  std::fill(lanes.begin() + 100, lanes.end(), 2);
  const auto segs = segment_lateral(lane_track(lanes, -30.0), {}, 25.0);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[1].kind, Lat::LaneChangeRight);
}

TEST(SegmentLateral, ClippedAtTrajectoryEnds) {
  std::vector<int> lanes(60, 2);
  std::fill(lanes.begin() + 10, lanes.end(), 3);
  const auto segs = segment_lateral(lane_track(lanes, 30.0), {}, 25.0);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0], (LateralSegment{Lat::LaneChangeRight, 0, 59}));
}

TEST(SegmentLateral, SameDirectionWindowsMerge) {
  std::vector<int> lanes(300, 2);
  std::fill(lanes.begin() + 100, lanes.end(), 3);
  std::fill(lanes.begin() + 160, lanes.end(), 4);
  const auto segs = segment_lateral(lane_track(lanes, 30.0), {}, 25.0);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[1], (LateralSegment{Lat::LaneChangeRight, 50, 210}));
}

TEST(SegmentLateral, OppositeChangesWithinWindowAreAmbiguous) {
  std::vector<int> lanes(300, 2);
  std::fill(lanes.begin() + 100, lanes.begin() + 150, 3);
  try {
    (void)segment_lateral(lane_track(lanes, 30.0), {}, 25.0);
    FAIL() << "expected AmbiguityError";
  } catch (const AmbiguityError& e) {
    EXPECT_EQ(e.frames(), (std::vector<FrameIndex>{100, 150}));
  }
}

TEST(SegmentLateral, RandomLanesTileAndAlternate) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> gap(20, 300);
  std::uniform_int_distribution<int> step(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> lanes;
    int lane = 50;
    const int dir = step(rng) == 0 ? 1 : -1;  // one direction only, so no ambiguity
    while (lanes.size() < 600) {
      const int g = gap(rng);
      for (int i = 0; i < g; ++i) lanes.push_back(lane);
      lane += dir;
    }
    const auto t = lane_track(lanes, 30.0);
    const auto segs = segment_lateral(t, {}, 25.0);
    ASSERT_TRUE(oracle::tiles(segs, t.frames()));
    ASSERT_TRUE(oracle::alternates(segs));
  }
}

TEST(DetectionParams, Validation) {
  DetectionParams p;
  p.a_lon_threshold = 0.0;
  EXPECT_THROW(p.validate(), InputError);
  p = {};
  p.min_activity_duration = -1.0;
  EXPECT_THROW(p.validate(), InputError);
}

}  // namespace
}  // namespace scenmine
