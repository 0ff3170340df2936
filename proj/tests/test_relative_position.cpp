#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scenmine/errors.hpp"
#include "scenmine/relative_position.hpp"
#include "test_support.hpp"

namespace scenmine {
namespace {

using P = RelativePosition;

TEST(ClassifyPosition, Examples) {
  EXPECT_EQ(classify_position(3, 3, 100.0, 90.0, -30.0), P::Front);
  EXPECT_EQ(classify_position(3, 2, 0.0, 50.0, 30.0), P::LeftAdjacent);
  EXPECT_EQ(classify_position(3, 5, 0.0, -50.0, 30.0), P::LaneNextToRightAdjacent);
  EXPECT_EQ(classify_position(3, 6, 0.0, 10.0, 30.0), P::OutOfScope);
  EXPECT_EQ(classify_position(3, 3, 10.0, 10.0, 30.0), P::OutOfScope);
  EXPECT_THROW((void)classify_position(3, 3, 0.0, 10.0, 0.0), UndecidableDirectionError);
}

TEST(ClassifyPosition, ExhaustiveTruthTable) {
  int cases = 0;
  for (const double v : {-30.0, 30.0}) {
    for (int dl = -2; dl <= 2; ++dl) {
      for (const double dx : {-12.5, 12.5}) {
        const int lane_ego = 4;
        EXPECT_EQ(classify_position(lane_ego, lane_ego + dl, 200.0, 200.0 + dx, v),
                  oracle::eq34(dl, dx, v))
            << "v " << v << " dl " << dl << " dx " << dx;
        ++cases;
      }
    }
  }
  EXPECT_EQ(cases, 20);
}

TEST(ClassifyPosition, DirectionDuality) {
  for (int dl = -3; dl <= 3; ++dl) {
    for (const double dx : {-7.0, 3.0}) {
      for (const double v : {-20.0, 25.0}) {
        EXPECT_EQ(classify_position(4, 4 + dl, 0.0, dx, v), classify_position(4, 4 - dl, 0.0, -dx, -v));
      }
    }
  }
}

TEST(ClassifyPosition, OutOfScopeBeyondTwoLanes) {
  for (const int dl : {-4, -3, 3, 4}) {
    EXPECT_EQ(classify_position(4, 4 + dl, 0.0, 5.0, 30.0), P::OutOfScope);
  }
}

TEST(PositionAt, ComparesCentres) {
  // corners say "behind", centres say "front": a long ego and a short target
  TrackSample ego;
  ego.x = 100.0;
  ego.width = 16.0;  // centre 108
  ego.lane_id = 3;
  TrackSample tgt;
  tgt.x = 99.0;
  tgt.width = 20.0;  // centre 109
  tgt.lane_id = 3;
  EXPECT_EQ(position_at(ego, tgt, 1), P::Front);
  EXPECT_EQ(position_at(tgt, ego, 1), P::Behind);
}

TEST(PositionTimeline, CutInFixture) {
  std::vector<int> lanes(100, 2);
  std::fill(lanes.begin() + 50, lanes.end(), 3);
  const auto ego = testing::cruise(1, 0, 100, 0.0, 25.0, 3);
  const auto tgt = testing::from_profile(2, 0, std::vector<double>(100, 0.0), lanes, 25.0, 20.0);
  const auto spans = position_timeline(ego, tgt);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0], (PositionSpan{P::LeftAdjacent, 0, 49}));
  EXPECT_EQ(spans[1], (PositionSpan{P::Front, 50, 99}));
  // frame-wise agreement with the oracle
  for (FrameIndex f = 0; f < 100; ++f) {
    EXPECT_EQ(oracle::label_at(spans, f), oracle::position(ego.at_frame(f), tgt.at_frame(f), 25.0));
  }
}

TEST(PositionTimeline, TilesCoexistenceAndSwapIsAntisymmetric) {
  const auto a = testing::cruise(1, 0, 80, 0.0, 25.0, 3);
  const auto b = testing::cruise(2, 30, 100, 40.0, 20.0, 3);
  const auto ab = position_timeline(a, b);
  EXPECT_TRUE(oracle::tiles(ab, FrameInterval{30, 79}));
  EXPECT_TRUE(oracle::alternates(ab));
  const auto ba = position_timeline(b, a);
  ASSERT_EQ(ab.size(), ba.size());
  for (std::size_t i = 0; i < ab.size(); ++i) {
    EXPECT_EQ(ab[i].interval(), ba[i].interval());
    if (ab[i].kind == P::Front) EXPECT_EQ(ba[i].kind, P::Behind);
    if (ab[i].kind == P::Behind) EXPECT_EQ(ba[i].kind, P::Front);
  }
}

TEST(PositionTimeline, DisjointVehiclesThrow) {
  const auto a = testing::cruise(1, 0, 10, 0.0, 25.0, 3);
  const auto b = testing::cruise(2, 20, 10, 0.0, 25.0, 3);
  EXPECT_THROW((void)position_timeline(a, b), EmptyWindowError);
}

TEST(PositionLabels, Text) {
  EXPECT_EQ(label(P::Front), "front");
  EXPECT_EQ(label(P::LaneNextToLeftAdjacent), "lane next to left adjacent lane");
  EXPECT_EQ(label(P::OutOfScope), "out of scope");
}

}  // namespace
}  // namespace scenmine
