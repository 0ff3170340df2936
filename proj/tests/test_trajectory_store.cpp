#include <gtest/gtest.h>

#include <sstream>

#include "scenmine/errors.hpp"
#include "scenmine/trajectory_store.hpp"
#include "test_support.hpp"

namespace scenmine {
namespace {

constexpr const char* kHeader =
    "frame,id,x,y,width,height,xVelocity,yVelocity,xAcceleration,yAcceleration,laneId\n";

TrajectoryStore parse(const std::string& text) {
  std::istringstream in(text);
  return parse_tracks_csv(in, RecordingConfig{});
}

TEST(TrajectoryStore, ParsesMinimalFile) {
  const auto store = parse(std::string(kHeader) + "1,162,389.16,12.35,4.5,1.9,-30.1,0,0.1,0,2\n" +
                           "2,162,387.96,12.35,4.5,1.9,-30.1,0,0.1,0,2\n");
  ASSERT_EQ(store.track_count(), 1u);
  EXPECT_EQ(store.sample_count(), 2u);
  const auto& t = store.get(162);
  EXPECT_EQ(t.frames(), (FrameInterval{1, 2}));
  EXPECT_DOUBLE_EQ(t.samples[0].x, 389.16);
  EXPECT_DOUBLE_EQ(t.samples[0].center_x(), 389.16 + 2.25);
  EXPECT_EQ(travel_sign(t), -1);
}

TEST(TrajectoryStore, ColumnOrderAndExtraColumnsDoNotMatter) {
  const auto store =
      parse("laneId,extra,yAcceleration,xAcceleration,yVelocity,xVelocity,height,width,y,x,id,frame\n"
            "3,zz,0,0,0,20,2,4,7.5,10,5,100\n");
  EXPECT_DOUBLE_EQ(store.get(5).samples[0].x, 10.0);
  EXPECT_EQ(store.get(5).samples[0].lane_id, 3);
}

TEST(TrajectoryStore, HandlesBomAndCrlf) {
  const auto store = parse("\xEF\xBB\xBF" + std::string(
      "frame,id,x,y,width,height,xVelocity,yVelocity,xAcceleration,yAcceleration,laneId\r\n"
      "1,1,0,0,4,2,10,0,0,0,2\r\n"));
  EXPECT_EQ(store.track_count(), 1u);
}

TEST(TrajectoryStore, MissingColumnIsNamed) {
  try {
    (void)parse("frame,id,x,y,width,height,xVelocity,yVelocity,xAcceleration,yAcceleration\n");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.column(), "laneId");
    EXPECT_NE(std::string(e.what()).find("laneId"), std::string::npos);
  }
}

TEST(TrajectoryStore, HeaderOnlyGivesEmptyStore) {
  const auto store = parse(kHeader);
  EXPECT_EQ(store.track_count(), 0u);
  EXPECT_FALSE(store.frame_range().has_value());
}

TEST(TrajectoryStore, BadCellReportsLine) {
  try {
    (void)parse(std::string(kHeader) + "1,1,0,0,4,2,10,0,0,0,2\n2,1,abc,0,4,2,10,0,0,0,2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
  }
}

TEST(TrajectoryStore, FrameGapIsIntegrityError) {
  EXPECT_THROW((void)parse(std::string(kHeader) + "1,1,0,0,4,2,10,0,0,0,2\n3,1,0,0,4,2,10,0,0,0,2\n"),
               IntegrityError);
  EXPECT_THROW((void)parse(std::string(kHeader) + "1,1,0,0,4,2,10,0,0,0,2\n1,1,0,0,4,2,10,0,0,0,2\n"),
               IntegrityError);
}

TEST(TrajectoryStore, RowsMayArriveOutOfOrder) {
  const auto store = parse(std::string(kHeader) + "2,1,1,0,4,2,10,0,0,0,2\n1,1,0,0,4,2,10,0,0,0,2\n");
  EXPECT_EQ(store.get(1).first_frame(), 1);
  EXPECT_DOUBLE_EQ(store.get(1).samples[1].x, 1.0);
}

TEST(TrajectoryStore, UnknownIdIsNotFound) {
  const auto store = testing::store_of({testing::cruise(1, 0, 10, 0, 20, 2)});
  EXPECT_THROW((void)store.get(2), NotFoundError);
  EXPECT_EQ(store.find(2), nullptr);
}

TEST(TrajectoryStore, SliceIsInclusiveAndChecked) {
  const auto t = testing::cruise(1, 10, 20, 0, 20, 2);
  const auto s = slice(t, 12, 15);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(s.first_frame(), 12);
  EXPECT_EQ(s.last_frame(), 15);
  EXPECT_THROW((void)slice(t, 15, 12), RangeError);
  EXPECT_THROW((void)slice(t, 5, 12), RangeError);
  EXPECT_THROW((void)slice(t, 25, 30), RangeError);
}

TEST(TrajectoryStore, CoexistenceWindow) {
  const auto a = testing::cruise(1, 0, 50, 0, 20, 2);
  const auto b = testing::cruise(2, 30, 50, 0, 20, 2);
  const auto c = testing::cruise(3, 50, 10, 0, 20, 2);
  EXPECT_EQ(coexistence_window(a, b), (FrameInterval{30, 49}));
  EXPECT_FALSE(coexistence_window(a, c).has_value());
}

TEST(TrajectoryStore, WriteThenParseRoundTrips) {
  const auto store = testing::store_of(
      {testing::cruise(1, 0, 30, 0.1, 20.3, 2), testing::cruise(7, 5, 12, 100.7, -31.25, 4)});
  std::ostringstream out;
  write_tracks_csv(out, store);
  const auto again = parse(out.str());
  ASSERT_EQ(again.track_count(), 2u);
  for (const auto& t : store.trajectories()) {
    const auto& u = again.get(t.vehicle_id);
    ASSERT_EQ(u.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_EQ(u.samples[i].x, t.samples[i].x);
      EXPECT_EQ(u.samples[i].x_velocity, t.samples[i].x_velocity);
      EXPECT_EQ(u.samples[i].lane_id, t.samples[i].lane_id);
    }
  }
}

TEST(TrajectoryStore, TravelSignFollowsMedianVelocity) {
  EXPECT_EQ(travel_sign(testing::cruise(1, 0, 5, 0, 12, 2)), 1);
  EXPECT_EQ(travel_sign(testing::cruise(1, 0, 5, 0, -12, 2)), -1);
  EXPECT_EQ(travel_sign(testing::cruise(1, 0, 5, 0, 0, 2)), 0);
}

}  // namespace
}  // namespace scenmine
