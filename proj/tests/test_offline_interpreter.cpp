#include <gtest/gtest.h>

#include "scenmine/errors.hpp"
#include "scenmine/understanding.hpp"
#include "test_support.hpp"

namespace scenmine {
namespace {

using LA = LongitudinalActivity;
using Lat = LateralActivity;
using P = RelativePosition;

std::string fixture(const std::string& name) {
  return testing::read_file(testing::data_path("fixtures/descriptions/" + name + ".txt"));
}

ScenarioQuery single(LA ego_lon, Lat ego_lat, P start, P end, LA lon, Lat lat) {
  ScenarioQuery q;
  q.ego_longitudinal = ego_lon;
  q.ego_lateral = ego_lat;
  q.targets.push_back({position_spec(start), position_spec(end), lon, lat});
  return q;
}

TEST(Offline, CutInFixtureEqualsPromptExample) {
  const auto q = interpret_offline(fixture("cut_in"));
  EXPECT_EQ(q, parse_llm_response(build_prompt("x").example_segment));
  EXPECT_EQ(q, single(LA::KeepVelocity, Lat::FollowLane, P::LeftAdjacent, P::Front, LA::Acceleration,
                      Lat::LaneChangeRight));
}

TEST(Offline, FollowingFixture) {
  EXPECT_EQ(interpret_offline(fixture("following")),
            single(LA::Deceleration, Lat::FollowLane, P::Front, P::Front, LA::Deceleration,
                   Lat::FollowLane));
}

TEST(Offline, CutOutFixture) {
  EXPECT_EQ(interpret_offline(fixture("cut_out")),
            single(LA::KeepVelocity, Lat::FollowLane, P::Front, P::RightAdjacent, LA::Acceleration,
                   Lat::LaneChangeRight));
}

TEST(Offline, PureFunctionOfText) {
  for (const char* name : {"following", "cut_in", "cut_out"}) {
    const auto text = fixture(name);
    EXPECT_EQ(to_json(interpret_offline(text)).dump(), to_json(interpret_offline(text)).dump());
  }
}

TEST(Offline, SynonymsAndDefaults) {
  EXPECT_EQ(interpret_offline("The ego vehicle keeps speed. Target vehicle #1 brakes in front of the ego vehicle in the same lane."),
            single(LA::KeepVelocity, Lat::FollowLane, P::Front, P::Front, LA::Deceleration, Lat::FollowLane));
  // no activity mentioned for the target: keep velocity, follow lane
  EXPECT_EQ(interpret_offline("The ego vehicle accelerates. A target vehicle drives behind the ego vehicle."),
            single(LA::Acceleration, Lat::FollowLane, P::Behind, P::Behind, LA::KeepVelocity, Lat::FollowLane));
}

TEST(Offline, CutInPhraseImpliesPositions) {
  EXPECT_EQ(interpret_offline("The ego vehicle keeps its speed. Target vehicle #1 accelerates and cuts in from the left."),
            single(LA::KeepVelocity, Lat::FollowLane, P::LeftAdjacent, P::Front, LA::Acceleration,
                   Lat::LaneChangeRight));
}

TEST(Offline, EndPositionInferredFromLaneChange) {
  const auto q = interpret_offline(
      "The ego vehicle follows the lane. Target vehicle #1 starts in the right adjacent lane and changes lanes to the right.");
  ASSERT_EQ(q.targets.size(), 1u);
  EXPECT_EQ(q.targets[0].start.member, P::RightAdjacent);
  EXPECT_EQ(q.targets[0].end.member, P::LaneNextToRightAdjacent);
}

TEST(Offline, TwoNumberedTargets) {
  const auto q = interpret_offline(
      "The ego vehicle decelerates. Target vehicle #2 is behind the ego vehicle in the same lane. "
      "Target vehicle #1 is in front of the ego vehicle in the same lane and decelerates.");
  ASSERT_EQ(q.targets.size(), 2u);
  EXPECT_EQ(q.targets[0].start.member, P::Front);
  EXPECT_EQ(q.targets[0].longitudinal, LA::Deceleration);
  EXPECT_EQ(q.targets[1].start.member, P::Behind);
  EXPECT_EQ(q.targets[1].longitudinal, LA::KeepVelocity);
}

TEST(Offline, Errors) {
  EXPECT_THROW((void)interpret_offline("The ego vehicle keeps its speed."), InterpretationError);
  EXPECT_THROW((void)interpret_offline("Target vehicle #1 accelerates."), VocabularyError);
  EXPECT_THROW((void)interpret_offline("   "), InputError);
}

}  // namespace
}  // namespace scenmine
