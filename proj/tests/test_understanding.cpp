#include <gtest/gtest.h>

#include <thread>

#include "httplib.h"
#include "scenmine/errors.hpp"
#include "scenmine/understanding.hpp"
#include "test_support.hpp"

namespace scenmine {
namespace {

using LA = LongitudinalActivity;
using Lat = LateralActivity;
using P = RelativePosition;

ScenarioQuery cut_in_query() {
  ScenarioQuery q;
  q.ego_longitudinal = LA::KeepVelocity;
  q.ego_lateral = Lat::FollowLane;
  q.targets.push_back({position_spec(P::LeftAdjacent), position_spec(P::Front), LA::Acceleration,
                       Lat::LaneChangeRight});
  return q;
}

ProviderConfig fast_config(int retries = 2) {
  ProviderConfig c;
  c.max_retries = retries;
  c.timeout_seconds = 2.0;
  return c;
}

TEST(BuildPrompt, SegmentsAndOrder) {
  const std::string desc = "The ego vehicle maintains its lane and velocity.";
  const auto b = build_prompt(desc);
  EXPECT_EQ(b.description_segment, "Scenario Description: " + desc);
  EXPECT_NE(b.system_segment.find(taxonomy_text()), std::string::npos);
  EXPECT_NE(b.format_segment.find("Target Vehicle #1"), std::string::npos);
  EXPECT_NE(b.example_segment.find("'lane change right'"), std::string::npos);
  EXPECT_FALSE(b.closing_segment.empty());
  const auto text = b.text();
  EXPECT_LT(text.find(b.system_segment), text.find(b.description_segment));
  EXPECT_LT(text.find(b.description_segment), text.find(b.format_segment));
  EXPECT_LT(text.find(b.format_segment), text.find(b.example_segment));
  EXPECT_LT(text.find(b.example_segment), text.find(b.closing_segment));
}

TEST(BuildPrompt, TaxonomyListsTwelveLeaves) {
  const auto sys = build_prompt("x").system_segment;
  int found = 0;
  for (const auto a : kLongitudinalActivities) found += sys.find(std::string(label(a))) != std::string::npos;
  for (const auto a : kLateralActivities) found += sys.find(std::string(label(a))) != std::string::npos;
  for (const auto p : kInScopePositions) found += sys.find(std::string(label(p))) != std::string::npos;
  EXPECT_EQ(found, 12);
}

TEST(BuildPrompt, DeterministicAndRejectsBlank) {
  EXPECT_EQ(build_prompt("same text"), build_prompt("same text"));
  EXPECT_THROW((void)build_prompt(""), InputError);
  EXPECT_THROW((void)build_prompt("  \n\t"), InputError);
}

TEST(ProviderConfig, Validation) {
  auto c = fast_config();
  EXPECT_NO_THROW(c.validate());
  c.timeout_seconds = 0.0;
  EXPECT_THROW(c.validate(), InputError);
  c = fast_config(-1);
  EXPECT_THROW(c.validate(), InputError);
  EXPECT_EQ(ProviderConfig{}.model, "gpt-4-1106-preview");
}

TEST(InterpretRemote, ExampleBlockGivesExampleQuery) {
  ScriptedTransport t({build_prompt("x").example_segment});
  const auto r = interpret_remote("some cut-in", fast_config(), t);
  EXPECT_EQ(r.query, cut_in_query());
  EXPECT_EQ(r.attempts, 1);
  ASSERT_EQ(t.requests().size(), 1u);
  const auto& req = t.requests()[0];
  EXPECT_EQ(req.model, "gpt-4-1106-preview");
  EXPECT_EQ(req.temperature, 0.0);
  ASSERT_EQ(req.messages.size(), 1u);
  EXPECT_EQ(req.messages[0].role, "user");
  EXPECT_EQ(req.messages[0].content, build_prompt("some cut-in").text());
}

TEST(InterpretRemote, GarbageTwiceThenValid) {
  ScriptedTransport t({"no idea", "{still: wrong}", to_braced_text(cut_in_query())});
  const auto r = interpret_remote("d", fast_config(2), t);
  EXPECT_EQ(r.query, cut_in_query());
  EXPECT_EQ(r.attempts, 3);
  EXPECT_EQ(r.raw_responses.size(), 3u);
  ASSERT_EQ(t.requests().size(), 3u);
  const std::string corrective(kCorrectiveSentence);
  EXPECT_EQ(t.requests()[0].messages[0].content.find(corrective), std::string::npos);
  EXPECT_NE(t.requests()[1].messages[0].content.find(corrective), std::string::npos);
  EXPECT_NE(t.requests()[2].messages[0].content.find(corrective), std::string::npos);
}

TEST(InterpretRemote, TransportFailureRetriedWithoutCorrection) {
  ScriptedTransport t({"", to_braced_text(cut_in_query())});
  const auto r = interpret_remote("d", fast_config(1), t);
  EXPECT_EQ(r.attempts, 2);
  EXPECT_EQ(r.raw_responses.size(), 1u);
  EXPECT_EQ(t.requests()[1].messages[0].content.find(std::string(kCorrectiveSentence)),
            std::string::npos);
}

TEST(InterpretRemote, ExhaustionCarriesLastRawResponse) {
  ScriptedTransport t({"first", "second"});
  try {
    (void)interpret_remote("d", fast_config(1), t);
    FAIL() << "expected ProviderError";
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.last_raw_response(), "second");
  }
  EXPECT_EQ(t.requests().size(), 2u);
}

TEST(InterpretRemote, InvalidQueryIsRetried) {
  // parses, but the start position is outside its group
  auto bad = cut_in_query();
  bad.targets[0].start = {PositionGroup::SameLane, P::LeftAdjacent};
  ScriptedTransport t({to_braced_text(bad), to_braced_text(cut_in_query())});
  EXPECT_EQ(interpret_remote("d", fast_config(1), t).attempts, 2);
}

TEST(InterpretRemote, UnreachableEndpointIsProviderError) {
  auto c = fast_config(1);
  c.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  c.timeout_seconds = 0.5;
  try {
    (void)interpret_remote("d", c);
    FAIL() << "expected ProviderError";
  } catch (const ProviderError& e) {
    EXPECT_TRUE(e.last_raw_response().empty());
  }
}

class StubProvider : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      if (status_ != 200) {
        res.status = status_;
        res.set_content("{\"error\":\"nope\"}", "application/json");
        return;
      }
      const nlohmann::json body = {
          {"choices", {{{"message", {{"role", "assistant"}, {"content", answer_}}}}}}};
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  ProviderConfig config() const {
    auto c = fast_config(0);
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.api_key = "sk-test";
    return c;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int status_ = 200;
  std::string answer_;
  std::string last_body_;
  std::string last_auth_;
};

TEST_F(StubProvider, RoundTrip) {
  answer_ = to_braced_text(cut_in_query());
  const auto r = interpret_remote("desc", config());
  EXPECT_EQ(r.query, cut_in_query());
  EXPECT_EQ(last_auth_, "Bearer sk-test");
  const auto sent = nlohmann::json::parse(last_body_);
  EXPECT_EQ(sent["model"], "gpt-4-1106-preview");
  EXPECT_EQ(sent["messages"][0]["role"], "user");
  EXPECT_EQ(sent["temperature"], 0.0);
}

TEST_F(StubProvider, RejectedKeyIsCredentialError) {
  status_ = 401;
  HttpChatTransport t;
  EXPECT_THROW((void)t.complete({}, config()), CredentialError);
  EXPECT_THROW((void)interpret_remote("desc", config()), CredentialError);
}

TEST_F(StubProvider, ServerErrorIsTransportError) {
  status_ = 500;
  HttpChatTransport t;
  EXPECT_THROW((void)t.complete({}, config()), TransportError);
  EXPECT_THROW((void)interpret_remote("desc", config()), ProviderError);
}

TEST(Transcripts, SaveLoadRoundTrip) {
  const auto dir = testing::scratch_dir("transcripts");
  const Transcript t{"a description", "m", {"one", "two"}};
  save_transcript(dir / "t.json", t);
  const auto back = load_transcript(dir / "t.json");
  EXPECT_EQ(back.description, t.description);
  EXPECT_EQ(back.model, t.model);
  EXPECT_EQ(back.responses, t.responses);
  EXPECT_THROW((void)load_transcript(dir / "missing.json"), InputError);
}

class RecordedTranscript : public ::testing::TestWithParam<const char*> {};

// Replaying a recorded exchange and the offline rules agree on every fixture.
TEST_P(RecordedTranscript, ReplayMatchesOffline) {
  const std::string name = GetParam();
  const auto t = load_transcript(testing::data_path("fixtures/transcripts/" + name + ".json"));
  const auto text = testing::read_file(testing::data_path("fixtures/descriptions/" + name + ".txt"));
  EXPECT_EQ(t.description, text.substr(0, text.find_last_not_of("\r\n") + 1));
  ScriptedTransport replay(t.responses);
  const auto remote = interpret_remote(t.description, fast_config(), replay);
  EXPECT_EQ(remote.query, interpret_offline(t.description));
}

INSTANTIATE_TEST_SUITE_P(Fixtures, RecordedTranscript,
                         ::testing::Values("following", "cut_in", "cut_out"),
                         [](const auto& info) { return std::string(info.param); });

}  // namespace
}  // namespace scenmine
