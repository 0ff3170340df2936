#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "scenmine/errors.hpp"
#include "scenmine/evaluation.hpp"

namespace scenmine {
namespace {

GroundTruthLabel label(VehicleId ego, VehicleId tgt, FrameIndex a, FrameIndex b,
                       const std::string& category = "cut-in") {
  return {category, ego, tgt, {a, b}};
}

PredictedInstance pred(VehicleId ego, VehicleId tgt, FrameIndex a, FrameIndex b) {
  return {ego, tgt, {a, b}};
}

TEST(MatchPredictions, PerfectAndEmpty) {
  const std::vector<GroundTruthLabel> truth = {label(1, 2, 0, 10), label(1, 3, 20, 40), label(4, 5, 0, 5)};
  std::vector<PredictedInstance> same;
  for (const auto& t : truth) same.push_back({t.ego_id, t.target_id, t.frames});
  EXPECT_EQ(match_predictions(same, truth, MatchMode::Instance), (ConfusionCounts{3, 0, 0}));
  EXPECT_EQ(match_predictions({}, truth, MatchMode::Instance), (ConfusionCounts{0, 0, 3}));
  EXPECT_EQ(match_predictions(same, {}, MatchMode::Instance), (ConfusionCounts{0, 3, 0}));
}

TEST(MatchPredictions, IouBelowThreshold) {
  // [0,6] and [3,9]: 4 shared frames out of 10
  const auto counts = match_predictions({pred(1, 2, 3, 9)}, {label(1, 2, 0, 6)}, MatchMode::Instance, 0.5);
  EXPECT_EQ(counts, (ConfusionCounts{0, 1, 1}));
  EXPECT_EQ(match_predictions({pred(1, 2, 3, 9)}, {label(1, 2, 0, 6)}, MatchMode::Instance, 0.4),
            (ConfusionCounts{1, 0, 0}));
}

TEST(MatchPredictions, PairMustAgree) {
  EXPECT_EQ(match_predictions({pred(1, 3, 0, 6)}, {label(1, 2, 0, 6)}, MatchMode::Instance),
            (ConfusionCounts{0, 1, 1}));
}

TEST(MatchPredictions, HighestIouWinsOneToOne) {
  // both predictions overlap the first label; the better one takes it
  const std::vector<GroundTruthLabel> truth = {label(1, 2, 0, 99)};
  const auto counts = match_predictions({pred(1, 2, 0, 59), pred(1, 2, 0, 95)}, truth, MatchMode::Instance);
  EXPECT_EQ(counts, (ConfusionCounts{1, 1, 0}));
}

TEST(MatchPredictions, FrameMode) {
  const auto counts = match_predictions({pred(1, 2, 0, 2493)}, {label(1, 2, 15, 3307)}, MatchMode::Frame);
  EXPECT_EQ(counts, (ConfusionCounts{2479, 15, 814}));
  // overlapping predictions count each frame once
  EXPECT_EQ(match_predictions({pred(1, 2, 0, 9), pred(1, 2, 5, 14)}, {label(1, 2, 0, 14)}, MatchMode::Frame),
            (ConfusionCounts{15, 0, 0}));
}

TEST(MatchPredictions, ThresholdRange) {
  EXPECT_THROW((void)match_predictions({}, {}, MatchMode::Instance, 0.0), InputError);
  EXPECT_THROW((void)match_predictions({}, {}, MatchMode::Instance, 1.1), InputError);
  EXPECT_NO_THROW((void)match_predictions({}, {}, MatchMode::Instance, 1.0));
}

TEST(MatchPredictions, PermutationInvariant) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> id(1, 4);
  std::uniform_int_distribution<int> start(0, 200);
  std::uniform_int_distribution<int> len(1, 80);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<PredictedInstance> p;
    std::vector<GroundTruthLabel> t;
    for (int i = 0; i < 8; ++i) {
      const int a = start(rng);
      p.push_back(pred(id(rng), id(rng), a, a + len(rng)));
      const int b = start(rng);
      t.push_back(label(id(rng), id(rng), b, b + len(rng)));
    }
    const auto base = match_predictions(p, t, MatchMode::Instance, 0.3);
    std::shuffle(p.begin(), p.end(), rng);
    std::shuffle(t.begin(), t.end(), rng);
    ASSERT_EQ(match_predictions(p, t, MatchMode::Instance, 0.3), base);
    ASSERT_EQ(base.tp + base.fp, 8);
    ASSERT_EQ(base.tp + base.fn, 8);
  }
}

TEST(Metrics, ClosedForms) {
  const auto m = classification_metrics({2479, 15, 814});
  EXPECT_DOUBLE_EQ(*m.accuracy, 2479.0 / 3308.0);
  EXPECT_DOUBLE_EQ(*m.precision, 2479.0 / 2494.0);
  EXPECT_DOUBLE_EQ(*m.recall, 2479.0 / 3293.0);
  const double p = 2479.0 / 2494.0;
  const double r = 2479.0 / 3293.0;
  EXPECT_NEAR(*m.f1, 2 * p * r / (p + r), 1e-15);
}

TEST(Metrics, ReportedRowsAtThreeDecimals) {
  struct Row {
    ConfusionCounts c;
    double acc, prec, rec, f1;
  };
  // cut-in and cut-out rows in full; the following row is checked in the
  // acceptance binary, which also reports its recall cell
  for (const auto& row : {Row{{248, 23, 39}, 0.800, 0.915, 0.864, 0.889},
                          Row{{265, 15, 32}, 0.849, 0.946, 0.892, 0.919}}) {
    const auto m = classification_metrics(row.c);
    EXPECT_DOUBLE_EQ(round_to(*m.accuracy, 3), row.acc);
    EXPECT_DOUBLE_EQ(round_to(*m.precision, 3), row.prec);
    EXPECT_DOUBLE_EQ(round_to(*m.recall, 3), row.rec);
    EXPECT_DOUBLE_EQ(round_to(*m.f1, 3), row.f1);
  }
  const auto m = classification_metrics({2479, 15, 814});
  EXPECT_DOUBLE_EQ(round_to(*m.accuracy, 3), 0.749);
  EXPECT_DOUBLE_EQ(round_to(*m.precision, 3), 0.994);
  EXPECT_DOUBLE_EQ(round_to(*m.f1, 3), 0.857);
}

TEST(Metrics, DegenerateCountsAreAbsent) {
  const auto m = classification_metrics({0, 0, 0});
  EXPECT_FALSE(m.accuracy || m.precision || m.recall || m.f1);
  const auto only_fn = classification_metrics({0, 0, 4});
  EXPECT_FALSE(only_fn.precision.has_value());
  EXPECT_DOUBLE_EQ(*only_fn.recall, 0.0);
  EXPECT_DOUBLE_EQ(*only_fn.accuracy, 0.0);
}

TEST(Metrics, F1Bounds) {
  for (std::int64_t tp = 0; tp < 30; ++tp) {
    for (std::int64_t fp = 0; fp < 30; fp += 3) {
      for (std::int64_t fn = 0; fn < 30; fn += 4) {
        const auto m = classification_metrics({tp, fp, fn});
        if (!m.f1) continue;
        ASSERT_LE(*m.f1, 1.0);
        ASSERT_LE(*m.f1, 2 * *m.precision + 1e-15);
        ASSERT_LE(*m.f1, 2 * *m.recall + 1e-15);
      }
    }
  }
}

TEST(RoundTo, HalfUp) {
  EXPECT_DOUBLE_EQ(round_to(0.125, 2), 0.13);
  EXPECT_DOUBLE_EQ(round_to(2.5, 0), 3.0);
  EXPECT_DOUBLE_EQ(round_to(0.12344, 3), 0.123);
}

TEST(Labels, CsvRoundTripAndErrors) {
  const std::vector<GroundTruthLabel> labels = {label(1, 2, 0, 10, "following"), label(3, 4, 5, 9)};
  std::ostringstream out;
  write_labels_csv(out, labels);
  std::istringstream in(out.str());
  EXPECT_EQ(parse_labels_csv(in), labels);
  std::istringstream missing("category,egoId,targetId,frameStart\nx,1,2,3\n");
  EXPECT_THROW((void)parse_labels_csv(missing), SchemaError);
  std::istringstream reversed("category,egoId,targetId,frameStart,frameEnd\nx,1,2,9,3\n");
  EXPECT_THROW((void)parse_labels_csv(reversed), Error);
  EXPECT_EQ(parse_match_mode("frame"), MatchMode::Frame);
  EXPECT_THROW((void)parse_match_mode("episode"), InputError);
}

}  // namespace
}  // namespace scenmine
