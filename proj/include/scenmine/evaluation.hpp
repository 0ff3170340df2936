#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scenmine/common.hpp"
#include "scenmine/scenario_search.hpp"

namespace scenmine {

struct GroundTruthLabel {
  std::string category;
  VehicleId ego_id = 0;
  VehicleId target_id = 0;
  FrameInterval frames;

  friend bool operator==(const GroundTruthLabel&, const GroundTruthLabel&) = default;
};

/// An extracted (ego, target, window) instance to be scored.
struct PredictedInstance {
  VehicleId ego_id = 0;
  VehicleId target_id = 0;
  FrameInterval frames;

  friend bool operator==(const PredictedInstance&, const PredictedInstance&) = default;
};

/// One instance per target of each match, over its analysis window.
[[nodiscard]] std::vector<PredictedInstance> instances_of(const std::vector<ScenarioMatch>& matches);

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

enum class MatchMode { Instance, Frame };

[[nodiscard]] std::string_view name(MatchMode mode);
/// "instance" or "frame"; throws InputError otherwise.
[[nodiscard]] MatchMode parse_match_mode(std::string_view text);

/// Instance mode pairs predictions and labels one-to-one on equal (ego,
/// target) with temporal IoU >= iou_threshold, highest IoU first. Frame mode
/// counts (ego, target, frame) tuples. Throws InputError for a threshold
/// outside (0, 1] in instance mode.
[[nodiscard]] ConfusionCounts match_predictions(const std::vector<PredictedInstance>& predicted,
                                                const std::vector<GroundTruthLabel>& truth,
                                                MatchMode mode, double iou_threshold = 0.5);

/// accuracy = tp / (tp + fp + fn) (there are no true negatives in this
/// setting); precision and recall as usual; f1 their harmonic mean. A metric
/// whose denominator is zero is absent.
struct ClassificationMetrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

[[nodiscard]] ClassificationMetrics classification_metrics(const ConfusionCounts& counts);

/// Half-up rounding to `decimals` places as used for reporting.
[[nodiscard]] double round_to(double value, int decimals);

[[nodiscard]] nlohmann::json to_json(const ConfusionCounts& counts);
[[nodiscard]] nlohmann::json to_json(const ClassificationMetrics& metrics);

/// Label CSV with header category,egoId,targetId,frameStart,frameEnd.
[[nodiscard]] std::vector<GroundTruthLabel> parse_labels_csv(std::istream& input);
[[nodiscard]] std::vector<GroundTruthLabel> load_labels_csv(const std::filesystem::path& path);
void write_labels_csv(std::ostream& output, const std::vector<GroundTruthLabel>& labels);

}  // namespace scenmine
