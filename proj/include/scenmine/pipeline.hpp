#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scenmine/criticality.hpp"
#include "scenmine/evaluation.hpp"
#include "scenmine/exporters.hpp"
#include "scenmine/scenario_search.hpp"
#include "scenmine/understanding.hpp"

namespace scenmine {

inline constexpr int kManifestVersion = 1;

enum class ProviderKind { Offline, Remote };
[[nodiscard]] std::string_view name(ProviderKind kind);
/// "offline" or "remote"; throws InputError otherwise.
[[nodiscard]] ProviderKind parse_provider_kind(std::string_view text);

enum class ExportFormat { Xosc, CarMakerText };
[[nodiscard]] std::string_view name(ExportFormat format);  // "xosc", "cmtxt"
[[nodiscard]] std::string_view file_extension(ExportFormat format);  // ".xosc", ".txt"
[[nodiscard]] ExportFormat parse_export_format(std::string_view text);

/// Everything that influences an extraction run.
struct ExtractConfig {
  ProviderKind provider = ProviderKind::Offline;
  ProviderConfig provider_config;
  double frame_rate = 25.0;
  SearchParams search;
  /// Without a criticality filter every pool entry is selected.
  std::optional<CriticalityConfig> criticality;
  MetricParams metric_params;
  std::vector<ExportFormat> formats{ExportFormat::Xosc};
  ExportConfig export_config;

  void validate() const;
};

/// All fields materialized; the API key is never written.
[[nodiscard]] nlohmann::json to_json(const ExtractConfig& config);

/// Flat object with any of a_lon_threshold, min_activity_duration,
/// lane_change_half_window, end_position_grace, min_window_duration,
/// near_miss_limit, threads; missing keys keep the value from `base`.
/// Throws InputError on unknown keys or wrong types.
[[nodiscard]] SearchParams search_params_from_json(const nlohmann::json& doc,
                                                   const SearchParams& base = {});
[[nodiscard]] nlohmann::json to_json(const SearchParams& params);
/// {"metric": "TTC", "threshold": 3, "comparison": "le"}; comparison optional.
[[nodiscard]] CriticalityConfig criticality_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json to_json(const CriticalityConfig& config);
[[nodiscard]] MetricParams metric_params_from_json(const nlohmann::json& doc,
                                                   const MetricParams& base = {});
[[nodiscard]] nlohmann::json to_json(const MetricParams& params);

struct QueryResolution {
  ScenarioQuery query;
  std::vector<std::string> raw_responses;  // remote provider only
};

/// Interprets a description with the configured provider. `transport`
/// overrides the HTTP transport for the remote provider.
[[nodiscard]] QueryResolution resolve_query(std::string_view description,
                                            const ExtractConfig& config,
                                            ChatTransport* transport = nullptr);

struct PipelineResult {
  std::string recording_id;
  SearchResult search;
  std::vector<PoolEntry> pool;  // one per match, search order
};

/// Search followed by the optional criticality filter.
[[nodiscard]] PipelineResult run_search(const TrajectoryStore& store, const ScenarioQuery& query,
                                        const ExtractConfig& config);

[[nodiscard]] nlohmann::json to_json(const ScenarioMatch& match);
[[nodiscard]] nlohmann::json to_json(const CriticalityReport& report);
[[nodiscard]] nlohmann::json to_json(const NearMiss& near_miss);
[[nodiscard]] ScenarioMatch match_from_json(const nlohmann::json& doc);

/// {"recording_id", "pool": [{index, ego_id, targets, scenario_window,
/// reports, selected}], "rejected_near_misses": [...], "skipped": [...]}.
[[nodiscard]] nlohmann::json to_json(const PipelineResult& result);

struct ExtractOutcome {
  PipelineResult result;
  nlohmann::json manifest;
  std::vector<std::filesystem::path> files;  // exports, manifest and log
};

/// Runs the search, writes one export per selected entry and format, the
/// manifest (manifest.json) and a run log (run.log) into `out_dir`.
/// Throws ExportError when a file cannot be produced.
ExtractOutcome run_extract(const TrajectoryStore& store, const QueryResolution& resolution,
                           std::string_view description, const ExtractConfig& config,
                           const std::filesystem::path& out_dir);

[[nodiscard]] nlohmann::json load_json_file(const std::filesystem::path& path);

/// Instances of the selected pool entries. Throws InputError for a manifest
/// of another version or shape.
[[nodiscard]] std::vector<PredictedInstance> predictions_from_manifest(
    const nlohmann::json& manifest);

struct EvaluationReport {
  MatchMode mode = MatchMode::Instance;
  double iou_threshold = 0.5;
  std::optional<std::string> category;
  ConfusionCounts counts;
  ClassificationMetrics metrics;
};

/// Labels are filtered by category when one is given.
[[nodiscard]] EvaluationReport evaluate(const std::vector<PredictedInstance>& predicted,
                                        std::vector<GroundTruthLabel> truth, MatchMode mode,
                                        double iou_threshold,
                                        const std::optional<std::string>& category);
[[nodiscard]] nlohmann::json to_json(const EvaluationReport& report);

}  // namespace scenmine
