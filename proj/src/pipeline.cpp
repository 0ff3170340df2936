#include "scenmine/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "scenmine/errors.hpp"
#include "scenmine/format.hpp"

namespace scenmine {

using nlohmann::json;

std::string_view name(ProviderKind kind) { return kind == ProviderKind::Remote ? "remote" : "offline"; }

ProviderKind parse_provider_kind(std::string_view text) {
  const auto t = to_lower(trim(text));
  if (t == "offline") return ProviderKind::Offline;
  if (t == "remote") return ProviderKind::Remote;
  throw InputError("unknown provider '" + t + "' (expected offline or remote)");
}

std::string_view name(ExportFormat format) {
  return format == ExportFormat::Xosc ? "xosc" : "cmtxt";
}

std::string_view file_extension(ExportFormat format) {
  return format == ExportFormat::Xosc ? ".xosc" : ".txt";
}

ExportFormat parse_export_format(std::string_view text) {
  const auto t = to_lower(trim(text));
  if (t == "xosc") return ExportFormat::Xosc;
  if (t == "cmtxt") return ExportFormat::CarMakerText;
  throw InputError("unknown export format '" + t + "' (expected xosc or cmtxt)");
}

void ExtractConfig::validate() const {
  RecordingConfig{frame_rate, "check"}.validate();
  search.validate();
  metric_params.validate();
  export_config.validate();
  if (criticality && !std::isfinite(criticality->threshold)) {
    throw InputError("criticality threshold must be finite");
  }
}

// ---- configuration JSON ------------------------------------------------------

namespace {

json interval_json(const FrameInterval& w) { return json::array({w.first, w.last}); }

FrameInterval interval_from_json(const json& doc) {
  if (!doc.is_array() || doc.size() != 2 || !doc[0].is_number_integer() ||
      !doc[1].is_number_integer()) {
    throw InputError("frame interval must be [first, last]");
  }
  return {doc[0].get<FrameIndex>(), doc[1].get<FrameIndex>()};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double number_field(const json& doc, const std::string& key) {
  if (!doc.is_number()) throw InputError("'" + key + "' must be a number");
  return doc.get<double>();
}

void require_object(const json& doc, const char* what) {
  if (!doc.is_object()) throw InputError(std::string(what) + " must be a JSON object");
}

}  // namespace

json to_json(const SearchParams& p) {
  return {{"a_lon_threshold", p.detection.a_lon_threshold},
          {"min_activity_duration", p.detection.min_activity_duration},
          {"lane_change_half_window", p.detection.lane_change_half_window},
          {"end_position_grace", p.end_position_grace},
          {"min_window_duration", p.min_window_duration},
          {"near_miss_limit", p.near_miss_limit},
          {"threads", p.threads}};
}

SearchParams search_params_from_json(const json& doc, const SearchParams& base) {
  require_object(doc, "search_params");
  SearchParams p = base;
  for (const auto& [key, value] : doc.items()) {
    if (key == "a_lon_threshold") {
      p.detection.a_lon_threshold = number_field(value, key);
    } else if (key == "min_activity_duration") {
      p.detection.min_activity_duration = number_field(value, key);
    } else if (key == "lane_change_half_window") {
      p.detection.lane_change_half_window = number_field(value, key);
    } else if (key == "end_position_grace") {
      p.end_position_grace = number_field(value, key);
    } else if (key == "min_window_duration") {
      p.min_window_duration = number_field(value, key);
    } else if (key == "near_miss_limit" || key == "threads") {
      if (!value.is_number_integer() || value.get<long long>() < 0) {
        throw InputError("'" + key + "' must be a non-negative integer");
      }
      if (key == "threads") {
        p.threads = value.get<unsigned>();
      } else {
        p.near_miss_limit = value.get<std::size_t>();
      }
    } else {
      throw InputError("unknown search parameter '" + key + "'");
    }
  }
  p.validate();
  return p;
}

json to_json(const CriticalityConfig& c) {
  return {{"metric", std::string(name(c.kind))},
          {"threshold", c.threshold},
          {"comparison", std::string(name(c.effective_comparison()))}};
}

CriticalityConfig criticality_from_json(const json& doc) {
  require_object(doc, "criticality_config");
  CriticalityConfig c;
  bool has_threshold = false;
  for (const auto& [key, value] : doc.items()) {
    if (key == "metric") {
      if (!value.is_string()) throw InputError("'metric' must be a string");
      c.kind = parse_metric_kind(value.get<std::string>());
    } else if (key == "threshold") {
      c.threshold = number_field(value, key);
      has_threshold = true;
    } else if (key == "comparison") {
      if (value.is_null()) continue;
      if (!value.is_string()) throw InputError("'comparison' must be a string");
      c.comparison = parse_comparison(value.get<std::string>());
    } else {
      throw InputError("unknown criticality field '" + key + "'");
    }
  }
  if (!has_threshold) throw InputError("criticality_config needs a threshold");
  return c;
}

json to_json(const MetricParams& p) {
  return {{"ttc_tau", p.ttc_tau},
          {"safety_time_ts", p.safety_time_ts},
          {"max_deceleration", p.max_deceleration}};
}

MetricParams metric_params_from_json(const json& doc, const MetricParams& base) {
  require_object(doc, "metric_params");
  MetricParams p = base;
  for (const auto& [key, value] : doc.items()) {
    if (key == "ttc_tau") {
      p.ttc_tau = number_field(value, key);
    } else if (key == "safety_time_ts") {
      p.safety_time_ts = number_field(value, key);
    } else if (key == "max_deceleration") {
      p.max_deceleration = number_field(value, key);
    } else {
      throw InputError("unknown metric parameter '" + key + "'");
    }
  }
  p.validate();
  return p;
}

json to_json(const ExtractConfig& c) {
  json formats = json::array();
  for (const auto f : c.formats) formats.push_back(std::string(name(f)));
  return {{"provider", std::string(name(c.provider))},
          {"provider_config",
           {{"endpoint", c.provider_config.endpoint},
            {"model", c.provider_config.model},
            {"timeout_seconds", c.provider_config.timeout_seconds},
            {"max_retries", c.provider_config.max_retries},
            {"temperature", c.provider_config.temperature},
            {"max_tokens", c.provider_config.max_tokens}}},
          {"frame_rate", c.frame_rate},
          {"search", to_json(c.search)},
          {"criticality", c.criticality ? to_json(*c.criticality) : json(nullptr)},
          {"metric_params", to_json(c.metric_params)},
          {"formats", formats},
          {"export",
           {{"flip_y", c.export_config.flip_y},
            {"include_ego_in_text", c.export_config.include_ego_in_text},
            {"precision", c.export_config.precision},
            {"use_center_x", c.export_config.use_center_x},
            {"date", c.export_config.date}}}};
}

// ---- query + search ------------------------------------------------------------

QueryResolution resolve_query(std::string_view description, const ExtractConfig& config,
                              ChatTransport* transport) {
  if (config.provider == ProviderKind::Offline) {
    return {interpret_offline(description), {}};
  }
  Interpretation in = transport != nullptr
                          ? interpret_remote(description, config.provider_config, *transport)
                          : interpret_remote(description, config.provider_config);
  return {std::move(in.query), std::move(in.raw_responses)};
}

PipelineResult run_search(const TrajectoryStore& store, const ScenarioQuery& query,
                          const ExtractConfig& config) {
  config.validate();
  PipelineResult out;
  out.recording_id = store.recording_id();
  out.search = search(store, query, config.search);
  out.pool.reserve(out.search.matches.size());
  for (const auto& match : out.search.matches) {
    if (!config.criticality) {
      out.pool.push_back({match, {}, true});
      continue;
    }
    auto filtered = filter_pool({match}, store, *config.criticality, config.metric_params);
    out.pool.push_back(filtered.selected.empty() ? std::move(filtered.rejected.front())
                                                 : std::move(filtered.selected.front()));
  }
  return out;
}

// ---- result JSON -----------------------------------------------------------------

json to_json(const ScenarioMatch& m) {
  json targets = json::array();
  for (const auto& t : m.targets) {
    targets.push_back({{"target_id", t.target_id}, {"analysis_window", interval_json(t.analysis_window)}});
  }
  return {{"recording_id", m.recording_id},
          {"ego_id", m.ego_id},
          {"targets", targets},
          {"scenario_window", interval_json(m.scenario_window)}};
}

ScenarioMatch match_from_json(const json& doc) {
  require_object(doc, "match");
  try {
    ScenarioMatch m;
    m.recording_id = doc.value("recording_id", std::string());
    m.ego_id = doc.at("ego_id").get<VehicleId>();
    for (const auto& t : doc.at("targets")) {
      m.targets.push_back({t.at("target_id").get<VehicleId>(), interval_from_json(t.at("analysis_window"))});
    }
    m.scenario_window = interval_from_json(doc.at("scenario_window"));
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed match: ") + e.what());
  }
}

json to_json(const CriticalityReport& r) {
  json series = json::array();
  for (const auto& v : r.series) series.push_back(optional_json(v));
  json out = {{"metric", std::string(name(r.kind))},
              {"target_id", r.target_id},
              {"window", interval_json(r.window)},
              {"series", series},
              {"aggregate", optional_json(r.aggregate)},
              {"comparison", std::string(name(r.comparison))},
              {"threshold", r.threshold},
              {"passes_threshold", r.passes_threshold}};
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

json to_json(const NearMiss& n) {
  return {{"ego_id", n.candidate.ego_id},
          {"target_id", n.candidate.target_id},
          {"target_index", n.candidate.target_index},
          {"window", interval_json(n.candidate.window)},
          {"reasons", n.reasons}};
}

namespace {

json pool_entry_json(const PoolEntry& e, std::size_t index) {
  json out = to_json(e.match);
  out.erase("recording_id");
  json reports = json::array();
  for (const auto& r : e.reports) reports.push_back(to_json(r));
  out["index"] = index;
  out["reports"] = reports;
  out["selected"] = e.passes;
  return out;
}

}  // namespace

json to_json(const PipelineResult& result) {
  json pool = json::array();
  for (std::size_t i = 0; i < result.pool.size(); ++i) pool.push_back(pool_entry_json(result.pool[i], i));
  json misses = json::array();
  for (const auto& n : result.search.near_misses) misses.push_back(to_json(n));
  json skipped = json::array();
  for (const auto& s : result.search.skipped) {
    skipped.push_back({{"vehicle_id", s.vehicle_id}, {"reason", s.reason}});
  }
  return {{"recording_id", result.recording_id},
          {"pool", pool},
          {"rejected_near_misses", misses},
          {"skipped", skipped}};
}

// ---- extract ----------------------------------------------------------------------

namespace {

std::string export_name(std::size_t index, const ScenarioMatch& m, ExportFormat f) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "scenario_%04zu_ego%lld", index, static_cast<long long>(m.ego_id));
  return std::string(buf) + std::string(file_extension(f));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExportError("cannot write " + path.string());
  out << text;
  if (!out) throw ExportError("failed writing " + path.string());
}

}  // namespace

ExtractOutcome run_extract(const TrajectoryStore& store, const QueryResolution& resolution,
                           std::string_view description, const ExtractConfig& config,
                           const std::filesystem::path& out_dir) {
  ExtractOutcome outcome;
  outcome.result = run_search(store, resolution.query, config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ExportError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  std::ostringstream log;
  log << "recording " << store.recording_id() << ": " << store.track_count() << " tracks, "
      << store.sample_count() << " samples at " << format_shortest(store.frame_rate()) << " Hz\n";
  log << "query " << to_json(resolution.query).dump() << '\n';
  log << "pool " << outcome.result.pool.size() << " matches, "
      << outcome.result.search.near_misses.size() << " near misses, "
      << outcome.result.search.skipped.size() << " skipped vehicles\n";

  json result_json = to_json(outcome.result);
  std::size_t selected = 0;
  for (std::size_t i = 0; i < outcome.result.pool.size(); ++i) {
    const auto& entry = outcome.result.pool[i];
    json files = json::array();
    if (entry.passes) {
      ++selected;
      for (const auto f : config.formats) {
        const std::string text = f == ExportFormat::Xosc
                                     ? to_openscenario(entry.match, store, config.export_config)
                                     : to_carmaker_text(entry.match, store, config.export_config);
        const std::string file = export_name(i, entry.match, f);
        write_text(out_dir / file, text);
        outcome.files.push_back(out_dir / file);
        files.push_back(file);
        log << "wrote " << file << '\n';
      }
    }
    result_json["pool"][i]["files"] = files;
  }
  log << "selected " << selected << " of " << outcome.result.pool.size() << '\n';

  outcome.manifest = {{"manifest_version", kManifestVersion},
                      {"recording_id", store.recording_id()},
                      {"description", std::string(description)},
                      {"config", to_json(config)},
                      {"query", to_json(resolution.query)},
                      {"raw_responses", resolution.raw_responses},
                      {"pool", result_json["pool"]},
                      {"rejected_near_misses", result_json["rejected_near_misses"]},
                      {"skipped", result_json["skipped"]},
                      {"summary", {{"pool_size", outcome.result.pool.size()}, {"selected", selected}}}};
  write_text(out_dir / "manifest.json", outcome.manifest.dump(2) + "\n");
  outcome.files.push_back(out_dir / "manifest.json");
  write_text(out_dir / "run.log", log.str());
  outcome.files.push_back(out_dir / "run.log");
  return outcome;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + " is not valid JSON: " + e.what());
  }
}

std::vector<PredictedInstance> predictions_from_manifest(const json& manifest) {
  if (!manifest.is_object() || !manifest.contains("manifest_version")) {
    throw InputError("not a manifest: manifest_version missing");
  }
  if (manifest["manifest_version"] != kManifestVersion) {
    throw InputError("unsupported manifest version " + manifest["manifest_version"].dump());
  }
  if (!manifest.contains("pool") || !manifest["pool"].is_array()) {
    throw InputError("manifest has no pool array");
  }
  std::vector<PredictedInstance> out;
  for (const auto& entry : manifest["pool"]) {
    if (!entry.is_object() || !entry.value("selected", false)) continue;
    const auto m = match_from_json(entry);
    for (const auto& t : m.targets) out.push_back({m.ego_id, t.target_id, t.analysis_window});
  }
  return out;
}

EvaluationReport evaluate(const std::vector<PredictedInstance>& predicted,
                          std::vector<GroundTruthLabel> truth, MatchMode mode,
                          double iou_threshold, const std::optional<std::string>& category) {
  if (category) {
    std::erase_if(truth, [&](const GroundTruthLabel& l) { return l.category != *category; });
  }
  EvaluationReport r;
  r.mode = mode;
  r.iou_threshold = iou_threshold;
  r.category = category;
  r.counts = match_predictions(predicted, truth, mode, iou_threshold);
  r.metrics = classification_metrics(r.counts);
  return r;
}

json to_json(const EvaluationReport& r) {
  json out = {{"mode", std::string(name(r.mode))},
              {"counts", to_json(r.counts)},
              {"metrics", to_json(r.metrics)}};
  if (r.mode == MatchMode::Instance) out["iou"] = r.iou_threshold;
  out["category"] = r.category ? json(*r.category) : json(nullptr);
  return out;
}

}  // namespace scenmine
