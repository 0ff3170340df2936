// scenmine: batch extraction, evaluation, synthetic data and the HTTP service.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scenmine/errors.hpp"
#include "scenmine/pipeline.hpp"
#include "scenmine/service.hpp"
#include "scenmine/synthetic.hpp"

namespace {

using namespace scenmine;

// Exit codes, version 1 of the taxonomy.
constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitInterpretation = 4;
constexpr int kExitProvider = 5;
constexpr int kExitExport = 6;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExtractArgs {
  std::string tracks;
  std::optional<std::string> query_text;
  std::optional<std::string> query_json;
  std::string provider = "offline";
  std::optional<std::string> metric;
  std::optional<double> threshold;
  std::optional<std::string> cmp;
  std::string out;
  std::vector<std::string> formats{"xosc"};
  std::optional<std::string> recording_id;
  ExtractConfig config;
};

struct EvaluateArgs {
  std::string predictions;
  std::string truth;
  std::string mode = "instance";
  double iou = 0.5;
  std::optional<std::string> category;
};

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  ServiceConfig config;
};

struct SynthArgs {
  std::uint64_t seed = 7;
  int following = 10;
  int cut_in = 10;
  int cut_out = 10;
  int opposite = 2;
  std::size_t perf_tracks = 0;
  FrameIndex perf_frames = 40000;
  std::string tracks_out;
  std::optional<std::string> labels_out;
};

int run_extract_command(ExtractArgs args) {
  if (args.query_text.has_value() == args.query_json.has_value()) {
    throw UsageError("give exactly one of --query-text and --query-json");
  }
  auto& cfg = args.config;
  try {
    cfg.provider = parse_provider_kind(args.provider);
    cfg.formats.clear();
    for (const auto& f : args.formats) cfg.formats.push_back(parse_export_format(f));
    if (args.metric || args.threshold || args.cmp) {
      CriticalityConfig c;
      if (args.metric) c.kind = parse_metric_kind(*args.metric);
      if (args.threshold) c.threshold = *args.threshold;
      if (args.cmp) c.comparison = parse_comparison(*args.cmp);
      cfg.criticality = c;
    }
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  if (cfg.formats.empty()) throw UsageError("--format needs at least one format");
  cfg.provider_config.api_key = api_key_from_env();

  RecordingConfig rc;
  rc.frame_rate = cfg.frame_rate;
  rc.recording_id = args.recording_id.value_or(std::filesystem::path(args.tracks).stem().string());
  const auto store = load_tracks_csv(args.tracks, rc);

  QueryResolution resolution;
  std::string description;
  if (args.query_text) {
    description = *args.query_text;
    resolution = resolve_query(description, cfg);
  } else {
    resolution.query = query_from_json(load_json_file(*args.query_json));
    require_valid(resolution.query);
  }
  const auto outcome = run_extract(store, resolution, description, cfg, args.out);
  std::cout << "pool " << outcome.manifest["summary"]["pool_size"].get<std::size_t>() << ", selected "
            << outcome.manifest["summary"]["selected"].get<std::size_t>() << ", manifest "
            << (std::filesystem::path(args.out) / "manifest.json").string() << '\n';
  return kExitOk;
}

int run_evaluate_command(const EvaluateArgs& args) {
  if (!(args.iou > 0.0 && args.iou <= 1.0)) throw UsageError("--iou must lie in (0, 1]");
  MatchMode mode{};
  try {
    mode = parse_match_mode(args.mode);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  const auto predictions = predictions_from_manifest(load_json_file(args.predictions));
  const auto truth = load_labels_csv(args.truth);
  const auto report = evaluate(predictions, truth, mode, args.iou, args.category);
  std::cout << to_json(report).dump(2) << '\n';
  return kExitOk;
}

int run_serve_command(ServeArgs args) {
  args.config.provider.api_key = api_key_from_env();
  Service service(args.config);
  std::cerr << "listening on http://" << args.host << ':' << args.port << '\n';
  serve(service, args.host, args.port);
  return kExitOk;
}

int run_synth_command(const SynthArgs& args) {
  std::ofstream tracks(args.tracks_out, std::ios::binary);
  if (!tracks) throw InputError("cannot write " + args.tracks_out);
  if (args.perf_tracks > 0) {
    write_tracks_csv(tracks, perf_recording(args.seed, args.perf_tracks, args.perf_frames));
    return kExitOk;
  }
  SyntheticSpec spec;
  spec.episodes = {{kFollowing, args.following}, {kCutIn, args.cut_in}, {kCutOut, args.cut_out}};
  spec.opposite_distractors_per_slot = args.opposite;
  const auto corpus = synthetic_corpus(args.seed, spec);
  write_tracks_csv(tracks, corpus.store);
  if (args.labels_out) {
    std::ofstream labels(*args.labels_out, std::ios::binary);
    if (!labels) throw InputError("cannot write " + *args.labels_out);
    write_labels_csv(labels, corpus.labels);
  }
  return kExitOk;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ExportError& e) {
    std::cerr << "export error: " << e.what() << '\n';
    return kExitExport;
  } catch (const ProviderError& e) {
    std::cerr << "provider error: " << e.what() << '\n';
    if (!e.last_raw_response().empty()) std::cerr << "last response:\n" << e.last_raw_response() << '\n';
    return kExitProvider;
  } catch (const TransportError& e) {
    std::cerr << "provider error: " << e.what() << '\n';
    return kExitProvider;
  } catch (const CredentialError& e) {
    std::cerr << "provider error: " << e.what() << '\n';
    return kExitProvider;
  } catch (const ResponseFormatError& e) {
    std::cerr << "interpretation error: " << e.what() << '\n';
    return kExitInterpretation;
  } catch (const InterpretationError& e) {
    std::cerr << "interpretation error: " << e.what() << '\n';
    return kExitInterpretation;
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine driving scenarios from highD-style trajectory recordings"};
  app.require_subcommand(1);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Search a recording and export the selected scenarios");
  extract->add_option("--tracks", ex.tracks, "tracks CSV")->required()->check(CLI::ExistingFile);
  auto* qt = extract->add_option("--query-text", ex.query_text, "scenario description");
  auto* qj = extract->add_option("--query-json", ex.query_json, "scenario query JSON file")
                 ->check(CLI::ExistingFile);
  qt->excludes(qj);
  qj->excludes(qt);
  extract->add_option("--provider", ex.provider, "offline or remote")->capture_default_str();
  extract->add_option("--metric", ex.metric, "criticality metric (TTC, THW, DHW, ...)");
  extract->add_option("--threshold", ex.threshold, "criticality threshold");
  extract->add_option("--cmp", ex.cmp, "le or ge (default depends on the metric)");
  extract->add_option("--out", ex.out, "output directory")->required();
  extract->add_option("--format", ex.formats, "xosc, cmtxt")->delimiter(',')->capture_default_str();
  extract->add_option("--frame-rate", ex.config.frame_rate, "Hz")->capture_default_str();
  extract->add_option("--recording-id", ex.recording_id, "defaults to the tracks file stem");
  auto& sp = ex.config.search;
  extract->add_option("--a-lon-threshold", sp.detection.a_lon_threshold, "m/s^2")->capture_default_str();
  extract->add_option("--min-activity-duration", sp.detection.min_activity_duration, "s")
      ->capture_default_str();
  extract->add_option("--lane-change-half-window", sp.detection.lane_change_half_window, "s")
      ->capture_default_str();
  extract->add_option("--end-position-grace", sp.end_position_grace, "s")->capture_default_str();
  extract->add_option("--min-window-duration", sp.min_window_duration, "s")->capture_default_str();
  extract->add_option("--near-miss-limit", sp.near_miss_limit)->capture_default_str();
  extract->add_option("--threads", sp.threads, "0 for all cores")->capture_default_str();
  auto& mp = ex.config.metric_params;
  extract->add_option("--ttc-tau", mp.ttc_tau, "TET/TIT threshold, s")->capture_default_str();
  extract->add_option("--safety-time", mp.safety_time_ts, "DST safety time, s")->capture_default_str();
  extract->add_option("--max-deceleration", mp.max_deceleration, "PSD, m/s^2")->capture_default_str();
  auto& pc = ex.config.provider_config;
  extract->add_option("--endpoint", pc.endpoint, "chat completion URL")->capture_default_str();
  extract->add_option("--model", pc.model)->capture_default_str();
  extract->add_option("--timeout", pc.timeout_seconds, "s")->capture_default_str();
  extract->add_option("--max-retries", pc.max_retries)->capture_default_str();
  auto& ec = ex.config.export_config;
  extract->add_option("--precision", ec.precision, "decimals in exports")->capture_default_str();
  extract->add_flag("--no-flip-y{false},--flip-y{true}", ec.flip_y, "mirror y into a y-up frame");
  extract->add_flag("--center-x", ec.use_center_x, "export the box centre along x");
  extract->add_flag("--ego-in-text", ec.include_ego_in_text, "add ego columns to CarMaker text");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a manifest against labelled windows");
  evaluate_cmd->add_option("--predictions", ev.predictions, "manifest.json")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--truth", ev.truth, "labels CSV")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--mode", ev.mode, "instance or frame")->capture_default_str();
  evaluate_cmd->add_option("--iou", ev.iou, "instance IoU threshold")->capture_default_str();
  evaluate_cmd->add_option("--category", ev.category, "only labels of this category");

  ServeArgs sv;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--host", sv.host)->capture_default_str();
  serve_cmd->add_option("--port", sv.port)->capture_default_str();
  serve_cmd->add_option("--idle-timeout", sv.config.idle_timeout_seconds, "s")->capture_default_str();
  serve_cmd->add_option("--endpoint", sv.config.provider.endpoint)->capture_default_str();
  serve_cmd->add_option("--model", sv.config.provider.model)->capture_default_str();

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Write the synthetic labelled corpus or a timing recording");
  synth->add_option("--seed", sy.seed)->capture_default_str();
  synth->add_option("--following", sy.following)->capture_default_str();
  synth->add_option("--cut-in", sy.cut_in)->capture_default_str();
  synth->add_option("--cut-out", sy.cut_out)->capture_default_str();
  synth->add_option("--opposite", sy.opposite, "opposite-direction vehicles per episode")->capture_default_str();
  synth->add_option("--perf-tracks", sy.perf_tracks, "write a random timing recording instead");
  synth->add_option("--perf-frames", sy.perf_frames)->capture_default_str();
  synth->add_option("--tracks-out", sy.tracks_out)->required();
  synth->add_option("--labels-out", sy.labels_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*extract) return run_extract_command(ex);
    if (*evaluate_cmd) return run_evaluate_command(ev);
    if (*serve_cmd) return run_serve_command(sv);
    if (*synth) return run_synth_command(sy);
  } catch (...) {
    return exit_code_for_current_exception();
  }
  return kExitOther;
}
