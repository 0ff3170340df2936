#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenmine/scenario_search.hpp"
#include "scenmine/trajectory_store.hpp"

namespace scenmine {

enum class MetricKind { DST, RLongA, PSD, DHW, LongJ, LatJ, TTC, PTTC, TET, TIT, THW, DeltaV };

inline constexpr MetricKind kMetricKinds[] = {
    MetricKind::DST, MetricKind::RLongA, MetricKind::PSD,  MetricKind::DHW,
    MetricKind::LongJ, MetricKind::LatJ, MetricKind::TTC,  MetricKind::PTTC,
    MetricKind::TET, MetricKind::TIT,  MetricKind::THW,  MetricKind::DeltaV};

enum class MetricScale { Acceleration, Distance, Jerk, Time, Velocity };
enum class Comparison { LessEqual, GreaterEqual };
enum class Aggregation { Min, Max, Sum };

/// Exact metric name ("TTC", "DeltaV", ...).
[[nodiscard]] std::string_view name(MetricKind kind);
/// Throws InputError for unknown names.
[[nodiscard]] MetricKind parse_metric_kind(std::string_view text);

[[nodiscard]] MetricScale scale_of(MetricKind kind);
[[nodiscard]] std::string_view name(MetricScale scale);
[[nodiscard]] Aggregation aggregation_of(MetricKind kind);
/// <= where small values are critical, >= otherwise (including TET/TIT,
/// which grow with exposure).
[[nodiscard]] Comparison default_comparison(MetricKind kind);

/// "le" / "ge".
[[nodiscard]] std::string_view name(Comparison comparison);
/// Accepts le, ge, <=, >=. Throws InputError otherwise.
[[nodiscard]] Comparison parse_comparison(std::string_view text);

struct MetricParams {
  double ttc_tau = 3.0;           // s
  double safety_time_ts = 1.0;    // s
  double max_deceleration = 7.5;  // m/s^2

  void validate() const;
};

struct CriticalityConfig {
  MetricKind kind = MetricKind::TTC;
  double threshold = 3.0;
  std::optional<Comparison> comparison;  // defaults per kind

  [[nodiscard]] Comparison effective_comparison() const {
    return comparison.value_or(default_comparison(kind));
  }
};

struct CriticalityReport {
  MetricKind kind = MetricKind::TTC;
  VehicleId target_id = 0;
  FrameInterval window;
  std::vector<std::optional<double>> series;  // one entry per frame of window
  std::optional<double> aggregate;
  Comparison comparison = Comparison::LessEqual;
  double threshold = 0.0;
  bool passes_threshold = false;
  std::string note;  // why the metric could not be computed, if so
};

/// Longitudinal kinematics of one ego/target frame along the direction of
/// travel. The leader is whichever vehicle is ahead; gap is bumper to bumper.
struct PairState {
  double gap = 0.0;
  bool target_ahead = true;
  double v_ego = 0.0;
  double v_target = 0.0;
  double a_ego = 0.0;
  double a_target = 0.0;
  double v_follower = 0.0;
  double v_leader = 0.0;
  double a_follower = 0.0;
  double a_leader = 0.0;
  [[nodiscard]] double closing_speed() const { return v_follower - v_leader; }
};

[[nodiscard]] PairState pair_state(const TrackSample& ego, const TrackSample& target, int sign);

// Per-frame formulas; absent where undefined.
[[nodiscard]] std::optional<double> time_to_collision(const PairState& s);
[[nodiscard]] std::optional<double> time_headway(const PairState& s);
[[nodiscard]] std::optional<double> predicted_time_to_collision(const PairState& s);
[[nodiscard]] std::optional<double> deceleration_to_safety_time(const PairState& s, double ts);
[[nodiscard]] std::optional<double> required_longitudinal_deceleration(const PairState& s);
[[nodiscard]] std::optional<double> proportion_of_stopping_distance(const PairState& s,
                                                                    double a_max);

/// Time exposed / time integrated below tau, summed over a TTC series.
[[nodiscard]] double time_exposed(const std::vector<std::optional<double>>& ttc, double tau,
                                  double dt);
[[nodiscard]] double time_integrated(const std::vector<std::optional<double>>& ttc, double tau,
                                     double dt);

/// Absolute finite-difference derivative times frame_rate: central inside,
/// one-sided at the ends. Throws InsufficientDataError below 3 values.
[[nodiscard]] std::vector<double> jerk_series(const std::vector<double>& acceleration,
                                              double frame_rate);

/// Per-frame series and aggregate over the common frames of the two slices.
/// Throws InputError when the slices cover different frames or travel in
/// opposite directions, InsufficientDataError for jerk on < 3 frames.
/// passes_threshold is left false; see apply_threshold.
[[nodiscard]] CriticalityReport compute_series(const Trajectory& ego_slice,
                                               const Trajectory& target_slice, MetricKind kind,
                                               const MetricParams& params, double frame_rate);

[[nodiscard]] bool passes(const std::optional<double>& aggregate, double threshold,
                          Comparison comparison);
void apply_threshold(CriticalityReport& report, const CriticalityConfig& config);

struct PoolEntry {
  ScenarioMatch match;
  std::vector<CriticalityReport> reports;  // one per target
  bool passes = false;
};

struct FilterResult {
  std::vector<PoolEntry> selected;
  std::vector<PoolEntry> rejected;
};

/// Reports for every target of every match over its analysis window. A match
/// is selected iff all its reports pass; order follows the input.
[[nodiscard]] FilterResult filter_pool(const std::vector<ScenarioMatch>& matches,
                                       const TrajectoryStore& store,
                                       const CriticalityConfig& config,
                                       const MetricParams& params);

}  // namespace scenmine
