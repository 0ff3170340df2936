#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "scenmine/activity.hpp"
#include "scenmine/scenario_schema.hpp"
#include "scenmine/trajectory_store.hpp"

namespace scenmine {

struct SearchParams {
  DetectionParams detection;
  double end_position_grace = 2.0;   // s
  double min_window_duration = 1.0;  // s
  std::size_t near_miss_limit = 200;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct TargetWindow {
  VehicleId target_id = 0;
  FrameInterval analysis_window;

  friend bool operator==(const TargetWindow&, const TargetWindow&) = default;
};

struct ScenarioMatch {
  std::string recording_id;
  VehicleId ego_id = 0;
  std::vector<TargetWindow> targets;  // one per TargetSpec, query order
  FrameInterval scenario_window;      // hull of the analysis windows

  friend bool operator==(const ScenarioMatch&, const ScenarioMatch&) = default;
};

/// One ego/target pairing for one TargetSpec, examined over `window`.
struct Candidate {
  VehicleId ego_id = 0;
  VehicleId target_id = 0;
  std::size_t target_index = 0;
  FrameInterval window;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct NearMiss {
  Candidate candidate;
  std::vector<std::string> reasons;
};

struct SkippedVehicle {
  VehicleId vehicle_id = 0;
  std::string reason;
};

struct SearchResult {
  std::vector<ScenarioMatch> matches;
  std::vector<NearMiss> near_misses;  // activities matched, positions or duration did not
  std::vector<SkippedVehicle> skipped;
};

/// Activity segmentation of one vehicle as used by the search.
struct VehicleActivities {
  VehicleId vehicle_id = 0;
  int travel_sign = 0;
  std::vector<LongitudinalSegment> longitudinal;
  std::vector<LateralSegment> lateral;
};

/// Frames where the vehicle's longitudinal and lateral activities both equal
/// the requested kinds, as maximal intervals.
[[nodiscard]] std::vector<FrameInterval> activity_windows(const VehicleActivities& activities,
                                                          LongitudinalActivity longitudinal,
                                                          LateralActivity lateral);

/// Every vehicle is tried as ego. A target qualifies over an analysis window
/// when both vehicles' activities match throughout it, the target is at the
/// start position at its first frame, reaches the end position at some frame
/// in [t2, t2 + grace], and the window lasts at least min_window_duration.
/// Vehicles travelling the other way are never paired. Results are sorted by
/// (ego, window start, target ids).
[[nodiscard]] SearchResult search(const TrajectoryStore& store, const ScenarioQuery& query,
                                  const SearchParams& params);

[[nodiscard]] std::vector<ScenarioMatch> find_matches(const TrajectoryStore& store,
                                                      const ScenarioQuery& query,
                                                      const SearchParams& params);

/// Why each candidate would not be accepted: "no coexistence", "ego
/// longitudinal mismatch", "ego lateral mismatch", "target longitudinal
/// mismatch", "target lateral mismatch", "start position", "end position",
/// "duration". Activity mismatches are checked on every frame of the window.
/// Accepted candidates get an empty list.
[[nodiscard]] std::vector<std::vector<std::string>> disambiguate_report(
    const TrajectoryStore& store, const ScenarioQuery& query,
    const std::vector<Candidate>& candidates, const SearchParams& params);

}  // namespace scenmine
