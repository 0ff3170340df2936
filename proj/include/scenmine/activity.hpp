#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "scenmine/common.hpp"
#include "scenmine/trajectory_store.hpp"

namespace scenmine {

enum class LongitudinalActivity { KeepVelocity, Acceleration, Deceleration };
enum class LateralActivity { FollowLane, LaneChangeLeft, LaneChangeRight };

using LongitudinalSegment = Segment<LongitudinalActivity>;
using LateralSegment = Segment<LateralActivity>;

/// Taxonomy label, lower case ("keep velocity", "lane change right", ...).
[[nodiscard]] std::string_view label(LongitudinalActivity activity);
[[nodiscard]] std::string_view label(LateralActivity activity);

inline constexpr LongitudinalActivity kLongitudinalActivities[] = {
    LongitudinalActivity::KeepVelocity, LongitudinalActivity::Acceleration,
    LongitudinalActivity::Deceleration};
inline constexpr LateralActivity kLateralActivities[] = {
    LateralActivity::FollowLane, LateralActivity::LaneChangeLeft,
    LateralActivity::LaneChangeRight};

struct DetectionParams {
  double a_lon_threshold = 0.2;          // m/s^2
  double min_activity_duration = 1.0;    // s
  double lane_change_half_window = 2.0;  // s

  void validate() const;
};

/// Deceleration below -a_thr, Acceleration above +a_thr, otherwise
/// KeepVelocity (boundaries included). Throws InputError on non-finite input
/// or a_thr <= 0.
[[nodiscard]] LongitudinalActivity classify_longitudinal(double a_lon, double a_thr);

/// Lane-id change to activity. The direction of a change depends on the sign
/// of the longitudinal velocity along x. Throws UndecidableDirectionError when
/// the lane changes but v_lon is zero.
[[nodiscard]] LateralActivity classify_lateral(int delta_lane, double v_lon);

/// Acceleration along the direction of travel.
[[nodiscard]] double longitudinal_acceleration(const TrackSample& sample, int travel_sign);

/// Frame-wise longitudinal labels merged into maximal runs; runs shorter than
/// the minimum duration are absorbed into their longer neighbour (tie: the
/// preceding one), shortest run first. The result tiles the trajectory.
[[nodiscard]] std::vector<LongitudinalSegment> segment_longitudinal(const Trajectory& trajectory,
                                                                    const DetectionParams& params,
                                                                    double frame_rate);

/// Lane-change windows of +/- half_window around each lane-id change, merged
/// when same-direction windows overlap or touch; remaining frames follow the
/// lane. Throws AmbiguityError when opposite-direction changes are within one
/// window of each other.
[[nodiscard]] std::vector<LateralSegment> segment_lateral(const Trajectory& trajectory,
                                                          const DetectionParams& params,
                                                          double frame_rate);

/// Half-window of a lane change in frames, rounded down.
[[nodiscard]] FrameIndex lane_change_half_window_frames(const DetectionParams& params,
                                                        double frame_rate);

/// Absorb runs shorter than `min_frames` into neighbours, shortest first
/// (ties: earliest). Exposed for reuse and testing.
template <class Kind>
[[nodiscard]] std::vector<Segment<Kind>> absorb_short_runs(std::vector<Segment<Kind>> runs,
                                                           double min_frames);

}  // namespace scenmine

#include "scenmine/detail/absorb_runs.hpp"
