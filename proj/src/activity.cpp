#include "scenmine/activity.hpp"

#include <cmath>
#include <string>

#include "scenmine/errors.hpp"

namespace scenmine {

std::string_view label(LongitudinalActivity activity) {
  switch (activity) {
    case LongitudinalActivity::KeepVelocity:
      return "keep velocity";
    case LongitudinalActivity::Acceleration:
      return "acceleration";
    case LongitudinalActivity::Deceleration:
      return "deceleration";
  }
  return "unknown";
}

std::string_view label(LateralActivity activity) {
  switch (activity) {
    case LateralActivity::FollowLane:
      return "follow lane";
    case LateralActivity::LaneChangeLeft:
      return "lane change left";
    case LateralActivity::LaneChangeRight:
      return "lane change right";
  }
  return "unknown";
}

void DetectionParams::validate() const {
  if (!(a_lon_threshold > 0.0) || !std::isfinite(a_lon_threshold)) {
    throw InputError("a_lon_threshold must be positive");
  }
  if (!(min_activity_duration >= 0.0) || !std::isfinite(min_activity_duration)) {
    throw InputError("min_activity_duration must be non-negative");
  }
  if (!(lane_change_half_window >= 0.0) || !std::isfinite(lane_change_half_window)) {
    throw InputError("lane_change_half_window must be non-negative");
  }
}

LongitudinalActivity classify_longitudinal(double a_lon, double a_thr) {
  if (!std::isfinite(a_lon) || !std::isfinite(a_thr)) {
    throw InputError("classify_longitudinal: non-finite input");
  }
  if (!(a_thr > 0.0)) {
    throw InputError("classify_longitudinal: threshold must be positive");
  }
  if (a_lon < -a_thr) {
    return LongitudinalActivity::Deceleration;
  }
  if (a_lon > a_thr) {
    return LongitudinalActivity::Acceleration;
  }
  return LongitudinalActivity::KeepVelocity;
}

LateralActivity classify_lateral(int delta_lane, double v_lon) {
  if (delta_lane == 0) {
    return LateralActivity::FollowLane;
  }
  if (!(v_lon > 0.0) && !(v_lon < 0.0)) {
    throw UndecidableDirectionError("lane change with zero longitudinal velocity");
  }
  const bool right = (delta_lane > 0) == (v_lon > 0.0);
  return right ? LateralActivity::LaneChangeRight : LateralActivity::LaneChangeLeft;
}

double longitudinal_acceleration(const TrackSample& sample, int travel_sign) {
  return travel_sign < 0 ? -sample.x_acceleration : sample.x_acceleration;
}

std::vector<LongitudinalSegment> segment_longitudinal(const Trajectory& trajectory,
                                                      const DetectionParams& params,
                                                      double frame_rate) {
  params.validate();
  if (trajectory.empty()) {
    throw InputError("segment_longitudinal: empty trajectory");
  }
  const int sign = travel_sign(trajectory);
  std::vector<LongitudinalActivity> labels;
  labels.reserve(trajectory.size());
  for (const auto& sample : trajectory.samples) {
    labels.push_back(
        classify_longitudinal(longitudinal_acceleration(sample, sign), params.a_lon_threshold));
  }
  auto runs = run_length_segments(labels, trajectory.first_frame());
  return absorb_short_runs(std::move(runs), params.min_activity_duration * frame_rate);
}

FrameIndex lane_change_half_window_frames(const DetectionParams& params, double frame_rate) {
  return static_cast<FrameIndex>(std::floor(params.lane_change_half_window * frame_rate + 1e-9));
}

std::vector<LateralSegment> segment_lateral(const Trajectory& trajectory,
                                            const DetectionParams& params, double frame_rate) {
  params.validate();
  if (trajectory.empty()) {
    throw InputError("segment_lateral: empty trajectory");
  }
  const FrameIndex first = trajectory.first_frame();
  const FrameIndex last = trajectory.last_frame();
  const FrameIndex w = lane_change_half_window_frames(params, frame_rate);

  struct Crossing {
    FrameIndex frame;
    LateralActivity direction;
  };
  std::vector<Crossing> crossings;
  int sign = 0;
  bool sign_known = false;
  for (std::size_t i = 1; i < trajectory.samples.size(); ++i) {
    const int delta = trajectory.samples[i].lane_id - trajectory.samples[i - 1].lane_id;
    if (delta == 0) {
      continue;
    }
    if (!sign_known) {
      sign = travel_sign(trajectory);
      sign_known = true;
    }
    crossings.push_back({trajectory.samples[i].frame, classify_lateral(delta, sign)});
  }

  for (std::size_t i = 1; i < crossings.size(); ++i) {
    if (crossings[i].direction != crossings[i - 1].direction &&
        crossings[i].frame - crossings[i - 1].frame <= 2 * w) {
      throw AmbiguityError(
          {crossings[i - 1].frame, crossings[i].frame},
          "vehicle " + std::to_string(trajectory.vehicle_id) +
              ": opposite lane changes at frames " + std::to_string(crossings[i - 1].frame) +
              " and " + std::to_string(crossings[i].frame) + " overlap within one window");
    }
  }

  std::vector<LateralSegment> changes;
  for (const auto& crossing : crossings) {
    LateralSegment window{crossing.direction, std::max(first, crossing.frame - w),
                          std::min(last, crossing.frame + w)};
    if (!changes.empty() && changes.back().kind == window.kind &&
        window.frame_start <= changes.back().frame_end + 1) {
      changes.back().frame_end = std::max(changes.back().frame_end, window.frame_end);
    } else {
      changes.push_back(window);
    }
  }

  std::vector<LateralSegment> out;
  FrameIndex cursor = first;
  for (const auto& change : changes) {
    if (change.frame_start > cursor) {
      out.push_back({LateralActivity::FollowLane, cursor, change.frame_start - 1});
    }
    out.push_back(change);
    cursor = change.frame_end + 1;
  }
  if (cursor <= last) {
    out.push_back({LateralActivity::FollowLane, cursor, last});
  }
  return out;
}

}  // namespace scenmine
