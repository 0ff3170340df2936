#include "scenmine/relative_position.hpp"

#include <cmath>
#include <cstdlib>

#include "scenmine/errors.hpp"

namespace scenmine {

std::string_view label(RelativePosition position) {
  switch (position) {
    case RelativePosition::Front:
      return "front";
    case RelativePosition::Behind:
      return "behind";
    case RelativePosition::LeftAdjacent:
      return "left adjacent lane";
    case RelativePosition::RightAdjacent:
      return "right adjacent lane";
    case RelativePosition::LaneNextToLeftAdjacent:
      return "lane next to left adjacent lane";
    case RelativePosition::LaneNextToRightAdjacent:
      return "lane next to right adjacent lane";
    case RelativePosition::OutOfScope:
      return "out of scope";
  }
  return "unknown";
}

RelativePosition classify_position(int lane_ego, int lane_tgt, double x_center_ego,
                                   double x_center_tgt, double v_lon_ego) {
  if (!std::isfinite(x_center_ego) || !std::isfinite(x_center_tgt) || !std::isfinite(v_lon_ego)) {
    throw InputError("classify_position: non-finite input");
  }
  if (v_lon_ego == 0.0) {
    throw UndecidableDirectionError("classify_position: ego longitudinal velocity is zero");
  }
  const int delta_lane = lane_tgt - lane_ego;
  const double delta_x = x_center_tgt - x_center_ego;
  if (std::abs(delta_lane) > 2) {
    return RelativePosition::OutOfScope;
  }
  // Travelling towards -x mirrors both the longitudinal and the lateral sense.
  const int sign = v_lon_ego > 0.0 ? 1 : -1;
  if (delta_lane == 0) {
    const double ahead = sign * delta_x;
    if (ahead > 0.0) return RelativePosition::Front;
    if (ahead < 0.0) return RelativePosition::Behind;
    return RelativePosition::OutOfScope;
  }
  switch (sign * delta_lane) {
    case -1:
      return RelativePosition::LeftAdjacent;
    case 1:
      return RelativePosition::RightAdjacent;
    case -2:
      return RelativePosition::LaneNextToLeftAdjacent;
    default:
      return RelativePosition::LaneNextToRightAdjacent;
  }
}

RelativePosition position_at(const TrackSample& ego, const TrackSample& target,
                             int ego_travel_sign) {
  return classify_position(ego.lane_id, target.lane_id, ego.center_x(), target.center_x(),
                           static_cast<double>(ego_travel_sign));
}

std::vector<PositionSpan> position_timeline(const Trajectory& ego, const Trajectory& target) {
  const auto window = coexistence_window(ego, target);
  if (!window) {
    throw EmptyWindowError("vehicles " + std::to_string(ego.vehicle_id) + " and " +
                           std::to_string(target.vehicle_id) + " never coexist");
  }
  const int sign = travel_sign(ego);
  std::vector<RelativePosition> labels;
  labels.reserve(static_cast<std::size_t>(window->length()));
  for (FrameIndex f = window->first; f <= window->last; ++f) {
    labels.push_back(position_at(ego.at_frame(f), target.at_frame(f), sign));
  }
  return run_length_segments(labels, window->first);
}

}  // namespace scenmine
