#pragma once

#include <string_view>
#include <vector>

#include "scenmine/common.hpp"
#include "scenmine/trajectory_store.hpp"

namespace scenmine {

enum class RelativePosition {
  Front,
  Behind,
  LeftAdjacent,
  RightAdjacent,
  LaneNextToLeftAdjacent,
  LaneNextToRightAdjacent,
  OutOfScope
};

inline constexpr RelativePosition kInScopePositions[] = {
    RelativePosition::Front,
    RelativePosition::Behind,
    RelativePosition::LeftAdjacent,
    RelativePosition::RightAdjacent,
    RelativePosition::LaneNextToLeftAdjacent,
    RelativePosition::LaneNextToRightAdjacent};

/// Taxonomy member label ("front", "left adjacent lane", ...); "out of scope"
/// for OutOfScope.
[[nodiscard]] std::string_view label(RelativePosition position);

using PositionSpan = Segment<RelativePosition>;

/// Position of the target relative to the ego. delta_lane = lane_tgt -
/// lane_ego and delta_x = x_center_tgt - x_center_ego; the sign of v_lon_ego
/// selects which side counts as left and which as front. |delta_lane| > 2 or
/// an exact overlap gives OutOfScope. Throws UndecidableDirectionError when
/// v_lon_ego is zero.
[[nodiscard]] RelativePosition classify_position(int lane_ego, int lane_tgt, double x_center_ego,
                                                 double x_center_tgt, double v_lon_ego);

/// Same as classify_position on two samples, comparing bounding-box centres,
/// with the ego direction given as a travel sign.
[[nodiscard]] RelativePosition position_at(const TrackSample& ego, const TrackSample& target,
                                           int ego_travel_sign);

/// Frame-wise positions merged into maximal runs that tile the coexistence
/// window. Throws EmptyWindowError when the vehicles never coexist.
[[nodiscard]] std::vector<PositionSpan> position_timeline(const Trajectory& ego,
                                                          const Trajectory& target);

}  // namespace scenmine
