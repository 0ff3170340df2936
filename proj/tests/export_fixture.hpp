#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scenmine/exporters.hpp"
#include "test_support.hpp"

namespace scenmine::testing {

// Vehicle 162 at dataset (389.16, 14.27) driving towards -x; ego 7 alongside.
inline TrajectoryStore fixture_store() {
  Trajectory tgt;
  tgt.vehicle_id = 162;
  Trajectory ego;
  ego.vehicle_id = 7;
  for (int i = 0; i < 5; ++i) {
    TrackSample s;
    s.frame = 100 + i;
    s.x = 389.16 + 1.2 * i;
    s.y = 14.27;
    s.width = 4.5;
    s.height = 1.9;
    s.x_velocity = 30.0;
    s.lane_id = 2;
    tgt.samples.push_back(s);
    s.x = 420.5 + 1.0 * i;
    s.y = 10.51;
    s.x_velocity = 25.0;
    s.lane_id = 3;
    ego.samples.push_back(s);
  }
  return store_of({ego, tgt}, 25.0, "fixture");
}

inline ScenarioMatch fixture_match() { return {"fixture", 7, {{162, {100, 104}}}, {100, 104}}; }

// File name under tests/golden and the text the exporters produce for it.
inline std::vector<std::pair<std::string, std::string>> golden_outputs() {
  const auto store = fixture_store();
  const auto m = fixture_match();
  return {{"fixture.xosc", to_openscenario(m, store)},
          {"fixture.txt", to_carmaker_text(m, store)},
          {"fixture_ego_path.txt", emit_ego_path(m, store)}};
}

}  // namespace scenmine::testing
