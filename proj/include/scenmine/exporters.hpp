#pragma once

#include <string>
#include <vector>

#include "scenmine/scenario_search.hpp"
#include "scenmine/trajectory_store.hpp"

namespace scenmine {

/// Pose of one vehicle at one instant in the simulator's world frame.
struct ExportVertex {
  double time = 0.0;  // s from window start
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double h = 0.0;  // 0 or pi
  double p = 0.0;
  double r = 0.0;
};

struct ExportConfig {
  bool flip_y = true;  // image frame (y down) to world frame (y up)
  bool include_ego_in_text = false;
  int precision = 6;  // decimals, trailing zeros trimmed
  /// Export the bounding-box centre along x instead of the dataset x.
  bool use_center_x = false;
  std::string date = "2024-01-01T00:00:00";  // FileHeader date, fixed for reproducible output

  void validate() const;
};

/// Vertices of `trajectory` for the frames of `window` it covers; time is
/// measured from window.first.
[[nodiscard]] std::vector<ExportVertex> export_vertices(const Trajectory& trajectory,
                                                        const FrameInterval& window,
                                                        double frame_rate,
                                                        const ExportConfig& config);

/// OpenSCENARIO 1.2 document with one polyline trajectory per vehicle (ego
/// first, then targets) over the match's scenario window.
[[nodiscard]] std::string to_openscenario(const ScenarioMatch& match, const TrajectoryStore& store,
                                          const ExportConfig& config = {});

/// "#time, x_<id>, y_<id>, ..." text, one row per frame, comma-space
/// separated, empty cells where a vehicle is absent. Throws ExportError when
/// there is no non-ego vehicle.
[[nodiscard]] std::string to_carmaker_text(const ScenarioMatch& match,
                                           const TrajectoryStore& store,
                                           const ExportConfig& config = {});

/// "#time, x, y" rows for the ego alone, same transform. Meant for manual
/// import as a route in the simulator.
[[nodiscard]] std::string emit_ego_path(const ScenarioMatch& match, const TrajectoryStore& store,
                                        const ExportConfig& config = {});

}  // namespace scenmine
