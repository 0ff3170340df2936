#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scenmine/trajectory_store.hpp"

namespace scenmine::testing {

inline std::filesystem::path data_path(const std::string& relative) {
  return std::filesystem::path(SCENMINE_TEST_DATA) / relative;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("scenmine_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Straight-line trajectory: constant velocity along x, one lane.
inline Trajectory cruise(VehicleId id, FrameIndex first, std::size_t frames, double center_x0,
                         double vx, int lane, double frame_rate = 25.0, double length = 4.0,
                         double width = 2.0) {
  Trajectory t;
  t.vehicle_id = id;
  for (std::size_t i = 0; i < frames; ++i) {
    TrackSample s;
    s.frame = first + static_cast<FrameIndex>(i);
    s.width = length;
    s.height = width;
    s.x = center_x0 + vx * static_cast<double>(i) / frame_rate - 0.5 * length;
    s.y = 3.75 * lane;
    s.x_velocity = vx;
    s.lane_id = lane;
    t.samples.push_back(s);
  }
  return t;
}

// Trajectory with prescribed per-frame x acceleration and lane ids.
inline Trajectory from_profile(VehicleId id, FrameIndex first, const std::vector<double>& ax,
                               const std::vector<int>& lanes, double vx0, double center_x0 = 0.0,
                               double frame_rate = 25.0) {
  Trajectory t;
  t.vehicle_id = id;
  double x = center_x0;
  double v = vx0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    TrackSample s;
    s.frame = first + static_cast<FrameIndex>(i);
    s.width = 4.0;
    s.height = 2.0;
    s.x = x - 2.0;
    s.y = 3.75 * lanes[i];
    s.x_velocity = v;
    s.x_acceleration = ax[i];
    s.lane_id = lanes[i];
    t.samples.push_back(s);
    x += v / frame_rate;
    v += ax[i] / frame_rate;
  }
  return t;
}

inline TrajectoryStore store_of(std::vector<Trajectory> trajectories, double frame_rate = 25.0,
                                const std::string& id = "test") {
  RecordingConfig c;
  c.frame_rate = frame_rate;
  c.recording_id = id;
  return TrajectoryStore(c, std::move(trajectories));
}

}  // namespace scenmine::testing
