#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scenmine/common.hpp"

namespace scenmine {

/// One row of a highD-style tracks file. (x, y) is the upper-left corner of
/// the bounding box in the image frame: x rightward, y downward. `width` is
/// the extent along x and `height` the extent along y.
struct TrackSample {
  FrameIndex frame = 0;
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
  double x_velocity = 0.0;
  double y_velocity = 0.0;
  double x_acceleration = 0.0;
  double y_acceleration = 0.0;
  int lane_id = 1;

  [[nodiscard]] double center_x() const { return x + 0.5 * width; }
  [[nodiscard]] double center_y() const { return y + 0.5 * height; }
};

struct Trajectory {
  VehicleId vehicle_id = 0;
  std::vector<TrackSample> samples;  // contiguous frames, ascending

  [[nodiscard]] bool empty() const { return samples.empty(); }
  [[nodiscard]] std::size_t size() const { return samples.size(); }
  [[nodiscard]] FrameIndex first_frame() const { return samples.front().frame; }
  [[nodiscard]] FrameIndex last_frame() const { return samples.back().frame; }
  [[nodiscard]] FrameInterval frames() const { return {first_frame(), last_frame()}; }
  [[nodiscard]] bool covers(FrameIndex frame) const {
    return !samples.empty() && frame >= first_frame() && frame <= last_frame();
  }
  /// Sample at an absolute frame; the frame must be covered.
  [[nodiscard]] const TrackSample& at_frame(FrameIndex frame) const {
    return samples[static_cast<std::size_t>(frame - first_frame())];
  }
};

/// +1 if the vehicle travels towards +x, -1 towards -x, 0 when the median
/// x_velocity is exactly zero. Highway vehicles do not reverse, so one sign
/// describes the whole trajectory.
[[nodiscard]] int travel_sign(const Trajectory& trajectory);

struct RecordingConfig {
  double frame_rate = 25.0;  // Hz
  std::string recording_id = "recording";

  void validate() const;
};

/// Immutable, id-indexed collection of trajectories. Safe for concurrent reads.
class TrajectoryStore {
 public:
  TrajectoryStore() = default;
  /// Sorts samples by frame and trajectories by id; throws IntegrityError on
  /// duplicate ids, gaps or duplicate frames.
  TrajectoryStore(RecordingConfig config, std::vector<Trajectory> trajectories);

  [[nodiscard]] const RecordingConfig& config() const { return config_; }
  [[nodiscard]] double frame_rate() const { return config_.frame_rate; }
  [[nodiscard]] const std::string& recording_id() const { return config_.recording_id; }

  [[nodiscard]] std::span<const Trajectory> trajectories() const { return trajectories_; }
  [[nodiscard]] std::size_t track_count() const { return trajectories_.size(); }
  [[nodiscard]] std::size_t sample_count() const { return sample_count_; }
  [[nodiscard]] std::optional<FrameInterval> frame_range() const;

  [[nodiscard]] const Trajectory* find(VehicleId id) const;
  /// Throws NotFoundError for unknown ids.
  [[nodiscard]] const Trajectory& get(VehicleId id) const;
  [[nodiscard]] bool contains(VehicleId id) const { return find(id) != nullptr; }

 private:
  RecordingConfig config_;
  std::vector<Trajectory> trajectories_;  // ascending vehicle_id
  std::size_t sample_count_ = 0;
};

/// Column names that must be present in the header row.
[[nodiscard]] std::span<const char* const> required_track_columns();

/// Single-pass CSV ingestion. Unknown columns are ignored.
/// Throws SchemaError (missing column), ParseError (bad cell, with line
/// number) or IntegrityError (non-contiguous frames for an id).
[[nodiscard]] TrajectoryStore parse_tracks_csv(std::istream& input, const RecordingConfig& config);
[[nodiscard]] TrajectoryStore load_tracks_csv(const std::filesystem::path& path,
                                              const RecordingConfig& config);

/// Writes the required columns, rows ordered by (id, frame), numbers in
/// shortest round-trip form.
void write_tracks_csv(std::ostream& output, const TrajectoryStore& store);

[[nodiscard]] const Trajectory& get(const TrajectoryStore& store, VehicleId id);

/// Contiguous sub-trajectory including both endpoints. Throws RangeError when
/// the range is inverted or not covered.
[[nodiscard]] Trajectory slice(const Trajectory& trajectory, FrameIndex frame_start,
                               FrameIndex frame_end);

/// Frames on which both vehicles are present, if any.
[[nodiscard]] std::optional<FrameInterval> coexistence_window(const Trajectory& a,
                                                              const Trajectory& b);

}  // namespace scenmine
