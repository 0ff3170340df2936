#include "scenmine/trajectory_store.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include "scenmine/errors.hpp"
#include "scenmine/format.hpp"

namespace scenmine {
namespace {

enum Column : std::size_t {
  kFrame,
  kId,
  kX,
  kY,
  kWidth,
  kHeight,
  kXVelocity,
  kYVelocity,
  kXAcceleration,
  kYAcceleration,
  kLaneId,
  kColumnCount
};

constexpr std::array<const char*, kColumnCount> kColumnNames = {
    "frame",     "id",        "x",         "y",
    "width",     "height",    "xVelocity", "yVelocity",
    "xAcceleration", "yAcceleration", "laneId"};

void split_fields(std::string_view line, std::vector<std::string_view>& fields) {
  fields.clear();
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view unquote(std::string_view field) {
  field = trim(field);
  if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
    field = field.substr(1, field.size() - 2);
  }
  return field;
}

void finalize_trajectory(Trajectory& trajectory) {
  auto& samples = trajectory.samples;
  if (samples.empty()) {
    throw IntegrityError(trajectory.vehicle_id, "trajectory has no samples");
  }
  const auto by_frame = [](const TrackSample& a, const TrackSample& b) { return a.frame < b.frame; };
  if (!std::is_sorted(samples.begin(), samples.end(), by_frame)) {
    std::stable_sort(samples.begin(), samples.end(), by_frame);
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].frame != samples[i - 1].frame + 1) {
      throw IntegrityError(trajectory.vehicle_id,
                           "non-contiguous frames " + std::to_string(samples[i - 1].frame) +
                               " -> " + std::to_string(samples[i].frame));
    }
  }
}

}  // namespace

int travel_sign(const Trajectory& trajectory) {
  if (trajectory.samples.empty()) {
    return 0;
  }
  std::vector<double> velocities;
  velocities.reserve(trajectory.samples.size());
  for (const auto& s : trajectory.samples) {
    velocities.push_back(s.x_velocity);
  }
  const auto mid = velocities.begin() + static_cast<std::ptrdiff_t>(velocities.size() / 2);
  std::nth_element(velocities.begin(), mid, velocities.end());
  double median = *mid;
  if (velocities.size() % 2 == 0) {
    const double lower = *std::max_element(velocities.begin(), mid);
    median = 0.5 * (median + lower);
  }
  return (median > 0.0) - (median < 0.0);
}

void RecordingConfig::validate() const {
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) {
    throw InputError("frame_rate must be positive");
  }
}

TrajectoryStore::TrajectoryStore(RecordingConfig config, std::vector<Trajectory> trajectories)
    : config_(std::move(config)), trajectories_(std::move(trajectories)) {
  config_.validate();
  for (auto& trajectory : trajectories_) {
    finalize_trajectory(trajectory);
    sample_count_ += trajectory.samples.size();
  }
  std::sort(trajectories_.begin(), trajectories_.end(),
            [](const Trajectory& a, const Trajectory& b) { return a.vehicle_id < b.vehicle_id; });
  for (std::size_t i = 1; i < trajectories_.size(); ++i) {
    if (trajectories_[i].vehicle_id == trajectories_[i - 1].vehicle_id) {
      throw IntegrityError(trajectories_[i].vehicle_id, "duplicate trajectory id");
    }
  }
}

std::optional<FrameInterval> TrajectoryStore::frame_range() const {
  if (trajectories_.empty()) {
    return std::nullopt;
  }
  FrameInterval range = trajectories_.front().frames();
  for (const auto& trajectory : trajectories_) {
    range = hull(range, trajectory.frames());
  }
  return range;
}

const Trajectory* TrajectoryStore::find(VehicleId id) const {
  const auto it = std::lower_bound(
      trajectories_.begin(), trajectories_.end(), id,
      [](const Trajectory& t, VehicleId value) { return t.vehicle_id < value; });
  if (it == trajectories_.end() || it->vehicle_id != id) {
    return nullptr;
  }
  return &*it;
}

const Trajectory& TrajectoryStore::get(VehicleId id) const {
  if (const auto* trajectory = find(id)) {
    return *trajectory;
  }
  throw NotFoundError("vehicle " + std::to_string(id) + " not found in recording " +
                      config_.recording_id);
}

std::span<const char* const> required_track_columns() { return kColumnNames; }

TrajectoryStore parse_tracks_csv(std::istream& input, const RecordingConfig& config) {
  config.validate();

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;

  if (!std::getline(input, line)) {
    throw SchemaError("", "input is empty: header row missing");
  }
  ++line_no;
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  split_fields(line, fields);

  std::array<std::size_t, kColumnCount> index{};
  std::size_t max_index = 0;
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    const auto it = std::find_if(fields.begin(), fields.end(), [&](std::string_view f) {
      return unquote(f) == kColumnNames[c];
    });
    if (it == fields.end()) {
      throw SchemaError(kColumnNames[c],
                        std::string("missing required column '") + kColumnNames[c] + "'");
    }
    index[c] = static_cast<std::size_t>(it - fields.begin());
    max_index = std::max(max_index, index[c]);
  }

  std::unordered_map<VehicleId, std::vector<TrackSample>> by_id;
  std::vector<VehicleId> id_order;

  const auto number = [&](Column c) {
    const auto value = parse_double(fields[index[c]]);
    if (!value || !std::isfinite(*value)) {
      throw ParseError(line_no, std::string("non-numeric value '") +
                                    std::string(trim(fields[index[c]])) + "' in column " +
                                    kColumnNames[c]);
    }
    return *value;
  };
  const auto integer = [&](Column c) {
    const auto value = parse_integer(fields[index[c]]);
    if (!value) {
      throw ParseError(line_no, std::string("non-integer value '") +
                                    std::string(trim(fields[index[c]])) + "' in column " +
                                    kColumnNames[c]);
    }
    return *value;
  };

  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (trim(line).empty()) {
      continue;
    }
    split_fields(line, fields);
    if (fields.size() <= max_index) {
      throw ParseError(line_no, "expected at least " + std::to_string(max_index + 1) +
                                    " columns, found " + std::to_string(fields.size()));
    }
    TrackSample sample;
    sample.frame = integer(kFrame);
    const VehicleId id = integer(kId);
    sample.x = number(kX);
    sample.y = number(kY);
    sample.width = number(kWidth);
    sample.height = number(kHeight);
    sample.x_velocity = number(kXVelocity);
    sample.y_velocity = number(kYVelocity);
    sample.x_acceleration = number(kXAcceleration);
    sample.y_acceleration = number(kYAcceleration);
    const auto lane = integer(kLaneId);
    if (!(sample.width > 0.0) || !(sample.height > 0.0)) {
      throw ParseError(line_no, "width and height must be positive");
    }
    if (lane < 1 || lane > 1'000'000) {
      throw ParseError(line_no, "laneId must be a positive integer");
    }
    sample.lane_id = static_cast<int>(lane);

    auto [it, inserted] = by_id.try_emplace(id);
    if (inserted) {
      id_order.push_back(id);
    }
    it->second.push_back(sample);
  }

  std::vector<Trajectory> trajectories;
  trajectories.reserve(id_order.size());
  for (const VehicleId id : id_order) {
    trajectories.push_back({id, std::move(by_id[id])});
  }
  return TrajectoryStore(config, std::move(trajectories));
}

TrajectoryStore load_tracks_csv(const std::filesystem::path& path, const RecordingConfig& config) {
  std::ifstream input(path);
  if (!input) {
    throw InputError("cannot open tracks file: " + path.string());
  }
  return parse_tracks_csv(input, config);
}

void write_tracks_csv(std::ostream& output, const TrajectoryStore& store) {
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    output << (c ? "," : "") << kColumnNames[c];
  }
  output << '\n';
  std::string row;
  for (const auto& trajectory : store.trajectories()) {
    for (const auto& s : trajectory.samples) {
      row.clear();
      row += std::to_string(s.frame);
      row += ',';
      row += std::to_string(trajectory.vehicle_id);
      for (const double v : {s.x, s.y, s.width, s.height, s.x_velocity, s.y_velocity,
                             s.x_acceleration, s.y_acceleration}) {
        row += ',';
        row += format_shortest(v);
      }
      row += ',';
      row += std::to_string(s.lane_id);
      row += '\n';
      output << row;
    }
  }
}

const Trajectory& get(const TrajectoryStore& store, VehicleId id) { return store.get(id); }

Trajectory slice(const Trajectory& trajectory, FrameIndex frame_start, FrameIndex frame_end) {
  if (frame_start > frame_end) {
    throw RangeError("slice start " + std::to_string(frame_start) + " is after end " +
                     std::to_string(frame_end));
  }
  if (trajectory.empty() || !trajectory.covers(frame_start) || !trajectory.covers(frame_end)) {
    throw RangeError("slice [" + std::to_string(frame_start) + ", " + std::to_string(frame_end) +
                     "] outside trajectory of vehicle " + std::to_string(trajectory.vehicle_id));
  }
  const auto begin = trajectory.samples.begin() + (frame_start - trajectory.first_frame());
  const auto end = trajectory.samples.begin() + (frame_end - trajectory.first_frame()) + 1;
  return {trajectory.vehicle_id, std::vector<TrackSample>(begin, end)};
}

std::optional<FrameInterval> coexistence_window(const Trajectory& a, const Trajectory& b) {
  if (a.empty() || b.empty()) {
    return std::nullopt;
  }
  return intersect(a.frames(), b.frames());
}

}  // namespace scenmine
