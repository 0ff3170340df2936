#include "scenmine/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "scenmine/errors.hpp"

namespace scenmine {

namespace {

constexpr FrameIndex kSlotFrames = 400;
constexpr FrameIndex kManeuverStart = 100;  // accelerations run [100, 299]
constexpr FrameIndex kManeuverEnd = 299;
constexpr FrameIndex kCrossing = 200;
constexpr FrameIndex kLateralHalf = 50;  // lateral motion spans crossing +/- 2 s
constexpr FrameIndex kFollowLag = 13;
constexpr double kLaneWidth = 3.75;

// mt19937_64 output is specified by the standard; the distributions are not,
// so values are derived by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int pick(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

double round_places(double v, int places) {
  const double scale = std::pow(10.0, places);
  const double r = std::round(v * scale) / scale;
  return r == 0.0 ? 0.0 : r;
}

double lane_center_y(int lane) {
  // lanes 2-4: one carriageway, 5-7: the other, with a median between
  return kLaneWidth * lane + (lane >= 5 ? 4.0 : 0.0);
}

struct Phase {
  FrameIndex first;
  FrameIndex last;
  double accel;  // along the direction of travel
};

struct VehicleSpec {
  VehicleId id = 0;
  int direction = 1;
  double center_x0 = 0.0;
  double speed0 = 0.0;
  double length = 4.5;
  double width = 1.9;
  int lane = 2;
  int lane_after = 2;  // equals lane when there is no lane change
  FrameIndex crossing = kCrossing;
  FrameIndex frames = kSlotFrames;
  std::vector<Phase> phases;
};

Trajectory build(const VehicleSpec& v, FrameIndex slot_start, double frame_rate) {
  const double dt = 1.0 / frame_rate;
  const double y_from = lane_center_y(v.lane);
  const double y_to = lane_center_y(v.lane_after);
  const double span = 2.0 * static_cast<double>(kLateralHalf) * dt;  // s

  Trajectory t;
  t.vehicle_id = v.id;
  t.samples.reserve(static_cast<std::size_t>(v.frames));
  double pos = v.center_x0;
  double speed = v.speed0;
  for (FrameIndex f = 0; f < v.frames; ++f) {
    double accel = 0.0;
    for (const auto& p : v.phases) {
      if (f >= p.first && f <= p.last) accel = p.accel;
    }
    double yc = y_from;
    double vy = 0.0;
    double ay = 0.0;
    int lane = v.lane;
    if (v.lane_after != v.lane) {
      const FrameIndex begin = v.crossing - kLateralHalf;
      const FrameIndex end = v.crossing + kLateralHalf;
      if (f >= end) {
        yc = y_to;
      } else if (f > begin) {
        const double tau = static_cast<double>(f - begin) * dt;
        const double w = std::numbers::pi / span;
        const double dy = y_to - y_from;
        yc = y_from + dy * 0.5 * (1.0 - std::cos(w * tau));
        vy = dy * 0.5 * w * std::sin(w * tau);
        ay = dy * 0.5 * w * w * std::cos(w * tau);
      }
      if (f >= v.crossing) lane = v.lane_after;
    }

    TrackSample s;
    s.frame = slot_start + f;
    s.width = round_places(v.length, 2);
    s.height = round_places(v.width, 2);
    s.x = round_places(pos - 0.5 * v.length, 2);
    s.y = round_places(yc - 0.5 * v.width, 2);
    s.x_velocity = round_places(v.direction * speed, 2);
    s.y_velocity = round_places(vy, 2);
    s.x_acceleration = round_places(v.direction * accel, 4);
    s.y_acceleration = round_places(ay, 4);
    s.lane_id = lane;
    t.samples.push_back(s);

    pos += v.direction * (speed * dt + 0.5 * accel * dt * dt);
    speed += accel * dt;
  }
  return t;
}

struct Carriageway {
  int direction;
  int left_lane;    // leftmost lane seen by a driver
  int middle_lane;
  int right_lane;
  int toward_left;  // lane id step that moves one lane to the driver's left
};

Carriageway carriageway(int direction) {
  if (direction > 0) return {1, 5, 6, 7, -1};
  return {-1, 4, 3, 2, +1};
}

double start_x(int direction, Rng& rng) {
  return direction > 0 ? rng.uniform(20.0, 60.0) : rng.uniform(360.0, 400.0);
}

}  // namespace

SyntheticCorpus synthetic_corpus(std::uint64_t seed, const SyntheticSpec& spec) {
  if (!(spec.frame_rate > 0.0)) throw InputError("frame_rate must be positive");
  std::vector<std::string> slots;
  for (const auto& [category, count] : spec.episodes) {
    if (category != kFollowing && category != kCutIn && category != kCutOut) {
      throw InputError("unknown episode category '" + category + "'");
    }
    if (count < 0) throw InputError("episode count must be non-negative");
    for (int i = 0; i < count; ++i) slots.push_back(category);
  }
  if (slots.empty()) throw InputError("synthetic corpus needs at least one episode");

  Rng rng(seed);
  // Fisher-Yates with the hand-rolled generator keeps the order portable.
  for (std::size_t i = slots.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.pick(0, static_cast<int>(i) - 1));
    std::swap(slots[i - 1], slots[j]);
  }

  std::vector<Trajectory> trajectories;
  std::vector<GroundTruthLabel> labels;
  VehicleId next_id = 1;
  for (std::size_t slot = 0; slot < slots.size(); ++slot) {
    const FrameIndex s0 = static_cast<FrameIndex>(slot) * kSlotFrames;
    const std::string& category = slots[slot];
    const int direction = rng.pick(0, 1) == 0 ? 1 : -1;
    const auto road = carriageway(direction);

    VehicleSpec ego;
    ego.id = next_id++;
    ego.direction = direction;
    ego.center_x0 = start_x(direction, rng);
    ego.speed0 = round_places(rng.uniform(22.0, 30.0), 1);
    ego.length = rng.uniform(4.2, 5.0);
    ego.width = rng.uniform(1.8, 2.0);

    VehicleSpec target;
    target.id = next_id++;
    target.direction = direction;
    target.length = rng.uniform(4.2, 5.0);
    target.width = rng.uniform(1.8, 2.0);

    FrameInterval label_window;
    if (category == kFollowing) {
      ego.lane = ego.lane_after = road.left_lane + rng.pick(0, 2) * -road.toward_left;
      target.lane = target.lane_after = ego.lane;
      target.speed0 = ego.speed0;
      target.center_x0 = ego.center_x0 + direction * rng.uniform(28.0, 34.0);
      target.phases = {{kManeuverStart, kManeuverStart + 99, -1.5}};
      ego.phases = {{kManeuverStart + kFollowLag, kManeuverStart + kFollowLag + 99, -1.5}};
      label_window = {s0 + kManeuverStart + kFollowLag, s0 + kManeuverStart + 99};
    } else if (category == kCutIn) {
      ego.lane = ego.lane_after = road.middle_lane;
      target.lane = road.left_lane;
      target.lane_after = road.middle_lane;
      target.speed0 = ego.speed0 - 5.0;
      target.center_x0 = ego.center_x0 + direction * rng.uniform(48.0, 52.0);
      target.phases = {{kManeuverStart, kManeuverEnd, 1.0}};
      label_window = {s0 + kCrossing - kLateralHalf, s0 + kCrossing + kLateralHalf};
    } else {
      ego.lane = ego.lane_after = road.middle_lane;
      target.lane = road.middle_lane;
      target.lane_after = road.right_lane;
      target.speed0 = ego.speed0 - 3.0;
      target.center_x0 = ego.center_x0 + direction * rng.uniform(38.0, 42.0);
      target.phases = {{kManeuverStart, kManeuverEnd, 1.0}};
      label_window = {s0 + kCrossing - kLateralHalf, s0 + kCrossing + kLateralHalf};
    }
    trajectories.push_back(build(ego, s0, spec.frame_rate));
    trajectories.push_back(build(target, s0, spec.frame_rate));
    labels.push_back({category, ego.id, target.id, label_window});

    if (spec.leading_distractor) {
      VehicleSpec lead;
      lead.id = next_id++;
      lead.direction = direction;
      lead.lane = lead.lane_after = ego.lane;
      lead.speed0 = 33.0;
      lead.center_x0 = ego.center_x0 + direction * 80.0;
      lead.length = rng.uniform(4.2, 5.0);
      lead.width = rng.uniform(1.8, 2.0);
      trajectories.push_back(build(lead, s0, spec.frame_rate));
    }
    const auto other = carriageway(-direction);
    for (int k = 0; k < spec.opposite_distractors_per_slot; ++k) {
      VehicleSpec d;
      d.id = next_id++;
      d.direction = -direction;
      d.lane = d.lane_after = other.left_lane + (k % 3) * -other.toward_left;
      d.speed0 = round_places(rng.uniform(24.0, 34.0), 1);
      d.center_x0 = start_x(-direction, rng) - direction * 15.0 * k;
      d.length = rng.uniform(4.2, 5.0);
      d.width = rng.uniform(1.8, 2.0);
      trajectories.push_back(build(d, s0, spec.frame_rate));
    }
  }

  RecordingConfig config;
  config.frame_rate = spec.frame_rate;
  config.recording_id = spec.recording_id;
  return {TrajectoryStore(config, std::move(trajectories)), std::move(labels)};
}

TrajectoryStore perf_recording(std::uint64_t seed, std::size_t track_count, FrameIndex frame_count,
                               double frame_rate) {
  if (track_count == 0) throw InputError("perf recording needs at least one track");
  if (frame_count < 1000) throw InputError("perf recording needs at least 1000 frames");
  if (!(frame_rate > 0.0)) throw InputError("frame_rate must be positive");
  Rng rng(seed);
  std::vector<Trajectory> trajectories;
  trajectories.reserve(track_count);
  for (std::size_t i = 0; i < track_count; ++i) {
    VehicleSpec v;
    v.id = static_cast<VehicleId>(i + 1);
    v.direction = rng.pick(0, 1) == 0 ? 1 : -1;
    const auto road = carriageway(v.direction);
    v.frames = rng.pick(500, 1000);
    const FrameIndex start = rng.pick(0, static_cast<int>(frame_count - v.frames));
    v.lane = road.left_lane + rng.pick(0, 2) * -road.toward_left;
    v.lane_after = v.lane;
    if (rng.pick(0, 2) == 0) {  // one lane change toward a neighbouring lane
      const int step = v.lane == road.middle_lane ? (rng.pick(0, 1) == 0 ? 1 : -1)
                                                  : (v.lane == road.left_lane ? -road.toward_left
                                                                              : road.toward_left);
      v.lane_after = v.lane + step;
      v.crossing = rng.pick(kLateralHalf + 1, static_cast<int>(v.frames - kLateralHalf - 1));
    }
    v.speed0 = round_places(rng.uniform(20.0, 34.0), 1);
    v.center_x0 = start_x(v.direction, rng);
    v.length = rng.uniform(4.2, 5.0);
    v.width = rng.uniform(1.8, 2.0);
    for (FrameIndex f = 0; f + 150 < v.frames; f += 150) {
      const int kind = rng.pick(0, 2);
      if (kind != 0) v.phases.push_back({f, f + rng.pick(30, 120), kind == 1 ? 0.6 : -0.6});
    }
    trajectories.push_back(build(v, start, frame_rate));
  }
  RecordingConfig config;
  config.frame_rate = frame_rate;
  config.recording_id = "perf";
  return TrajectoryStore(config, std::move(trajectories));
}

}  // namespace scenmine
