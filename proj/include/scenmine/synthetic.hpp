#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scenmine/evaluation.hpp"
#include "scenmine/trajectory_store.hpp"

namespace scenmine {

inline constexpr const char* kFollowing = "following";
inline constexpr const char* kCutIn = "cut-in";
inline constexpr const char* kCutOut = "cut-out";

struct SyntheticSpec {
  std::map<std::string, int> episodes;  // category -> count
  int opposite_distractors_per_slot = 2;
  bool leading_distractor = true;  // fast same-lane vehicle far ahead of each ego
  double frame_rate = 25.0;
  std::string recording_id = "synthetic";
};

struct SyntheticCorpus {
  TrajectoryStore store;
  std::vector<GroundTruthLabel> labels;
};

/// Noise-free highway recording in which every episode occupies its own
/// 16 s slot, plus distractor traffic. Same seed and spec give identical
/// output. Throws InputError when no episode is requested or a category is
/// unknown.
[[nodiscard]] SyntheticCorpus synthetic_corpus(std::uint64_t seed, const SyntheticSpec& spec);

/// Large random recording for timing the search: `track_count` vehicles of
/// 20 to 40 s each, spread over `frame_count` frames, with random speed
/// phases and lane changes.
[[nodiscard]] TrajectoryStore perf_recording(std::uint64_t seed, std::size_t track_count,
                                             FrameIndex frame_count, double frame_rate = 25.0);

}  // namespace scenmine
