#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

namespace scenmine {

using FrameIndex = std::int64_t;
using VehicleId = std::int64_t;

/// Inclusive frame interval [first, last].
struct FrameInterval {
  FrameIndex first = 0;
  FrameIndex last = 0;

  [[nodiscard]] constexpr FrameIndex length() const { return last - first + 1; }
  [[nodiscard]] constexpr bool contains(FrameIndex frame) const {
    return frame >= first && frame <= last;
  }
  [[nodiscard]] constexpr bool contains(const FrameInterval& other) const {
    return other.first >= first && other.last <= last;
  }

  friend constexpr bool operator==(const FrameInterval&, const FrameInterval&) = default;
  friend constexpr auto operator<=>(const FrameInterval&, const FrameInterval&) = default;
};

[[nodiscard]] constexpr std::optional<FrameInterval> intersect(const FrameInterval& a,
                                                             const FrameInterval& b) {
  const FrameIndex first = std::max(a.first, b.first);
  const FrameIndex last = std::min(a.last, b.last);
  if (first > last) {
    return std::nullopt;
  }
  return FrameInterval{first, last};
}

[[nodiscard]] constexpr FrameInterval hull(const FrameInterval& a, const FrameInterval& b) {
  return {std::min(a.first, b.first), std::max(a.last, b.last)};
}

/// Intersection-over-union of two frame intervals, counted in frames.
[[nodiscard]] constexpr double temporal_iou(const FrameInterval& a, const FrameInterval& b) {
  const auto common = intersect(a, b);
  if (!common) {
    return 0.0;
  }
  const auto inter = static_cast<double>(common->length());
  const auto uni = static_cast<double>(a.length() + b.length()) - inter;
  return inter / uni;
}

/// A maximal run of one label over an inclusive frame range. Used for
/// activity segments (Kind = activity enum) and position spans.
template <class Kind>
struct Segment {
  Kind kind{};
  FrameIndex frame_start = 0;
  FrameIndex frame_end = 0;

  [[nodiscard]] constexpr FrameInterval interval() const { return {frame_start, frame_end}; }
  [[nodiscard]] constexpr FrameIndex length() const { return frame_end - frame_start + 1; }

  friend constexpr bool operator==(const Segment&, const Segment&) = default;
};

/// Merge a per-frame label sequence into maximal runs. `labels[i]` belongs to
/// frame `first_frame + i`.
template <class Kind>
[[nodiscard]] std::vector<Segment<Kind>> run_length_segments(const std::vector<Kind>& labels,
                                                             FrameIndex first_frame) {
  std::vector<Segment<Kind>> runs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const FrameIndex frame = first_frame + static_cast<FrameIndex>(i);
    if (!runs.empty() && runs.back().kind == labels[i]) {
      runs.back().frame_end = frame;
    } else {
      runs.push_back({labels[i], frame, frame});
    }
  }
  return runs;
}

/// Intervals of the segments whose kind equals `kind`, in frame order.
template <class Kind>
[[nodiscard]] std::vector<FrameInterval> windows_of_kind(const std::vector<Segment<Kind>>& segments,
                                                         Kind kind) {
  std::vector<FrameInterval> out;
  for (const auto& seg : segments) {
    if (seg.kind == kind) {
      out.push_back(seg.interval());
    }
  }
  return out;
}

/// Pairwise intersections of two sorted, internally disjoint interval lists.
[[nodiscard]] inline std::vector<FrameInterval> intersect_all(const std::vector<FrameInterval>& a,
                                                              const std::vector<FrameInterval>& b) {
  std::vector<FrameInterval> out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (auto common = intersect(a[i], b[j])) {
      out.push_back(*common);
    }
    if (a[i].last < b[j].last) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

}  // namespace scenmine
