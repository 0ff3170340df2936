#pragma once

#include <algorithm>
#include <set>
#include <tuple>
#include <vector>

namespace scenmine {

template <class Kind>
std::vector<Segment<Kind>> absorb_short_runs(std::vector<Segment<Kind>> runs, double min_frames) {
  if (runs.size() < 2) {
    return runs;
  }

  struct Node {
    Segment<Kind> seg;
    int prev;
    int next;
  };
  std::vector<Node> nodes;
  nodes.reserve(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    nodes.push_back({runs[i], static_cast<int>(i) - 1,
                     i + 1 < runs.size() ? static_cast<int>(i) + 1 : -1});
  }

  // Short runs keyed by (length, start) so the shortest, earliest run comes first.
  using Key = std::tuple<FrameIndex, FrameIndex, int>;
  std::set<Key> pending;
  const auto key_of = [&](int i) {
    return Key{nodes[i].seg.length(), nodes[i].seg.frame_start, i};
  };
  const auto is_short = [&](int i) {
    return static_cast<double>(nodes[i].seg.length()) < min_frames;
  };
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    if (is_short(i)) {
      pending.insert(key_of(i));
    }
  }

  std::vector<bool> dead(nodes.size(), false);
  std::size_t alive = nodes.size();
  while (!pending.empty() && alive > 1) {
    const int r = std::get<2>(*pending.begin());
    pending.erase(pending.begin());

    const int p = nodes[r].prev;
    const int q = nodes[r].next;
    int into;
    int other;
    if (p < 0) {
      into = q;
      other = -1;
    } else if (q < 0) {
      into = p;
      other = -1;
    } else if (nodes[p].seg.length() >= nodes[q].seg.length()) {
      into = p;
      other = q;
    } else {
      into = q;
      other = p;
    }

    pending.erase(key_of(into));
    auto& target = nodes[into].seg;
    target.frame_start = std::min(target.frame_start, nodes[r].seg.frame_start);
    target.frame_end = std::max(target.frame_end, nodes[r].seg.frame_end);
    // unlink r
    if (nodes[r].prev >= 0) nodes[nodes[r].prev].next = nodes[r].next;
    if (nodes[r].next >= 0) nodes[nodes[r].next].prev = nodes[r].prev;
    dead[r] = true;
    --alive;

    if (other >= 0 && nodes[other].seg.kind == target.kind) {
      pending.erase(key_of(other));
      target.frame_start = std::min(target.frame_start, nodes[other].seg.frame_start);
      target.frame_end = std::max(target.frame_end, nodes[other].seg.frame_end);
      if (nodes[other].prev >= 0) nodes[nodes[other].prev].next = nodes[other].next;
      if (nodes[other].next >= 0) nodes[nodes[other].next].prev = nodes[other].prev;
      dead[other] = true;
      --alive;
    }
    if (is_short(into)) {
      pending.insert(key_of(into));
    }
  }

  std::vector<Segment<Kind>> out;
  out.reserve(alive);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!dead[i]) {
      out.push_back(nodes[i].seg);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.frame_start < b.frame_start; });
  return out;
}

}  // namespace scenmine
