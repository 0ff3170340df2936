#include "scenmine/scenario_search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>
#include <tuple>

#include "scenmine/errors.hpp"
#include "scenmine/relative_position.hpp"

namespace scenmine {

void SearchParams::validate() const {
  detection.validate();
  if (!(end_position_grace >= 0.0) || !std::isfinite(end_position_grace)) {
    throw InputError("end_position_grace must be non-negative");
  }
  if (!(min_window_duration >= 0.0) || !std::isfinite(min_window_duration)) {
    throw InputError("min_window_duration must be non-negative");
  }
}

std::vector<FrameInterval> activity_windows(const VehicleActivities& activities,
                                            LongitudinalActivity longitudinal,
                                            LateralActivity lateral) {
  return intersect_all(windows_of_kind(activities.longitudinal, longitudinal),
                       windows_of_kind(activities.lateral, lateral));
}

namespace {

FrameIndex seconds_to_frames(double seconds, double frame_rate) {
  return static_cast<FrameIndex>(std::floor(seconds * frame_rate + 1e-9));
}

bool long_enough(const FrameInterval& window, double frame_rate, double min_duration) {
  return static_cast<double>(window.length()) / frame_rate + 1e-9 >= min_duration;
}

struct Prepared {
  const Trajectory* trajectory = nullptr;
  VehicleActivities activities;
  bool usable = false;
  std::string problem;
};

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<Prepared> prepare(const TrajectoryStore& store, const SearchParams& params) {
  const auto tracks = store.trajectories();
  std::vector<Prepared> out(tracks.size());
  parallel_for(tracks.size(), params.threads, [&](std::size_t i) {
    auto& p = out[i];
    p.trajectory = &tracks[i];
    p.activities.vehicle_id = tracks[i].vehicle_id;
    p.activities.travel_sign = travel_sign(tracks[i]);
    if (p.activities.travel_sign == 0) {
      p.problem = "travel direction undecidable (median x velocity is zero)";
      return;
    }
    try {
      p.activities.longitudinal = segment_longitudinal(tracks[i], params.detection, store.frame_rate());
      p.activities.lateral = segment_lateral(tracks[i], params.detection, store.frame_rate());
      p.usable = true;
    } catch (const Error& e) {
      p.problem = e.what();
    }
  });
  return out;
}

bool reaches_position(const Trajectory& ego, const Trajectory& target, int sign,
                      FrameIndex from, FrameIndex to, RelativePosition member) {
  for (FrameIndex f = from; f <= to; ++f) {
    if (position_at(ego.at_frame(f), target.at_frame(f), sign) == member) {
      return true;
    }
  }
  return false;
}

struct Hit {
  std::size_t ego_window;
  std::size_t vehicle;
  FrameInterval window;
};

struct EgoResult {
  std::vector<ScenarioMatch> matches;
  std::vector<NearMiss> near_misses;
};

void assign_targets(const std::vector<std::vector<const Hit*>>& per_spec, std::size_t spec,
                    std::vector<const Hit*>& chosen, const std::vector<Prepared>& prepared,
                    const ScenarioMatch& base, std::vector<ScenarioMatch>& out) {
  if (spec == per_spec.size()) {
    ScenarioMatch m = base;
    for (const Hit* h : chosen) {
      m.targets.push_back({prepared[h->vehicle].activities.vehicle_id, h->window});
    }
    m.scenario_window = m.targets.front().analysis_window;
    for (const auto& t : m.targets) m.scenario_window = hull(m.scenario_window, t.analysis_window);
    out.push_back(std::move(m));
    return;
  }
  for (const Hit* h : per_spec[spec]) {
    const bool taken = std::any_of(chosen.begin(), chosen.end(),
                                   [&](const Hit* c) { return c->vehicle == h->vehicle; });
    if (taken) continue;
    chosen.push_back(h);
    assign_targets(per_spec, spec + 1, chosen, prepared, base, out);
    chosen.pop_back();
  }
}

EgoResult search_ego(std::size_t ego_index, const std::vector<Prepared>& prepared,
                     const std::vector<std::vector<std::vector<FrameInterval>>>& target_windows,
                     const TrajectoryStore& store, const ScenarioQuery& query,
                     const SearchParams& params) {
  EgoResult result;
  const auto& ego = prepared[ego_index];
  if (!ego.usable) return result;
  const auto ego_windows =
      activity_windows(ego.activities, query.ego_longitudinal, query.ego_lateral);
  if (ego_windows.empty()) return result;

  const double fr = store.frame_rate();
  const FrameIndex grace = seconds_to_frames(params.end_position_grace, fr);
  const int sign = ego.activities.travel_sign;
  const Trajectory& ego_traj = *ego.trajectory;

  std::vector<std::vector<Hit>> hits(query.targets.size());
  for (std::size_t s = 0; s < query.targets.size(); ++s) {
    const auto& spec = query.targets[s];
    for (std::size_t v = 0; v < prepared.size(); ++v) {
      const auto& tgt = prepared[v];
      if (v == ego_index || !tgt.usable || tgt.activities.travel_sign != sign) continue;
      const auto coexist = coexistence_window(ego_traj, *tgt.trajectory);
      if (!coexist) continue;
      const auto& windows = target_windows[s][v];
      if (windows.empty()) continue;
      std::size_t j = 0;
      for (std::size_t e = 0; e < ego_windows.size(); ++e) {
        while (j < windows.size() && windows[j].last < ego_windows[e].first) ++j;
        for (std::size_t k = j; k < windows.size() && windows[k].first <= ego_windows[e].last; ++k) {
          const auto common = intersect(ego_windows[e], windows[k]);
          if (!common) continue;
          const auto& w = *common;
          const bool start_ok = position_at(ego_traj.at_frame(w.first),
                                            tgt.trajectory->at_frame(w.first),
                                            sign) == spec.start.member;
          const bool end_ok =
              reaches_position(ego_traj, *tgt.trajectory, sign, w.last,
                               std::min(w.last + grace, coexist->last), spec.end.member);
          const bool duration_ok = long_enough(w, fr, params.min_window_duration);
          if (start_ok && end_ok && duration_ok) {
            hits[s].push_back({e, v, w});
          } else if (result.near_misses.size() < params.near_miss_limit) {
            NearMiss miss{{ego.activities.vehicle_id, tgt.activities.vehicle_id, s, w}, {}};
            if (!start_ok) miss.reasons.emplace_back("start position");
            if (!end_ok) miss.reasons.emplace_back("end position");
            if (!duration_ok) miss.reasons.emplace_back("duration");
            result.near_misses.push_back(std::move(miss));
          }
        }
      }
    }
  }

  ScenarioMatch base;
  base.recording_id = store.recording_id();
  base.ego_id = ego.activities.vehicle_id;
  for (std::size_t e = 0; e < ego_windows.size(); ++e) {
    std::vector<std::vector<const Hit*>> per_spec(query.targets.size());
    bool all = true;
    for (std::size_t s = 0; s < query.targets.size(); ++s) {
      for (const auto& h : hits[s]) {
        if (h.ego_window == e) per_spec[s].push_back(&h);
      }
      all = all && !per_spec[s].empty();
    }
    if (!all) continue;
    std::vector<const Hit*> chosen;
    assign_targets(per_spec, 0, chosen, prepared, base, result.matches);
  }
  return result;
}

bool match_less(const ScenarioMatch& a, const ScenarioMatch& b) {
  const auto key = [](const ScenarioMatch& m) {
    std::vector<std::tuple<VehicleId, FrameIndex, FrameIndex>> t;
    for (const auto& w : m.targets) t.emplace_back(w.target_id, w.analysis_window.first, w.analysis_window.last);
    return std::make_tuple(m.ego_id, m.scenario_window.first, t, m.scenario_window.last);
  };
  return key(a) < key(b);
}

}  // namespace

SearchResult search(const TrajectoryStore& store, const ScenarioQuery& query,
                    const SearchParams& params) {
  params.validate();
  require_valid(query);

  const auto prepared = prepare(store, params);
  std::vector<std::vector<std::vector<FrameInterval>>> target_windows(query.targets.size());
  for (std::size_t s = 0; s < query.targets.size(); ++s) {
    target_windows[s].resize(prepared.size());
    for (std::size_t v = 0; v < prepared.size(); ++v) {
      if (prepared[v].usable) {
        target_windows[s][v] = activity_windows(prepared[v].activities,
                                                query.targets[s].longitudinal,
                                                query.targets[s].lateral);
      }
    }
  }

  std::vector<EgoResult> per_ego(prepared.size());
  parallel_for(prepared.size(), params.threads, [&](std::size_t i) {
    per_ego[i] = search_ego(i, prepared, target_windows, store, query, params);
  });

  SearchResult result;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    if (!prepared[i].usable) {
      result.skipped.push_back({prepared[i].activities.vehicle_id, prepared[i].problem});
    }
    auto& r = per_ego[i];
    result.matches.insert(result.matches.end(), std::make_move_iterator(r.matches.begin()),
                          std::make_move_iterator(r.matches.end()));
    for (auto& miss : r.near_misses) {
      if (result.near_misses.size() >= params.near_miss_limit) break;
      result.near_misses.push_back(std::move(miss));
    }
  }
  std::stable_sort(result.matches.begin(), result.matches.end(), match_less);
  result.matches.erase(std::unique(result.matches.begin(), result.matches.end()),
                       result.matches.end());
  return result;
}

std::vector<ScenarioMatch> find_matches(const TrajectoryStore& store, const ScenarioQuery& query,
                                        const SearchParams& params) {
  return search(store, query, params).matches;
}

namespace {

template <class Kind>
bool holds_throughout(const std::vector<Segment<Kind>>& segments, Kind kind,
                      const FrameInterval& window) {
  for (const auto& seg : segments) {
    if (intersect(seg.interval(), window) && seg.kind != kind) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> explain(const TrajectoryStore& store, const ScenarioQuery& query,
                                 const Candidate& c, const SearchParams& params) {
  const Trajectory* ego = store.find(c.ego_id);
  const Trajectory* tgt = store.find(c.target_id);
  if (ego == nullptr || tgt == nullptr) return {"unknown vehicle"};
  if (c.target_index >= query.targets.size()) return {"no such target in query"};
  const auto coexist = coexistence_window(*ego, *tgt);
  if (!coexist || !coexist->contains(c.window) || c.window.first > c.window.last) {
    return {"no coexistence"};
  }
  const int sign = travel_sign(*ego);
  if (sign == 0 || travel_sign(*tgt) != sign) return {"opposite travel direction"};

  std::vector<LongitudinalSegment> ego_lon, tgt_lon;
  std::vector<LateralSegment> ego_lat, tgt_lat;
  const double fr = store.frame_rate();
  try {
    ego_lon = segment_longitudinal(*ego, params.detection, fr);
    ego_lat = segment_lateral(*ego, params.detection, fr);
  } catch (const Error& e) {
    return {std::string("ego segmentation: ") + e.what()};
  }
  try {
    tgt_lon = segment_longitudinal(*tgt, params.detection, fr);
    tgt_lat = segment_lateral(*tgt, params.detection, fr);
  } catch (const Error& e) {
    return {std::string("target segmentation: ") + e.what()};
  }

  const auto& spec = query.targets[c.target_index];
  std::vector<std::string> reasons;
  if (!holds_throughout(ego_lon, query.ego_longitudinal, c.window)) reasons.emplace_back("ego longitudinal mismatch");
  if (!holds_throughout(ego_lat, query.ego_lateral, c.window)) reasons.emplace_back("ego lateral mismatch");
  if (!holds_throughout(tgt_lon, spec.longitudinal, c.window)) reasons.emplace_back("target longitudinal mismatch");
  if (!holds_throughout(tgt_lat, spec.lateral, c.window)) reasons.emplace_back("target lateral mismatch");
  if (position_at(ego->at_frame(c.window.first), tgt->at_frame(c.window.first), sign) !=
      spec.start.member) {
    reasons.emplace_back("start position");
  }
  const FrameIndex grace = seconds_to_frames(params.end_position_grace, fr);
  if (!reaches_position(*ego, *tgt, sign, c.window.last,
                        std::min(c.window.last + grace, coexist->last), spec.end.member)) {
    reasons.emplace_back("end position");
  }
  if (!long_enough(c.window, fr, params.min_window_duration)) reasons.emplace_back("duration");
  return reasons;
}

}  // namespace

std::vector<std::vector<std::string>> disambiguate_report(const TrajectoryStore& store,
                                                          const ScenarioQuery& query,
                                                          const std::vector<Candidate>& candidates,
                                                          const SearchParams& params) {
  std::vector<std::vector<std::string>> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    out.push_back(explain(store, query, c, params));
  }
  return out;
}

}  // namespace scenmine
