#include "scenmine/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scenmine/errors.hpp"
#include "scenmine/format.hpp"

namespace scenmine {

std::string_view name(MetricKind kind) {
  switch (kind) {
    case MetricKind::DST:
      return "DST";
    case MetricKind::RLongA:
      return "RLongA";
    case MetricKind::PSD:
      return "PSD";
    case MetricKind::DHW:
      return "DHW";
    case MetricKind::LongJ:
      return "LongJ";
    case MetricKind::LatJ:
      return "LatJ";
    case MetricKind::TTC:
      return "TTC";
    case MetricKind::PTTC:
      return "PTTC";
    case MetricKind::TET:
      return "TET";
    case MetricKind::TIT:
      return "TIT";
    case MetricKind::THW:
      return "THW";
    case MetricKind::DeltaV:
      return "DeltaV";
  }
  return "unknown";
}

MetricKind parse_metric_kind(std::string_view text) {
  const auto t = trim(text);
  for (const auto kind : kMetricKinds) {
    if (name(kind) == t) return kind;
  }
  throw InputError("unknown metric '" + std::string(t) + "'");
}

MetricScale scale_of(MetricKind kind) {
  switch (kind) {
    case MetricKind::DST:
    case MetricKind::RLongA:
      return MetricScale::Acceleration;
    case MetricKind::PSD:
    case MetricKind::DHW:
      return MetricScale::Distance;
    case MetricKind::LongJ:
    case MetricKind::LatJ:
      return MetricScale::Jerk;
    case MetricKind::TTC:
    case MetricKind::PTTC:
    case MetricKind::TET:
    case MetricKind::TIT:
    case MetricKind::THW:
      return MetricScale::Time;
    case MetricKind::DeltaV:
      return MetricScale::Velocity;
  }
  return MetricScale::Time;
}

std::string_view name(MetricScale scale) {
  switch (scale) {
    case MetricScale::Acceleration:
      return "acceleration";
    case MetricScale::Distance:
      return "distance";
    case MetricScale::Jerk:
      return "jerk";
    case MetricScale::Time:
      return "time";
    case MetricScale::Velocity:
      return "velocity";
  }
  return "unknown";
}

Aggregation aggregation_of(MetricKind kind) {
  switch (kind) {
    case MetricKind::TTC:
    case MetricKind::PTTC:
    case MetricKind::THW:
    case MetricKind::DHW:
    case MetricKind::PSD:
      return Aggregation::Min;
    case MetricKind::TET:
    case MetricKind::TIT:
      return Aggregation::Sum;
    default:
      return Aggregation::Max;
  }
}

Comparison default_comparison(MetricKind kind) {
  return aggregation_of(kind) == Aggregation::Min ? Comparison::LessEqual
                                                  : Comparison::GreaterEqual;
}

std::string_view name(Comparison comparison) {
  return comparison == Comparison::LessEqual ? "le" : "ge";
}

Comparison parse_comparison(std::string_view text) {
  const auto t = to_lower(trim(text));
  if (t == "le" || t == "<=") return Comparison::LessEqual;
  if (t == "ge" || t == ">=") return Comparison::GreaterEqual;
  throw InputError("unknown comparison '" + t + "' (expected le or ge)");
}

void MetricParams::validate() const {
  if (!(ttc_tau > 0.0)) throw InputError("ttc_tau must be positive");
  if (!(safety_time_ts > 0.0)) throw InputError("safety_time_ts must be positive");
  if (!(max_deceleration > 0.0)) throw InputError("max_deceleration must be positive");
}

PairState pair_state(const TrackSample& ego, const TrackSample& target, int sign) {
  PairState s;
  const double ahead = sign * (target.center_x() - ego.center_x());
  s.target_ahead = ahead >= 0.0;
  s.gap = std::abs(ahead) - 0.5 * (ego.width + target.width);
  s.v_ego = std::abs(ego.x_velocity);
  s.v_target = std::abs(target.x_velocity);
  s.a_ego = sign * ego.x_acceleration;
  s.a_target = sign * target.x_acceleration;
  if (s.target_ahead) {
    s.v_follower = s.v_ego;
    s.a_follower = s.a_ego;
    s.v_leader = s.v_target;
    s.a_leader = s.a_target;
  } else {
    s.v_follower = s.v_target;
    s.a_follower = s.a_target;
    s.v_leader = s.v_ego;
    s.a_leader = s.a_ego;
  }
  return s;
}

std::optional<double> time_to_collision(const PairState& s) {
  const double closing = s.closing_speed();
  if (s.gap > 0.0 && closing > 0.0) return s.gap / closing;
  return std::nullopt;
}

std::optional<double> time_headway(const PairState& s) {
  if (s.gap >= 0.0 && s.v_follower > 0.0) return s.gap / s.v_follower;
  return std::nullopt;
}

std::optional<double> predicted_time_to_collision(const PairState& s) {
  if (!(s.gap > 0.0)) return std::nullopt;
  // gap + (v_l - v_f) t + 0.5 (a_l - a_f) t^2 = 0
  const double a = 0.5 * (s.a_leader - s.a_follower);
  const double b = s.v_leader - s.v_follower;
  const double c = s.gap;
  if (std::abs(a) < 1e-12) {
    if (b < 0.0) return -c / b;
    return std::nullopt;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = -0.5 * (b + std::copysign(root, b));
  double best = std::numeric_limits<double>::infinity();
  for (const double t : {q / a, q != 0.0 ? c / q : std::numeric_limits<double>::infinity()}) {
    if (t > 0.0 && std::isfinite(t)) best = std::min(best, t);
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

std::optional<double> deceleration_to_safety_time(const PairState& s, double ts) {
  const double denom = 2.0 * (s.gap - ts * s.v_leader);
  if (!(denom > 0.0)) return std::nullopt;
  const double closing = s.closing_speed();
  return closing * closing / denom;
}

std::optional<double> required_longitudinal_deceleration(const PairState& s) {
  if (!(s.gap > 0.0)) return std::nullopt;
  const double closing = s.closing_speed();
  const double value = s.a_leader - closing * closing / (2.0 * s.gap);
  return std::max(0.0, -value);
}

std::optional<double> proportion_of_stopping_distance(const PairState& s, double a_max) {
  if (!(s.v_follower > 0.0)) return std::nullopt;
  return s.gap / (s.v_follower * s.v_follower / (2.0 * a_max));
}

double time_exposed(const std::vector<std::optional<double>>& ttc, double tau, double dt) {
  double sum = 0.0;
  for (const auto& v : ttc) {
    if (v && *v <= tau) sum += dt;
  }
  return sum;
}

double time_integrated(const std::vector<std::optional<double>>& ttc, double tau, double dt) {
  double sum = 0.0;
  for (const auto& v : ttc) {
    if (v && *v <= tau) sum += dt * (tau - *v);
  }
  return sum;
}

std::vector<double> jerk_series(const std::vector<double>& acceleration, double frame_rate) {
  const std::size_t n = acceleration.size();
  if (n < 3) {
    throw InsufficientDataError("jerk needs at least 3 frames, got " + std::to_string(n));
  }
  std::vector<double> out(n);
  out[0] = std::abs(acceleration[1] - acceleration[0]) * frame_rate;
  out[n - 1] = std::abs(acceleration[n - 1] - acceleration[n - 2]) * frame_rate;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = std::abs(acceleration[i + 1] - acceleration[i - 1]) * 0.5 * frame_rate;
  }
  return out;
}

CriticalityReport compute_series(const Trajectory& ego_slice, const Trajectory& target_slice,
                                 MetricKind kind, const MetricParams& params, double frame_rate) {
  params.validate();
  if (!(frame_rate > 0.0)) throw InputError("frame_rate must be positive");
  if (ego_slice.empty() || target_slice.empty() || ego_slice.frames() != target_slice.frames()) {
    throw InputError("criticality: ego and target slices must cover the same frames");
  }
  int sign = travel_sign(ego_slice);
  const int target_sign = travel_sign(target_slice);
  if (sign == 0) sign = target_sign;
  if (sign == 0) throw InputError("criticality: travel direction undecidable");
  if (target_sign != 0 && target_sign != sign) {
    throw InputError("criticality: vehicles travel in opposite directions");
  }

  CriticalityReport report;
  report.kind = kind;
  report.target_id = target_slice.vehicle_id;
  report.window = ego_slice.frames();
  report.comparison = default_comparison(kind);
  const std::size_t n = ego_slice.size();
  const double dt = 1.0 / frame_rate;

  if (kind == MetricKind::LongJ || kind == MetricKind::LatJ) {
    std::vector<double> acc(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& t = target_slice.samples[i];
      acc[i] = kind == MetricKind::LongJ ? sign * t.x_acceleration : t.y_acceleration;
    }
    for (const double j : jerk_series(acc, frame_rate)) report.series.emplace_back(j);
  } else {
    report.series.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto s = pair_state(ego_slice.samples[i], target_slice.samples[i], sign);
      std::optional<double> v;
      switch (kind) {
        case MetricKind::DHW:
          v = s.gap;
          break;
        case MetricKind::THW:
          v = time_headway(s);
          break;
        case MetricKind::TTC:
          v = time_to_collision(s);
          break;
        case MetricKind::PTTC:
          v = predicted_time_to_collision(s);
          break;
        case MetricKind::TET: {
          const auto ttc = time_to_collision(s);
          v = ttc && *ttc <= params.ttc_tau ? dt : 0.0;
          break;
        }
        case MetricKind::TIT: {
          const auto ttc = time_to_collision(s);
          v = ttc && *ttc <= params.ttc_tau ? dt * (params.ttc_tau - *ttc) : 0.0;
          break;
        }
        case MetricKind::DST:
          v = deceleration_to_safety_time(s, params.safety_time_ts);
          break;
        case MetricKind::RLongA:
          v = required_longitudinal_deceleration(s);
          break;
        case MetricKind::PSD:
          v = proportion_of_stopping_distance(s, params.max_deceleration);
          break;
        case MetricKind::DeltaV:
          v = std::abs(s.v_ego - s.v_target);
          break;
        case MetricKind::LongJ:
        case MetricKind::LatJ:
          break;
      }
      report.series.push_back(v);
    }
  }

  switch (aggregation_of(kind)) {
    case Aggregation::Sum: {
      double sum = 0.0;
      for (const auto& v : report.series) sum += v.value_or(0.0);
      report.aggregate = sum;
      break;
    }
    case Aggregation::Min:
    case Aggregation::Max:
      for (const auto& v : report.series) {
        if (!v) continue;
        if (!report.aggregate) {
          report.aggregate = *v;
        } else if (aggregation_of(kind) == Aggregation::Min) {
          report.aggregate = std::min(*report.aggregate, *v);
        } else {
          report.aggregate = std::max(*report.aggregate, *v);
        }
      }
      break;
  }
  return report;
}

bool passes(const std::optional<double>& aggregate, double threshold, Comparison comparison) {
  if (!aggregate) return false;
  return comparison == Comparison::LessEqual ? *aggregate <= threshold : *aggregate >= threshold;
}

void apply_threshold(CriticalityReport& report, const CriticalityConfig& config) {
  report.comparison = config.effective_comparison();
  report.threshold = config.threshold;
  report.passes_threshold = passes(report.aggregate, config.threshold, report.comparison);
}

FilterResult filter_pool(const std::vector<ScenarioMatch>& matches, const TrajectoryStore& store,
                         const CriticalityConfig& config, const MetricParams& params) {
  FilterResult result;
  for (const auto& match : matches) {
    PoolEntry entry;
    entry.match = match;
    entry.passes = !match.targets.empty();
    for (const auto& t : match.targets) {
      CriticalityReport report;
      try {
        const auto& w = t.analysis_window;
        report = compute_series(slice(store.get(match.ego_id), w.first, w.last),
                                slice(store.get(t.target_id), w.first, w.last), config.kind,
                                params, store.frame_rate());
      } catch (const Error& e) {
        report = CriticalityReport{};
        report.kind = config.kind;
        report.target_id = t.target_id;
        report.window = t.analysis_window;
        report.note = e.what();
      }
      apply_threshold(report, config);
      entry.passes = entry.passes && report.passes_threshold;
      entry.reports.push_back(std::move(report));
    }
    (entry.passes ? result.selected : result.rejected).push_back(std::move(entry));
  }
  return result;
}

}  // namespace scenmine
