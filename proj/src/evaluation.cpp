#include "scenmine/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "scenmine/errors.hpp"
#include "scenmine/format.hpp"

namespace scenmine {

std::vector<PredictedInstance> instances_of(const std::vector<ScenarioMatch>& matches) {
  std::vector<PredictedInstance> out;
  for (const auto& m : matches) {
    for (const auto& t : m.targets) {
      out.push_back({m.ego_id, t.target_id, t.analysis_window});
    }
  }
  return out;
}

std::string_view name(MatchMode mode) { return mode == MatchMode::Instance ? "instance" : "frame"; }

MatchMode parse_match_mode(std::string_view text) {
  const auto t = to_lower(trim(text));
  if (t == "instance") return MatchMode::Instance;
  if (t == "frame") return MatchMode::Frame;
  throw InputError("unknown match mode '" + t + "' (expected instance or frame)");
}

namespace {

using PairKey = std::pair<VehicleId, VehicleId>;

ConfusionCounts frame_counts(const std::vector<PredictedInstance>& predicted,
                             const std::vector<GroundTruthLabel>& truth) {
  // Per (ego, target) pair, the set of covered frames as merged intervals.
  std::map<PairKey, std::set<FrameIndex>> pred_frames;
  std::map<PairKey, std::set<FrameIndex>> truth_frames;
  for (const auto& p : predicted) {
    auto& s = pred_frames[{p.ego_id, p.target_id}];
    for (FrameIndex f = p.frames.first; f <= p.frames.last; ++f) s.insert(f);
  }
  for (const auto& t : truth) {
    auto& s = truth_frames[{t.ego_id, t.target_id}];
    for (FrameIndex f = t.frames.first; f <= t.frames.last; ++f) s.insert(f);
  }
  ConfusionCounts c;
  for (const auto& [key, frames] : pred_frames) {
    const auto it = truth_frames.find(key);
    for (const FrameIndex f : frames) {
      if (it != truth_frames.end() && it->second.count(f) != 0) {
        ++c.tp;
      } else {
        ++c.fp;
      }
    }
  }
  for (const auto& [key, frames] : truth_frames) {
    const auto it = pred_frames.find(key);
    for (const FrameIndex f : frames) {
      if (it == pred_frames.end() || it->second.count(f) == 0) ++c.fn;
    }
  }
  return c;
}

ConfusionCounts instance_counts(const std::vector<PredictedInstance>& predicted,
                                const std::vector<GroundTruthLabel>& truth, double threshold) {
  struct Pair {
    double iou;
    std::size_t p;
    std::size_t t;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (predicted[i].ego_id != truth[j].ego_id || predicted[i].target_id != truth[j].target_id) {
        continue;
      }
      const double iou = temporal_iou(predicted[i].frames, truth[j].frames);
      if (iou >= threshold) pairs.push_back({iou, i, j});
    }
  }
  // Ties are broken on the intervals themselves, never on input order.
  const auto key = [&](const Pair& x) {
    const auto& p = predicted[x.p];
    const auto& t = truth[x.t];
    return std::make_tuple(-x.iou, p.ego_id, p.target_id, p.frames.first, p.frames.last,
                           t.frames.first, t.frames.last);
  };
  std::sort(pairs.begin(), pairs.end(),
            [&](const Pair& a, const Pair& b) { return key(a) < key(b); });
  std::vector<bool> used_p(predicted.size(), false);
  std::vector<bool> used_t(truth.size(), false);
  ConfusionCounts c;
  for (const auto& x : pairs) {
    if (used_p[x.p] || used_t[x.t]) continue;
    used_p[x.p] = true;
    used_t[x.t] = true;
    ++c.tp;
  }
  c.fp = static_cast<std::int64_t>(predicted.size()) - c.tp;
  c.fn = static_cast<std::int64_t>(truth.size()) - c.tp;
  return c;
}

}  // namespace

ConfusionCounts match_predictions(const std::vector<PredictedInstance>& predicted,
                                  const std::vector<GroundTruthLabel>& truth, MatchMode mode,
                                  double iou_threshold) {
  if (mode == MatchMode::Frame) {
    return frame_counts(predicted, truth);
  }
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw InputError("IoU threshold must lie in (0, 1]");
  }
  return instance_counts(predicted, truth, iou_threshold);
}

ClassificationMetrics classification_metrics(const ConfusionCounts& c) {
  ClassificationMetrics m;
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto fn = static_cast<double>(c.fn);
  if (c.tp + c.fp + c.fn > 0) m.accuracy = tp / (tp + fp + fn);
  if (c.tp + c.fp > 0) m.precision = tp / (tp + fp);
  if (c.tp + c.fn > 0) m.recall = tp / (tp + fn);
  if (m.precision && m.recall) {
    // Equals 2PR/(P+R) and stays defined when P = R = 0.
    m.f1 = 2.0 * tp / (2.0 * tp + fp + fn);
  }
  return m;
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5) / scale;
}

nlohmann::json to_json(const ConfusionCounts& counts) {
  return {{"tp", counts.tp}, {"fp", counts.fp}, {"fn", counts.fn}};
}

nlohmann::json to_json(const ClassificationMetrics& m) {
  const auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"accuracy", opt(m.accuracy)},
          {"precision", opt(m.precision)},
          {"recall", opt(m.recall)},
          {"f1", opt(m.f1)}};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(std::string(trim(cell)));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<GroundTruthLabel> parse_labels_csv(std::istream& input) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) header = split_csv_line(line);
  }
  if (header.empty()) {
    return {};  // an empty file holds no labels
  }
  static const char* const kColumns[] = {"category", "egoId", "targetId", "frameStart", "frameEnd"};
  std::size_t index[5];
  for (std::size_t c = 0; c < 5; ++c) {
    const auto it = std::find(header.begin(), header.end(), kColumns[c]);
    if (it == header.end()) {
      throw SchemaError(kColumns[c], std::string("label file is missing column '") + kColumns[c] + "'");
    }
    index[c] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<GroundTruthLabel> out;
  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    const auto cell = [&](std::size_t c) -> const std::string& {
      if (index[c] >= cells.size()) throw ParseError(line_no, std::string("missing ") + kColumns[c]);
      return cells[index[c]];
    };
    const auto integer = [&](std::size_t c) {
      const auto v = parse_integer(cell(c));
      if (!v) throw ParseError(line_no, std::string("bad ") + kColumns[c] + " '" + cell(c) + "'");
      return *v;
    };
    GroundTruthLabel label{cell(0), integer(1), integer(2), {integer(3), integer(4)}};
    if (label.frames.first > label.frames.last) {
      throw ParseError(line_no, "frameStart is after frameEnd");
    }
    out.push_back(std::move(label));
  }
  return out;
}

std::vector<GroundTruthLabel> load_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open label file " + path.string());
  return parse_labels_csv(in);
}

void write_labels_csv(std::ostream& output, const std::vector<GroundTruthLabel>& labels) {
  output << "category,egoId,targetId,frameStart,frameEnd\n";
  for (const auto& l : labels) {
    output << l.category << ',' << l.ego_id << ',' << l.target_id << ',' << l.frames.first << ','
           << l.frames.last << '\n';
  }
}

}  // namespace scenmine
