// Rule-based reading of scenario descriptions. The phrase tables below are
// mirrored in docs/offline_phrases.md; keep both in sync.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "scenmine/errors.hpp"
#include "scenmine/understanding.hpp"

namespace scenmine {

namespace {

constexpr int kEgo = -1;
constexpr int kUnnumbered = 0;

enum class Marker { None, Start, End };

struct PositionFact {
  RelativePosition position;
  Marker marker;
};

struct VehicleFacts {
  std::optional<LongitudinalActivity> longitudinal;
  std::optional<LateralActivity> lateral;
  std::vector<PositionFact> positions;
  std::vector<PositionFact> implied;
};

template <class T>
struct Rule {
  std::regex pattern;
  T value;
};

std::regex re(const char* pattern) { return std::regex(pattern, std::regex::ECMAScript); }

#define VEH R"((?:\s+(?:vehicle|car))?)"

const std::vector<Rule<LongitudinalActivity>>& longitudinal_rules() {
  static const std::vector<Rule<LongitudinalActivity>> rules = {
      {re(R"(\b(?:maintain|keep)\w*\s+(?:its\s+)?lane\s+and\s+(?:its\s+)?(?:speed|velocity))"),
       LongitudinalActivity::KeepVelocity},
      {re(R"(\b(?:maintain|keep|hold)\w*\s+(?:its\s+|his\s+|her\s+|their\s+|a\s+|the\s+)?)"
          R"((?:constant\s+|steady\s+|current\s+|same\s+)?(?:speed|velocity))"),
       LongitudinalActivity::KeepVelocity},
      {re(R"(\b(?:constant|steady)\s+(?:speed|velocity)|\bcruis\w*)"),
       LongitudinalActivity::KeepVelocity},
      {re(R"(\bdecelerat\w*|\bbrak(?:e|es|ed|ing)\b|\bslow\w*\s+down|\bslows\b|)"
          R"(\breduc\w*\s+(?:its\s+|his\s+|her\s+|their\s+)?(?:speed|velocity))"),
       LongitudinalActivity::Deceleration},
      {re(R"(\baccelerat\w*|\bspeed\w*\s+up\b|)"
          R"(\bincreas\w*\s+(?:its\s+|his\s+|her\s+|their\s+)?(?:speed|velocity))"),
       LongitudinalActivity::Acceleration},
  };
  return rules;
}

const std::vector<Rule<LateralActivity>>& lateral_rules() {
  static const std::vector<Rule<LateralActivity>> rules = {
      {re(R"(\b(?:chang|switch|mov|merg|shift|steer|swerv|veer)\w*\s+(?:(?:lanes?|over)\s+)?)"
          R"((?:to|into|towards?)\s+the\s+right|\blane\s+change\s+(?:to\s+the\s+)?right|)"
          R"(\bright\s+lane\s+change)"),
       LateralActivity::LaneChangeRight},
      {re(R"(\b(?:chang|switch|mov|merg|shift|steer|swerv|veer)\w*\s+(?:(?:lanes?|over)\s+)?)"
          R"((?:to|into|towards?)\s+the\s+left|\blane\s+change\s+(?:to\s+the\s+)?left|)"
          R"(\bleft\s+lane\s+change)"),
       LateralActivity::LaneChangeLeft},
      {re(R"(\bfollow\w*\s+(?:the|its|his|her|their)\s+(?:own\s+|same\s+|current\s+)?lane\b|)"
          R"(\b(?:maintain|keep|stay|remain|hold)\w*\s+(?:in\s+)?(?:its|the|his|her|their)\s+)"
          R"((?:own\s+|same\s+|current\s+)?lane\b|\blane\s+keeping\b|)"
          R"(\b(?:does\s+not|without)\s+chang\w*\s+lanes?\b|\bstays?\s+in\s+lane\b)"),
       LateralActivity::FollowLane},
  };
  return rules;
}

struct CutRule {
  std::regex pattern;
  LateralActivity lateral;
  RelativePosition start;
  RelativePosition end;
};

const std::vector<CutRule>& cut_rules() {
  static const std::vector<CutRule> rules = {
      {re(R"(\bcut\w*\s+in\s+from\s+the\s+left)"), LateralActivity::LaneChangeRight,
       RelativePosition::LeftAdjacent, RelativePosition::Front},
      {re(R"(\bcut\w*\s+in\s+from\s+the\s+right)"), LateralActivity::LaneChangeLeft,
       RelativePosition::RightAdjacent, RelativePosition::Front},
      {re(R"(\bcut\w*\s+out\s+to\s+the\s+right)"), LateralActivity::LaneChangeRight,
       RelativePosition::Front, RelativePosition::RightAdjacent},
      {re(R"(\bcut\w*\s+out\s+to\s+the\s+left)"), LateralActivity::LaneChangeLeft,
       RelativePosition::Front, RelativePosition::LeftAdjacent},
  };
  return rules;
}

// Longest phrases first; matched spans are consumed so that e.g. "lane next
// to the left adjacent lane" does not also count as "left adjacent lane".
const std::vector<Rule<RelativePosition>>& position_rules() {
  static const std::vector<Rule<RelativePosition>> rules = {
      {re(R"(\blane\s+next\s+to\s+(?:the\s+)?left\s+adjacent\s+lane|)"
          R"(\bsecond\s+lane\s+to\s+the\s+left\b|\btwo\s+lanes\s+(?:to\s+the\s+)?left\b)"),
       RelativePosition::LaneNextToLeftAdjacent},
      {re(R"(\blane\s+next\s+to\s+(?:the\s+)?right\s+adjacent\s+lane|)"
          R"(\bsecond\s+lane\s+to\s+the\s+right\b|\btwo\s+lanes\s+(?:to\s+the\s+)?right\b)"),
       RelativePosition::LaneNextToRightAdjacent},
      {re(R"(\bleft\s+adjacent\s+lane|\badjacent\s+left\s+lane|)"
          R"(\b(?:lane\s+|on\s+|to\s+)?(?:to\s+)?the\s+left\s+of\s+(?:the\s+)?ego)" VEH),
       RelativePosition::LeftAdjacent},
      {re(R"(\bright\s+adjacent\s+lane|\badjacent\s+right\s+lane|)"
          R"(\b(?:lane\s+|on\s+|to\s+)?(?:to\s+)?the\s+right\s+of\s+(?:the\s+)?ego)" VEH),
       RelativePosition::RightAdjacent},
      {re(R"(\b(?:in|on)\s+(?:the\s+)?front\s+of\s+(?:the\s+)?ego)" VEH
          R"((?:\s+in\s+the\s+same\s+lane)?|\bahead\s+of\s+(?:the\s+)?ego)" VEH
          R"((?:\s+in\s+the\s+same\s+lane)?)"),
       RelativePosition::Front},
      {re(R"(\bbehind\s+(?:the\s+)?ego)" VEH R"((?:\s+in\s+the\s+same\s+lane)?|)"
          R"(\b(?:to\s+the\s+|at\s+the\s+)?rear\s+of\s+(?:the\s+)?ego)" VEH),
       RelativePosition::Behind},
  };
  return rules;
}

#undef VEH

const std::regex& start_marker() {
  static const std::regex r = re(
      R"(\b(?:initially|at\s+first|originally|at\s+the\s+(?:beginning|start)|)"
      R"(in\s+the\s+beginning|begins|starts|first)\b)");
  return r;
}

const std::regex& end_marker() {
  static const std::regex r = re(
      R"(\b(?:eventually|finally|ends?\s+up|ending\s+up|in\s+the\s+end|at\s+the\s+end|then|)"
      R"(afterwards?|subsequently|later)\b)");
  return r;
}

const std::regex& vehicle_mention() {
  static const std::regex r = re(
      R"(\b(?:(the|a|an)\s+)?(?:(ego)(?:\s+(?:vehicle|car))?|)"
      R"(target(?:\s+(?:vehicle|car))?(?:\s*#?\s*(\d+))?|)"
      R"((?:vehicle|car)\s*#\s*(\d+)|)"
      R"((?:another|other|second)\s+(?:vehicle|car)|)"
      R"((vehicle|car))\b)");
  return r;
}

const std::regex& clause_break() {
  static const std::regex r = re(
      R"([,;:]|\s(?:while|whereas|but|meanwhile)\s|)"
      R"(\s(?:and|as|when)\s+(?=(?:the\s+|a\s+|an\s+)?(?:ego\b|target\b|another\b|(?:vehicle|car)\s*#)))");
  return r;
}

bool is_preposition(const std::string& word) {
  static const char* const kWords[] = {"of",   "behind", "than", "to",        "with", "beside",
                                       "from", "past",   "for",  "alongside", "near", "by",
                                       "toward", "towards", "into", "overtakes", "follows",
                                       "passes", "following"};
  return std::find_if(std::begin(kWords), std::end(kWords),
                      [&](const char* w) { return word == w; }) != std::end(kWords);
}

std::string previous_word(const std::string& text, std::size_t pos) {
  std::size_t end = pos;
  while (end > 0 && text[end - 1] == ' ') --end;
  std::size_t start = end;
  while (start > 0 && std::isalpha(static_cast<unsigned char>(text[start - 1])) != 0) --start;
  return text.substr(start, end - start);
}

std::string normalize_text(std::string_view description) {
  std::string out;
  out.reserve(description.size());
  bool space = false;
  for (const char raw : description) {
    const auto c = static_cast<unsigned char>(raw);
    char mapped;
    if (std::isalnum(c) != 0) {
      mapped = static_cast<char>(std::tolower(c));
    } else if (raw == '#' || raw == '.' || raw == ',' || raw == ';' || raw == ':' || raw == '!' ||
               raw == '?') {
      mapped = raw;
    } else if (raw == '\'') {
      continue;  // "doesn't" -> "doesnt"
    } else {
      mapped = ' ';
    }
    if (mapped == ' ') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    out.push_back(mapped);
  }
  return out;
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool decimal_point = c == '.' && i > 0 && i + 1 < text.size() &&
                               std::isdigit(static_cast<unsigned char>(text[i - 1])) != 0 &&
                               std::isdigit(static_cast<unsigned char>(text[i + 1])) != 0;
    if ((c == '.' || c == '!' || c == '?') && !decimal_point) {
      out.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(current);
  return out;
}

struct Span {
  std::size_t begin;
  std::size_t end;
};

std::vector<Span> split_clauses(const std::string& sentence) {
  std::vector<Span> out;
  std::size_t begin = 0;
  for (auto it = std::sregex_iterator(sentence.begin(), sentence.end(), clause_break());
       it != std::sregex_iterator(); ++it) {
    const auto pos = static_cast<std::size_t>(it->position());
    out.push_back({begin, pos});
    begin = pos + static_cast<std::size_t>(it->length());
  }
  out.push_back({begin, sentence.size()});
  return out;
}

// Which vehicle a clause talks about: the first mention that is not the
// object of a preposition. Every target mention is registered.
std::optional<int> clause_subject(const std::string& sentence, Span clause,
                                  std::map<int, VehicleFacts>& vehicles) {
  const std::string text = sentence.substr(clause.begin, clause.end - clause.begin);
  std::optional<int> subject;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), vehicle_mention());
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string article = m[1].str();
    int key;
    if (m[2].matched) {
      key = kEgo;
    } else if (m[3].matched) {
      key = std::stoi(m[3].str());
    } else if (m[4].matched) {
      key = std::stoi(m[4].str());
    } else if (m[5].matched) {
      if (article != "a" && article != "an") continue;  // "the vehicle" is not a new vehicle
      key = kUnnumbered;
    } else {
      key = kUnnumbered;
    }
    if (key != kEgo) vehicles[key];
    if (!subject && !is_preposition(previous_word(text, static_cast<std::size_t>(m.position())))) {
      subject = key;
    }
  }
  return subject;
}

Marker marker_before(const std::string& sentence, std::size_t pos) {
  Marker marker = Marker::None;
  std::size_t best = 0;
  const auto scan = [&](const std::regex& r, Marker kind) {
    for (auto it = std::sregex_iterator(sentence.begin(), sentence.end(), r);
         it != std::sregex_iterator(); ++it) {
      const auto at = static_cast<std::size_t>(it->position());
      if (at < pos && (marker == Marker::None || at >= best)) {
        best = at;
        marker = kind;
      }
    }
  };
  scan(start_marker(), Marker::Start);
  scan(end_marker(), Marker::End);
  auto word = previous_word(sentence, pos);
  if (word == "the") {
    word = previous_word(sentence, sentence.rfind("the", pos));
  }
  if (word == "into" || word == "to") {
    return Marker::End;
  }
  return marker;
}

template <class T>
std::optional<T> first_match(const std::string& text, const std::vector<Rule<T>>& rules) {
  std::optional<T> best;
  std::size_t best_pos = std::string::npos;
  for (const auto& rule : rules) {
    std::smatch m;
    if (std::regex_search(text, m, rule.pattern)) {
      const auto pos = static_cast<std::size_t>(m.position());
      if (pos < best_pos) {
        best_pos = pos;
        best = rule.value;
      }
    }
  }
  return best;
}

void read_clause(const std::string& sentence, Span clause, VehicleFacts& facts) {
  const std::string text = sentence.substr(clause.begin, clause.end - clause.begin);

  if (!facts.longitudinal) {
    facts.longitudinal = first_match(text, longitudinal_rules());
  }
  for (const auto& rule : cut_rules()) {
    if (std::regex_search(text, rule.pattern)) {
      if (!facts.lateral) facts.lateral = rule.lateral;
      facts.implied.push_back({rule.start, Marker::Start});
      facts.implied.push_back({rule.end, Marker::End});
    }
  }
  if (!facts.lateral) {
    facts.lateral = first_match(text, lateral_rules());
  }

  std::vector<bool> used(text.size(), false);
  std::vector<std::pair<std::size_t, RelativePosition>> found;
  for (const auto& rule : position_rules()) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), rule.pattern);
         it != std::sregex_iterator(); ++it) {
      const auto pos = static_cast<std::size_t>(it->position());
      const auto len = static_cast<std::size_t>(it->length());
      if (std::any_of(used.begin() + static_cast<std::ptrdiff_t>(pos),
                      used.begin() + static_cast<std::ptrdiff_t>(pos + len),
                      [](bool b) { return b; })) {
        continue;
      }
      std::fill(used.begin() + static_cast<std::ptrdiff_t>(pos),
                used.begin() + static_cast<std::ptrdiff_t>(pos + len), true);
      found.emplace_back(pos, rule.value);
    }
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [pos, position] : found) {
    facts.positions.push_back({position, marker_before(sentence, clause.begin + pos)});
  }
}

int lane_index(RelativePosition p) {
  switch (p) {
    case RelativePosition::LaneNextToLeftAdjacent:
      return -2;
    case RelativePosition::LeftAdjacent:
      return -1;
    case RelativePosition::RightAdjacent:
      return 1;
    case RelativePosition::LaneNextToRightAdjacent:
      return 2;
    default:
      return 0;
  }
}

int lane_shift(LateralActivity a) {
  switch (a) {
    case LateralActivity::LaneChangeRight:
      return 1;
    case LateralActivity::LaneChangeLeft:
      return -1;
    case LateralActivity::FollowLane:
      break;
  }
  return 0;
}

// Position after shifting the relative lane index; same-lane results keep the
// known longitudinal side or are undecidable.
std::optional<RelativePosition> shifted(RelativePosition from, int shift) {
  if (shift == 0) return from;
  const int index = lane_index(from) + shift;
  switch (index) {
    case -2:
      return RelativePosition::LaneNextToLeftAdjacent;
    case -1:
      return RelativePosition::LeftAdjacent;
    case 1:
      return RelativePosition::RightAdjacent;
    case 2:
      return RelativePosition::LaneNextToRightAdjacent;
    default:
      return std::nullopt;
  }
}

TargetSpec resolve_target(int number, const VehicleFacts& facts, LateralActivity ego_lateral) {
  const std::string name = number == kUnnumbered ? "target vehicle" : "target vehicle #" + std::to_string(number);
  TargetSpec spec;
  spec.longitudinal = facts.longitudinal.value_or(LongitudinalActivity::KeepVelocity);
  spec.lateral = facts.lateral.value_or(LateralActivity::FollowLane);

  std::optional<RelativePosition> start;
  std::optional<RelativePosition> end;
  for (const auto& f : facts.positions) {
    if (f.marker == Marker::Start && !start) start = f.position;
    if (f.marker == Marker::End) end = f.position;
  }
  for (const auto& f : facts.positions) {
    if (f.marker != Marker::None) continue;
    if (!start) {
      start = f.position;
    } else if (!end) {
      end = f.position;
    }
  }
  for (const auto& f : facts.implied) {
    if (f.marker == Marker::Start && !start) start = f.position;
    if (f.marker == Marker::End && !end) end = f.position;
  }

  const int shift = lane_shift(spec.lateral) - lane_shift(ego_lateral);
  if (start && !end) end = shifted(*start, shift);
  if (end && !start) start = shifted(*end, -shift);
  if (!start || !end) {
    const std::string which = !start && !end ? "position" : (!start ? "start position" : "end position");
    throw VocabularyError(name, "cannot determine the " + which + " of " + name);
  }
  spec.start = position_spec(*start);
  spec.end = position_spec(*end);
  return spec;
}

}  // namespace

ScenarioQuery interpret_offline(std::string_view description) {
  const std::string text = normalize_text(description);
  if (text.empty()) {
    throw InputError("scenario description is empty");
  }

  std::map<int, VehicleFacts> vehicles;
  VehicleFacts ego;
  std::optional<int> subject;
  for (const auto& sentence : split_sentences(text)) {
    for (const auto clause : split_clauses(sentence)) {
      if (clause.end <= clause.begin) continue;
      if (auto s = clause_subject(sentence, clause, vehicles)) subject = s;
      if (!subject) continue;  // nothing to attach the clause to yet
      read_clause(sentence, clause, *subject == kEgo ? ego : vehicles[*subject]);
    }
  }
  if (vehicles.empty()) {
    throw InterpretationError("description does not mention a target vehicle");
  }

  ScenarioQuery query;
  query.ego_longitudinal = ego.longitudinal.value_or(LongitudinalActivity::KeepVelocity);
  query.ego_lateral = ego.lateral.value_or(LateralActivity::FollowLane);

  // Numbered targets in numeral order; an unnumbered one takes the first free numeral.
  std::map<int, int> order;  // numeral -> vehicle key
  for (const auto& [key, facts] : vehicles) {
    if (key != kUnnumbered) order[key] = key;
  }
  if (vehicles.count(kUnnumbered) != 0) {
    int free = 1;
    while (order.count(free) != 0) ++free;
    order[free] = kUnnumbered;
  }
  for (const auto& [numeral, key] : order) {
    query.targets.push_back(resolve_target(numeral, vehicles.at(key), query.ego_lateral));
  }
  return query;
}

}  // namespace scenmine
