#include "scenmine/scenario_schema.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include "scenmine/errors.hpp"
#include "scenmine/format.hpp"

namespace scenmine {

std::string_view label(PositionGroup group) {
  switch (group) {
    case PositionGroup::SameLane:
      return "same lane";
    case PositionGroup::AdjacentLane:
      return "adjacent lane";
    case PositionGroup::LaneNextToAdjacentLane:
      return "lane next to adjacent lane";
  }
  return "unknown";
}

PositionGroup group_of(RelativePosition position) {
  switch (position) {
    case RelativePosition::Front:
    case RelativePosition::Behind:
      return PositionGroup::SameLane;
    case RelativePosition::LeftAdjacent:
    case RelativePosition::RightAdjacent:
      return PositionGroup::AdjacentLane;
    case RelativePosition::LaneNextToLeftAdjacent:
    case RelativePosition::LaneNextToRightAdjacent:
      return PositionGroup::LaneNextToAdjacentLane;
    case RelativePosition::OutOfScope:
      break;
  }
  throw InputError("position has no taxonomy group");
}

PositionSpec position_spec(RelativePosition member) { return {group_of(member), member}; }

// ---- labels -----------------------------------------------------------------

std::string normalize_label(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) != 0) {
      if (pending_space && !out.empty()) {
        out.push_back(' ');
      }
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isspace(c) != 0 || raw == '_' || raw == '-') {
      pending_space = true;
    }
  }
  if (out.rfind("the ", 0) == 0) {
    out.erase(0, 4);
  }
  return out;
}

namespace {

template <class Enum, std::size_t N>
Enum lookup(std::string_view text, const Enum (&values)[N], std::string_view what) {
  const std::string key = normalize_label(text);
  for (const Enum value : values) {
    if (label(value) == key) {
      return value;
    }
  }
  throw VocabularyError(std::string(trim(text)),
                        "unknown " + std::string(what) + " label '" + std::string(trim(text)) + "'");
}

constexpr PositionGroup kGroups[] = {PositionGroup::SameLane, PositionGroup::AdjacentLane,
                                     PositionGroup::LaneNextToAdjacentLane};

}  // namespace

LongitudinalActivity parse_longitudinal(std::string_view text) {
  return lookup(text, kLongitudinalActivities, "longitudinal activity");
}

LateralActivity parse_lateral(std::string_view text) {
  return lookup(text, kLateralActivities, "lateral activity");
}

PositionGroup parse_group(std::string_view text) { return lookup(text, kGroups, "position group"); }

RelativePosition parse_position(std::string_view text) {
  return lookup(text, kInScopePositions, "position");
}

// ---- validation ---------------------------------------------------------------

namespace {

bool known(LongitudinalActivity a) {
  return std::find(std::begin(kLongitudinalActivities), std::end(kLongitudinalActivities), a) !=
         std::end(kLongitudinalActivities);
}

bool known(LateralActivity a) {
  return std::find(std::begin(kLateralActivities), std::end(kLateralActivities), a) !=
         std::end(kLateralActivities);
}

bool known(PositionGroup g) {
  return std::find(std::begin(kGroups), std::end(kGroups), g) != std::end(kGroups);
}

void check_position(const PositionSpec& spec, const std::string& where,
                    std::vector<std::string>& out) {
  if (!known(spec.group)) {
    out.push_back(where + ": unknown position group");
    return;
  }
  const bool in_scope =
      std::find(std::begin(kInScopePositions), std::end(kInScopePositions), spec.member) !=
      std::end(kInScopePositions);
  if (!in_scope) {
    out.push_back(where + ": position is not a taxonomy member");
    return;
  }
  if (group_of(spec.member) != spec.group) {
    out.push_back(where + ": member not in group ('" + std::string(label(spec.member)) +
                  "' is not in '" + std::string(label(spec.group)) + "')");
  }
}

}  // namespace

std::vector<std::string> validate_query(const ScenarioQuery& query) {
  std::vector<std::string> out;
  if (!known(query.ego_longitudinal)) out.push_back("ego: unknown longitudinal activity");
  if (!known(query.ego_lateral)) out.push_back("ego: unknown lateral activity");
  if (query.targets.empty()) {
    out.push_back("at least one target");
  }
  for (std::size_t i = 0; i < query.targets.size(); ++i) {
    const auto& t = query.targets[i];
    const std::string where = "target #" + std::to_string(i + 1);
    check_position(t.start, where + " start position", out);
    check_position(t.end, where + " end position", out);
    if (!known(t.longitudinal)) out.push_back(where + ": unknown longitudinal activity");
    if (!known(t.lateral)) out.push_back(where + ": unknown lateral activity");
  }
  return out;
}

const ScenarioQuery& require_valid(const ScenarioQuery& query) {
  auto violations = validate_query(query);
  if (!violations.empty()) {
    std::string message = "invalid scenario query:";
    for (const auto& v : violations) {
      message += " " + v + ";";
    }
    message.pop_back();
    throw ValidationError(std::move(violations), message);
  }
  return query;
}

// ---- braced response parser ---------------------------------------------------

namespace {

struct Node {
  enum class Type { Object, List, Scalar, Empty };
  Type type = Type::Empty;
  std::string text;
  std::vector<std::pair<std::string, Node>> members;
  std::vector<Node> items;
};

bool is_quote(char c) { return c == '\'' || c == '"' || c == '`'; }

// Curly quotes become ASCII so the grammar only deals with one kind.
std::string fold_quotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80) {
      const auto c = static_cast<unsigned char>(text[i + 2]);
      if (c == 0x98 || c == 0x99) {
        out.push_back('\'');
        i += 2;
        continue;
      }
      if (c == 0x9C || c == 0x9D) {
        out.push_back('"');
        i += 2;
        continue;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

class BracedReader {
 public:
  explicit BracedReader(std::string_view text) : s_(text) {}

  Node parse_root() {
    pos_ = s_.find('{');
    if (pos_ == std::string_view::npos) {
      throw MalformedResponseError("response contains no braced block");
    }
    ++pos_;
    return object();
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void skip_space() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek())) != 0) ++pos_;
  }

  // Separators and stray quotes between entries carry no meaning.
  void skip_separators() {
    while (!eof() && (std::isspace(static_cast<unsigned char>(peek())) != 0 || peek() == ',' ||
                      peek() == ';' || is_quote(peek()))) {
      if (is_quote(peek()) && looks_like_quoted_text()) {
        return;
      }
      ++pos_;
    }
  }

  // A quote followed by text and a matching quote on the same line opens a
  // string; anything else is noise.
  bool looks_like_quoted_text() const {
    const char q = peek();
    const auto close = s_.find(q, pos_ + 1);
    if (close == std::string_view::npos) return false;
    const auto newline = s_.find('\n', pos_ + 1);
    if (newline != std::string_view::npos && newline < close) return false;
    const auto inner = trim(s_.substr(pos_ + 1, close - pos_ - 1));
    return !inner.empty() && inner.find_first_of("{}[]") == std::string_view::npos;
  }

  std::string quoted() {
    const char q = peek();
    ++pos_;
    const auto close = s_.find(q, pos_);
    const auto end = close == std::string_view::npos ? s_.size() : close;
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = close == std::string_view::npos ? s_.size() : close + 1;
    return out;
  }

  std::string bare(std::string_view stops) {
    const auto start = pos_;
    while (!eof() && stops.find(peek()) == std::string_view::npos) ++pos_;
    return std::string(trim(s_.substr(start, pos_ - start)));
  }

  Node value() {
    skip_space();
    if (eof()) return {};
    if (peek() == '{') {
      ++pos_;
      return object();
    }
    if (peek() == '[') {
      ++pos_;
      return list();
    }
    Node n;
    n.type = Node::Type::Scalar;
    if (is_quote(peek())) {
      n.text = quoted();
    } else {
      n.text = bare(",}]\n");
    }
    return n;
  }

  Node object() {
    Node n;
    n.type = Node::Type::Object;
    for (;;) {
      skip_separators();
      if (eof()) return n;  // unterminated: close implicitly
      const char c = peek();
      if (c == '}') {
        ++pos_;
        return n;
      }
      if (c == ']') {  // mismatched bracket, tolerate
        ++pos_;
        continue;
      }
      if (c == '{' || c == '[') {  // value without key
        (void)value();
        continue;
      }
      std::string key = is_quote(c) ? quoted() : bare(":{}[],\n");
      skip_space();
      if (!eof() && peek() == ':') {
        ++pos_;
      } else if (eof() || (peek() != '{' && peek() != '[')) {
        // key without value (e.g. an ellipsis line)
        continue;
      }
      n.members.emplace_back(std::move(key), value());
    }
  }

  Node list() {
    Node n;
    n.type = Node::Type::List;
    for (;;) {
      skip_separators();
      if (eof()) return n;
      if (peek() == ']') {
        ++pos_;
        return n;
      }
      if (peek() == '}') {  // closes the enclosing object; leave it there
        return n;
      }
      n.items.push_back(value());
      if (n.items.back().type == Node::Type::Scalar && n.items.back().text.empty()) {
        n.items.pop_back();
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

bool has_word(const std::string& key, std::string_view word) {
  return key.find(word) != std::string::npos;
}

// Single classification out of a value: ['x'], [x], 'x' or x.
std::string single_label(const Node& node, const std::string& where) {
  if (node.type == Node::Type::Scalar) {
    return node.text;
  }
  if (node.type == Node::Type::List) {
    std::vector<std::string> labels;
    for (const auto& item : node.items) {
      if (item.type != Node::Type::Scalar) {
        throw StructureError(where + ": expected a classification label");
      }
      labels.push_back(item.text);
    }
    if (labels.size() == 1) {
      return labels.front();
    }
    if (labels.empty()) {
      throw StructureError(where + ": empty classification");
    }
    throw StructureError(where + ": more than one classification given");
  }
  throw StructureError(where + ": expected a classification label");
}

PositionSpec read_position(const Node& node, const std::string& where) {
  if (node.type == Node::Type::Object) {
    if (node.members.size() != 1) {
      throw StructureError(where + ": expected exactly one {group: [member]} entry");
    }
    const auto& [group_text, member_node] = node.members.front();
    return {parse_group(group_text), parse_position(single_label(member_node, where))};
  }
  return position_spec(parse_position(single_label(node, where)));
}

struct ActivityPair {
  std::optional<LongitudinalActivity> longitudinal;
  std::optional<LateralActivity> lateral;
};

void read_activities(const Node& node, const std::string& where, ActivityPair& out) {
  for (const auto& [raw_key, child] : node.members) {
    const auto key = normalize_label(raw_key);
    if (has_word(key, "longitudinal")) {
      if (out.longitudinal) throw StructureError(where + ": longitudinal activity given twice");
      out.longitudinal = parse_longitudinal(single_label(child, where));
    } else if (has_word(key, "lateral")) {
      if (out.lateral) throw StructureError(where + ": lateral activity given twice");
      out.lateral = parse_lateral(single_label(child, where));
    } else if (has_word(key, "behavior") || has_word(key, "behaviour") ||
               has_word(key, "activity") || has_word(key, "activities")) {
      if (child.type != Node::Type::Object) {
        throw StructureError(where + ": behavior must be a braced block");
      }
      read_activities(child, where, out);
    }
  }
}

TargetSpec read_target(const Node& node, const std::string& where) {
  if (node.type != Node::Type::Object) {
    throw StructureError(where + ": expected a braced block");
  }
  std::optional<PositionSpec> start;
  std::optional<PositionSpec> end;
  ActivityPair activities;
  for (const auto& [raw_key, child] : node.members) {
    const auto key = normalize_label(raw_key);
    if (has_word(key, "start") && has_word(key, "position")) {
      if (start) throw StructureError(where + ": start position given twice");
      start = read_position(child, where + " start position");
    } else if (has_word(key, "end") && has_word(key, "position")) {
      if (end) throw StructureError(where + ": end position given twice");
      end = read_position(child, where + " end position");
    } else if (has_word(key, "longitudinal") || has_word(key, "lateral")) {
      Node wrapper;
      wrapper.type = Node::Type::Object;
      wrapper.members.emplace_back(raw_key, child);
      read_activities(wrapper, where, activities);
    } else if (has_word(key, "behavior") || has_word(key, "behaviour")) {
      if (child.type != Node::Type::Object) {
        throw StructureError(where + ": behavior must be a braced block");
      }
      read_activities(child, where, activities);
    }
  }
  if (!start) throw StructureError(where + ": missing start position");
  if (!end) throw StructureError(where + ": missing end position");
  if (!activities.longitudinal) throw StructureError(where + ": missing longitudinal activity");
  if (!activities.lateral) throw StructureError(where + ": missing lateral activity");
  return {*start, *end, *activities.longitudinal, *activities.lateral};
}

std::optional<int> target_number(const std::string& raw_key) {
  const auto hash = raw_key.find('#');
  std::size_t i = hash == std::string::npos ? raw_key.find_first_of("0123456789") : hash + 1;
  if (i == std::string::npos) return std::nullopt;
  while (i < raw_key.size() && raw_key[i] == ' ') ++i;
  int value = 0;
  bool any = false;
  while (i < raw_key.size() && std::isdigit(static_cast<unsigned char>(raw_key[i])) != 0) {
    value = value * 10 + (raw_key[i] - '0');
    any = true;
    ++i;
    if (value > 100000) break;
  }
  if (!any) return std::nullopt;
  return value;
}

bool is_target_key(const std::string& key) {
  return key.rfind("target vehicle", 0) == 0 || key.rfind("target", 0) == 0;
}

bool is_ego_key(const std::string& key) { return key.rfind("ego", 0) == 0; }

}  // namespace

ScenarioQuery parse_llm_response(std::string_view text) {
  const std::string folded = fold_quotes(text);
  const Node root = BracedReader(folded).parse_root();

  const Node* ego = nullptr;
  std::vector<std::pair<std::optional<int>, const Node*>> targets;
  for (const auto& [raw_key, child] : root.members) {
    const auto key = normalize_label(raw_key);
    if (is_ego_key(key)) {
      if (ego != nullptr) throw StructureError("ego vehicle given twice");
      ego = &child;
    } else if (is_target_key(key)) {
      targets.emplace_back(target_number(raw_key), &child);
    }
  }
  if (ego == nullptr || ego->type != Node::Type::Object) {
    throw MalformedResponseError("response has no ego vehicle block");
  }

  ScenarioQuery query;
  ActivityPair ego_activities;
  read_activities(*ego, "ego vehicle", ego_activities);
  if (!ego_activities.longitudinal) throw StructureError("ego vehicle: missing longitudinal activity");
  if (!ego_activities.lateral) throw StructureError("ego vehicle: missing lateral activity");
  query.ego_longitudinal = *ego_activities.longitudinal;
  query.ego_lateral = *ego_activities.lateral;

  // Numbered targets keep their numeral; unnumbered ones take the smallest free one.
  std::map<int, const Node*> numbered;
  for (const auto& [number, node] : targets) {
    if (!number) continue;
    if (!numbered.emplace(*number, node).second) {
      throw StructureError("target vehicle #" + std::to_string(*number) + " given twice");
    }
  }
  int next_free = 1;
  for (const auto& [number, node] : targets) {
    if (number) continue;
    while (numbered.count(next_free) != 0) ++next_free;
    numbered.emplace(next_free, node);
  }
  for (const auto& [number, node] : numbered) {
    query.targets.push_back(read_target(*node, "target vehicle #" + std::to_string(number)));
  }
  return query;
}

std::string to_braced_text(const ScenarioQuery& query) {
  std::ostringstream out;
  out << "{\n  Ego Vehicle: {Ego longitudinal activity: ['" << label(query.ego_longitudinal)
      << "'], Ego lateral activity: ['" << label(query.ego_lateral) << "']}";
  for (std::size_t i = 0; i < query.targets.size(); ++i) {
    const auto& t = query.targets[i];
    out << ",\n  Target Vehicle #" << (i + 1) << ":\n  {\n"
        << "    Target start position: {'" << label(t.start.group) << "': ['"
        << label(t.start.member) << "']},\n"
        << "    Target end position: {'" << label(t.end.group) << "': ['" << label(t.end.member)
        << "']},\n"
        << "    Target behavior: {target longitudinal activity: ['" << label(t.longitudinal)
        << "'], target lateral activity: ['" << label(t.lateral) << "']}\n  }";
  }
  out << "\n}\n";
  return out.str();
}

// ---- canonical JSON -----------------------------------------------------------

namespace {

nlohmann::json position_json(const PositionSpec& spec) {
  return {{"group", std::string(label(spec.group))}, {"member", std::string(label(spec.member))}};
}

const nlohmann::json& required(const nlohmann::json& doc, const char* key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw StructureError(where + ": missing key '" + key + "'");
  }
  return doc.at(key);
}

std::string required_string(const nlohmann::json& doc, const char* key, const std::string& where) {
  const auto& value = required(doc, key, where);
  if (!value.is_string()) {
    throw StructureError(where + ": '" + key + "' must be a string");
  }
  return value.get<std::string>();
}

PositionSpec position_from_json(const nlohmann::json& doc, const std::string& where) {
  if (!doc.is_object()) {
    throw StructureError(where + " must be an object");
  }
  return {parse_group(required_string(doc, "group", where)),
          parse_position(required_string(doc, "member", where))};
}

}  // namespace

nlohmann::json to_json(const ScenarioQuery& query) {
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : query.targets) {
    targets.push_back({{"start", position_json(t.start)},
                       {"end", position_json(t.end)},
                       {"longitudinal", std::string(label(t.longitudinal))},
                       {"lateral", std::string(label(t.lateral))}});
  }
  return {{"ego",
           {{"longitudinal", std::string(label(query.ego_longitudinal))},
            {"lateral", std::string(label(query.ego_lateral))}}},
          {"targets", std::move(targets)}};
}

ScenarioQuery query_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw StructureError("query must be a JSON object");
  }
  ScenarioQuery query;
  const auto& ego = required(doc, "ego", "query");
  query.ego_longitudinal = parse_longitudinal(required_string(ego, "longitudinal", "ego"));
  query.ego_lateral = parse_lateral(required_string(ego, "lateral", "ego"));
  const auto& targets = required(doc, "targets", "query");
  if (!targets.is_array()) {
    throw StructureError("query: 'targets' must be an array");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string where = "targets[" + std::to_string(i) + "]";
    const auto& t = targets[i];
    TargetSpec spec;
    spec.start = position_from_json(required(t, "start", where), where + ".start");
    spec.end = position_from_json(required(t, "end", where), where + ".end");
    spec.longitudinal = parse_longitudinal(required_string(t, "longitudinal", where));
    spec.lateral = parse_lateral(required_string(t, "lateral", where));
    query.targets.push_back(spec);
  }
  return query;
}

std::string taxonomy_text() {
  std::ostringstream out;
  const auto join = [&out](const auto& values) {
    bool first = true;
    for (const auto v : values) {
      out << (first ? "" : ", ") << "'" << label(v) << "'";
      first = false;
    }
  };
  out << "\nVehicle activity:\n  Longitudinal activity: ";
  join(kLongitudinalActivities);
  out << "\n  Lateral activity: ";
  join(kLateralActivities);
  out << "\nTarget vehicle position (relative to the ego vehicle):";
  for (const auto group : kGroups) {
    out << "\n  '" << label(group) << "': ";
    std::vector<RelativePosition> members;
    for (const auto p : kInScopePositions) {
      if (group_of(p) == group) members.push_back(p);
    }
    join(members);
  }
  return out.str();
}

}  // namespace scenmine
