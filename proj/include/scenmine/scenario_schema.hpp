#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scenmine/activity.hpp"
#include "scenmine/relative_position.hpp"

namespace scenmine {

enum class PositionGroup { SameLane, AdjacentLane, LaneNextToAdjacentLane };

[[nodiscard]] std::string_view label(PositionGroup group);

/// Group a position belongs to in the taxonomy. OutOfScope has no group and
/// throws InputError.
[[nodiscard]] PositionGroup group_of(RelativePosition position);

struct PositionSpec {
  PositionGroup group = PositionGroup::SameLane;
  RelativePosition member = RelativePosition::Front;

  friend bool operator==(const PositionSpec&, const PositionSpec&) = default;
};

/// Spec with the group implied by the member.
[[nodiscard]] PositionSpec position_spec(RelativePosition member);

struct TargetSpec {
  PositionSpec start;
  PositionSpec end;
  LongitudinalActivity longitudinal = LongitudinalActivity::KeepVelocity;
  LateralActivity lateral = LateralActivity::FollowLane;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct ScenarioQuery {
  LongitudinalActivity ego_longitudinal = LongitudinalActivity::KeepVelocity;
  LateralActivity ego_lateral = LateralActivity::FollowLane;
  std::vector<TargetSpec> targets;

  friend bool operator==(const ScenarioQuery&, const ScenarioQuery&) = default;
};

// Label lookup after normalisation (case, quotes, '_'/'-' and a leading
// "the" are ignored). Unknown labels throw VocabularyError.
[[nodiscard]] std::string normalize_label(std::string_view text);
[[nodiscard]] LongitudinalActivity parse_longitudinal(std::string_view text);
[[nodiscard]] LateralActivity parse_lateral(std::string_view text);
[[nodiscard]] PositionGroup parse_group(std::string_view text);
[[nodiscard]] RelativePosition parse_position(std::string_view text);

/// Violations as readable strings; empty when the query is valid.
[[nodiscard]] std::vector<std::string> validate_query(const ScenarioQuery& query);

/// Returns the query unchanged or throws ValidationError with the violations.
const ScenarioQuery& require_valid(const ScenarioQuery& query);

/// Tolerant parser for the braced answer grammar:
///
///   { Ego Vehicle: {Ego longitudinal activity: ['keep velocity'], ...},
///     Target Vehicle #1: { Target start position: {'adjacent lane': [...]}, ... } }
///
/// Throws MalformedResponseError (no ego block or no structure at all),
/// VocabularyError (label outside the taxonomy) or StructureError (duplicate
/// target numbers, missing fields).
[[nodiscard]] ScenarioQuery parse_llm_response(std::string_view text);

/// Canonical braced form; parse_llm_response(to_braced_text(q)) == q.
[[nodiscard]] std::string to_braced_text(const ScenarioQuery& query);

/// Canonical JSON wire format:
/// {"ego":{"longitudinal":..,"lateral":..},
///  "targets":[{"start":{"group":..,"member":..},"end":{..},"longitudinal":..,"lateral":..}]}
[[nodiscard]] nlohmann::json to_json(const ScenarioQuery& query);

/// Strict reader for the canonical JSON. Throws StructureError on missing
/// keys or wrong types and VocabularyError on unknown labels. Group/member
/// consistency is not checked here; see validate_query.
[[nodiscard]] ScenarioQuery query_from_json(const nlohmann::json& doc);

/// Text block listing every taxonomy label, inserted into the prompt.
[[nodiscard]] std::string taxonomy_text();

}  // namespace scenmine
