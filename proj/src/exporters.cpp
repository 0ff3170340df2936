#include "scenmine/exporters.hpp"

#include <numbers>
#include <sstream>

#include "scenmine/errors.hpp"
#include "scenmine/format.hpp"

namespace scenmine {

void ExportConfig::validate() const {
  if (precision < 2 || precision > 15) {
    throw InputError("export precision must be between 2 and 15");
  }
}

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

void check_window(const ScenarioMatch& match) {
  if (match.scenario_window.first > match.scenario_window.last) {
    throw ExportError("scenario window is empty");
  }
}

const Trajectory& lookup(const TrajectoryStore& store, VehicleId id) {
  const Trajectory* t = store.find(id);
  if (t == nullptr) {
    throw ExportError("vehicle " + std::to_string(id) + " is not in recording " +
                      store.recording_id());
  }
  return *t;
}

double export_x(const TrackSample& s, const ExportConfig& config) {
  return config.use_center_x ? s.center_x() : s.x;
}

double export_y(const TrackSample& s, const ExportConfig& config) {
  return config.flip_y ? -s.y : s.y;
}

struct Actor {
  std::string name;
  const Trajectory* trajectory;
};

std::vector<Actor> actors_of(const ScenarioMatch& match, const TrajectoryStore& store) {
  std::vector<Actor> out;
  out.push_back({"ego", &lookup(store, match.ego_id)});
  for (const auto& t : match.targets) {
    out.push_back({"target_" + std::to_string(t.target_id), &lookup(store, t.target_id)});
  }
  return out;
}

}  // namespace

std::vector<ExportVertex> export_vertices(const Trajectory& trajectory, const FrameInterval& window,
                                          double frame_rate, const ExportConfig& config) {
  std::vector<ExportVertex> out;
  if (trajectory.empty()) return out;
  const auto common = intersect(window, trajectory.frames());
  if (!common) return out;
  const double heading = travel_sign(trajectory) < 0 ? std::numbers::pi : 0.0;
  out.reserve(static_cast<std::size_t>(common->length()));
  for (FrameIndex f = common->first; f <= common->last; ++f) {
    const auto& s = trajectory.at_frame(f);
    ExportVertex v;
    v.time = static_cast<double>(f - window.first) / frame_rate;
    v.x = export_x(s, config);
    v.y = export_y(s, config);
    v.h = heading;
    out.push_back(v);
  }
  return out;
}

std::string to_openscenario(const ScenarioMatch& match, const TrajectoryStore& store,
                            const ExportConfig& config) {
  config.validate();
  check_window(match);
  const auto actors = actors_of(match, store);
  const int prec = config.precision;
  const auto num = [prec](double v) { return format_decimal(v, prec); };
  const double fr = store.frame_rate();

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<OpenSCENARIO>\n"
      << "  <FileHeader revMajor=\"1\" revMinor=\"2\" date=\"" << xml_escape(config.date)
      << "\" description=\"" << xml_escape(store.recording_id()) << " ego "
      << match.ego_id << " frames " << match.scenario_window.first << "-"
      << match.scenario_window.last << "\" author=\"scenmine\"/>\n"
      << "  <ParameterDeclarations/>\n"
      << "  <CatalogLocations/>\n"
      << "  <RoadNetwork/>\n"
      << "  <Entities>\n";
  for (const auto& a : actors) {
    const auto& first = a.trajectory->samples.front();
    out << "    <ScenarioObject name=\"" << a.name << "\">\n"
        << "      <Vehicle name=\"" << a.name << "\" vehicleCategory=\"car\">\n"
        << "        <BoundingBox>\n"
        << "          <Center x=\"0.0\" y=\"0.0\" z=\"" << num(0.75) << "\"/>\n"
        << "          <Dimensions width=\"" << num(first.height) << "\" length=\""
        << num(first.width) << "\" height=\"" << num(1.5) << "\"/>\n"
        << "        </BoundingBox>\n"
        << "        <Performance maxSpeed=\"" << num(70.0) << "\" maxAcceleration=\"" << num(10.0)
        << "\" maxDeceleration=\"" << num(10.0) << "\"/>\n"
        << "        <Axles>\n"
        << "          <FrontAxle maxSteering=\"" << num(0.5) << "\" wheelDiameter=\"" << num(0.6)
        << "\" trackWidth=\"" << num(1.8) << "\" positionX=\"" << num(3.1) << "\" positionZ=\""
        << num(0.3) << "\"/>\n"
        << "          <RearAxle maxSteering=\"0.0\" wheelDiameter=\"" << num(0.6)
        << "\" trackWidth=\"" << num(1.8) << "\" positionX=\"0.0\" positionZ=\"" << num(0.3)
        << "\"/>\n"
        << "        </Axles>\n"
        << "        <Properties/>\n"
        << "      </Vehicle>\n"
        << "    </ScenarioObject>\n";
  }
  out << "  </Entities>\n"
      << "  <Storyboard>\n"
      << "    <Init>\n"
      << "      <Actions>\n";
  std::vector<std::vector<ExportVertex>> paths;
  for (const auto& a : actors) {
    paths.push_back(export_vertices(*a.trajectory, match.scenario_window, fr, config));
    if (paths.back().empty()) {
      throw ExportError(a.name + " is absent from the scenario window");
    }
  }
  for (std::size_t i = 0; i < actors.size(); ++i) {
    const auto& v = paths[i].front();
    out << "        <Private entityRef=\"" << actors[i].name << "\">\n"
        << "          <PrivateAction>\n"
        << "            <TeleportAction>\n"
        << "              <Position>\n"
        << "                <WorldPosition x=\"" << num(v.x) << "\" y=\"" << num(v.y) << "\" z=\""
        << num(v.z) << "\" h=\"" << num(v.h) << "\" p=\"" << num(v.p) << "\" r=\"" << num(v.r)
        << "\"/>\n"
        << "              </Position>\n"
        << "            </TeleportAction>\n"
        << "          </PrivateAction>\n"
        << "        </Private>\n";
  }
  out << "      </Actions>\n"
      << "    </Init>\n"
      << "    <Story name=\"extracted\">\n"
      << "      <Act name=\"replay\">\n";
  for (std::size_t i = 0; i < actors.size(); ++i) {
    const auto& name = actors[i].name;
    out << "        <ManeuverGroup maximumExecutionCount=\"1\" name=\"" << name << "_group\">\n"
        << "          <Actors selectTriggeringEntities=\"false\">\n"
        << "            <EntityRef entityRef=\"" << name << "\"/>\n"
        << "          </Actors>\n"
        << "          <Maneuver name=\"" << name << "_maneuver\">\n"
        << "            <Event name=\"" << name << "_event\" priority=\"overwrite\">\n"
        << "              <Action name=\"" << name << "_trajectory\">\n"
        << "                <PrivateAction>\n"
        << "                  <RoutingAction>\n"
        << "                    <FollowTrajectoryAction>\n"
        << "                      <TrajectoryRef>\n"
        << "                        <Trajectory name=\"" << name << "_path\" closed=\"false\">\n"
        << "                          <ParameterDeclarations/>\n"
        << "                          <Shape>\n"
        << "                            <Polyline>\n";
    for (const auto& v : paths[i]) {
      out << "                              <Vertex time=\"" << num(v.time) << "\">\n"
          << "                                <Position>\n"
          << "                                  <WorldPosition x=\"" << num(v.x) << "\" y=\""
          << num(v.y) << "\" z=\"" << num(v.z) << "\" h=\"" << num(v.h) << "\" p=\""
          << num(v.p) << "\" r=\"" << num(v.r) << "\"/>\n"
          << "                                </Position>\n"
          << "                              </Vertex>\n";
    }
    out << "                            </Polyline>\n"
        << "                          </Shape>\n"
        << "                        </Trajectory>\n"
        << "                      </TrajectoryRef>\n"
        << "                      <TimeReference>\n"
        << "                        <Timing domainAbsoluteRelative=\"absolute\" scale=\"1.0\" "
           "offset=\"0.0\"/>\n"
        << "                      </TimeReference>\n"
        << "                      <TrajectoryFollowingMode followingMode=\"position\"/>\n"
        << "                    </FollowTrajectoryAction>\n"
        << "                  </RoutingAction>\n"
        << "                </PrivateAction>\n"
        << "              </Action>\n"
        << "              <StartTrigger>\n"
        << "                <ConditionGroup>\n"
        << "                  <Condition name=\"" << name
        << "_start\" delay=\"0.0\" conditionEdge=\"none\">\n"
        << "                    <ByValueCondition>\n"
        << "                      <SimulationTimeCondition value=\"0.0\" rule=\"greaterThan\"/>\n"
        << "                    </ByValueCondition>\n"
        << "                  </Condition>\n"
        << "                </ConditionGroup>\n"
        << "              </StartTrigger>\n"
        << "            </Event>\n"
        << "          </Maneuver>\n"
        << "        </ManeuverGroup>\n";
  }
  const double duration =
      static_cast<double>(match.scenario_window.last - match.scenario_window.first) / fr;
  out << "        <StartTrigger>\n"
      << "          <ConditionGroup>\n"
      << "            <Condition name=\"act_start\" delay=\"0.0\" conditionEdge=\"none\">\n"
      << "              <ByValueCondition>\n"
      << "                <SimulationTimeCondition value=\"0.0\" rule=\"greaterThan\"/>\n"
      << "              </ByValueCondition>\n"
      << "            </Condition>\n"
      << "          </ConditionGroup>\n"
      << "        </StartTrigger>\n"
      << "      </Act>\n"
      << "    </Story>\n"
      << "    <StopTrigger>\n"
      << "      <ConditionGroup>\n"
      << "        <Condition name=\"end\" delay=\"0.0\" conditionEdge=\"rising\">\n"
      << "          <ByValueCondition>\n"
      << "            <SimulationTimeCondition value=\"" << num(duration)
      << "\" rule=\"greaterThan\"/>\n"
      << "          </ByValueCondition>\n"
      << "        </Condition>\n"
      << "      </ConditionGroup>\n"
      << "    </StopTrigger>\n"
      << "  </Storyboard>\n"
      << "</OpenSCENARIO>\n";
  return out.str();
}

std::string to_carmaker_text(const ScenarioMatch& match, const TrajectoryStore& store,
                             const ExportConfig& config) {
  config.validate();
  check_window(match);
  if (match.targets.empty()) {
    throw ExportError("CarMaker export needs at least one non-ego vehicle");
  }
  std::vector<std::pair<VehicleId, const Trajectory*>> columns;
  if (config.include_ego_in_text) {
    columns.emplace_back(match.ego_id, &lookup(store, match.ego_id));
  }
  for (const auto& t : match.targets) {
    columns.emplace_back(t.target_id, &lookup(store, t.target_id));
  }

  const int prec = config.precision;
  const double fr = store.frame_rate();
  std::ostringstream out;
  out << "#time";
  for (const auto& [id, traj] : columns) {
    out << ", x_" << id << ", y_" << id;
  }
  out << '\n';
  const auto& w = match.scenario_window;
  for (FrameIndex f = w.first; f <= w.last; ++f) {
    out << format_decimal(static_cast<double>(f - w.first) / fr, prec);
    for (const auto& [id, traj] : columns) {
      if (traj->covers(f)) {
        const auto& s = traj->at_frame(f);
        out << ", " << format_decimal(export_x(s, config), prec) << ", "
            << format_decimal(export_y(s, config), prec);
      } else {
        out << ", , ";
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string emit_ego_path(const ScenarioMatch& match, const TrajectoryStore& store,
                          const ExportConfig& config) {
  config.validate();
  check_window(match);
  const auto& ego = lookup(store, match.ego_id);
  const int prec = config.precision;
  std::ostringstream out;
  out << "#time, x, y\n";
  for (const auto& v : export_vertices(ego, match.scenario_window, store.frame_rate(), config)) {
    out << format_decimal(v.time, prec) << ", " << format_decimal(v.x, prec) << ", "
        << format_decimal(v.y, prec) << '\n';
  }
  return out.str();
}

}  // namespace scenmine
