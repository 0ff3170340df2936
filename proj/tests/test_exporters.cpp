#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "scenmine/errors.hpp"
#include "scenmine/exporters.hpp"
#include "export_fixture.hpp"
#include "test_support.hpp"

namespace scenmine {
namespace {

namespace pt = boost::property_tree;

using testing::fixture_match;
using testing::fixture_store;

std::vector<const pt::ptree*> vertices_of(const pt::ptree& doc, const std::string& actor) {
  std::vector<const pt::ptree*> out;
  for (const auto& [tag, group] : doc.get_child("OpenSCENARIO.Storyboard.Story.Act")) {
    if (tag != "ManeuverGroup") continue;
    if (group.get<std::string>("Actors.EntityRef.<xmlattr>.entityRef") != actor) continue;
    const auto& line = group.get_child(
        "Maneuver.Event.Action.PrivateAction.RoutingAction.FollowTrajectoryAction.TrajectoryRef."
        "Trajectory.Shape.Polyline");
    for (const auto& [vtag, vertex] : line) {
      if (vtag == "Vertex") out.push_back(&vertex);
    }
  }
  return out;
}

pt::ptree parse_xml(const std::string& text) {
  std::istringstream in(text);
  pt::ptree doc;
  pt::read_xml(in, doc);
  return doc;
}

TEST(OpenScenario, FirstVertexOfTarget) {
  const auto doc = parse_xml(to_openscenario(fixture_match(), fixture_store()));
  const auto v = vertices_of(doc, "target_162");
  ASSERT_EQ(v.size(), 5u);
  const auto& a = v[0]->get_child("Position.WorldPosition.<xmlattr>");
  EXPECT_EQ(v[0]->get<std::string>("<xmlattr>.time"), "0.0");
  EXPECT_EQ(a.get<std::string>("x"), "389.16");
  EXPECT_EQ(a.get<std::string>("y"), "-14.27");
  EXPECT_EQ(a.get<std::string>("z"), "0.0");
  EXPECT_EQ(a.get<std::string>("p"), "0.0");
  EXPECT_EQ(a.get<std::string>("r"), "0.0");
  EXPECT_EQ(a.get<std::string>("h"), "0.0");
}

TEST(OpenScenario, HeadingPiTowardsMinusX) {
  const auto store = testing::store_of(
      {testing::cruise(1, 0, 10, 0.0, -25.0, 3), testing::cruise(2, 0, 10, -30.0, -25.0, 3)});
  const auto doc = parse_xml(to_openscenario({"test", 1, {{2, {0, 9}}}, {0, 9}}, store));
  for (const auto* v : vertices_of(doc, "target_2")) {
    EXPECT_NEAR(v->get<double>("Position.WorldPosition.<xmlattr>.h"), std::numbers::pi, 1e-6);
  }
}

TEST(OpenScenario, VertexTimesAndHeadings) {
  const auto store = testing::store_of(
      {testing::cruise(1, 0, 40, 0.0, 25.0, 3), testing::cruise(2, 0, 40, 30.0, 25.0, 3)});
  const ScenarioMatch m{"test", 1, {{2, {10, 29}}}, {10, 29}};
  const auto doc = parse_xml(to_openscenario(m, store));
  for (const std::string actor : {"ego", "target_2"}) {
    const auto v = vertices_of(doc, actor);
    ASSERT_EQ(v.size(), 20u);
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_NEAR(v[i]->get<double>("<xmlattr>.time"), static_cast<double>(i) / 25.0, 1e-9);
      EXPECT_EQ(v[i]->get<std::string>("Position.WorldPosition.<xmlattr>.h"), "0.0");
    }
  }
  EXPECT_EQ(doc.get<std::string>("OpenSCENARIO.FileHeader.<xmlattr>.revMinor"), "2");
}

TEST(OpenScenario, RoundTripWithinPrecision) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> coord(-500.0, 500.0);
  for (const int precision : {2, 3, 6}) {
    Trajectory ego;
    ego.vehicle_id = 1;
    Trajectory tgt;
    tgt.vehicle_id = 2;
    for (int i = 0; i < 30; ++i) {
      TrackSample s;
      s.frame = i;
      s.width = 4.0;
      s.height = 2.0;
      s.x_velocity = 20.0;
      s.x = coord(rng);
      s.y = coord(rng);
      ego.samples.push_back(s);
      s.x = coord(rng);
      s.y = coord(rng);
      tgt.samples.push_back(s);
    }
    const auto store = testing::store_of({ego, tgt});
    ExportConfig cfg;
    cfg.precision = precision;
    const ScenarioMatch m{"test", 1, {{2, {0, 29}}}, {0, 29}};
    const auto doc = parse_xml(to_openscenario(m, store, cfg));
    const double tol = 0.5 * std::pow(10.0, -precision) + 1e-12;
    const auto v = vertices_of(doc, "target_2");
    ASSERT_EQ(v.size(), 30u);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& a = v[i]->get_child("Position.WorldPosition.<xmlattr>");
      EXPECT_NEAR(a.get<double>("x"), tgt.samples[i].x, tol);
      EXPECT_NEAR(a.get<double>("y"), -tgt.samples[i].y, tol);
    }
  }
}

TEST(OpenScenario, Errors) {
  auto m = fixture_match();
  m.scenario_window = {104, 100};
  EXPECT_THROW((void)to_openscenario(m, fixture_store()), ExportError);
  ExportConfig cfg;
  cfg.precision = 1;
  EXPECT_THROW(cfg.validate(), InputError);
}

TEST(CarMaker, HeaderAndFirstRow) {
  const auto text = to_carmaker_text(fixture_match(), fixture_store());
  std::istringstream in(text);
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "#time, x_162, y_162");
  EXPECT_EQ(row, "0.0, 389.16, -14.27");
  int rows = 1;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST(CarMaker, TargetsAdjacentAndAbsentCellsEmpty) {
  const auto store = testing::store_of({testing::cruise(1, 0, 10, 0.0, 25.0, 3),
                                        testing::cruise(162, 0, 10, 30.0, 25.0, 3),
                                        testing::cruise(47, 0, 5, 60.0, 25.0, 2)});
  const ScenarioMatch m{"test", 1, {{162, {0, 4}}, {47, {0, 4}}}, {0, 9}};
  const auto text = to_carmaker_text(m, store);
  EXPECT_EQ(text.substr(0, text.find('\n')), "#time, x_162, y_162, x_47, y_47");
  EXPECT_EQ(text.find("x_1,"), std::string::npos);
  std::istringstream in(text);
  std::string line;
  std::string last;
  while (std::getline(in, line)) last = line;
  EXPECT_EQ(last.substr(last.size() - 4), ", , ");
}

TEST(CarMaker, NeedsATarget) {
  ScenarioMatch m{"test", 7, {}, {100, 104}};
  EXPECT_THROW((void)to_carmaker_text(m, fixture_store()), ExportError);
}

TEST(EgoPath, RowsAndTransform) {
  const auto text = emit_ego_path(fixture_match(), fixture_store());
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "#time, x, y");
  std::getline(in, line);
  EXPECT_EQ(line, "0.0, 420.5, -10.51");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

// SCENMINE_UPDATE_GOLDEN=1 rewrites the files instead; review the diff before committing.
TEST(Golden, ByteIdentical) {
  for (const auto& [file, text] : testing::golden_outputs()) {
    const auto path = testing::data_path("golden/" + file);
    if (std::getenv("SCENMINE_UPDATE_GOLDEN") != nullptr) {
      std::ofstream(path, std::ios::binary) << text;
    }
    EXPECT_EQ(text, testing::read_file(path)) << file;
  }
}

}  // namespace
}  // namespace scenmine
