#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "uwloc/scenario.hpp"

using namespace uwloc;

namespace {

std::string read_file(const std::string& name) {
  std::ifstream in(std::string(UWLOC_SCENARIO_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Scenario, MinimalFileUsesDefaults) {
  const Scenario s = load_scenario(std::string(UWLOC_SCENARIO_DIR) + "/minimal.json");
  ASSERT_EQ(s.water_column.size(), 1u);
  EXPECT_EQ(s.anchors.size(), 4u);
  EXPECT_EQ(s.carrier_frequency, 12.0);
  EXPECT_EQ(s.channel.path_model, PathModel::kRefracted);
  EXPECT_EQ(s.channel.tof_noise_sigma, 0.0);
  EXPECT_EQ(s.ping_interval, 1.0);
  EXPECT_EQ(s.seed, 1u);
  EXPECT_EQ(s.ga.seed, s.seed);
  EXPECT_FALSE(s.search_bounds_given);
  EXPECT_EQ(s.ga.search_bounds.min.up, -100.0);
  EXPECT_EQ(s.ga.search_bounds.max.up, 0.0);
  EXPECT_EQ(s.ga.population_size, 200u);
  ASSERT_TRUE(s.enu_origin.has_value());
}

TEST(Scenario, ShippedScenariosLoad) {
  for (const char* name : {"canonical_noisy.json", "stationary_noiseless.json", "minimal.json"}) {
    EXPECT_NO_THROW(load_scenario(std::string(UWLOC_SCENARIO_DIR) + "/" + name)) << name;
  }
}

TEST(Scenario, ThreeAnchorsRejected) {
  Json j = Json::parse(read_file("minimal.json"));
  j["anchors"].erase(3);
  const std::string msg = error_of(j.dump());
  EXPECT_NE(msg.find("at least 4 anchors"), std::string::npos) << msg;
}

TEST(Scenario, UnknownKeyIsNamed) {
  Json j = Json::parse(read_file("minimal.json"));
  j["channel"] = {{"source_level", 180}, {"noise_levle", 50}};
  const std::string msg = error_of(j.dump());
  EXPECT_NE(msg.find("channel.noise_levle"), std::string::npos) << msg;
}

TEST(Scenario, MissingKeyIsNamed) {
  Json j = Json::parse(read_file("minimal.json"));
  j["water_column"][0].erase("ph");
  const std::string msg = error_of(j.dump());
  EXPECT_NE(msg.find("ph"), std::string::npos) << msg;
}

TEST(Scenario, OutOfRangeLayerRejected) {
  Json j = Json::parse(read_file("minimal.json"));
  j["water_column"][0]["ph"] = 10.0;
  EXPECT_FALSE(error_of(j.dump()).empty());
}

TEST(Scenario, ParseErrorReportsLine) {
  const std::string msg = error_of("{\n  \"water_column\": [\n    {,\n  ]\n}\n");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Scenario, NonMonotoneTrajectoryRejected) {
  Json j = Json::parse(read_file("minimal.json"));
  j["trajectory"][1]["t"] = 0;
  EXPECT_NE(error_of(j.dump()).find("trajectory[1].t"), std::string::npos);
}

TEST(Scenario, DuplicateAnchorIdRejected) {
  Json j = Json::parse(read_file("minimal.json"));
  j["anchors"][1]["id"] = "ASV0";
  EXPECT_NE(error_of(j.dump()).find("not unique"), std::string::npos);
}

TEST(Scenario, EchoRoundTrips) {
  const Scenario s = load_scenario(std::string(UWLOC_SCENARIO_DIR) + "/canonical_noisy.json");
  const Json echo = to_json(s);
  const Scenario back = parse_scenario(echo);
  EXPECT_EQ(to_json(back).dump(), echo.dump());
  EXPECT_EQ(back.seed, s.seed);
  EXPECT_EQ(back.ga.search_bounds.min.east, s.ga.search_bounds.min.east);
}
