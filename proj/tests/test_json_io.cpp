#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "centerward/diagnostics.hpp"
#include "centerward/errors.hpp"
#include "centerward/json_io.hpp"
#include "fixtures.hpp"

using namespace centerward;

TEST(CanonicalJson, SortedKeysAndFullPrecision) {
  const nlohmann::json j = {{"b", 0.1}, {"a", {1, 2}}, {"c", 1.0}, {"d", std::numeric_limits<double>::infinity()}};
  EXPECT_EQ(to_json_string(j), "{\n  \"a\": [1, 2],\n  \"b\": 0.10000000000000001,\n  \"c\": 1.0,\n  \"d\": null\n}\n");
  EXPECT_EQ(to_json_string(nlohmann::json::array()), "[]\n");
  const nlohmann::json nested = {{"rows", {{1.5, 2.5}, {3.5, 4.5}, {5.5, 6.5}, {7.5, 8.5}}}};
  EXPECT_EQ(to_json_string(nested),
            "{\n  \"rows\": [\n    [1.5, 2.5],\n    [3.5, 4.5],\n    [5.5, 6.5],\n    [7.5, 8.5]\n  ]\n}\n");
  // Round trip through the parser is exact.
  const double v = 0.1 + 0.2;
  EXPECT_EQ(nlohmann::json::parse(to_json_string({{"v", v}}))["v"].get<double>(), v);
}

TEST(CanonicalJson, ConfigHashIsStableAndSensitive) {
  const nlohmann::json a = {{"x", 1}, {"y", {1.0, 2.0}}};
  const nlohmann::json b = nlohmann::json::parse(R"({"y":[1.0,2.0],"x":1})");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_NE(config_hash(a), config_hash({{"x", 2}, {"y", {1.0, 2.0}}}));
  EXPECT_EQ(std::string(version_string()), "0.1.0");
}

TEST(Artifacts, ContourFields) {
  Contour c{0.4, {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}}, true};
  const nlohmann::json j = to_json(c);
  EXPECT_DOUBLE_EQ(j["r"].get<double>(), 0.4);
  EXPECT_EQ(j["M"], 3);
  EXPECT_EQ(j["closed"], true);
  ASSERT_EQ(j["vertices"].size(), 3u);
  EXPECT_EQ(j["vertices"][1][1].get<double>(), 1.0);
  const Contour back = contour_from_json(nlohmann::json::parse(to_json_string(j)));
  EXPECT_EQ(back.vertices, c.vertices);
  EXPECT_EQ(back.r, c.r);
  EXPECT_THROW(contour_from_json({{"r", 0.4}}), ConfigError);
}

TEST(Artifacts, KEstimateFields) {
  KEstimate k;
  k.radii = {0.4, 0.2};
  k.diameters = {2.0, 1.0};
  k.hull_vertices = {{0, 0}, {1, 0}, {0, 1}};
  k.hull_area = 0.5;
  const nlohmann::json j = to_json(k);
  for (const char* key : {"radii", "diameters", "hull_vertices", "hull_area", "decreasing"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["decreasing"], true);
  EXPECT_EQ(j["hull_vertices"].size(), 3u);
}

TEST(Artifacts, ReportFieldsAndDeterminism) {
  const QuantileMap m = fixtures::semidiscrete_map("gaussian", 128);
  const auto d = builtin_density("gaussian");
  Thresholds t;
  t.pushforward_samples = 1000;
  t.monotonicity_pairs = 1000;
  const std::string a = to_json_string(to_json(run_suite(m, *d, t, 5)));
  const std::string b = to_json_string(to_json(run_suite(m, *d, t, 5)));
  EXPECT_EQ(a, b);
  const auto j = nlohmann::json::parse(a);
  EXPECT_EQ(j["seed"], 5);
  ASSERT_FALSE(j["checks"].empty());
  for (const char* key : {"name", "status", "statistic", "threshold", "comparison", "pass", "details"})
    EXPECT_TRUE(j["checks"][0].contains(key)) << key;
  EXPECT_TRUE(j.contains("pass"));
  EXPECT_TRUE(j.contains("provenance"));
}

TEST(Artifacts, SemidiscreteMapRoundTrip) {
  const QuantileMap m = fixtures::semidiscrete_map("banana", 64);
  const nlohmann::json j = to_json(m.semidiscrete());
  EXPECT_EQ(j["kind"], "semidiscrete");
  const QuantileMap back = map_from_json(nlohmann::json::parse(to_json_string(j)));
  EXPECT_EQ(back.backend(), Backend::Semidiscrete);
  for (double x : {-0.7, -0.2, 0.1, 0.6}) {
    const double p[2] = {x, 0.5 * x + 0.1};
    EXPECT_EQ(back.forward(p), m.forward(p));
  }
}

TEST(Artifacts, EntropicMapRoundTrip) {
  const QuantileMap m = fixtures::entropic_map("gaussian", 8, 16);
  const nlohmann::json j = to_json(m.entropic());
  EXPECT_EQ(j["kind"], "entropic");
  EXPECT_DOUBLE_EQ(j["epsilon"].get<double>(), 0.01);
  const QuantileMap back = map_from_json(nlohmann::json::parse(to_json_string(j)));
  EXPECT_EQ(back.backend(), Backend::Entropic);
  const double p[2] = {0.3, -0.1};
  const auto a = m.forward(p), b = back.forward(p);
  EXPECT_NEAR(a[0], b[0], 1e-12);
  EXPECT_NEAR(a[1], b[1], 1e-12);
  const auto fa = m.inverse(p), fb = back.inverse(p);
  EXPECT_NEAR(fa[0], fb[0], 1e-12);
}

TEST(Artifacts, MalformedMapsAreConfigErrors) {
  EXPECT_THROW(map_from_json({{"kind", "spline"}}), ConfigError);
  EXPECT_THROW(map_from_json({{"kind", "semidiscrete"}, {"atoms", {{0.0, 0.0}}}}), ConfigError);
  nlohmann::json j = to_json(fixtures::entropic_map("gaussian", 4, 8).entropic());
  j["g"].erase(0);
  EXPECT_THROW(map_from_json(j), ConfigError);
}
