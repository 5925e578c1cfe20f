#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "centerward/errors.hpp"
#include "centerward/quantile.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace centerward;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec2> circle(double radius, int m, Vec2 c = {}) {
  std::vector<Vec2> v;
  for (int k = 0; k < m; ++k) v.push_back(c + radius * Vec2{std::cos(2 * kPi * k / m), std::sin(2 * kPi * k / m)});
  return v;
}

Contour contour_of(double r, std::vector<Vec2> v) { return {r, std::move(v), true}; }

}  // namespace

TEST(QuantileMap, UnsolvedThrowsStateError) {
  const QuantileMap m;
  const double x[2] = {0.5, 0.0};
  EXPECT_FALSE(m.solved());
  EXPECT_THROW(m.forward(x), StateError);
  EXPECT_THROW(m.inverse(x), StateError);
  EXPECT_THROW(m.dim(), StateError);
  EXPECT_THROW(m.backend(), StateError);
  EXPECT_THROW(extract_contour(m, 0.5), StateError);
}

TEST(QuantileMap, SemidiscreteBackend) {
  const QuantileMap m = fixtures::semidiscrete_map();
  EXPECT_EQ(m.backend(), Backend::Semidiscrete);
  EXPECT_EQ(m.epsilon(), 0.0);
  EXPECT_FALSE(m.has_inverse());
  const double x[2] = {0.3, -0.4};
  const auto y = m.forward(x);
  const Vec2 ref = evaluate_map(m.semidiscrete().target, m.semidiscrete().result.potential.psi, {0.3, -0.4});
  EXPECT_EQ(y[0], ref.x);
  EXPECT_EQ(y[1], ref.y);
  EXPECT_THROW(m.inverse(x), StateError);
  const double zero[2] = {0.0, 0.0}, out[2] = {0.0, 1.0};
  EXPECT_THROW(m.forward(zero), DomainError);
  EXPECT_THROW(m.forward(out), DomainError);
  EXPECT_THROW(m.entropic(), StateError);
  EXPECT_EQ(m.metadata()["backend"], "semidiscrete");
}

TEST(QuantileMap, EntropicBackendInterpolatesTable) {
  const QuantileMap m = fixtures::entropic_map();
  EXPECT_EQ(m.backend(), Backend::Entropic);
  EXPECT_DOUBLE_EQ(m.epsilon(), 0.01);
  const auto& sol = m.entropic();
  for (std::size_t i = 0; i < sol.grid.nodes.size(); i += 13) {
    const auto y = m.forward(sol.grid.nodes.points[i]);
    EXPECT_NEAR(y[0], sol.forward_table.images[i][0], 1e-12);
    EXPECT_NEAR(y[1], sol.forward_table.images[i][1], 1e-12);
  }
  // Radial sanity against the Gaussian quantile on a coarse grid.
  const double x[2] = {0.0, 0.5};
  EXPECT_NEAR(norm(m.forward(x)), oracle::gaussian_q(0.5), 0.1);
  const double y[2] = {0.3, 0.2};
  EXPECT_LT(norm(m.inverse(y)), 1.0);
}

TEST(Loops, AreaAndWinding) {
  const std::vector<Vec2> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_DOUBLE_EQ(loop_area(sq), 1.0);
  EXPECT_EQ(winding_number(sq, {0.5, 0.5}), 1);
  EXPECT_EQ(winding_number(sq, {1.5, 0.5}), 0);
  const std::vector<Vec2> cw(sq.rbegin(), sq.rend());
  EXPECT_EQ(winding_number(cw, {0.5, 0.5}), -1);
  EXPECT_NEAR(loop_area(circle(1.0, 4096)), kPi, 1e-5);
}

TEST(Loops, SelfIntersection) {
  EXPECT_FALSE(find_self_intersection(circle(1.0, 64)).has_value());
  const std::vector<Vec2> bow = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  const auto hit = find_self_intersection(bow);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->first, 0u);
  EXPECT_EQ(hit->second, 2u);
  // Touching at a vertex counts.
  const std::vector<Vec2> touch = {{0, 0}, {2, 0}, {2, 2}, {1, 0}, {0, 2}};
  EXPECT_TRUE(find_self_intersection(touch).has_value());
  const std::vector<Vec2> repeat = {{0, 0}, {1, 0}, {1, 0}, {0, 1}};
  EXPECT_TRUE(find_self_intersection(repeat).has_value());
}

TEST(Nestedness, ConcentricCirclesPass) {
  std::vector<Contour> cs = {contour_of(0.6, circle(2.0, 64)), contour_of(0.2, circle(0.5, 64)),
                             contour_of(0.4, circle(1.0, 64))};
  const auto rep = nestedness_check(cs);
  EXPECT_TRUE(rep.pass);
  ASSERT_EQ(rep.loops.size(), 3u);
  EXPECT_DOUBLE_EQ(rep.loops[0].r, 0.2);
  EXPECT_EQ(rep.pairs.size(), 3u);
}

TEST(Nestedness, CrossingLoopsFailWithWitness) {
  const auto rep = nestedness_check({contour_of(0.2, circle(1.0, 64, {0.5, 0.0})), contour_of(0.4, circle(1.2, 64))});
  EXPECT_FALSE(rep.pass);
  ASSERT_EQ(rep.pairs.size(), 1u);
  EXPECT_FALSE(rep.pairs[0].nested);
  ASSERT_TRUE(rep.pairs[0].witness.has_value());
  EXPECT_GT(norm(*rep.pairs[0].witness), 1.2 - 1e-9);
}

TEST(Nestedness, NonIncreasingAreaAndSelfCrossingFail) {
  // Identical loops: contained but the area does not grow.
  const auto same = nestedness_check({contour_of(0.2, circle(1.0, 64)), contour_of(0.4, circle(1.0, 64))});
  EXPECT_FALSE(same.pass);
  const auto bow = nestedness_check({contour_of(0.2, {{0, 0}, {1, 1}, {1, 0}, {0, 1}})});
  EXPECT_FALSE(bow.pass);
  EXPECT_FALSE(bow.loops[0].simple);
  EXPECT_TRUE(bow.loops[0].crossing.has_value());
}

TEST(ConvexHull, DropsInteriorPoints) {
  const auto h = convex_hull({{0, 0}, {2, 0}, {1, 1}, {2, 2}, {0, 2}, {1, 0.5}, {2, 1}});
  ASSERT_EQ(h.size(), 4u);
  EXPECT_DOUBLE_EQ(loop_area(h), 4.0);
  EXPECT_EQ(winding_number(h, {1, 1}), 1);
}

TEST(Contours, GaussianContoursAreNestedCircles) {
  const QuantileMap m = fixtures::entropic_map();
  std::vector<Contour> cs;
  for (double r : {0.2, 0.4, 0.6, 0.8}) {
    cs.push_back(extract_contour(m, r, 128));
    EXPECT_EQ(cs.back().vertices.size(), 128u);
    double mean = 0.0;
    for (const Vec2& v : cs.back().vertices) mean += norm(v) / 128;
    EXPECT_NEAR(mean, oracle::gaussian_q(r), 0.1 * oracle::gaussian_q(r)) << r;
  }
  EXPECT_TRUE(nestedness_check(cs).pass);
  EXPECT_THROW(extract_contour(m, 1.0), DomainError);
  EXPECT_THROW(extract_contour(m, 0.5, 4), DomainError);
}

TEST(EstimateK, DiametersAndHull) {
  const QuantileMap m = fixtures::entropic_map();
  const KEstimate k = estimate_k(m, {0.4, 0.2, 0.1, 0.05}, 64);
  ASSERT_EQ(k.diameters.size(), 4u);
  EXPECT_TRUE(k.decreasing);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_LT(k.diameters[i], k.diameters[i - 1]);
  EXPECT_GT(k.hull_area, 0.0);
  EXPECT_GE(k.hull_vertices.size(), 3u);
  EXPECT_THROW(estimate_k(m, {0.1, 0.2}), DomainError);
  EXPECT_THROW(estimate_k(m, {}), DomainError);
  EXPECT_THROW(estimate_k(m, {1.2, 0.1}), DomainError);
}

TEST(ErrorStats, Summary) {
  const auto s = error_stats({5, 1, 4, 2, 3});
  EXPECT_EQ(s.count, 5u);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.median, 3.0);
  EXPECT_DOUBLE_EQ(s.max, 5.0);
  EXPECT_DOUBLE_EQ(error_stats({1, 2, 3, 4}).median, 2.5);
  EXPECT_EQ(error_stats({}).count, 0u);
}

TEST(Roundtrip, EntropicMapIsNearlyInvertible) {
  const QuantileMap m = fixtures::entropic_map();
  PointSet probes(2, 0);
  for (const auto& p : oracle::u2_points(300, 5)) {
    const double r = std::hypot(p.x, p.y);
    if (r < 0.2 || r > 0.8) continue;
    const double q[2] = {p.x, p.y};
    probes.push_back(q);
  }
  const auto s = roundtrip_error(m, probes);
  EXPECT_LT(s.median, 0.1);
  PointSet bad(2, 1);
  EXPECT_THROW(roundtrip_error(m, bad), DomainError);
  EXPECT_THROW(roundtrip_error(fixtures::semidiscrete_map(), probes), StateError);
}
