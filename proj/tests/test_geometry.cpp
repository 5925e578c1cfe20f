#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "centerward/errors.hpp"
#include "centerward/geometry.hpp"
#include "oracles.hpp"

using namespace centerward;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(CellMass, FullDisk) { EXPECT_NEAR(cell_mass_u2(ArcPolygon::full_disk()), 1.0, 1e-14); }

TEST(CellMass, HalfDisk) {
  ArcPolygon half;
  half.edges.push_back(BoundaryEdge::arc(0.0, kPi));
  half.edges.push_back(BoundaryEdge::segment({-1.0, 0.0}, {1.0, 0.0}));
  EXPECT_NEAR(cell_mass_u2(half), 0.5, 1e-14);
}

TEST(CellMass, SectorIsProportionalToAngle) {
  for (double a : {0.3, 1.0, 2.5}) {
    ArcPolygon s;
    s.edges.push_back(BoundaryEdge::segment({0.0, 0.0}, {1.0, 0.0}));
    s.edges.push_back(BoundaryEdge::arc(0.0, a));
    s.edges.push_back(BoundaryEdge::segment({std::cos(a), std::sin(a)}, {0.0, 0.0}));
    EXPECT_NEAR(cell_mass_u2(s), a / (2.0 * kPi), 1e-14) << a;
  }
}

TEST(CellMass, ClippedPolygonsAgreeWithMonteCarlo) {
  struct Case {
    Vec2 n;
    double off;
  };
  const std::vector<std::vector<Case>> cases = {
      {{{1.0, 0.0}, 0.3}},
      {{{1.0, 0.0}, -0.2}, {{0.0, 1.0}, 0.5}},
      {{{1.0, 1.0}, 0.1}, {{-1.0, 0.5}, 0.2}, {{0.2, -1.0}, 0.4}},
      {{{1.0, 0.0}, 0.4}, {{-1.0, 0.0}, -0.1}, {{0.0, 1.0}, 0.3}, {{0.0, -1.0}, 0.3}},
  };
  unsigned seed = 100;
  for (const auto& cs : cases) {
    ConvexPolygon poly = ConvexPolygon::square(2.0);
    for (std::size_t k = 0; k < cs.size(); ++k) poly.clip(cs[k].n, cs[k].off, static_cast<int>(k));
    const ArcPolygon cell = intersect_unit_disk(poly);
    const double exact = cell_mass_u2(cell);
    const auto [mc, se] = oracle::u2_mass(
        [&](oracle::Pt p) {
          for (const auto& c : cs)
            if (c.n.x * p.x + c.n.y * p.y > c.off) return false;
          return true;
        },
        400000, seed++);
    EXPECT_NEAR(exact, mc, 4.0 * se + 1e-4);
    EXPECT_NEAR(u2_mass_unchecked(cell), exact, 1e-15);
  }
}

TEST(CellMass, FirstMomentOfSector) {
  // int x dU_2 over a sector [0, a]: (1/2pi) int_0^1 dr int_0^a (r cos t, r sin t) dt.
  const double a = 1.2;
  ArcPolygon s;
  s.edges.push_back(BoundaryEdge::segment({0.0, 0.0}, {1.0, 0.0}));
  s.edges.push_back(BoundaryEdge::arc(0.0, a));
  s.edges.push_back(BoundaryEdge::segment({std::cos(a), std::sin(a)}, {0.0, 0.0}));
  const Vec2 m = u2_first_moment(s);
  EXPECT_NEAR(m.x, std::sin(a) / (4.0 * kPi), 1e-13);
  EXPECT_NEAR(m.y, (1.0 - std::cos(a)) / (4.0 * kPi), 1e-13);
  const Vec2 full = u2_first_moment(ArcPolygon::full_disk());
  EXPECT_NEAR(full.x, 0.0, 1e-15);
  EXPECT_NEAR(full.y, 0.0, 1e-15);
}

TEST(CellMass, NonSimpleBoundaryThrows) {
  // Bow tie: the two long segments cross.
  ArcPolygon bow;
  bow.edges.push_back(BoundaryEdge::segment({-0.5, -0.5}, {0.5, 0.5}));
  bow.edges.push_back(BoundaryEdge::segment({0.5, 0.5}, {0.5, -0.5}));
  bow.edges.push_back(BoundaryEdge::segment({0.5, -0.5}, {-0.5, 0.5}));
  bow.edges.push_back(BoundaryEdge::segment({-0.5, 0.5}, {-0.5, -0.5}));
  EXPECT_THROW(cell_mass_u2(bow), GeometryError);

  ArcPolygon open;
  open.edges.push_back(BoundaryEdge::segment({0.0, 0.0}, {0.5, 0.0}));
  open.edges.push_back(BoundaryEdge::segment({0.5, 0.0}, {0.5, 0.5}));
  EXPECT_THROW(cell_mass_u2(open), GeometryError);
}

TEST(SegmentIntegral, MatchesSimpson) {
  const std::vector<std::pair<Vec2, Vec2>> segs = {
      {{0.1, -0.5}, {0.1, 0.7}}, {{-0.8, 0.3}, {0.6, 0.2}}, {{0.2, 0.2}, {0.9, 0.1}}};
  for (const auto& [a, b] : segs) {
    const double len = norm(b - a);
    const double ref = oracle::simpson(
        [&](double t) {
          const Vec2 p = a + (t / len) * (b - a);
          return 1.0 / (2.0 * kPi * norm(p));
        },
        0.0, len);
    EXPECT_NEAR(u2_segment_integral(a, b), ref, 1e-9);
  }
}

TEST(ConvexPolygon, ClipAndDiameter) {
  ConvexPolygon p = ConvexPolygon::square(1.0);
  EXPECT_NEAR(signed_area(p.vertices), 4.0, 1e-14);
  p.clip({1.0, 0.0}, 0.0, 7);
  EXPECT_NEAR(signed_area(p.vertices), 2.0, 1e-14);
  EXPECT_NE(std::find(p.labels.begin(), p.labels.end(), 7), p.labels.end());
  p.clip({-1.0, 0.0}, 2.0, 8);  // no-op
  EXPECT_NEAR(signed_area(p.vertices), 2.0, 1e-14);
  p.clip({1.0, 0.0}, -2.0, 9);
  EXPECT_TRUE(p.empty());

  EXPECT_NEAR(diameter(ArcPolygon::full_disk()), 2.0, 1e-3);
  EXPECT_TRUE(intersect_unit_disk(ConvexPolygon::square(2.0)).edges.size() == 1);
}
