#pragma once

#include <cmath>
#include <vector>

namespace centerward {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  Vec2& operator+=(Vec2 b) {
    x += b.x;
    y += b.y;
    return *this;
  }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double angle_of(Vec2 a) { return std::atan2(a.y, a.x); }

/// Boundary piece of a region in the closed unit disk: a straight segment or a
/// counter-clockwise arc of the unit circle.
struct BoundaryEdge {
  enum class Kind { Segment, Arc };

  Kind kind = Kind::Segment;
  Vec2 from;
  Vec2 to;
  /// Arcs only: start angle and counter-clockwise sweep in (0, 2 pi].
  double start_angle = 0.0;
  double sweep = 0.0;
  /// Segments: index of the half-plane that produced the edge (Laguerre neighbor), -1 otherwise.
  int neighbor = -1;

  static BoundaryEdge segment(Vec2 a, Vec2 b, int neighbor = -1) {
    return {Kind::Segment, a, b, 0.0, 0.0, neighbor};
  }
  static BoundaryEdge arc(double start, double sweep);
};

/// Region bounded by segments and unit-circle arcs, oriented counter-clockwise.
/// An empty edge list is the empty region.
struct ArcPolygon {
  std::vector<BoundaryEdge> edges;

  bool empty() const { return edges.empty(); }
  static ArcPolygon full_disk();
};

/// U_2-measure of the region, in closed form.
///
/// With u_2 = 1/(2 pi |x|) the measure is (1/2pi) dr dtheta in polar
/// coordinates, the exterior derivative of the bounded 1-form r dtheta. A
/// segment at signed distance h from the origin contributes
/// h [asinh(t/|h|)] along its arclength coordinate t; an arc contributes its
/// sweep. Throws GeometryError when the boundary is open or self-intersecting.
double cell_mass_u2(const ArcPolygon& cell);

/// Same integral without the simplicity validation (hot path of the solvers).
double u2_mass_unchecked(const ArcPolygon& cell);

/// First moment int x u_2(x) dx over the region, in closed form.
Vec2 u2_first_moment(const ArcPolygon& cell);

/// Line integral of u_2 along a segment: (1/2pi) [asinh(t/|h|)].
double u2_segment_integral(Vec2 a, Vec2 b);

/// Throws GeometryError unless the boundary is closed and its segments do not cross.
void validate_simple(const ArcPolygon& cell, double tol = 1e-12);

/// Largest distance between two boundary points (arcs are sampled).
double diameter(const ArcPolygon& cell);

/// Convex polygon with per-edge labels; edge k runs from vertices[k] to vertices[k+1].
struct ConvexPolygon {
  std::vector<Vec2> vertices;
  std::vector<int> labels;

  static ConvexPolygon square(double half_width);
  /// Keeps {x : <normal, x> <= offset}; the new edge gets the given label.
  void clip(Vec2 normal, double offset, int label);
  bool empty() const { return vertices.size() < 3; }
};

/// Intersection of a convex polygon with the closed unit disk.
ArcPolygon intersect_unit_disk(const ConvexPolygon& poly);

/// Signed area of a closed polyline (positive when counter-clockwise).
double signed_area(const std::vector<Vec2>& loop);

}  // namespace centerward
