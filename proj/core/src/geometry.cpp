#include "centerward/geometry.hpp"

#include <algorithm>
#include <numbers>

#include "centerward/errors.hpp"

namespace centerward {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvTwoPi = 1.0 / kTwoPi;
constexpr double kTinyDistance = 1e-300;

Vec2 on_circle(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Line data of segment a->b relative to the origin: unit direction, signed
/// distance h = cross(a, dir) and arclength coordinates of the endpoints.
struct LineFrame {
  Vec2 dir;
  double h = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  bool degenerate = false;
};

LineFrame frame(Vec2 a, Vec2 b) {
  LineFrame f;
  const Vec2 d = b - a;
  const double len = norm(d);
  if (len == 0.0) {
    f.degenerate = true;
    return f;
  }
  f.dir = d / len;
  f.h = cross(a, f.dir);
  f.t0 = dot(a, f.dir);
  f.t1 = dot(b, f.dir);
  return f;
}

double asinh_span(const LineFrame& f) {
  const double ah = std::max(std::abs(f.h), kTinyDistance);
  return std::asinh(f.t1 / ah) - std::asinh(f.t0 / ah);
}

/// int r dtheta along the segment.
double segment_angular_term(Vec2 a, Vec2 b) {
  const LineFrame f = frame(a, b);
  if (f.degenerate || f.h == 0.0) return 0.0;
  return f.h * asinh_span(f);
}

Vec2 segment_moment_term(Vec2 a, Vec2 b) {
  const LineFrame f = frame(a, b);
  if (f.degenerate || f.h == 0.0) return {};
  const Vec2 foot = a - f.t0 * f.dir;
  return 0.5 * f.h * (asinh_span(f) * foot + (norm(b) - norm(a)) * f.dir);
}

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2, double tol) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

}  // namespace

BoundaryEdge BoundaryEdge::arc(double start, double sweep) {
  BoundaryEdge e;
  e.kind = Kind::Arc;
  e.start_angle = start;
  e.sweep = sweep;
  e.from = on_circle(start);
  e.to = on_circle(start + sweep);
  return e;
}

ArcPolygon ArcPolygon::full_disk() { return {{BoundaryEdge::arc(0.0, kTwoPi)}}; }

double u2_mass_unchecked(const ArcPolygon& cell) {
  double acc = 0.0;
  for (const auto& e : cell.edges) {
    acc += e.kind == BoundaryEdge::Kind::Arc ? e.sweep : segment_angular_term(e.from, e.to);
  }
  return acc * kInvTwoPi;
}

double cell_mass_u2(const ArcPolygon& cell) {
  validate_simple(cell);
  return u2_mass_unchecked(cell);
}

Vec2 u2_first_moment(const ArcPolygon& cell) {
  Vec2 acc;
  for (const auto& e : cell.edges) {
    if (e.kind == BoundaryEdge::Kind::Arc) {
      const double a = e.start_angle, b = e.start_angle + e.sweep;
      acc += Vec2{0.5 * (std::sin(b) - std::sin(a)), -0.5 * (std::cos(b) - std::cos(a))};
    } else {
      acc += segment_moment_term(e.from, e.to);
    }
  }
  return kInvTwoPi * acc;
}

double u2_segment_integral(Vec2 a, Vec2 b) {
  const LineFrame f = frame(a, b);
  if (f.degenerate) return 0.0;
  return kInvTwoPi * asinh_span(f);
}

void validate_simple(const ArcPolygon& cell, double tol) {
  const auto& edges = cell.edges;
  const std::size_t n = edges.size();
  if (n == 0) return;
  constexpr double kJoinTol = 1e-9;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& e = edges[k];
    const auto& next = edges[(k + 1) % n];
    if (norm(e.to - next.from) > kJoinTol) throw GeometryError("cell boundary is not closed");
    if (norm(e.from) > 1.0 + kJoinTol) throw GeometryError("cell boundary leaves the unit disk");
    if (e.kind == BoundaryEdge::Kind::Arc && !(e.sweep > 0.0 && e.sweep <= kTwoPi + tol))
      throw GeometryError("arc sweep must lie in (0, 2 pi]");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (edges[i].kind != BoundaryEdge::Kind::Segment) continue;
    for (std::size_t j = i + 2; j < n; ++j) {
      if (edges[j].kind != BoundaryEdge::Kind::Segment) continue;
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(edges[i].from, edges[i].to, edges[j].from, edges[j].to, tol))
        throw GeometryError("cell boundary is self-intersecting");
    }
  }
}

double diameter(const ArcPolygon& cell) {
  std::vector<Vec2> pts;
  for (const auto& e : cell.edges) {
    pts.push_back(e.from);
    if (e.kind == BoundaryEdge::Kind::Arc) {
      constexpr int kSamples = 64;
      for (int s = 1; s < kSamples; ++s) pts.push_back(on_circle(e.start_angle + e.sweep * s / kSamples));
    }
  }
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, norm(pts[i] - pts[j]));
  return best;
}

ConvexPolygon ConvexPolygon::square(double w) {
  return {{{-w, -w}, {w, -w}, {w, w}, {-w, w}}, {-1, -1, -1, -1}};
}

void ConvexPolygon::clip(Vec2 normal, double offset, int label) {
  const std::size_t n = vertices.size();
  if (n == 0) return;
  std::vector<Vec2> out_v;
  std::vector<int> out_l;
  out_v.reserve(n + 1);
  out_l.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 cur = vertices[k];
    const Vec2 nxt = vertices[(k + 1) % n];
    const double dc = dot(normal, cur) - offset;
    const double dn = dot(normal, nxt) - offset;
    if (dc <= 0.0) {
      out_v.push_back(cur);
      out_l.push_back(labels[k]);
      if (dn > 0.0) {
        out_v.push_back(cur + (dc / (dc - dn)) * (nxt - cur));
        out_l.push_back(label);
      }
    } else if (dn <= 0.0) {
      out_v.push_back(cur + (dc / (dc - dn)) * (nxt - cur));
      out_l.push_back(labels[k]);
    }
  }
  // Drop zero-length edges; the surviving vertex keeps the label of the edge it starts.
  for (std::size_t k = 0; k < out_v.size() && out_v.size() > 1;) {
    const std::size_t next = (k + 1) % out_v.size();
    if (norm(out_v[k] - out_v[next]) < 1e-15) {
      out_v.erase(out_v.begin() + static_cast<std::ptrdiff_t>(k));
      out_l.erase(out_l.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      ++k;
    }
  }
  if (out_v.size() < 3) {
    out_v.clear();
    out_l.clear();
  }
  vertices = std::move(out_v);
  labels = std::move(out_l);
}

ArcPolygon intersect_unit_disk(const ConvexPolygon& poly) {
  ArcPolygon out;
  if (poly.empty()) return out;

  struct Piece {
    Vec2 a, b;
    bool enters = false;  // a lies on the circle, coming from outside
    bool exits = false;   // b lies on the circle, leaving the disk
    int label = -1;
  };
  std::vector<Piece> pieces;

  const std::size_t n = poly.vertices.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = poly.vertices[k];
    const Vec2 b = poly.vertices[(k + 1) % n];
    const Vec2 d = b - a;
    // |a + s d|^2 = 1
    const double qa = dot(d, d);
    const double qb = 2.0 * dot(a, d);
    const double qc = dot(a, a) - 1.0;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (qa == 0.0 || disc <= 0.0) continue;
    const double sq = std::sqrt(disc);
    // Numerically stable roots.
    const double q = -0.5 * (qb + std::copysign(sq, qb));
    double s1 = q / qa, s2 = qc / q;
    if (s1 > s2) std::swap(s1, s2);
    const double lo = std::max(0.0, s1);
    const double hi = std::min(1.0, s2);
    if (hi - lo <= 0.0) continue;
    Piece p;
    p.a = lo == 0.0 ? a : a + lo * d;
    p.b = hi == 1.0 ? b : a + hi * d;
    if (norm(p.b - p.a) < 1e-15) continue;
    p.enters = lo > 0.0;
    p.exits = hi < 1.0;
    p.label = poly.labels[k];
    if (p.enters) p.a = p.a / norm(p.a);
    if (p.exits) p.b = p.b / norm(p.b);
    pieces.push_back(p);
  }

  if (pieces.empty()) {
    // Either the disk sits strictly inside the polygon or they are disjoint.
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 a = poly.vertices[k];
      const Vec2 b = poly.vertices[(k + 1) % n];
      if (cross(b - a, Vec2{} - a) < 0.0) return out;
    }
    return ArcPolygon::full_disk();
  }

  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const Piece& p = pieces[k];
    out.edges.push_back(BoundaryEdge::segment(p.a, p.b, p.label));
    if (p.exits) {
      const Piece& next = pieces[(k + 1) % pieces.size()];
      const double start = angle_of(p.b);
      double sweep = angle_of(next.a) - start;
      while (sweep < 0.0) sweep += kTwoPi;
      while (sweep > kTwoPi) sweep -= kTwoPi;
      if (sweep > 0.0) {
        BoundaryEdge arc = BoundaryEdge::arc(start, sweep);
        arc.from = p.b;
        arc.to = next.a;
        out.edges.push_back(arc);
      }
    }
  }
  return out;
}

double signed_area(const std::vector<Vec2>& loop) {
  double a = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k) a += cross(loop[k], loop[(k + 1) % loop.size()]);
  return 0.5 * a;
}

}  // namespace centerward
