#include <algorithm>
#include <cmath>
#include <numbers>

#include "centerward/errors.hpp"
#include "centerward/quantile.hpp"

namespace centerward {
namespace {

/// Orientation sign with a relative dead zone.
int orient(Vec2 p, Vec2 q, Vec2 r, double slack) {
  const Vec2 u = q - p, v = r - p;
  const double o = cross(u, v);
  const double scale = norm(u) * norm(v);
  if (std::abs(o) <= slack * scale) return 0;
  return o > 0 ? 1 : -1;
}

bool within_box(Vec2 p, Vec2 q, Vec2 r) {
  return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
         r.y <= std::max(p.y, q.y);
}

bool segments_meet(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double slack) {
  const int o1 = orient(a, b, c, slack), o2 = orient(a, b, d, slack);
  const int o3 = orient(c, d, a, slack), o4 = orient(c, d, b, slack);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && within_box(a, b, c)) return true;
  if (o2 == 0 && within_box(a, b, d)) return true;
  if (o3 == 0 && within_box(c, d, a)) return true;
  if (o4 == 0 && within_box(c, d, b)) return true;
  return false;
}

double diameter_of(const std::vector<Vec2>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, norm(pts[i] - pts[j]));
  return best;
}

}  // namespace

Contour extract_contour(const QuantileMap& map, double r, int M) {
  if (!map.solved()) throw StateError("extract_contour: map is not solved");
  if (map.dim() != 2) throw DomainError("extract_contour: contours are extracted in d = 2 only");
  if (!(r > 0.0 && r < 1.0)) throw DomainError("extract_contour: r must lie in (0, 1)");
  if (M < 8) throw DomainError("extract_contour: M must be >= 8");
  Contour c;
  c.r = r;
  c.vertices.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    const double th = 2.0 * std::numbers::pi * m / M;
    const double x[2] = {r * std::cos(th), r * std::sin(th)};
    const auto y = map.forward(x);
    c.vertices.push_back({y[0], y[1]});
  }
  return c;
}

double loop_area(const std::vector<Vec2>& loop) {
  double s = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) s += cross(loop[i], loop[(i + 1) % loop.size()]);
  return 0.5 * std::abs(s);
}

int winding_number(const std::vector<Vec2>& loop, Vec2 p) {
  int w = 0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = loop[i], b = loop[(i + 1) % n];
    const double side = cross(b - a, p - a);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++w;
    } else if (b.y <= p.y && side < 0) {
      --w;
    }
  }
  return w;
}

std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(const std::vector<Vec2>& loop,
                                                                          double slack) {
  const std::size_t n = loop.size();
  if (n < 3) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = loop[i], b = loop[(i + 1) % n];
    if (a == b) return std::make_pair(i, i);
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // neighbors through the closing edge
      if (segments_meet(a, b, loop[j], loop[(j + 1) % n], slack)) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

NestednessReport nestedness_check(std::vector<Contour> contours) {
  std::stable_sort(contours.begin(), contours.end(), [](const Contour& a, const Contour& b) { return a.r < b.r; });
  NestednessReport rep;
  for (const auto& c : contours) {
    LoopCheck lc;
    lc.r = c.r;
    lc.crossing = find_self_intersection(c.vertices);
    lc.simple = c.closed && !lc.crossing;
    lc.area = loop_area(c.vertices);
    rep.pass = rep.pass && lc.simple;
    rep.loops.push_back(lc);
  }
  for (std::size_t a = 0; a < contours.size(); ++a) {
    for (std::size_t b = a + 1; b < contours.size(); ++b) {
      PairCheck pc;
      pc.inner = a;
      pc.outer = b;
      for (const Vec2& v : contours[a].vertices) {
        if (winding_number(contours[b].vertices, v) == 0) {
          pc.nested = false;
          pc.witness = v;
          break;
        }
      }
      pc.area_increasing = rep.loops[a].area < rep.loops[b].area;
      rep.pass = rep.pass && pc.nested && pc.area_increasing;
      rep.pairs.push_back(pc);
    }
  }
  return rep;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i - 1] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

KEstimate estimate_k(const QuantileMap& map, const std::vector<double>& radii, int M) {
  if (radii.empty()) throw DomainError("estimate_k: no radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] < 1.0)) throw DomainError("estimate_k: radii must lie in (0, 1)");
    if (i && !(radii[i] < radii[i - 1])) throw DomainError("estimate_k: radii must be decreasing");
  }
  KEstimate k;
  k.radii = radii;
  std::vector<Vec2> innermost;
  for (double r : radii) {
    Contour c = extract_contour(map, r, M);
    k.diameters.push_back(diameter_of(c.vertices));
    innermost = std::move(c.vertices);
  }
  for (std::size_t i = 1; i < k.diameters.size(); ++i) k.decreasing = k.decreasing && k.diameters[i] < k.diameters[i - 1];
  k.hull_vertices = convex_hull(innermost);
  k.hull_area = k.hull_vertices.size() >= 3 ? loop_area(k.hull_vertices) : 0.0;
  return k;
}

ErrorStats error_stats(std::vector<double> v) {
  ErrorStats s;
  s.count = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  const std::size_t n = v.size();
  s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  s.p90 = v[static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(n - 1)))];
  s.max = v.back();
  return s;
}

ErrorStats roundtrip_error(const QuantileMap& map, const PointSet& probes) {
  if (!map.has_inverse()) throw StateError("roundtrip_error: map has no inverse");
  std::vector<double> errs;
  errs.reserve(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto x = probes[i];
    const double r = norm(x);
    if (r == 0.0 || r >= 1.0) throw DomainError("roundtrip_error: probes must satisfy 0 < |x| < 1");
    const auto y = map.forward(x);
    const auto back = map.inverse(y);
    errs.push_back(std::sqrt(squared_distance(back, x)));
  }
  return error_stats(std::move(errs));
}

}  // namespace centerward
