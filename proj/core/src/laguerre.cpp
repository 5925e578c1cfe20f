#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "centerward/errors.hpp"
#include "centerward/semidiscrete.hpp"

namespace centerward {

DiscreteTarget DiscreteTarget::uniform(std::vector<Vec2> points) {
  DiscreteTarget t;
  t.weights.assign(points.size(), points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size()));
  t.points = std::move(points);
  return t;
}

void DiscreteTarget::validate() const {
  if (points.empty()) throw ConfigError("discrete target: no atoms");
  if (weights.size() != points.size()) throw ConfigError("discrete target: one weight per atom required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("discrete target: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("discrete target: weights must sum to 1");
}

DiscreteTarget read_target_csv(std::istream& in) {
  const WeightedSample w = read_weighted_csv(in, 2);
  DiscreteTarget t;
  for (std::size_t i = 0; i < w.points.size(); ++i) t.points.push_back({w.points[i][0], w.points[i][1]});
  t.weights = w.weights;
  return t;
}

DiscreteTarget read_target_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open csv '" + path + "'");
  return read_target_csv(in);
}

double LaguerreDiagram::total_mass() const {
  double s = 0.0;
  for (const auto& c : cells) s += c.mass;
  return s;
}

double LaguerreDiagram::min_mass() const {
  double m = cells.empty() ? 0.0 : cells.front().mass;
  for (const auto& c : cells) m = std::min(m, c.mass);
  return m;
}

LaguerreDiagram build_laguerre(const DiscreteTarget& target, std::span<const double> psi) {
  const std::size_t n = target.size();
  if (n == 0) throw GeometryError("build_laguerre: no atoms");
  if (psi.size() != n) throw GeometryError("build_laguerre: one weight per atom required");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Vec2 p = target.points[a], q = target.points[b];
    return p.x < q.x || (p.x == q.x && p.y < q.y);
  });
  for (std::size_t k = 1; k < n; ++k) {
    if (target.points[order[k]] == target.points[order[k - 1]])
      throw GeometryError("build_laguerre: duplicate atoms " + std::to_string(order[k - 1]) + " and " +
                          std::to_string(order[k]));
  }

  LaguerreDiagram diagram;
  diagram.cells.resize(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    ConvexPolygon poly = ConvexPolygon::square(1.5);
    const Vec2 yi = target.points[i];
    for (std::size_t j = 0; j < n && !poly.empty(); ++j) {
      if (j == i) continue;
      // <x, y_j - y_i> <= psi_j - psi_i
      poly.clip(target.points[j] - yi, psi[j] - psi[i], static_cast<int>(j));
    }
    LaguerreCell& cell = diagram.cells[i];
    cell.region = intersect_unit_disk(poly);
    cell.mass = u2_mass_unchecked(cell.region);
    cell.moment = u2_first_moment(cell.region);
  }
  return diagram;
}

double dual_objective(const DiscreteTarget& target, const LaguerreDiagram& diagram, std::span<const double> psi) {
  double d = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto& c = diagram.cells[i];
    d -= dot(target.points[i], c.moment) - psi[i] * c.mass;
    d -= target.weights[i] * psi[i];
  }
  return d;
}

std::size_t locate_cell(const DiscreteTarget& target, std::span<const double> psi, Vec2 x) {
  std::size_t best = 0;
  double best_score = dot(x, target.points[0]) - psi[0];
  for (std::size_t i = 1; i < target.size(); ++i) {
    const double s = dot(x, target.points[i]) - psi[i];
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

Vec2 evaluate_map(const DiscreteTarget& target, std::span<const double> psi, Vec2 x) {
  if (!(norm(x) < 1.0)) throw DomainError("evaluate_map: x must lie in the open unit disk");
  return target.points[locate_cell(target, psi, x)];
}

std::vector<std::optional<Vec2>> f_plusminus_on_atoms(const LaguerreDiagram& diagram, double mass_floor) {
  std::vector<std::optional<Vec2>> out;
  out.reserve(diagram.cells.size());
  for (const auto& c : diagram.cells) {
    if (c.mass < mass_floor) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(c.moment / c.mass);
    }
  }
  return out;
}

}  // namespace centerward
