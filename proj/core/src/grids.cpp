#include <cmath>
#include <numbers>

#include "centerward/entropic.hpp"
#include "centerward/errors.hpp"

namespace centerward {

double NodeSet::total_mass() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

double BallGrid::theta_step() const { return (dim == 2 ? 2.0 : 1.0) * std::numbers::pi / n_ang; }
double BallGrid::phi_step() const { return std::numbers::pi / n_ang; }

BallGrid build_ball_grid(int d, int n_r, int n_ang) {
  if (d != 2 && d != 3) throw DomainError("build_ball_grid: d must be 2 or 3");
  if (n_r < 2 || n_ang < 2) throw DomainError("build_ball_grid: n_r and n_ang must be >= 2");
  BallGrid grid;
  grid.dim = d;
  grid.n_r = n_r;
  grid.n_ang = n_ang;
  const std::size_t count = static_cast<std::size_t>(n_r) * grid.n_theta() * grid.n_phi();
  grid.nodes.points = PointSet(d, count);
  grid.nodes.masses.resize(count);
  grid.polar.resize(count);
  const double radial_mass = 1.0 / n_r;

  for (int k = 0; k < n_r; ++k) {
    const double r = grid.radius(k);
    if (d == 2) {
      for (int m = 0; m < n_ang; ++m) {
        const double th = m * grid.theta_step();
        const std::size_t idx = grid.index(k, m);
        auto p = grid.nodes.points[idx];
        p[0] = r * std::cos(th);
        p[1] = r * std::sin(th);
        grid.nodes.masses[idx] = radial_mass / n_ang;
        grid.polar[idx] = {r, th, 0.0};
      }
    } else {
      const double dth = grid.theta_step();
      for (int l = 0; l < n_ang; ++l) {
        const double lo = l * dth, hi = (l + 1) * dth;
        const double zone = 0.5 * (std::cos(lo) - std::cos(hi));
        const double th = (l + 0.5) * dth;
        for (int m = 0; m < grid.n_phi(); ++m) {
          const double ph = m * grid.phi_step();
          const std::size_t idx = grid.index(k, l, m);
          auto p = grid.nodes.points[idx];
          p[0] = r * std::sin(th) * std::cos(ph);
          p[1] = r * std::sin(th) * std::sin(ph);
          p[2] = r * std::cos(th);
          grid.nodes.masses[idx] = radial_mass * zone / grid.n_phi();
          grid.polar[idx] = {r, th, ph};
        }
      }
    }
  }
  return grid;
}

NodeSet target_from_sample(const PointSet& sample) {
  if (sample.empty()) throw DomainError("target_from_sample: empty sample");
  NodeSet t;
  t.points = sample;
  t.masses.assign(sample.size(), 1.0 / static_cast<double>(sample.size()));
  return t;
}

NodeSet target_grid(const Density& density, double radius, double spacing) {
  if (!(radius > 0.0) || !(spacing > 0.0)) throw DomainError("target_grid: radius and spacing must be positive");
  const int d = density.dim();
  const int half = static_cast<int>(std::floor(radius / spacing));
  const int side = 2 * half + 1;
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(side);

  NodeSet t;
  t.points.dim = d;
  std::vector<double> y(static_cast<std::size_t>(d));
  double sum = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int k = 0; k < d; ++k) {
      y[static_cast<std::size_t>(k)] = (static_cast<int>(rest % side) - half) * spacing;
      rest /= side;
    }
    if (norm(y) > radius) continue;
    const double p = density.eval(y);
    if (!(p > 0.0) || !std::isfinite(p)) continue;
    t.points.push_back(y);
    t.masses.push_back(p);
    sum += p;
  }
  if (t.masses.empty()) throw DomainError("target_grid: density vanishes on the grid");
  // Far-tail nodes can underflow once normalized; drop them.
  NodeSet kept;
  kept.points.dim = d;
  double kept_sum = 0.0;
  for (std::size_t i = 0; i < t.masses.size(); ++i) {
    if (!(t.masses[i] / sum > 1e-300)) continue;
    kept.points.push_back(t.points[i]);
    kept.masses.push_back(t.masses[i]);
    kept_sum += t.masses[i];
  }
  for (double& m : kept.masses) m /= kept_sum;
  return kept;
}

}  // namespace centerward
