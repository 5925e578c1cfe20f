#pragma once

// Small solved maps shared by the unit tests.

#include <string>

#include "centerward/entropic.hpp"
#include "centerward/quantile.hpp"
#include "centerward/semidiscrete.hpp"

namespace fixtures {

inline centerward::QuantileMap entropic_map(const std::string& density = "gaussian", int n_r = 16, int n_ang = 32,
                                            double eps = 0.01) {
  using namespace centerward;
  const auto p = builtin_density(density);
  BallGrid grid = build_ball_grid(2, n_r, n_ang);
  const NodeSet target = target_grid(*p, p->support_radius(1e-3), 0.15);
  SinkhornOptions opt;
  opt.epsilons = {0.1, 0.03, eps};
  opt.tol = 1e-8;
  GridCoupling cp = sinkhorn_solve(grid.nodes, target, opt);
  return QuantileMap::from_entropic(std::move(grid), std::move(cp));
}

inline centerward::QuantileMap semidiscrete_map(const std::string& density = "gaussian", std::size_t n = 64) {
  using namespace centerward;
  const PointSet s = builtin_density(density)->quasi_sample(n);
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({s[i][0], s[i][1]});
  DiscreteTarget t = DiscreteTarget::uniform(std::move(pts));
  AscentResult r = dual_ascent(t);
  return QuantileMap::from_semidiscrete(std::move(t), std::move(r));
}

}  // namespace fixtures
