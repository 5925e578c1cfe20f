#include "centerward/quantile.hpp"

#include "centerward/errors.hpp"

namespace centerward {

const char* backend_name(Backend b) { return b == Backend::Semidiscrete ? "semidiscrete" : "entropic"; }

QuantileMap QuantileMap::from_semidiscrete(DiscreteTarget target, AscentResult result) {
  if (result.potential.psi.size() != target.size()) throw StateError("potential does not match the target");
  QuantileMap m;
  m.semi_ = std::make_shared<SemidiscreteSolution>(SemidiscreteSolution{std::move(target), std::move(result)});
  return m;
}

QuantileMap QuantileMap::from_entropic(BallGrid grid, GridCoupling coupling) {
  if (coupling.source.size() != grid.nodes.size()) throw StateError("coupling source is not the ball grid");
  auto sol = std::make_shared<EntropicSolution>();
  sol->forward_table = barycentric_map(coupling, MapDirection::SourceToTarget);
  sol->grid = std::move(grid);
  sol->coupling = std::move(coupling);
  QuantileMap m;
  m.interp_ = std::make_shared<PolarInterpolator>(sol->grid, sol->forward_table);
  m.ent_ = std::move(sol);
  return m;
}

Backend QuantileMap::backend() const {
  if (!solved()) throw StateError("quantile map is not solved");
  return semi_ ? Backend::Semidiscrete : Backend::Entropic;
}

int QuantileMap::dim() const {
  if (!solved()) throw StateError("quantile map is not solved");
  return semi_ ? 2 : ent_->grid.dim;
}

std::vector<double> QuantileMap::forward(std::span<const double> x) const {
  if (!solved()) throw StateError("quantile map is not solved");
  if (static_cast<int>(x.size()) != dim()) throw DomainError("forward: dimension mismatch");
  const double r = norm(x);
  if (r == 0.0 || r >= 1.0) throw DomainError("forward: need 0 < |x| < 1");
  if (semi_) {
    const Vec2 y = evaluate_map(semi_->target, semi_->result.potential.psi, Vec2{x[0], x[1]});
    return {y.x, y.y};
  }
  return (*interp_)(x);
}

std::vector<double> QuantileMap::inverse(std::span<const double> y) const {
  if (!solved()) throw StateError("quantile map is not solved");
  if (!ent_) throw StateError("inverse: the semidiscrete backend only provides F on atoms");
  return entropic_inverse(ent_->coupling, y);
}

double QuantileMap::epsilon() const {
  if (!solved()) throw StateError("quantile map is not solved");
  return ent_ ? ent_->coupling.epsilon : 0.0;
}

nlohmann::json QuantileMap::metadata() const {
  if (!solved()) throw StateError("quantile map is not solved");
  nlohmann::json j;
  j["backend"] = backend_name(backend());
  if (semi_) {
    j["atoms"] = semi_->target.size();
    j["iterations"] = semi_->result.iterations;
    j["mass_residual"] = semi_->result.residual;
  } else {
    j["dim"] = ent_->grid.dim;
    j["n_r"] = ent_->grid.n_r;
    j["n_ang"] = ent_->grid.n_ang;
    j["target_nodes"] = ent_->coupling.target.size();
    j["epsilon"] = ent_->coupling.epsilon;
    j["iterations"] = ent_->coupling.iterations;
    j["marginal_err"] = ent_->coupling.marginal_err;
    j["flagged_nodes"] = ent_->forward_table.flagged.size();
  }
  return j;
}

const SemidiscreteSolution& QuantileMap::semidiscrete() const {
  if (!semi_) throw StateError("not a semidiscrete solution");
  return *semi_;
}

const EntropicSolution& QuantileMap::entropic() const {
  if (!ent_) throw StateError("not an entropic solution");
  return *ent_;
}

}  // namespace centerward
