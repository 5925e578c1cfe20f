#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "centerward/geometry.hpp"
#include "centerward/measures.hpp"

namespace centerward {

/// Discrete probability measure sum_i nu_i delta_{y_i} on R^2.
struct DiscreteTarget {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  /// Equal weights 1/n.
  static DiscreteTarget uniform(std::vector<Vec2> points);
  /// Throws ConfigError on empty input, negative weights or a total off 1 by more than 1e-12.
  void validate() const;
};

/// Reads `y1,y2[,weight]` rows (header optional, LF or CRLF). Weights are
/// renormalized; missing weights default to equal. Throws ConfigError with the
/// offending line number.
DiscreteTarget read_target_csv(std::istream& in);
DiscreteTarget read_target_csv(const std::string& path);

/// Semidiscrete dual weights. psi_i plays the role of the Legendre transform
/// phi*(y_i); phi(x) = max_i <x, y_i> - psi_i.
struct DualPotential {
  std::vector<double> psi;
};

struct LaguerreCell {
  ArcPolygon region;
  double mass = 0.0;   // U_2 mass
  Vec2 moment;         // int x dU_2 over the cell
};

/// Laguerre (power) diagram of the unit disk:
/// Lag_i = {x in B_1 : <x,y_i> - psi_i >= <x,y_j> - psi_j for all j}.
struct LaguerreDiagram {
  std::vector<LaguerreCell> cells;

  double total_mass() const;
  double min_mass() const;
};

/// Builds every cell by clipping the disk with the n-1 bisecting half-planes.
/// Throws GeometryError on duplicate atoms.
LaguerreDiagram build_laguerre(const DiscreteTarget& target, std::span<const double> psi);

/// Concave Kantorovich dual D(psi) = -int phi dU_2 - sum_i nu_i psi_i.
/// Its gradient is (mass_i - nu_i).
double dual_objective(const DiscreteTarget& target, const LaguerreDiagram& diagram, std::span<const double> psi);

struct AscentOptions {
  double mass_tol = 1e-7;
  int max_iter = 100;
  /// Optional observer called after every accepted iterate.
  std::function<void(int iteration, double residual, double objective, double mass_sum, bool newton)> observer;
};

struct AscentResult {
  DualPotential potential;
  LaguerreDiagram diagram;
  int iterations = 0;
  double residual = 0.0;  // max_i |mass_i - nu_i|
  std::vector<double> objective_trace;
  std::vector<double> mass_sum_trace;
};

/// Maximizes the semidiscrete dual from U_2 to the target by damped Newton
/// (Hessian from shared-edge integrals of u_2) with a backtracking gradient
/// fallback whenever some cell is nearly empty. psi_0 is pinned to 0.
/// Throws ConvergenceError when max_iter is exhausted.
AscentResult dual_ascent(const DiscreteTarget& target, const AscentOptions& options = {});

/// Index of the Laguerre cell containing x (lowest index on ties).
std::size_t locate_cell(const DiscreteTarget& target, std::span<const double> psi, Vec2 x);

/// Q(x) = y_i for x in Lag_i. Throws DomainError for |x| >= 1.
Vec2 evaluate_map(const DiscreteTarget& target, std::span<const double> psi, Vec2 x);

/// F(y_i) as the U_2-barycenter of Lag_i; nullopt for cells lighter than mass_floor.
std::vector<std::optional<Vec2>> f_plusminus_on_atoms(const LaguerreDiagram& diagram, double mass_floor = 1e-14);

}  // namespace centerward
