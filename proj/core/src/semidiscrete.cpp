#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "centerward/errors.hpp"
#include "centerward/semidiscrete.hpp"

namespace centerward {
namespace {

struct Iterate {
  std::vector<double> psi;
  LaguerreDiagram diagram;
  std::vector<double> gradient;  // mass_i - nu_i
  double residual = 0.0;
  double objective = 0.0;
};

Iterate evaluate(const DiscreteTarget& target, std::vector<double> psi) {
  Iterate it;
  it.diagram = build_laguerre(target, psi);
  it.gradient.resize(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    it.gradient[i] = it.diagram.cells[i].mass - target.weights[i];
    it.residual = std::max(it.residual, std::abs(it.gradient[i]));
  }
  it.objective = dual_objective(target, it.diagram, psi);
  it.psi = std::move(psi);
  return it;
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Graph Laplacian L = -Hess D: L_ij = -w_ij, L_ii = sum_j w_ij with
/// w_ij = int_{facet ij} u_2 / |y_i - y_j|. Row/column 0 removed (psi_0 pinned).
Eigen::SparseMatrix<double> reduced_laplacian(const DiscreteTarget& target, const LaguerreDiagram& diagram,
                                              double& max_diagonal) {
  const auto n = static_cast<int>(target.size());
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (const auto& e : diagram.cells[static_cast<std::size_t>(i)].region.edges) {
      if (e.kind != BoundaryEdge::Kind::Segment || e.neighbor < 0) continue;
      const int j = e.neighbor;
      const double w = u2_segment_integral(e.from, e.to) /
                       norm(target.points[static_cast<std::size_t>(i)] - target.points[static_cast<std::size_t>(j)]);
      // Each facet is seen from both sides; average the two evaluations.
      diag[static_cast<std::size_t>(i)] += 0.5 * w;
      diag[static_cast<std::size_t>(j)] += 0.5 * w;
      if (i > 0 && j > 0) {
        triplets.emplace_back(i - 1, j - 1, -0.5 * w);
        triplets.emplace_back(j - 1, i - 1, -0.5 * w);
      }
    }
  }
  max_diagonal = 0.0;
  for (int i = 1; i < n; ++i) {
    triplets.emplace_back(i - 1, i - 1, diag[static_cast<std::size_t>(i)]);
    max_diagonal = std::max(max_diagonal, diag[static_cast<std::size_t>(i)]);
  }
  Eigen::SparseMatrix<double> L(n - 1, n - 1);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

constexpr double kObjectiveSlack = 1e-13;

}  // namespace

AscentResult dual_ascent(const DiscreteTarget& target, const AscentOptions& options) {
  target.validate();
  if (!(options.mass_tol > 0.0)) throw DomainError("dual_ascent: mass_tol must be positive");
  const std::size_t n = target.size();

  // Start from the Voronoi diagram of the atoms shrunk into the disk: every
  // cell then contains its own (scaled) site and is nonempty.
  double rmax = 0.0;
  for (const auto& p : target.points) rmax = std::max(rmax, norm(p));
  const double shrink = rmax > 0.0 ? 0.5 / rmax : 1.0;
  std::vector<double> psi0(n);
  for (std::size_t i = 0; i < n; ++i) psi0[i] = 0.5 * shrink * dot(target.points[i], target.points[i]);
  const double ref = psi0[0];
  for (double& v : psi0) v -= ref;

  double nu_min = std::numeric_limits<double>::infinity();
  for (double w : target.weights) nu_min = std::min(nu_min, w);

  AscentResult result;
  Iterate cur = evaluate(target, std::move(psi0));
  // Damped Newton keeps every cell above half the smaller of the initial
  // minimum cell mass and the smallest target weight.
  const double newton_floor = 0.5 * std::min(cur.diagram.min_mass(), nu_min);
  double grad_step = 0.0;

  for (int iter = 0;; ++iter) {
    result.objective_trace.push_back(cur.objective);
    result.mass_sum_trace.push_back(cur.diagram.total_mass());
    if (cur.residual <= options.mass_tol || n == 1) {
      result.iterations = iter;
      break;
    }
    if (iter >= options.max_iter) {
      throw ConvergenceError("dual_ascent: no convergence after " + std::to_string(iter) +
                                 " iterations, worst mass residual " + std::to_string(cur.residual),
                             cur.residual, iter);
    }

    double max_diag = 0.0;
    const Eigen::SparseMatrix<double> L = reduced_laplacian(target, cur.diagram, max_diag);
    bool accepted = false;
    bool newton = false;

    if (cur.diagram.min_mass() >= newton_floor) {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
      if (solver.info() == Eigen::Success) {
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n - 1));
        for (std::size_t i = 1; i < n; ++i) rhs(static_cast<Eigen::Index>(i - 1)) = cur.gradient[i];
        const Eigen::VectorXd step = solver.solve(rhs);
        if (solver.info() == Eigen::Success && step.allFinite()) {
          const double g0 = l2(cur.gradient);
          for (double tau = 1.0; tau > 1e-10; tau *= 0.5) {
            std::vector<double> trial = cur.psi;
            for (std::size_t i = 1; i < n; ++i) trial[i] += tau * step(static_cast<Eigen::Index>(i - 1));
            Iterate next = evaluate(target, std::move(trial));
            if (next.diagram.min_mass() >= newton_floor && l2(next.gradient) <= (1.0 - 0.5 * tau) * g0 &&
                next.objective >= cur.objective - kObjectiveSlack) {
              cur = std::move(next);
              accepted = newton = true;
              break;
            }
          }
        }
      }
    }

    if (!accepted) {
      // Guarded gradient ascent with Armijo backtracking on D.
      if (grad_step <= 0.0) grad_step = max_diag > 0.0 ? 1.0 / max_diag : 1.0;
      const double g2 = l2(cur.gradient) * l2(cur.gradient);  // includes cell 0
      for (double eta = 2.0 * grad_step; eta > 1e-16; eta *= 0.5) {
        // Step in the full space, then restore the gauge. Stepping only
        // psi_1..psi_{n-1} starves cell 0 when it is the one that must grow.
        std::vector<double> trial = cur.psi;
        for (std::size_t i = 0; i < n; ++i) trial[i] += eta * cur.gradient[i];
        const double shift = trial[0];
        for (double& v : trial) v -= shift;
        Iterate next = evaluate(target, std::move(trial));
        if (next.objective >= cur.objective + 0.25 * eta * g2 - kObjectiveSlack && next.diagram.min_mass() > 0.0) {
          cur = std::move(next);
          grad_step = eta;
          accepted = true;
          break;
        }
      }
    }

    if (!accepted) {
      throw ConvergenceError("dual_ascent: line search failed, worst mass residual " + std::to_string(cur.residual),
                             cur.residual, iter);
    }
    if (options.observer)
      options.observer(iter + 1, cur.residual, cur.objective, cur.diagram.total_mass(), newton);
  }

  result.potential.psi = std::move(cur.psi);
  result.diagram = std::move(cur.diagram);
  result.residual = cur.residual;
  return result;
}

}  // namespace centerward
