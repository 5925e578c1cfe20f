#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "centerward/measures.hpp"
#include "centerward/point_set.hpp"

namespace centerward {

/// Weighted point cloud; masses sum to 1.
struct NodeSet {
  PointSet points;
  std::vector<double> masses;

  std::size_t size() const { return masses.size(); }
  int dim() const { return points.dim; }
  double total_mass() const;
};

/// Product (polar / spherical) discretization of U_d, d in {2, 3}.
///
/// Radial cells [k/n_r, (k+1)/n_r] carry mass 1/n_r each because U_d(B_r) = r;
/// nodes sit at the radial midpoints, never at the origin. In d = 2 the n_ang
/// angles are theta_m = 2 pi m / n_ang. In d = 3 there are n_ang polar bands of
/// equal angle (band mass proportional to the spherical zone area) times
/// 2 n_ang azimuths phi_m = pi m / n_ang. Node index is
/// (k * n_theta + l) * n_phi + m with n_phi = 1 in d = 2.
struct BallGrid {
  int dim = 2;
  int n_r = 0;
  int n_ang = 0;
  NodeSet nodes;
  /// Spherical coordinates per node: (r, theta) in d = 2, (r, polar, azimuth) in d = 3.
  std::vector<std::array<double, 3>> polar;

  int n_theta() const { return n_ang; }
  int n_phi() const { return dim == 3 ? 2 * n_ang : 1; }
  std::size_t index(int k, int l, int m = 0) const {
    return (static_cast<std::size_t>(k) * n_theta() + static_cast<std::size_t>(l)) * n_phi() + static_cast<std::size_t>(m);
  }
  double radius(int k) const { return (k + 0.5) / n_r; }
  double theta_step() const;
  double phi_step() const;
};

BallGrid build_ball_grid(int d, int n_r, int n_ang);

/// Target discretizations.
NodeSet target_from_sample(const PointSet& sample);
/// Regular grid of the given spacing on B_R with masses proportional to p;
/// nodes where p vanishes are dropped.
NodeSet target_grid(const Density& density, double radius, double spacing);

struct SinkhornStage {
  double epsilon = 0.0;
  int iterations = 0;
  double marginal_err = 0.0;
  bool dense = false;
  std::size_t support = 0;
  int rebuilds = 0;
  std::vector<double> dual_trace;
};

/// Entropic coupling pi_ij = a_i b_j exp((f_i + g_j - c_ij) / eps), c = |x - y|^2 / 2,
/// stored through its log-domain dual potentials.
struct GridCoupling {
  NodeSet source;
  NodeSet target;
  double epsilon = 0.0;
  std::vector<double> f;
  std::vector<double> g;
  double marginal_err = 0.0;
  int iterations = 0;
  std::vector<SinkhornStage> stages;

  double log_plan(std::size_t i, std::size_t j) const;
  /// Dual objective sum a f + sum b g - eps sum pi + eps.
  double dual_objective() const;
  /// Largest |column sum - b_j| and |row sum - a_i| of the implied plan.
  std::array<double, 2> marginal_violation() const;
};

struct SinkhornOptions {
  std::vector<double> epsilons = {0.1, 0.03, 0.01, 0.003, 0.001};
  double tol = 1e-6;
  /// Total iteration budget over all stages.
  int max_iter = 20000;
  /// Intermediate stages stop at tol * this factor.
  double intermediate_tol_factor = 10.0;
  /// Entries with (f_i + g_j - c_ij)/eps < -truncation are skipped.
  double truncation = 50.0;
  /// Above this many retained entries (12 bytes each) a stage recomputes the kernel on the fly.
  std::size_t dense_limit = 160'000'000;
  /// Optional warm start for the target potential g.
  std::vector<double> initial_target_potential;
  std::function<void(const std::string&)> log;
};

/// Log-domain Sinkhorn with an epsilon schedule and warm starts. Stops when
/// the largest column-marginal violation (rows are exact after each row
/// update) drops below tol at the final epsilon. Throws ConvergenceError when
/// the iteration budget runs out.
GridCoupling sinkhorn_solve(const NodeSet& source, const NodeSet& target, const SinkhornOptions& options = {});

enum class MapDirection { SourceToTarget, TargetToSource };

/// Node-wise conditional means of a coupling.
struct MapTable {
  MapDirection direction = MapDirection::SourceToTarget;
  double epsilon = 0.0;
  PointSet nodes;
  PointSet images;
  /// Nodes whose row of the plan carries (numerically) no mass.
  std::vector<std::size_t> flagged;
};

/// sum_j pi_ij y_j / sum_j pi_ij for every source node (approximates Q),
/// or the transposed version on target nodes (approximates F).
MapTable barycentric_map(const GridCoupling& coupling, MapDirection direction);

/// Out-of-sample conditional mean through the source potential:
/// F(y) = sum_i a_i e^{(f_i - c(x_i, y))/eps} x_i / sum_i a_i e^{(f_i - c(x_i, y))/eps}.
std::vector<double> entropic_inverse(const GridCoupling& coupling, std::span<const double> y);
/// Same through the target potential; approximates Q off the grid.
std::vector<double> entropic_forward(const GridCoupling& coupling, std::span<const double> x);

/// Bilinear (d = 2) / trilinear (d = 3) blending of a forward map table over
/// the polar grid; radii outside the node range are clamped to the first/last ring.
class PolarInterpolator {
 public:
  PolarInterpolator(const BallGrid& grid, const MapTable& table);
  std::vector<double> operator()(std::span<const double> x) const;

 private:
  int dim_, n_r_, n_theta_, n_phi_;
  PointSet images_;
};

struct MaResidualField {
  std::vector<double> radii;       // per evaluated node
  std::vector<double> determinant; // finite-difference det(grad Q)
  std::vector<double> residual;    // |det * p(Q) / u_d - 1|
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;
  /// Mean determinant per radial ring inside the annulus.
  std::vector<std::pair<double, double>> ring_determinant;

  /// Linear interpolation of ring_determinant at radius r.
  double determinant_at(double r) const;
};

/// Central finite differences of the forward table in polar coordinates over
/// nodes with r_lo <= r <= r_hi. Throws DomainError unless 0 < r_lo < r_hi < 1.
MaResidualField ma_residual_field(const MapTable& table, const Density& density, const BallGrid& grid, double r_lo,
                                  double r_hi);

/// Writes the dense plan as CSV (one row per source node). Throws ConfigError
/// when N * M exceeds max_entries.
void write_coupling_csv(const GridCoupling& coupling, std::ostream& out, std::size_t max_entries = 1'000'000);

}  // namespace centerward
