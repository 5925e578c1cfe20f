#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "centerward/entropic.hpp"
#include "centerward/geometry.hpp"
#include "centerward/semidiscrete.hpp"

namespace centerward {

enum class Backend { Semidiscrete, Entropic };

const char* backend_name(Backend b);

struct SemidiscreteSolution {
  DiscreteTarget target;
  AscentResult result;
};

struct EntropicSolution {
  BallGrid grid;
  GridCoupling coupling;
  MapTable forward_table;
};

/// Center-outward quantile map Q and, where available, its inverse F,
/// backed by either solver. A default-constructed map is unsolved and every
/// evaluation throws StateError.
class QuantileMap {
 public:
  QuantileMap() = default;
  static QuantileMap from_semidiscrete(DiscreteTarget target, AscentResult result);
  /// Builds the forward table from the coupling; the coupling's source must be grid.nodes.
  static QuantileMap from_entropic(BallGrid grid, GridCoupling coupling);

  bool solved() const { return semi_ || ent_; }
  Backend backend() const;
  int dim() const;
  /// Q(x) for 0 < |x| < 1.
  std::vector<double> forward(std::span<const double> x) const;
  bool has_inverse() const { return static_cast<bool>(ent_); }
  /// F(y); entropic backend only.
  std::vector<double> inverse(std::span<const double> y) const;
  /// Final regularization; 0 for the semidiscrete backend.
  double epsilon() const;
  nlohmann::json metadata() const;

  const SemidiscreteSolution& semidiscrete() const;
  const EntropicSolution& entropic() const;

 private:
  std::shared_ptr<const SemidiscreteSolution> semi_;
  std::shared_ptr<const EntropicSolution> ent_;
  std::shared_ptr<const PolarInterpolator> interp_;
};

/// Q(partial B_r) sampled at M equally spaced angles, d = 2 only.
struct Contour {
  double r = 0.0;
  std::vector<Vec2> vertices;
  bool closed = true;
};

Contour extract_contour(const QuantileMap& map, double r, int M = 256);

/// Shoelace area (absolute value) of a closed loop.
double loop_area(const std::vector<Vec2>& loop);
/// Winding number of a closed loop around p.
int winding_number(const std::vector<Vec2>& loop, Vec2 p);
/// Indices (a, b) of two crossing or touching non-adjacent edges, if any.
/// Edge k joins vertex k to vertex k+1 (mod n).
std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(const std::vector<Vec2>& loop,
                                                                          double slack = 1e-12);

struct LoopCheck {
  double r = 0.0;
  bool simple = true;
  std::optional<std::pair<std::size_t, std::size_t>> crossing;
  double area = 0.0;
};

struct PairCheck {
  std::size_t inner = 0, outer = 0;
  bool nested = true;
  bool area_increasing = true;
  /// First inner vertex found outside the outer loop.
  std::optional<Vec2> witness;
};

struct NestednessReport {
  bool pass = true;
  std::vector<LoopCheck> loops;
  std::vector<PairCheck> pairs;
};

/// Simplicity of every loop, containment of every smaller loop in every
/// larger one, and strictly increasing areas. Contours are sorted by r first.
NestednessReport nestedness_check(std::vector<Contour> contours);

/// Andrew's monotone chain; counter-clockwise, no repeated endpoint.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

struct KEstimate {
  std::vector<double> radii;
  std::vector<double> diameters;
  std::vector<Vec2> hull_vertices;
  double hull_area = 0.0;
  /// Diameters strictly decrease along the radii.
  bool decreasing = true;
};

/// Contour diameters along decreasing radii; the hull of the innermost
/// contour stands in for K. Throws DomainError unless radii decrease in (0,1).
KEstimate estimate_k(const QuantileMap& map, const std::vector<double>& radii, int M = 256);

struct ErrorStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;
};

ErrorStats error_stats(std::vector<double> values);

/// |F(Q(x)) - x| over the probes. Throws DomainError for probes at 0 or
/// outside B_1 and StateError when the map has no inverse.
ErrorStats roundtrip_error(const QuantileMap& map, const PointSet& probes);

}  // namespace centerward
