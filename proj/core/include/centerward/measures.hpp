#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "centerward/point_set.hpp"

namespace centerward {

/// Area of the unit (d-1)-sphere, H^{d-1}(S^{d-1}) = 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

/// The spherical-uniform reference measure U_d on the unit ball.
///
/// U_d is the law of R * Theta with R ~ Uniform[0,1] and Theta uniform on the
/// sphere, so U_d(B_r) = r. Its Lebesgue density c_d / |x|^{d-1} is singular at
/// the origin for d >= 2.
class UniformBall {
 public:
  explicit UniformBall(int d);

  int dim() const { return dim_; }
  /// 1 / H^{d-1}(S^{d-1}).
  double normalizing_constant() const { return c_d_; }
  /// Throws DomainError at x = 0.
  double density(std::span<const double> x) const;

 private:
  int dim_;
  double c_d_;
};

double uniform_ball_density(int d, std::span<const double> x);

/// n points of U_d, radius and direction drawn independently. Deterministic in seed.
PointSet sample_uniform_ball(int d, std::size_t n, std::uint64_t seed);

/// Maps one uniform coordinate per angle to a uniformly distributed unit vector.
/// Uses direction_uniforms(d) entries of u.
int direction_uniforms(int d);
void uniform_direction(int d, std::span<const double> u, std::span<double> out);

/// Scalar profile p(r) of a radial density on R^d.
struct RadialProfile {
  int dim = 2;
  std::function<double(double)> density;
  /// Radius beyond which p vanishes (infinity for unbounded support); used as a
  /// quadrature breakpoint.
  double support = std::numeric_limits<double>::infinity();
};

/// s(q) = H^{d-1}(S^{d-1}) * int_0^q r^{d-1} p(r) dr.
double radial_cumulative(const RadialProfile& profile, double q);

/// Unique q with radial_cumulative(q) = s, for s in (0,1). Absolute tolerance 1e-10.
double radial_quantile_oracle(const RadialProfile& profile, double s);

/// q(|x|) x / |x| for 0 < |x| < 1.
std::vector<double> radial_quantile_map(const RadialProfile& profile, std::span<const double> x);

/// Positivity and boundedness constants of a density on a ball B_R.
struct DensityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// A target probability density P on R^d with an exact sampler.
///
/// Sampling is expressed as a measure-preserving transform of the unit cube,
/// so the same family serves i.i.d. sampling and low-discrepancy (Halton)
/// discretization.
class Density {
 public:
  virtual ~Density() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual double eval(std::span<const double> y) const = 0;
  /// Conservative (lambda_R, Lambda_R) with lambda_R <= p <= Lambda_R on B_R.
  virtual DensityBounds bounds(double radius) const = 0;
  /// Number of [0,1) coordinates consumed by transform().
  virtual int uniform_dim() const = 0;
  /// Pushes the uniform law on [0,1)^uniform_dim() forward to P.
  virtual void transform(std::span<const double> u, std::span<double> y) const = 0;
  /// Radius of a ball centered at the origin carrying P-mass at least 1 - tail.
  virtual double support_radius(double tail) const = 0;
  virtual std::optional<RadialProfile> radial_profile() const { return std::nullopt; }
  /// False for empirical targets that can be sampled but not evaluated.
  virtual bool evaluable() const { return true; }
  /// False for reference targets outside the positivity hypotheses (compact support, singular density).
  virtual bool locally_bounded_below() const { return true; }
  /// Parameters with defaults filled in, suitable for round-tripping through builtin_density().
  virtual nlohmann::json params() const = 0;

  PointSet sample(std::size_t n, std::uint64_t seed) const;
  /// First n points of the Halton sequence pushed through transform().
  PointSet quasi_sample(std::size_t n) const;
};

/// Builtin families: "gaussian", "gaussian-mixture", "uniform-disk", "banana",
/// and the reference target "spherical-uniform" (P = U_d).
/// Throws ConfigError for unknown names or invalid parameters.
std::unique_ptr<Density> builtin_density(std::string_view name, const nlohmann::json& params = nlohmann::json::object());

/// Rows `y_1,...,y_dim[,weight]`; header optional, LF or CRLF. Weights are
/// renormalized, missing weights default to equal. Throws ConfigError naming the line.
struct WeightedSample {
  PointSet points;
  std::vector<double> weights;
};
WeightedSample read_weighted_csv(std::istream& in, int dim);

}  // namespace centerward
