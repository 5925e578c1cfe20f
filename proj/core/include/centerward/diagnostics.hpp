#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "centerward/measures.hpp"
#include "centerward/quantile.hpp"

namespace centerward {

/// Every threshold a check compares against. Checks read nothing else.
struct Thresholds {
  // pushforward
  std::size_t pushforward_samples = 10'000;
  double ks_max = 0.05;
  int sectors = 16;
  double chi2_alpha = 0.01;
  /// |F(y)| <= 1 + range_sqrt_eps * sqrt(eps).
  double range_sqrt_eps = 2.0;
  /// Semidiscrete: max |cell mass - nu_i|.
  double mass_residual_max = 1e-6;
  // monotonicity
  std::size_t monotonicity_pairs = 10'000;
  /// Entropic slack delta = monotonicity_eps * eps; the semidiscrete slack is 0.
  double monotonicity_eps = 10.0;
  // pointwise annulus
  double annulus_lo = 0.05;
  double annulus_hi = 0.95;
  // Monge-Ampere
  double ma_lo = 0.2;
  double ma_hi = 0.8;
  double ma_median_max = 0.05;
  double ma_p90_max = 0.15;
  // injectivity
  std::size_t injectivity_samples = 2'000;
  double min_separation = 1e-3;
  // roundtrip
  std::size_t roundtrip_samples = 2'000;
  double roundtrip_median_max = 0.05;

  /// Reads overrides from a JSON object; unknown keys raise ConfigError.
  static Thresholds from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

enum class CheckStatus { Pass, Fail, NotApplicable, Error };

const char* status_name(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double statistic = 0.0;
  double threshold = 0.0;
  /// "<=" or ">=": how statistic is compared against threshold.
  std::string comparison = "<=";
  nlohmann::json details = nlohmann::json::object();

  bool failed() const { return status == CheckStatus::Fail || status == CheckStatus::Error; }
};

struct DiagnosticsReport {
  std::vector<CheckResult> checks;
  nlohmann::json provenance = nlohmann::json::object();
  std::uint64_t seed = 0;

  bool pass() const;
};

/// KS of |F(Y)| against Uniform[0,1], sector chi-squared of F(Y)/|F(Y)|, and
/// the range bound. The semidiscrete backend uses atom barycenters weighted
/// by the atom masses, plus a cell-mass residual check.
std::vector<CheckResult> check_pushforward(const QuantileMap& map, const Density& density, const Thresholds& t,
                                           std::uint64_t seed);
CheckResult check_monotonicity(const QuantileMap& map, const Thresholds& t, std::uint64_t seed);
CheckResult check_ma_identity(const QuantileMap& map, const Density& density, const Thresholds& t);
CheckResult check_injectivity(const QuantileMap& map, const Thresholds& t, std::uint64_t seed);
CheckResult check_roundtrip(const QuantileMap& map, const Thresholds& t, std::uint64_t seed);

/// Runs every check; an exception inside a check is recorded as an Error result.
DiagnosticsReport run_suite(const QuantileMap& map, const Density& density, const Thresholds& t, std::uint64_t seed);

/// Negative control: perturbs the dual potential by a non-constant term of
/// the given magnitude and rebuilds the map (Laguerre diagram, or the
/// entropic plan with f recomputed from the perturbed g).
QuantileMap corrupt_potential(const QuantileMap& map, double magnitude, std::uint64_t seed);

/// Kolmogorov-Smirnov distance of a weighted sample on [0,1] to Uniform[0,1].
double ks_uniform(std::vector<std::pair<double, double>> value_weight);
/// Upper alpha critical value of chi-squared with k degrees of freedom.
double chi2_critical(int k, double alpha);
/// n points of U_d conditioned on lo <= |x| <= hi.
PointSet sample_annulus(int d, std::size_t n, double lo, double hi, std::uint64_t seed);

}  // namespace centerward
