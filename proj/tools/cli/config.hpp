#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "centerward/diagnostics.hpp"
#include "centerward/measures.hpp"
#include "centerward/quantile.hpp"

namespace centerward::cli {

struct DensitySpec {
  /// Builtin family name; empty when the target comes from a CSV sample.
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  std::filesystem::path csv;
  int dim = 2;
};

struct SemidiscreteConfig {
  std::size_t atoms = 512;
  /// "quasi" (Halton points through the sampler transform) or "sample" (i.i.d.).
  std::string discretization = "quasi";
  double mass_tol = 1e-7;
  int max_iter = 100;
};

struct EntropicConfig {
  int n_r = 64;
  int n_ang = 128;
  std::vector<double> epsilons = {0.1, 0.03, 0.01, 0.003, 0.001};
  double tol = 1e-6;
  int max_iter = 20000;
  /// "sample": i.i.d. draws with masses 1/n; "grid": regular grid weighted by p.
  std::string target = "sample";
  std::size_t target_size = 10000;
  double grid_spacing = 0.06;
  /// P-mass left outside the grid radius.
  double grid_tail = 1e-4;
  double truncation = 50.0;
};

struct ContourConfig {
  std::vector<double> radii = {0.2, 0.4, 0.6, 0.8};
  int M = 256;
  std::vector<double> k_radii = {0.4, 0.2, 0.1, 0.05};
};

struct OracleConfig {
  double r_min = 0.1;
  double r_max = 0.9;
  int points = 33;
  int M = 256;
};

struct RunConfig {
  DensitySpec density;
  Backend backend = Backend::Entropic;
  SemidiscreteConfig semidiscrete;
  EntropicConfig entropic;
  ContourConfig contours;
  OracleConfig oracle;
  Thresholds thresholds;
  std::uint64_t seed = 0;
  std::filesystem::path output = "out";
  int threads = 1;

  /// Every field with defaults filled in; the document that gets hashed.
  nlohmann::json materialized() const;
};

/// Parses and validates a config document. Errors are ConfigError with the
/// message prefixed by "<source>:<line>: <field path>: ". Relative CSV paths
/// resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::string& source = "config",
                       const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// The target measure named by the config: a builtin family or an empirical
/// sample read from CSV.
std::unique_ptr<Density> make_density(const DensitySpec& spec);

}  // namespace centerward::cli
