#include "commands.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "centerward/errors.hpp"
#include "centerward/json_io.hpp"
#include "centerward/parallel.hpp"

namespace centerward::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f << content;
  if (!f) throw ConfigError("write failed for '" + p.string() + "'");
}

void write_artifact(const fs::path& p, json j, const RunConfig& cfg) {
  j["config_hash"] = config_hash(cfg.materialized());
  j["version"] = version_string();
  write_file(p, to_json_string(j));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

NodeSet entropic_target(const RunConfig& cfg, const Density& density, const BallGrid& grid) {
  const auto& e = cfg.entropic;
  if (density.name() == "empirical") {
    // The CSV sample is the target; its own weights are the masses.
    std::ifstream in(density.params().at("csv").get<std::string>(), std::ios::binary);
    WeightedSample s = read_weighted_csv(in, density.dim());
    return NodeSet{std::move(s.points), std::move(s.weights)};
  }
  if (e.target == "grid") {
    if (density.name() == "spherical-uniform") return grid.nodes;
    return target_grid(density, density.support_radius(e.grid_tail), e.grid_spacing);
  }
  return target_from_sample(density.sample(e.target_size, cfg.seed));
}

DiscreteTarget semidiscrete_target(const RunConfig& cfg, const Density& density) {
  if (density.name() == "empirical") {
    std::ifstream in(density.params().at("csv").get<std::string>(), std::ios::binary);
    return read_target_csv(in);
  }
  const auto& s = cfg.semidiscrete;
  const PointSet pts = s.discretization == "quasi" ? density.quasi_sample(s.atoms) : density.sample(s.atoms, cfg.seed);
  std::vector<Vec2> atoms;
  atoms.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) atoms.push_back({pts[i][0], pts[i][1]});
  return DiscreteTarget::uniform(std::move(atoms));
}

QuantileMap load_or_solve(const RunConfig& cfg, const Density& density, bool inline_solve, std::ostream& err) {
  if (inline_solve) return solve_map(cfg, density, &err);
  const fs::path p = cfg.output / "map.json";
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw ConfigError("no solve artifacts at '" + p.string() + "'; run `centerward solve` first or pass --inline");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + p.string() + "' is not valid JSON");
  }
  if (j.value("solve_hash", std::string()) != solve_hash(cfg))
    throw ConfigError("'" + p.string() + "' was produced by a different configuration; rerun `centerward solve` or pass --inline");
  return map_from_json(j);
}

std::string radius_tag(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", r);
  return buf;
}

}  // namespace

RunConfig resolve_config(const fs::path& path, const Overrides& o) {
  RunConfig cfg = load_config(path);
  cfg.threads = threads_from_env(cfg.threads);
  if (o.threads) {
    if (*o.threads < 1) throw ConfigError("--threads must be >= 1");
    cfg.threads = *o.threads;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output = *o.out;
  set_threads(cfg.threads);
  return cfg;
}

std::string solve_hash(const RunConfig& cfg) {
  const json m = cfg.materialized();
  json s;
  for (const char* k : {"density", "backend", "seed"}) s[k] = m.at(k);
  s[m.at("backend").get<std::string>()] = m.at(m.at("backend").get<std::string>());
  return config_hash(s);
}

QuantileMap solve_map(const RunConfig& cfg, const Density& density, std::ostream* log) {
  if (cfg.backend == Backend::Semidiscrete) {
    DiscreteTarget target = semidiscrete_target(cfg, density);
    AscentOptions o;
    o.mass_tol = cfg.semidiscrete.mass_tol;
    o.max_iter = cfg.semidiscrete.max_iter;
    if (log) {
      o.observer = [log](int it, double res, double obj, double mass, bool newton) {
        *log << "iteration " << it << (newton ? " newton" : " gradient") << " residual " << fmt(res) << " objective "
             << fmt(obj) << " mass_sum " << fmt(mass) << '\n';
      };
    }
    AscentResult r = dual_ascent(target, o);
    if (log) *log << "converged iterations " << r.iterations << " residual " << fmt(r.residual) << '\n';
    return QuantileMap::from_semidiscrete(std::move(target), std::move(r));
  }
  const auto& e = cfg.entropic;
  BallGrid grid = build_ball_grid(density.dim(), e.n_r, e.n_ang);
  NodeSet target = entropic_target(cfg, density, grid);
  SinkhornOptions o;
  o.epsilons = e.epsilons;
  o.tol = e.tol;
  o.max_iter = e.max_iter;
  o.truncation = e.truncation;
  if (log) {
    *log << "grid nodes " << grid.nodes.size() << " target nodes " << target.size() << '\n';
    o.log = [log](const std::string& s) { *log << s << '\n'; };
  }
  GridCoupling c = sinkhorn_solve(grid.nodes, target, o);
  if (log) *log << "converged iterations " << c.iterations << " marginal_err " << fmt(c.marginal_err) << '\n';
  return QuantileMap::from_entropic(std::move(grid), std::move(c));
}

OutputLock::OutputLock(const fs::path& dir) {
  fs::create_directories(dir);
  file_ = dir / ".centerward.lock";
  const int fd = ::open(file_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST)
      throw ConfigError("output directory '" + dir.string() + "' is in use by another run (stale? remove " +
                        file_.string() + ")");
    throw ConfigError("cannot create lockfile '" + file_.string() + "': " + std::strerror(errno));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

OutputLock::~OutputLock() {
  std::error_code ec;
  fs::remove(file_, ec);
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  OutputLock lock(cfg.output);
  const json materialized = cfg.materialized();
  write_file(cfg.output / "config.json", to_json_string(materialized));
  const auto density = make_density(cfg.density);
  std::ostringstream log;
  log << "centerward " << version_string() << " config_hash " << config_hash(materialized) << '\n';
  try {
    const QuantileMap map = solve_map(cfg, *density, &log);
    json j = map.backend() == Backend::Semidiscrete ? to_json(map.semidiscrete()) : to_json(map.entropic());
    j["solve_hash"] = solve_hash(cfg);
    write_artifact(cfg.output / "map.json", std::move(j), cfg);
    write_file(cfg.output / "solve.log", log.str());
    out << "solved: " << map.metadata().dump() << '\n';
    return kOk;
  } catch (const ConvergenceError& e) {
    log << "convergence failure after " << e.iterations() << " iterations, residual " << fmt(e.residual()) << '\n';
    write_file(cfg.output / "solve.log", log.str());
    err << "error: " << e.what() << '\n';
    throw;
  }
}

int cmd_contours(const RunConfig& cfg, std::vector<double> radii, bool inline_solve, std::ostream& out,
                 std::ostream& err) {
  if (radii.empty()) radii = cfg.contours.radii;
  for (double r : radii)
    if (!(r > 0.0 && r < 1.0)) throw DomainError("contour radius " + fmt(r) + " outside (0, 1)");
  if (!std::is_sorted(radii.begin(), radii.end())) {
    err << "warning: contour radii were not increasing; sorting\n";
    std::sort(radii.begin(), radii.end());
  }
  OutputLock lock(cfg.output);
  const auto density = make_density(cfg.density);
  const QuantileMap map = load_or_solve(cfg, *density, inline_solve, err);
  const fs::path dir = cfg.output / "contours";
  fs::create_directories(dir);
  std::vector<Contour> contours;
  for (double r : radii) {
    contours.push_back(extract_contour(map, r, cfg.contours.M));
    write_artifact(dir / ("contour_r" + radius_tag(r) + ".json"), to_json(contours.back()), cfg);
  }
  const NestednessReport nest = nestedness_check(contours);
  write_artifact(cfg.output / "nestedness.json", to_json(nest), cfg);
  const KEstimate k = estimate_k(map, cfg.contours.k_radii, cfg.contours.M);
  write_artifact(cfg.output / "k_estimate.json", to_json(k), cfg);
  out << "contours: " << contours.size() << " written, nestedness " << (nest.pass ? "pass" : "FAIL") << '\n';
  return nest.pass ? kOk : kDiagnosticFailure;
}

int cmd_verify(const RunConfig& cfg, bool inline_solve, bool corrupt, std::ostream& out, std::ostream& err) {
  OutputLock lock(cfg.output);
  const auto density = make_density(cfg.density);
  QuantileMap map = load_or_solve(cfg, *density, inline_solve, err);
  if (corrupt) map = corrupt_potential(map, 0.1, cfg.seed);
  const DiagnosticsReport rep = run_suite(map, *density, cfg.thresholds, cfg.seed);
  json j = to_json(rep);
  j["corrupted"] = corrupt;
  write_artifact(cfg.output / "report.json", std::move(j), cfg);
  for (const auto& c : rep.checks)
    out << status_name(c.status) << "  " << c.name << "  " << fmt(c.statistic) << " " << c.comparison << " "
        << fmt(c.threshold) << '\n';
  out << "verify: " << (rep.pass() ? "pass" : "FAIL") << '\n';
  return rep.pass() ? kOk : kDiagnosticFailure;
}

int cmd_oracle_compare(const RunConfig& cfg, bool inline_solve, std::ostream& out, std::ostream& err) {
  const auto density = make_density(cfg.density);
  const auto profile = density->radial_profile();
  if (!profile) throw ConfigError("oracle requires radial density");
  if (density->dim() != 2 && cfg.backend == Backend::Semidiscrete) throw ConfigError("oracle-compare: d = 2 only");
  OutputLock lock(cfg.output);
  const QuantileMap map = load_or_solve(cfg, *density, inline_solve, err);
  const auto& o = cfg.oracle;
  const int d = map.dim();
  std::ostringstream csv;
  csv << "r,oracle,solver_mean,solver_max_dev,rel_error\n";
  double worst = 0.0;
  for (int k = 0; k < o.points; ++k) {
    const double r = o.r_min + (o.r_max - o.r_min) * k / (o.points - 1);
    const double q = radial_quantile_oracle(*profile, r);
    double sum = 0.0, dev = 0.0;
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    for (int m = 0; m < o.M; ++m) {
      const double th = 2.0 * std::numbers::pi * m / o.M;
      x[0] = r * std::cos(th);
      x[1] = r * std::sin(th);
      const double n = norm(map.forward(x));
      sum += n;
      dev = std::max(dev, std::abs(n - q));
    }
    const double mean = sum / o.M;
    const double rel = std::abs(mean - q) / q;
    worst = std::max(worst, rel);
    csv << fmt(r) << ',' << fmt(q) << ',' << fmt(mean) << ',' << fmt(dev) << ',' << fmt(rel) << '\n';
  }
  write_file(cfg.output / "oracle_error.csv", csv.str());
  out << "oracle-compare: max relative error " << fmt(worst) << " over r in [" << fmt(o.r_min) << ", " << fmt(o.r_max)
      << "]\n";
  return kOk;
}

}  // namespace centerward::cli
