// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails. `acceptance N...` runs only the listed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>
#include <numbers>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "centerward/diagnostics.hpp"
#include "centerward/entropic.hpp"
#include "centerward/errors.hpp"
#include "centerward/json_io.hpp"
#include "centerward/quantile.hpp"
#include "centerward/semidiscrete.hpp"

using namespace centerward;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct EntropicRun {
  QuantileMap map;
  double seconds = 0.0;
};

// Grid target weighted by p on B_R with P(B_R^c) <= tail; P = U_2 uses the ball grid itself.
EntropicRun solve_entropic(const Density& p, int n_r, double spacing, double tail,
                           std::vector<double> epsilons = {0.1, 0.03, 0.01, 0.003, 0.001},
                           std::vector<double> warm_g = {}) {
  const auto t0 = Clock::now();
  BallGrid grid = build_ball_grid(2, n_r, 2 * n_r);
  const NodeSet target = p.name() == "spherical-uniform" ? grid.nodes : target_grid(p, p.support_radius(tail), spacing);
  SinkhornOptions opt;
  opt.epsilons = std::move(epsilons);
  opt.initial_target_potential = std::move(warm_g);
  GridCoupling cp = sinkhorn_solve(grid.nodes, target, opt);
  EntropicRun run{QuantileMap::from_entropic(std::move(grid), std::move(cp)), 0.0};
  run.seconds = seconds_since(t0);
  return run;
}

QuantileMap solve_semidiscrete(std::vector<Vec2> atoms) {
  DiscreteTarget t = DiscreteTarget::uniform(std::move(atoms));
  AscentResult r = dual_ascent(t);
  return QuantileMap::from_semidiscrete(std::move(t), std::move(r));
}

std::vector<Vec2> to_vec2(const PointSet& s) {
  std::vector<Vec2> v;
  for (std::size_t i = 0; i < s.size(); ++i) v.push_back({s[i][0], s[i][1]});
  return v;
}

// Largest relative error of the ring-mean radius |Q(x)| against the oracle, over
// `points` radii in [lo, hi] with M angles each.
double radial_error(const QuantileMap& map, const RadialProfile& prof, double lo, double hi, int points = 33,
                    int M = 256) {
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const double r = lo + (hi - lo) * k / (points - 1);
    double mean = 0.0;
    for (int m = 0; m < M; ++m) {
      const double th = 2.0 * std::numbers::pi * (m + 0.5) / M;
      const double x[2] = {r * std::cos(th), r * std::sin(th)};
      mean += norm(map.forward(x)) / M;
    }
    const double q = radial_quantile_oracle(prof, r);
    worst = std::max(worst, std::abs(mean - q) / q);
  }
  return worst;
}

int run_cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(CENTERWARD_CLI_PATH) + " " + args + " > " + (dir / "cli_stdout.txt").string() +
                          " 2> " + (dir / "cli_stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

/// Solves shared between criteria, built on first use.
class Runs {
 public:
  const Density& density(const std::string& name) {
    auto& d = densities_[name];
    if (!d) d = builtin_density(name);
    return *d;
  }

  EntropicRun& identity() { return once("identity", [&] { return solve_entropic(density("spherical-uniform"), 64, 0, 0); }); }
  EntropicRun& gaussian(int n_r) {
    if (n_r == 128) {
      // Warm start at the final epsilon from the n_r = 64 target potential (same target grid).
      return once("gaussian128", [&] {
        return solve_entropic(density("gaussian"), 128, 0.06, 1e-4, {0.001}, gaussian(64).map.entropic().coupling.g);
      });
    }
    return once("gaussian" + std::to_string(n_r), [&] { return solve_entropic(density("gaussian"), n_r, 0.06, 1e-4); });
  }
  EntropicRun& uniform_disk() { return once("disk", [&] { return solve_entropic(density("uniform-disk"), 64, 0.02, 1e-4); }); }
  EntropicRun& mixture() { return once("mixture", [&] { return solve_entropic(density("gaussian-mixture"), 64, 0.1, 1e-3); }); }
  EntropicRun& banana() { return once("banana", [&] { return solve_entropic(density("banana"), 64, 0.1, 1e-3); }); }

  QuantileMap& semidiscrete(const std::string& name) {
    auto& m = semi_[name];
    if (!m.solved()) m = solve_semidiscrete(to_vec2(density(name).quasi_sample(512)));
    return m;
  }

 private:
  template <class F>
  EntropicRun& once(const std::string& key, F&& make) {
    auto it = entropic_.find(key);
    if (it == entropic_.end()) {
      std::printf("  [solving %s]\n", key.c_str());
      std::fflush(stdout);
      it = entropic_.emplace(key, make()).first;
      std::printf("  [%s: %.1f s]\n", key.c_str(), it->second.seconds);
    }
    return it->second;
  }

  std::map<std::string, std::unique_ptr<Density>> densities_;
  std::map<std::string, EntropicRun> entropic_;
  std::map<std::string, QuantileMap> semi_;
};

Outcome criterion1(Runs& runs) {
  Outcome o;
  const EntropicRun& id = runs.identity();
  const auto& sol = id.map.entropic();
  std::vector<double> err;
  for (std::size_t i = 0; i < sol.grid.nodes.size(); ++i)
    err.push_back(std::sqrt(squared_distance(sol.forward_table.images[i], sol.grid.nodes.points[i])));
  const ErrorStats s = error_stats(err);
  o.require(s.median <= 1e-3, "entropic node error median " + fmt("%.3e", s.median) + " <= 1e-3");
  o.require(s.max <= 1e-2, "max " + fmt("%.3e", s.max) + " <= 1e-2");
  o.require(id.seconds <= 60.0, "runtime " + fmt("%.1f", id.seconds) + " s <= 60 s");

  const auto t0 = Clock::now();
  const QuantileMap semi = solve_semidiscrete(to_vec2(sample_uniform_ball(2, 512, 2024)));
  const auto& sd = semi.semidiscrete();
  const auto bary = f_plusminus_on_atoms(sd.result.diagram);
  // Roundtrip: Q(F(y_i)) against y_i. The distance of F(y_i) itself from y_i is
  // reported too; it carries the sampling error of the 512-point target.
  std::size_t bad = 0, far = 0;
  for (std::size_t i = 0; i < sd.target.size(); ++i) {
    const Vec2 y = sd.target.points[i];
    const double diam = diameter(sd.result.diagram.cells[i].region);
    if (!bary[i]) {
      ++bad;
      continue;
    }
    const Vec2 back = evaluate_map(sd.target, sd.result.potential.psi, *bary[i]);
    if (!(norm(back - y) <= diam)) ++bad;
    if (!(norm(*bary[i] - y) <= diam)) ++far;
  }
  o.require(bad == 0, "semidiscrete 512 U_2 atoms: " + std::to_string(bad) + " roundtrips Q(F(y)) beyond cell diameter (" +
                          fmt("%.2f", seconds_since(t0)) + " s)");
  o.detail += "; info: " + std::to_string(far) + "/512 barycenters F(y) farther than a cell diameter from y";
  return o;
}

Outcome criterion2(Runs& runs) {
  Outcome o;
  for (const char* name : {"gaussian", "uniform-disk"}) {
    const auto prof = *runs.density(name).radial_profile();
    const EntropicRun& e = std::string(name) == "gaussian" ? runs.gaussian(64) : runs.uniform_disk();
    const double ee = radial_error(e.map, prof, 0.1, 0.9);
    o.require(ee <= 0.02, std::string(name) + " entropic rel err " + fmt("%.3e", ee) + " <= 0.02 on [0.1, 0.9]");
    const double se = radial_error(runs.semidiscrete(name), prof, 0.2, 0.8);
    o.require(se <= 0.05, std::string(name) + " semidiscrete rel err " + fmt("%.3e", se) + " <= 0.05 on [0.2, 0.8]");
  }
  return o;
}

Outcome criterion3(Runs& runs) {
  Outcome o;
  const Density& p = runs.density("gaussian");
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {32, 64, 128}) {
    const auto& sol = runs.gaussian(n).map.entropic();
    const MaResidualField f = ma_residual_field(sol.forward_table, p, sol.grid, 0.2, 0.8);
    o.require(f.median <= 0.05, "n_r=" + std::to_string(n) + " median " + fmt("%.4e", f.median) + " <= 0.05");
    o.require(f.median < prev, "decreasing");
    prev = f.median;
    const double det = f.determinant_at(0.5);
    if (n == 64) o.require(std::abs(det - 4.0) <= 0.05 * 4.0, "det(0.5) " + fmt("%.4f", det) + " within 5% of 4");
  }
  return o;
}

Outcome criterion4(Runs& runs) {
  Outcome o;
  const EntropicRun& m = runs.mixture();
  const Thresholds t;
  for (const CheckResult& c : check_pushforward(m.map, runs.density("gaussian-mixture"), t, 41))
    o.require(c.status == CheckStatus::Pass,
              c.name + " " + fmt("%.4g", c.statistic) + " " + c.comparison + " " + fmt("%.4g", c.threshold));
  return o;
}

Outcome criterion5(Runs& runs) {
  Outcome o;
  const Thresholds t;
  for (const char* name : {"gaussian", "gaussian-mixture"}) {
    const QuantileMap& sd = runs.semidiscrete(name);
    const CheckResult c = check_monotonicity(sd, t, 51);
    const auto v = c.details["violations"].get<std::size_t>();
    o.require(v == 0 && c.statistic >= 0.0, std::string(name) + " semidiscrete violations " + std::to_string(v) +
                                                " of 10^4, worst " + fmt("%.3e", c.statistic));
  }
  const EntropicRun& m = runs.mixture();
  const CheckResult c = check_monotonicity(m.map, t, 52);
  o.require(c.status == CheckStatus::Pass,
            "entropic mixture worst " + fmt("%.3e", c.statistic) + " >= " + fmt("%.3e", c.threshold));
  return o;
}

Outcome criterion6(Runs& runs) {
  Outcome o;
  for (const char* name : {"gaussian-mixture", "banana"}) {
    const QuantileMap& map = std::string(name) == "banana" ? runs.banana().map : runs.mixture().map;
    std::vector<Contour> cs;
    for (double r : {0.2, 0.4, 0.6, 0.8}) cs.push_back(extract_contour(map, r, 256));
    const NestednessReport rep = nestedness_check(cs);
    std::size_t simple = 0, nested = 0;
    for (const auto& l : rep.loops) simple += l.simple;
    for (const auto& p : rep.pairs) nested += p.nested && p.area_increasing;
    o.require(rep.pass, std::string(name) + " simple " + std::to_string(simple) + "/4, nested pairs " +
                            std::to_string(nested) + "/" + std::to_string(rep.pairs.size()));
  }
  return o;
}

Outcome criterion7(Runs& runs) {
  Outcome o;
  for (const char* name : {"gaussian-mixture", "banana"}) {
    const QuantileMap& map = std::string(name) == "banana" ? runs.banana().map : runs.mixture().map;
    const KEstimate k = estimate_k(map, {0.4, 0.2, 0.1, 0.05}, 256);
    std::string diams;
    for (double d : k.diameters) diams += (diams.empty() ? "" : ",") + fmt("%.3f", d);
    o.require(k.decreasing, std::string(name) + " diameters {" + diams + "} strictly decreasing");
    const double bound = 10.0 * map.epsilon();
    o.require(k.hull_area <= bound, "hull area " + fmt("%.4f", k.hull_area) + " <= " + fmt("%.4f", bound));
  }
  return o;
}

std::string semidiscrete_config(const fs::path& out, const std::string& extra = "") {
  return "{\n  \"density\": {\"name\": \"gaussian\"},\n  \"backend\": \"semidiscrete\",\n"
         "  \"semidiscrete\": {\"atoms\": 512" + extra + "},\n  \"seed\": 17,\n  \"output\": \"" +
         out.generic_string() + "\"\n}\n";
}

std::string entropic_config(const fs::path& out, const std::string& extra = "") {
  return "{\n  \"density\": {\"name\": \"gaussian\"},\n  \"backend\": \"entropic\",\n"
         "  \"entropic\": {\"n_r\": 32, \"n_ang\": 64, \"target\": \"grid\"" + extra + "},\n  \"seed\": 17,\n"
         "  \"output\": \"" + out.generic_string() + "\"\n}\n";
}

Outcome criterion8(Runs& runs, const fs::path& dir) {
  Outcome o;
  const Thresholds t;
  const QuantileMap bad = corrupt_potential(runs.semidiscrete("gaussian"), 0.1, 81);
  const DiagnosticsReport rep = run_suite(bad, runs.density("gaussian"), t, 81);
  std::string failed;
  for (const auto& c : rep.checks)
    if (c.failed()) failed += (failed.empty() ? "" : ",") + c.name;
  o.require(!rep.pass(), "corrupted psi fails {" + failed + "}");

  const DiagnosticsReport ent = run_suite(corrupt_potential(runs.gaussian(64).map, 0.1, 82), runs.density("gaussian"), t, 82);
  failed.clear();
  for (const auto& c : ent.checks)
    if (c.failed()) failed += (failed.empty() ? "" : ",") + c.name;
  o.require(!ent.pass(), "corrupted entropic g fails {" + failed + "}");

  write_file(dir / "stuck_sd.json", semidiscrete_config(dir / "stuck_sd", ", \"max_iter\": 1"));
  const int rc_sd = run_cli("solve " + (dir / "stuck_sd.json").string(), dir);
  o.require(rc_sd == 3, "semidiscrete max_iter=1 exit " + std::to_string(rc_sd));
  write_file(dir / "stuck_ent.json", entropic_config(dir / "stuck_ent", ", \"max_iter\": 1"));
  const int rc_ent = run_cli("solve " + (dir / "stuck_ent.json").string(), dir);
  o.require(rc_ent == 3, "entropic max_iter=1 exit " + std::to_string(rc_ent));

  std::vector<Vec2> a, b;
  for (int k = 0; k < 64; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 64;
    a.push_back({0.5 + std::cos(th), std::sin(th)});
    b.push_back({1.2 * std::cos(th), 1.2 * std::sin(th)});
  }
  const NestednessReport cross = nestedness_check({{0.2, a, true}, {0.4, b, true}});
  o.require(!cross.pass, "crossing loops rejected");
  return o;
}

Outcome criterion9(const fs::path& dir) {
  Outcome o;
  for (const auto& [label, text] :
       std::vector<std::pair<std::string, std::string>>{{"semidiscrete", semidiscrete_config(dir / "det_sd")},
                                                        {"entropic", entropic_config(dir / "det_ent")}}) {
    const fs::path cfg = dir / ("det_" + label + ".json");
    write_file(cfg, text);
    const fs::path out = dir / (label == "semidiscrete" ? "det_sd" : "det_ent");
    const int rc = run_cli("solve " + cfg.string(), dir);
    if (rc != 0) {
      o.require(false, label + " solve exit " + std::to_string(rc));
      continue;
    }
    run_cli("verify " + cfg.string(), dir);
    const std::string first = slurp(out / "report.json");
    run_cli("verify " + cfg.string(), dir);
    const std::string second = slurp(out / "report.json");
    o.require(!first.empty() && first == second,
              label + " report.json " + std::to_string(first.size()) + " bytes, identical across runs");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int k) { return only.empty() || only.count(k); };

  const fs::path dir = fs::temp_directory_path() / "centerward_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  Runs runs;
  int failures = 0;
  const auto t0 = Clock::now();
  auto report = [&](int k, const char* title, auto&& fn) {
    if (!wanted(k)) return;
    Outcome o;
    const auto tk = Clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("CRITERION %d %s: %s (%.1f s) %s\n", k, o.pass ? "PASS" : "FAIL", title, seconds_since(tk),
                o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "identity oracle", [&] { return criterion1(runs); });
  report(2, "radial oracle", [&] { return criterion2(runs); });
  report(3, "Monge-Ampere identity", [&] { return criterion3(runs); });
  report(4, "pushforward uniformity", [&] { return criterion4(runs); });
  report(5, "monotonicity", [&] { return criterion5(runs); });
  report(6, "nested contours", [&] { return criterion6(runs); });
  report(7, "K collapse", [&] { return criterion7(runs); });
  report(8, "negative controls", [&] { return criterion8(runs, dir); });
  report(9, "determinism", [&] { return criterion9(dir); });

  std::printf("acceptance: %d failing criteria, %.1f s total\n", failures, seconds_since(t0));
  fs::remove_all(dir);
  return failures == 0 ? 0 : 1;
}
