#include "centerward/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "centerward/errors.hpp"
#include "centerward/rng.hpp"

namespace centerward {
namespace {

CheckResult compare(std::string name, double stat, double threshold, const char* cmp) {
  CheckResult c;
  c.name = std::move(name);
  c.statistic = stat;
  c.threshold = threshold;
  c.comparison = cmp;
  bool ok = false;
  const std::string op = cmp;
  if (op == "<=") ok = stat <= threshold;
  else if (op == ">=") ok = stat >= threshold;
  else if (op == ">") ok = stat > threshold;
  c.status = ok && std::isfinite(stat) ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

CheckResult not_applicable(std::string name, std::string why) {
  CheckResult c;
  c.name = std::move(name);
  c.status = CheckStatus::NotApplicable;
  c.comparison = "n/a";
  c.details["reason"] = std::move(why);
  return c;
}

double chi2_sectors(const std::vector<std::pair<Vec2, double>>& dir_weight, int sectors, double n_eff,
                    std::vector<double>& observed) {
  observed.assign(static_cast<std::size_t>(sectors), 0.0);
  double total = 0.0;
  for (const auto& [v, w] : dir_weight) {
    double a = std::atan2(v.y, v.x);
    if (a < 0) a += 2.0 * std::numbers::pi;
    auto k = static_cast<int>(a / (2.0 * std::numbers::pi) * sectors);
    k = std::clamp(k, 0, sectors - 1);
    observed[static_cast<std::size_t>(k)] += w;
    total += w;
  }
  const double expected = n_eff / sectors;
  double stat = 0.0;
  for (double& o : observed) {
    o *= n_eff / total;
    stat += (o - expected) * (o - expected) / expected;
  }
  return stat;
}

}  // namespace

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not-applicable";
    case CheckStatus::Error: return "error";
  }
  return "error";
}

bool DiagnosticsReport::pass() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.failed(); });
}

#define CW_THRESHOLD_FIELDS(X)                                                                            \
  X(pushforward_samples) X(ks_max) X(sectors) X(chi2_alpha) X(range_sqrt_eps) X(mass_residual_max)        \
  X(monotonicity_pairs) X(monotonicity_eps) X(annulus_lo) X(annulus_hi) X(ma_lo) X(ma_hi) X(ma_median_max) \
  X(ma_p90_max) X(injectivity_samples) X(min_separation) X(roundtrip_samples) X(roundtrip_median_max)

Thresholds Thresholds::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("thresholds must be an object");
  Thresholds t;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    bool known = false;
    try {
#define X(field)                                 \
  if (key == #field) {                           \
    t.field = it->get<decltype(t.field)>();      \
    known = true;                                \
  }
      CW_THRESHOLD_FIELDS(X)
#undef X
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("thresholds." + key + ": wrong type");
    }
    if (!known) throw ConfigError("thresholds: unknown key '" + key + "'");
  }
  if (!(t.annulus_lo > 0.0 && t.annulus_lo < t.annulus_hi && t.annulus_hi < 1.0))
    throw ConfigError("thresholds: need 0 < annulus_lo < annulus_hi < 1");
  if (!(t.ma_lo > 0.0 && t.ma_lo < t.ma_hi && t.ma_hi < 1.0)) throw ConfigError("thresholds: need 0 < ma_lo < ma_hi < 1");
  if (t.sectors < 2) throw ConfigError("thresholds.sectors must be >= 2");
  if (!(t.chi2_alpha > 0.0 && t.chi2_alpha < 1.0)) throw ConfigError("thresholds.chi2_alpha must lie in (0, 1)");
  if (t.pushforward_samples < 2 || t.monotonicity_pairs < 1 || t.injectivity_samples < 2 || t.roundtrip_samples < 1)
    throw ConfigError("thresholds: sample counts too small");
  if (!(t.min_separation > 0.0)) throw ConfigError("thresholds.min_separation must be positive");
  return t;
}

nlohmann::json Thresholds::to_json() const {
  nlohmann::json j;
#define X(field) j[#field] = field;
  CW_THRESHOLD_FIELDS(X)
#undef X
  return j;
}

double ks_uniform(std::vector<std::pair<double, double>> vw) {
  if (vw.empty()) throw DomainError("ks_uniform: empty sample");
  std::sort(vw.begin(), vw.end());
  double total = 0.0;
  for (const auto& p : vw) total += p.second;
  double cum = 0.0, d = 0.0;
  for (const auto& [v, w] : vw) {
    const double u = std::clamp(v, 0.0, 1.0);
    d = std::max(d, std::abs(u - cum / total));
    cum += w;
    d = std::max(d, std::abs(cum / total - u));
  }
  return d;
}

double chi2_critical(int k, double alpha) {
  boost::math::chi_squared dist(k);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

PointSet sample_annulus(int d, std::size_t n, double lo, double hi, std::uint64_t seed) {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw DomainError("sample_annulus: need 0 <= lo < hi <= 1");
  UniformStream s(seed);
  PointSet out(d, n);
  std::vector<double> u(static_cast<std::size_t>(direction_uniforms(d)));
  for (std::size_t i = 0; i < n; ++i) {
    const double r = lo + (hi - lo) * s.next();
    for (double& v : u) v = s.next();
    auto x = out[i];
    uniform_direction(d, u, x);
    for (double& v : x) v *= r;
  }
  return out;
}

std::vector<CheckResult> check_pushforward(const QuantileMap& map, const Density& density, const Thresholds& t,
                                           std::uint64_t seed) {
  std::vector<std::pair<double, double>> radii;
  std::vector<std::pair<Vec2, double>> dirs;
  double n_eff = 0.0;
  double bound = 1.0;
  std::vector<CheckResult> out;

  if (map.backend() == Backend::Semidiscrete) {
    const auto& sol = map.semidiscrete();
    const auto bary = f_plusminus_on_atoms(sol.result.diagram);
    double worst_mass = 0.0;
    std::size_t empty = 0;
    for (std::size_t i = 0; i < bary.size(); ++i) {
      worst_mass = std::max(worst_mass, std::abs(sol.result.diagram.cells[i].mass - sol.target.weights[i]));
      if (!bary[i]) {
        ++empty;
        continue;
      }
      radii.emplace_back(norm(*bary[i]), sol.target.weights[i]);
      dirs.emplace_back(*bary[i], sol.target.weights[i]);
    }
    n_eff = static_cast<double>(bary.size());
    CheckResult m = compare("pushforward.mass_residual", worst_mass, t.mass_residual_max, "<=");
    m.details["empty_cells"] = empty;
    out.push_back(std::move(m));
    if (radii.empty()) throw StateError("pushforward: every cell is empty");
  } else {
    if (density.dim() != map.dim()) throw DomainError("pushforward: density and map dimensions differ");
    const PointSet y = density.sample(t.pushforward_samples, seed);
    const int d = map.dim();
    std::vector<double> images(y.coords.size());
    const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto f = map.inverse(y[static_cast<std::size_t>(i)]);
      std::copy(f.begin(), f.end(), images.begin() + i * d);
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      const std::span<const double> f(images.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d));
      radii.emplace_back(norm(f), 1.0);
      dirs.emplace_back(Vec2{f[0], f[1]}, 1.0);
    }
    n_eff = static_cast<double>(y.size());
    bound = 1.0 + t.range_sqrt_eps * std::sqrt(map.epsilon());
  }

  CheckResult ks = compare("pushforward.ks_radius", ks_uniform(radii), t.ks_max, "<=");
  ks.details["samples"] = radii.size();
  out.push_back(std::move(ks));

  std::vector<double> observed;
  const double chi = chi2_sectors(dirs, t.sectors, n_eff, observed);
  CheckResult sec = compare("pushforward.sectors_chi2", chi, chi2_critical(t.sectors - 1, t.chi2_alpha), "<=");
  sec.details["observed"] = observed;
  sec.details["alpha"] = t.chi2_alpha;
  out.push_back(std::move(sec));

  double worst = 0.0;
  for (const auto& r : radii) worst = std::max(worst, r.first);
  out.push_back(compare("pushforward.range", worst, bound, "<="));
  return out;
}

CheckResult check_monotonicity(const QuantileMap& map, const Thresholds& t, std::uint64_t seed) {
  const int d = map.dim();
  const PointSet a = sample_annulus(d, t.monotonicity_pairs, t.annulus_lo, t.annulus_hi, seed);
  const PointSet b = sample_annulus(d, t.monotonicity_pairs, t.annulus_lo, t.annulus_hi, seed ^ 0x9e3779b97f4a7c15ULL);
  const double delta = map.backend() == Backend::Semidiscrete ? 0.0 : t.monotonicity_eps * map.epsilon();
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_k = 0, negatives = 0, violations = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto qa = map.forward(a[k]);
    const auto qb = map.forward(b[k]);
    double s = 0.0;
    for (int c = 0; c < d; ++c) s += (qa[static_cast<std::size_t>(c)] - qb[static_cast<std::size_t>(c)]) * (a[k][c] - b[k][c]);
    if (s < 0.0) ++negatives;
    if (s < -delta) ++violations;
    if (s < worst) {
      worst = s;
      worst_k = k;
    }
  }
  CheckResult c = compare("monotonicity", worst, delta > 0.0 ? -delta : 0.0, ">=");
  c.details["pairs"] = a.size();
  c.details["negative_pairs"] = negatives;
  c.details["violations"] = violations;
  c.details["worst_pair"] = {std::vector<double>(a[worst_k].begin(), a[worst_k].end()),
                             std::vector<double>(b[worst_k].begin(), b[worst_k].end())};
  return c;
}

CheckResult check_ma_identity(const QuantileMap& map, const Density& density, const Thresholds& t) {
  if (map.backend() == Backend::Semidiscrete)
    return not_applicable("ma_identity", "semidiscrete map is piecewise constant");
  if (!density.evaluable()) return not_applicable("ma_identity", "target density cannot be evaluated");
  const auto& sol = map.entropic();
  const MaResidualField field = ma_residual_field(sol.forward_table, density, sol.grid, t.ma_lo, t.ma_hi);
  CheckResult c = compare("ma_identity", field.median, t.ma_median_max, "<=");
  c.details["p90"] = field.p90;
  c.details["p90_threshold"] = t.ma_p90_max;
  c.details["max"] = field.max;
  c.details["nodes"] = field.residual.size();
  if (c.status == CheckStatus::Pass && !(field.p90 <= t.ma_p90_max)) c.status = CheckStatus::Fail;
  return c;
}

CheckResult check_injectivity(const QuantileMap& map, const Thresholds& t, std::uint64_t seed) {
  if (map.backend() == Backend::Semidiscrete) {
    CheckResult c = not_applicable("injectivity", "semidiscrete map is piecewise constant; distinct cells map to distinct atoms");
    c.details["atoms"] = map.semidiscrete().target.size();
    return c;
  }
  const int d = map.dim();
  const PointSet cand = sample_annulus(d, 4 * t.injectivity_samples, t.annulus_lo, t.annulus_hi, seed);
  PointSet pts(d, 0);
  for (std::size_t i = 0; i < cand.size() && pts.size() < t.injectivity_samples; ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < pts.size() && ok; ++j)
      ok = squared_distance(cand[i], pts[j]) >= t.min_separation * t.min_separation;
    if (ok) pts.push_back(cand[i]);
  }
  std::vector<std::vector<double>> img;
  img.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) img.push_back(map.forward(pts[i]));
  double min_sep = std::numeric_limits<double>::infinity(), min_ratio = min_sep;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double s = std::sqrt(squared_distance(img[i], img[j]));
      min_sep = std::min(min_sep, s);
      min_ratio = std::min(min_ratio, s / std::sqrt(squared_distance(pts[i], pts[j])));
    }
  CheckResult c = compare("injectivity", min_sep, 0.0, ">");
  c.details["points"] = pts.size();
  c.details["min_ratio"] = min_ratio;
  return c;
}

CheckResult check_roundtrip(const QuantileMap& map, const Thresholds& t, std::uint64_t seed) {
  if (!map.has_inverse()) return not_applicable("roundtrip", "semidiscrete map has no off-atom inverse");
  const PointSet probes = sample_annulus(map.dim(), t.roundtrip_samples, t.annulus_lo, t.annulus_hi, seed);
  const ErrorStats s = roundtrip_error(map, probes);
  CheckResult c = compare("roundtrip", s.median, t.roundtrip_median_max, "<=");
  c.details["p90"] = s.p90;
  c.details["max"] = s.max;
  return c;
}

DiagnosticsReport run_suite(const QuantileMap& map, const Density& density, const Thresholds& t, std::uint64_t seed) {
  if (!map.solved()) throw StateError("run_suite: map is not solved");
  DiagnosticsReport rep;
  rep.seed = seed;
  rep.provenance = map.metadata();
  rep.provenance["density"] = density.name();
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      CheckResult c;
      c.name = name;
      c.status = CheckStatus::Error;
      c.comparison = "n/a";
      c.details["error"] = e.what();
      rep.checks.push_back(std::move(c));
    }
  };
  guarded("pushforward", [&] {
    for (auto& c : check_pushforward(map, density, t, seed + 1)) rep.checks.push_back(std::move(c));
  });
  guarded("monotonicity", [&] { rep.checks.push_back(check_monotonicity(map, t, seed + 2)); });
  guarded("ma_identity", [&] { rep.checks.push_back(check_ma_identity(map, density, t)); });
  guarded("injectivity", [&] { rep.checks.push_back(check_injectivity(map, t, seed + 3)); });
  guarded("roundtrip", [&] { rep.checks.push_back(check_roundtrip(map, t, seed + 4)); });
  return rep;
}

QuantileMap corrupt_potential(const QuantileMap& map, double magnitude, std::uint64_t seed) {
  UniformStream s(seed);
  if (map.backend() == Backend::Semidiscrete) {
    const auto& sol = map.semidiscrete();
    AscentResult r = sol.result;
    auto& psi = r.potential.psi;
    for (std::size_t i = 1; i < psi.size(); ++i) psi[i] += magnitude * (2.0 * s.next() - 1.0);
    r.diagram = build_laguerre(sol.target, psi);
    r.residual = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
      r.residual = std::max(r.residual, std::abs(r.diagram.cells[i].mass - sol.target.weights[i]));
    return QuantileMap::from_semidiscrete(sol.target, std::move(r));
  }
  const auto& sol = map.entropic();
  GridCoupling c = sol.coupling;
  for (double& g : c.g) g += magnitude * (2.0 * s.next() - 1.0);
  // f as the soft c-transform of the perturbed g, so rows stay exact.
  const auto n = static_cast<std::ptrdiff_t>(c.source.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto x = c.source.points[i];
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> v(c.target.size());
    for (std::size_t j = 0; j < c.target.size(); ++j) {
      v[j] = (c.g[j] - 0.5 * squared_distance(x, c.target.points[j])) / c.epsilon + std::log(c.target.masses[j]);
      mx = std::max(mx, v[j]);
    }
    double sum = 0.0;
    for (double e : v) sum += std::exp(e - mx);
    c.f[i] = -c.epsilon * (mx + std::log(sum));
  }
  return QuantileMap::from_entropic(sol.grid, std::move(c));
}

}  // namespace centerward
