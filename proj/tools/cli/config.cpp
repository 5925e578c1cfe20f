#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "centerward/errors.hpp"

namespace centerward::cli {
namespace {

using json = nlohmann::json;
using Path = std::vector<std::string>;

std::string join(const Path& p) {
  std::string s;
  for (const auto& k : p) {
    if (!s.empty() && k.front() != '[') s += '.';
    s += k;
  }
  return s;
}

/// Locates keys in the raw text so errors can point at a line.
class Anchor {
 public:
  Anchor(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  int line_of(const Path& keys) const {
    std::size_t pos = 0, found = std::string::npos;
    for (const auto& k : keys) {
      if (k.front() == '[') {
        if (found != std::string::npos) found = element(found, std::stoul(k.substr(1)));
        continue;
      }
      const std::size_t p = text_.find('"' + k + '"', pos);
      if (p == std::string::npos) break;
      found = p;
      pos = p + 1;
    }
    if (found == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(found), '\n'));
  }

  [[noreturn]] void fail(const Path& keys, const std::string& msg) const {
    const int line = line_of(keys);
    std::string where = source_;
    if (line > 0) where += ":" + std::to_string(line);
    throw ConfigError(where + ": " + (keys.empty() ? std::string("config") : join(keys)) + ": " + msg);
  }

  const std::string& source() const { return source_; }

 private:
  /// Start of element `index` of the array that follows the key at `key_pos`.
  std::size_t element(std::size_t key_pos, std::size_t index) const {
    std::size_t p = text_.find('[', key_pos);
    if (p == std::string::npos) return key_pos;
    int depth = 0;
    std::size_t seen = 0;
    for (++p; p < text_.size(); ++p) {
      const char c = text_[p];
      if (c == '[' || c == '{') ++depth;
      else if (c == ']' || c == '}') {
        if (depth-- == 0) break;
      } else if (c == ',' && depth == 0 && ++seen == index) {
        ++p;
        break;
      }
      if (seen == index && index == 0) break;
    }
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    return std::min(p, text_.size() - 1);
  }


  const std::string& text_;
  std::string source_;
};

template <class T>
bool fits(const json& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v.is_boolean();
  } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
  } else if constexpr (std::is_integral_v<T>) {
    return v.is_number_integer();
  } else if constexpr (std::is_floating_point_v<T>) {
    return v.is_number();
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v.is_string();
  } else {
    return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
  }
}

template <class T>
const char* expected() {
  if constexpr (std::is_same_v<T, bool>) return "expected true or false";
  else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) return "expected a non-negative integer";
  else if constexpr (std::is_integral_v<T>) return "expected an integer";
  else if constexpr (std::is_floating_point_v<T>) return "expected a number";
  else if constexpr (std::is_same_v<T, std::string>) return "expected a string";
  else return "expected an array of numbers";
}

/// One JSON object of the config; tracks which keys were consumed.
class Section {
 public:
  Section(const Anchor& a, const json& obj, Path path) : a_(a), obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) a_.fail(path_, "must be an object");
  }

  template <class T>
  bool read(const std::string& key, T& out) {
    allowed_.insert(key);
    if (!obj_.contains(key)) return false;
    const json& v = obj_.at(key);
    if (!fits<T>(v)) a_.fail(at(key), expected<T>());
    out = v.get<T>();
    return true;
  }

  const json* raw(const std::string& key) {
    allowed_.insert(key);
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!allowed_.count(it.key())) a_.fail(at(it.key()), "unknown key");
  }

  Path at(const std::string& key) const {
    Path p = path_;
    p.push_back(key);
    return p;
  }
  Path at(const std::string& key, std::size_t index) const {
    Path p = at(key);
    p.push_back("[" + std::to_string(index) + "]");
    return p;
  }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const { a_.fail(at(key), msg); }

 private:
  const Anchor& a_;
  const json& obj_;
  Path path_;
  std::set<std::string> allowed_;
};

bool in_unit(double r) { return r > 0.0 && r < 1.0; }

/// Empirical measure of a CSV sample: resampling only, no density values.
class EmpiricalDensity final : public Density {
 public:
  EmpiricalDensity(WeightedSample s, std::string path) : s_(std::move(s)), path_(std::move(path)) {
    double c = 0.0;
    for (double w : s_.weights) cum_.push_back(c += w);
    for (std::size_t i = 0; i < s_.points.size(); ++i) radius_ = std::max(radius_, norm(s_.points[i]));
  }
  std::string name() const override { return "empirical"; }
  int dim() const override { return s_.points.dim; }
  double eval(std::span<const double>) const override {
    throw DomainError("empirical target has no density values");
  }
  DensityBounds bounds(double) const override { return {0.0, 0.0}; }
  int uniform_dim() const override { return 1; }
  void transform(std::span<const double> u, std::span<double> y) const override {
    const double t = u[0] * cum_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), t);
    const auto i = std::min(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
    const auto p = s_.points[i];
    std::copy(p.begin(), p.end(), y.begin());
  }
  double support_radius(double) const override { return radius_; }
  bool locally_bounded_below() const override { return false; }
  bool evaluable() const override { return false; }
  nlohmann::json params() const override { return {{"csv", path_}, {"dim", dim()}}; }

  const WeightedSample& sample_data() const { return s_; }

 private:
  WeightedSample s_;
  std::string path_;
  std::vector<double> cum_;
  double radius_ = 0.0;
};

void read_positive(Section& s, const std::string& key, double& v) {
  if (s.read(key, v) && !(v > 0.0)) s.fail(key, "must be positive");
}

template <class T>
void read_at_least(Section& s, const std::string& key, T& v, T lo) {
  if (s.read(key, v) && v < lo) s.fail(key, "must be >= " + std::to_string(lo));
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir) {
  const Anchor a(text, source);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ConfigError(source + ":" + std::to_string(line) + ": invalid JSON");
  }
  RunConfig cfg;
  Section top(a, doc, {});

  // density
  const json* dj = top.raw("density");
  if (!dj) a.fail({"density"}, "required");
  {
    Section ds(a, *dj, {"density"});
    std::string csv;
    ds.read("name", cfg.density.name);
    ds.read("csv", csv);
    read_at_least(ds, "dim", cfg.density.dim, 1);
    if (const json* p = ds.raw("params")) {
      if (!p->is_object()) ds.fail("params", "must be an object");
      cfg.density.params = *p;
    }
    ds.finish();
    if (cfg.density.name.empty() == csv.empty()) a.fail({"density"}, "give exactly one of 'name' or 'csv'");
    if (!csv.empty()) {
      cfg.density.csv = std::filesystem::path(csv).is_absolute() ? std::filesystem::path(csv) : base_dir / csv;
      if (!cfg.density.params.empty()) ds.fail("params", "not allowed with 'csv'");
    }
  }

  std::string backend = "entropic";
  if (top.read("backend", backend)) {
    if (backend == "entropic") cfg.backend = Backend::Entropic;
    else if (backend == "semidiscrete") cfg.backend = Backend::Semidiscrete;
    else top.fail("backend", "must be 'entropic' or 'semidiscrete'");
  }

  if (const json* sj = top.raw("semidiscrete")) {
    Section s(a, *sj, {"semidiscrete"});
    read_at_least<std::size_t>(s, "atoms", cfg.semidiscrete.atoms, 1);
    if (s.read("discretization", cfg.semidiscrete.discretization) && cfg.semidiscrete.discretization != "quasi" &&
        cfg.semidiscrete.discretization != "sample")
      s.fail("discretization", "must be 'quasi' or 'sample'");
    read_positive(s, "mass_tol", cfg.semidiscrete.mass_tol);
    read_at_least(s, "max_iter", cfg.semidiscrete.max_iter, 1);
    s.finish();
  }

  if (const json* ej = top.raw("entropic")) {
    Section s(a, *ej, {"entropic"});
    auto& e = cfg.entropic;
    read_at_least(s, "n_r", e.n_r, 2);
    read_at_least(s, "n_ang", e.n_ang, 2);
    if (s.read("epsilons", e.epsilons)) {
      if (e.epsilons.empty()) s.fail("epsilons", "must not be empty");
      for (std::size_t i = 0; i < e.epsilons.size(); ++i)
        if (!(e.epsilons[i] > 0.0)) a.fail(s.at("epsilons", i), "epsilon must be positive");
    }
    read_positive(s, "tol", e.tol);
    read_at_least(s, "max_iter", e.max_iter, 1);
    if (s.read("target", e.target) && e.target != "sample" && e.target != "grid")
      s.fail("target", "must be 'sample' or 'grid'");
    read_at_least<std::size_t>(s, "target_size", e.target_size, 1);
    read_positive(s, "grid_spacing", e.grid_spacing);
    if (s.read("grid_tail", e.grid_tail) && !in_unit(e.grid_tail)) s.fail("grid_tail", "must lie in (0, 1)");
    read_positive(s, "truncation", e.truncation);
    s.finish();
  }

  if (const json* cj = top.raw("contours")) {
    Section s(a, *cj, {"contours"});
    auto& c = cfg.contours;
    if (s.read("radii", c.radii)) {
      if (c.radii.empty()) s.fail("radii", "must not be empty");
      for (std::size_t i = 0; i < c.radii.size(); ++i)
        if (!in_unit(c.radii[i])) a.fail(s.at("radii", i), "radius must lie in (0, 1)");
    }
    read_at_least(s, "M", c.M, 8);
    if (s.read("k_radii", c.k_radii)) {
      if (c.k_radii.empty()) s.fail("k_radii", "must not be empty");
      for (std::size_t i = 0; i < c.k_radii.size(); ++i) {
        if (!in_unit(c.k_radii[i])) a.fail(s.at("k_radii", i), "radius must lie in (0, 1)");
        if (i && !(c.k_radii[i] < c.k_radii[i - 1])) a.fail(s.at("k_radii", i), "radii must be decreasing");
      }
    }
    s.finish();
  }

  if (const json* oj = top.raw("oracle")) {
    Section s(a, *oj, {"oracle"});
    auto& o = cfg.oracle;
    s.read("r_min", o.r_min);
    s.read("r_max", o.r_max);
    if (!(in_unit(o.r_min) && in_unit(o.r_max) && o.r_min < o.r_max)) s.fail("r_min", "need 0 < r_min < r_max < 1");
    read_at_least(s, "points", o.points, 2);
    read_at_least(s, "M", o.M, 8);
    s.finish();
  }

  if (const json* tj = top.raw("diagnostics")) {
    try {
      cfg.thresholds = Thresholds::from_json(*tj);
    } catch (const ConfigError& e) {
      a.fail({"diagnostics"}, e.what());
    }
  }

  top.read("seed", cfg.seed);
  std::string out;
  if (top.read("output", out)) {
    if (out.empty()) top.fail("output", "must not be empty");
    cfg.output = out;
  }
  read_at_least(top, "threads", cfg.threads, 1);
  top.finish();

  // Cross-field checks, and the density itself.
  int dim = cfg.density.dim;
  if (!cfg.density.name.empty()) {
    try {
      dim = builtin_density(cfg.density.name, cfg.density.params)->dim();
    } catch (const ConfigError& e) {
      a.fail({"density"}, e.what());
    }
    cfg.density.dim = dim;
  }
  if (cfg.backend == Backend::Semidiscrete && dim != 2) a.fail({"backend"}, "the semidiscrete backend is d = 2 only");
  if (cfg.backend == Backend::Entropic && dim != 2 && dim != 3) a.fail({"density"}, "the entropic backend needs d = 2 or 3");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), path.parent_path().empty() ? "." : path.parent_path());
}

nlohmann::json RunConfig::materialized() const {
  json j;
  if (density.name.empty()) {
    j["density"] = {{"csv", density.csv.generic_string()}, {"dim", density.dim}};
  } else {
    j["density"] = {{"name", density.name}, {"params", builtin_density(density.name, density.params)->params()}};
  }
  j["backend"] = backend_name(backend);
  j["semidiscrete"] = {{"atoms", semidiscrete.atoms},
                       {"discretization", semidiscrete.discretization},
                       {"mass_tol", semidiscrete.mass_tol},
                       {"max_iter", semidiscrete.max_iter}};
  j["entropic"] = {{"n_r", entropic.n_r},
                   {"n_ang", entropic.n_ang},
                   {"epsilons", entropic.epsilons},
                   {"tol", entropic.tol},
                   {"max_iter", entropic.max_iter},
                   {"target", entropic.target},
                   {"target_size", entropic.target_size},
                   {"grid_spacing", entropic.grid_spacing},
                   {"grid_tail", entropic.grid_tail},
                   {"truncation", entropic.truncation}};
  j["contours"] = {{"radii", contours.radii}, {"M", contours.M}, {"k_radii", contours.k_radii}};
  j["oracle"] = {{"r_min", oracle.r_min}, {"r_max", oracle.r_max}, {"points", oracle.points}, {"M", oracle.M}};
  j["diagnostics"] = thresholds.to_json();
  j["seed"] = seed;
  j["output"] = output.generic_string();
  j["threads"] = threads;
  return j;
}

std::unique_ptr<Density> make_density(const DensitySpec& spec) {
  if (!spec.name.empty()) return builtin_density(spec.name, spec.params);
  std::ifstream in(spec.csv, std::ios::binary);
  if (!in) throw ConfigError("cannot read sample csv '" + spec.csv.string() + "'");
  try {
    return std::make_unique<EmpiricalDensity>(read_weighted_csv(in, spec.dim), spec.csv.generic_string());
  } catch (const ConfigError& e) {
    throw ConfigError(spec.csv.string() + ": " + e.what());
  }
}

}  // namespace centerward::cli
