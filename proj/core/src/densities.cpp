#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "centerward/errors.hpp"
#include "centerward/measures.hpp"

namespace centerward {
namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double unit_ball_volume(int d) { return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

/// Radius r with P(|Z| > r) = tail for Z standard normal in R^d.
double chi_tail_radius(int d, double tail) {
  boost::math::chi_squared chi2(d);
  return std::sqrt(boost::math::quantile(boost::math::complement(chi2, tail)));
}

void reject_unknown_keys(const json& params, std::initializer_list<const char*> allowed, std::string_view family) {
  if (!params.is_object()) throw ConfigError(std::string(family) + ": params must be an object");
  for (const auto& [key, value] : params.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
      throw ConfigError(std::string(family) + ": unknown parameter '" + key + "'");
  }
}

double positive_number(const json& params, const char* key, double fallback, std::string_view family) {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number()) throw ConfigError(std::string(family) + ": '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(family) + ": '" + key + "' must be positive");
  return x;
}

int dimension(const json& params, int fallback, std::string_view family) {
  if (!params.contains("dim")) return fallback;
  const auto& v = params.at("dim");
  if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > 3)
    throw ConfigError(std::string(family) + ": 'dim' must be 1, 2 or 3");
  return v.get<int>();
}

Eigen::VectorXd read_vector(const json& v, const char* what) {
  if (!v.is_array()) throw ConfigError(std::string(what) + " must be an array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(std::string(what) + " entries must be numbers");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

/// Standard normal coordinates from pairs of uniforms (Box-Muller), 2*ceil(d/2) uniforms.
void standard_normal(int d, std::span<const double> u, std::span<double> z) {
  for (int k = 0; k < d; k += 2) {
    const double rad = std::sqrt(-2.0 * std::log1p(-u[k]));
    z[k] = rad * std::cos(kTwoPi * u[k + 1]);
    if (k + 1 < d) z[k + 1] = rad * std::sin(kTwoPi * u[k + 1]);
  }
}

class Gaussian final : public Density {
 public:
  Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    const auto d = mean_.size();
    if (d < 1 || d > 3) throw ConfigError("gaussian: dimension must be 1, 2 or 3");
    if (cov_.rows() != d || cov_.cols() != d) throw ConfigError("gaussian: covariance shape does not match mean");
    if (!cov_.isApprox(cov_.transpose(), 1e-12)) throw ConfigError("gaussian: covariance must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cov_);
    if (llt.info() != Eigen::Success) throw ConfigError("gaussian: covariance is not positive definite");
    chol_ = llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov_);
    eig_min_ = eig.eigenvalues().minCoeff();
    eig_max_ = eig.eigenvalues().maxCoeff();
    if (!(eig_min_ > 0.0)) throw ConfigError("gaussian: covariance is not positive definite");
    precision_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
    const double det = chol_.diagonal().prod();
    norm_ = 1.0 / (std::pow(kTwoPi, 0.5 * static_cast<double>(d)) * det);
  }

  std::string name() const override { return "gaussian"; }
  int dim() const override { return static_cast<int>(mean_.size()); }

  double eval(std::span<const double> y) const override {
    Eigen::Map<const Eigen::VectorXd> v(y.data(), dim());
    const Eigen::VectorXd z = v - mean_;
    return norm_ * std::exp(-0.5 * z.dot(precision_ * z));
  }

  DensityBounds bounds(double radius) const override {
    const double reach = radius + mean_.norm();
    return {norm_ * std::exp(-0.5 * reach * reach / eig_min_), norm_};
  }

  int uniform_dim() const override { return 2 * ((dim() + 1) / 2); }

  void transform(std::span<const double> u, std::span<double> y) const override {
    Eigen::VectorXd z(dim());
    standard_normal(dim(), u, {z.data(), static_cast<std::size_t>(dim())});
    Eigen::Map<Eigen::VectorXd>(y.data(), dim()) = mean_ + chol_ * z;
  }

  double support_radius(double tail) const override {
    return mean_.norm() + std::sqrt(eig_max_) * chi_tail_radius(dim(), tail);
  }

  std::optional<RadialProfile> radial_profile() const override {
    const double s2 = cov_(0, 0);
    const auto d = dim();
    if (mean_.norm() != 0.0 || (cov_ - s2 * Eigen::MatrixXd::Identity(d, d)).norm() != 0.0) return std::nullopt;
    const double c = norm_;
    return RadialProfile{d, [c, s2](double r) { return c * std::exp(-0.5 * r * r / s2); }};
  }

  json params() const override { return {{"mean", to_json(mean_)}, {"covariance", to_json(cov_)}}; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;
  Eigen::MatrixXd precision_;
  double norm_ = 0.0;
  double eig_min_ = 0.0;
  double eig_max_ = 0.0;
};

std::unique_ptr<Gaussian> make_gaussian(const json& params, std::string_view family) {
  reject_unknown_keys(params, {"dim", "mean", "covariance", "sigma"}, family);
  int d = dimension(params, 2, family);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  if (params.contains("mean")) {
    mean = read_vector(params.at("mean"), "gaussian: 'mean'");
    if (params.contains("dim") && mean.size() != d) throw ConfigError("gaussian: 'mean' length does not match 'dim'");
    d = static_cast<int>(mean.size());
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d);
  if (params.contains("covariance") && params.contains("sigma"))
    throw ConfigError("gaussian: give either 'covariance' or 'sigma', not both");
  if (params.contains("sigma")) {
    const double s = positive_number(params, "sigma", 1.0, family);
    cov *= s * s;
  }
  if (params.contains("covariance")) {
    const auto& c = params.at("covariance");
    if (!c.is_array() || static_cast<int>(c.size()) != d) throw ConfigError("gaussian: 'covariance' must be a d x d array");
    for (int i = 0; i < d; ++i) {
      const Eigen::VectorXd row = read_vector(c[static_cast<std::size_t>(i)], "gaussian: 'covariance' row");
      if (row.size() != d) throw ConfigError("gaussian: 'covariance' must be a d x d array");
      cov.row(i) = row.transpose();
    }
  }
  return std::make_unique<Gaussian>(std::move(mean), std::move(cov));
}

class GaussianMixture final : public Density {
 public:
  GaussianMixture(std::vector<double> weights, std::vector<std::unique_ptr<Gaussian>> parts)
      : weights_(std::move(weights)), parts_(std::move(parts)) {
    if (parts_.empty()) throw ConfigError("gaussian-mixture: needs at least one component");
    if (weights_.size() != parts_.size()) throw ConfigError("gaussian-mixture: one weight per component required");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w > 0.0)) throw ConfigError("gaussian-mixture: weights must be positive");
      total += w;
    }
    for (double& w : weights_) w /= total;
    for (const auto& p : parts_)
      if (p->dim() != parts_.front()->dim()) throw ConfigError("gaussian-mixture: components differ in dimension");
  }

  std::string name() const override { return "gaussian-mixture"; }
  int dim() const override { return parts_.front()->dim(); }

  double eval(std::span<const double> y) const override {
    double s = 0.0;
    for (std::size_t k = 0; k < parts_.size(); ++k) s += weights_[k] * parts_[k]->eval(y);
    return s;
  }

  DensityBounds bounds(double radius) const override {
    DensityBounds b;
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      const auto bk = parts_[k]->bounds(radius);
      b.lower += weights_[k] * bk.lower;
      b.upper += weights_[k] * bk.upper;
    }
    return b;
  }

  int uniform_dim() const override { return 1 + parts_.front()->uniform_dim(); }

  void transform(std::span<const double> u, std::span<double> y) const override {
    std::size_t k = 0;
    double acc = weights_[0];
    while (k + 1 < parts_.size() && u[0] >= acc) acc += weights_[++k];
    parts_[k]->transform(u.subspan(1), y);
  }

  double support_radius(double tail) const override {
    double r = 0.0;
    for (const auto& p : parts_) r = std::max(r, p->support_radius(tail));
    return r;
  }

  json params() const override {
    json comps = json::array();
    for (const auto& p : parts_) comps.push_back(p->params());
    return {{"weights", weights_}, {"components", comps}};
  }

 private:
  std::vector<double> weights_;
  std::vector<std::unique_ptr<Gaussian>> parts_;
};

class UniformDisk final : public Density {
 public:
  UniformDisk(int d, double radius) : dim_(d), radius_(radius) {
    value_ = 1.0 / (unit_ball_volume(d) * std::pow(radius, d));
  }

  std::string name() const override { return "uniform-disk"; }
  int dim() const override { return dim_; }
  double eval(std::span<const double> y) const override { return norm(y) <= radius_ ? value_ : 0.0; }
  DensityBounds bounds(double radius) const override { return {radius <= radius_ ? value_ : 0.0, value_}; }
  int uniform_dim() const override { return 1 + direction_uniforms(dim_); }

  void transform(std::span<const double> u, std::span<double> y) const override {
    uniform_direction(dim_, u.subspan(1), y);
    const double r = radius_ * std::pow(u[0], 1.0 / dim_);
    for (double& v : y) v *= r;
  }

  double support_radius(double) const override { return radius_; }

  std::optional<RadialProfile> radial_profile() const override {
    const double v = value_, rad = radius_;
    return RadialProfile{dim_, [v, rad](double r) { return r <= rad ? v : 0.0; }, rad};
  }

  bool locally_bounded_below() const override { return false; }
  json params() const override { return {{"dim", dim_}, {"radius", radius_}}; }

 private:
  int dim_;
  double radius_;
  double value_;
};

/// Twisted Gaussian: X ~ N(0, diag(s1^2, s2^2)), Y = (X1, X2 + b (X1^2 - s1^2)). Unit Jacobian.
class Banana final : public Density {
 public:
  Banana(double s1, double s2, double b) : s1_(s1), s2_(s2), b_(b) { norm_ = 1.0 / (kTwoPi * s1 * s2); }

  std::string name() const override { return "banana"; }
  int dim() const override { return 2; }

  double eval(std::span<const double> y) const override {
    const double z1 = y[0] / s1_;
    const double z2 = (y[1] - b_ * (y[0] * y[0] - s1_ * s1_)) / s2_;
    return norm_ * std::exp(-0.5 * (z1 * z1 + z2 * z2));
  }

  DensityBounds bounds(double radius) const override {
    const double z1 = radius / s1_;
    const double z2 = (radius + std::abs(b_) * (radius * radius + s1_ * s1_)) / s2_;
    return {norm_ * std::exp(-0.5 * (z1 * z1 + z2 * z2)), norm_};
  }

  int uniform_dim() const override { return 2; }

  void transform(std::span<const double> u, std::span<double> y) const override {
    double z[2];
    standard_normal(2, u, z);
    const double x1 = s1_ * z[0];
    y[0] = x1;
    y[1] = s2_ * z[1] + b_ * (x1 * x1 - s1_ * s1_);
  }

  double support_radius(double tail) const override {
    const double t = chi_tail_radius(2, tail);
    const double y1 = s1_ * t;
    const double y2 = s2_ * t + std::abs(b_) * s1_ * s1_ * (t * t + 1.0);
    return std::hypot(y1, y2);
  }

  json params() const override { return {{"sigma1", s1_}, {"sigma2", s2_}, {"curvature", b_}}; }

 private:
  double s1_, s2_, b_, norm_;
};

/// P = U_d, the reference measure itself; the identity case.
class SphericalUniform final : public Density {
 public:
  explicit SphericalUniform(int d) : ball_(d) {}

  std::string name() const override { return "spherical-uniform"; }
  int dim() const override { return ball_.dim(); }

  double eval(std::span<const double> y) const override {
    const double r = norm(y);
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    if (r >= 1.0) return 0.0;
    return ball_.normalizing_constant() / std::pow(r, dim() - 1);
  }

  DensityBounds bounds(double radius) const override {
    const double c = ball_.normalizing_constant();
    return {radius < 1.0 ? c : 0.0, dim() > 1 ? std::numeric_limits<double>::infinity() : c};
  }

  int uniform_dim() const override { return 1 + direction_uniforms(dim()); }

  void transform(std::span<const double> u, std::span<double> y) const override {
    uniform_direction(dim(), u.subspan(1), y);
    for (double& v : y) v *= u[0];
  }

  double support_radius(double) const override { return 1.0; }

  std::optional<RadialProfile> radial_profile() const override {
    const double c = ball_.normalizing_constant();
    const int d = dim();
    return RadialProfile{d, [c, d](double r) { return r < 1.0 ? c / std::pow(r, d - 1) : 0.0; }, 1.0};
  }

  bool locally_bounded_below() const override { return false; }
  json params() const override { return {{"dim", dim()}}; }

 private:
  UniformBall ball_;
};

}  // namespace

std::unique_ptr<Density> builtin_density(std::string_view name, const json& params) {
  const json p = params.is_null() ? json::object() : params;
  if (name == "gaussian") return make_gaussian(p, name);
  if (name == "gaussian-mixture") {
    reject_unknown_keys(p, {"weights", "components"}, name);
    std::vector<std::unique_ptr<Gaussian>> parts;
    std::vector<double> weights;
    if (p.contains("components")) {
      const auto& comps = p.at("components");
      if (!comps.is_array() || comps.empty()) throw ConfigError("gaussian-mixture: 'components' must be a non-empty array");
      for (const auto& c : comps) parts.push_back(make_gaussian(c, "gaussian-mixture component"));
    } else {
      parts.push_back(make_gaussian({{"mean", {-2.0, 0.0}}}, name));
      parts.push_back(make_gaussian({{"mean", {2.0, 0.0}}}, name));
    }
    if (p.contains("weights")) {
      const auto w = read_vector(p.at("weights"), "gaussian-mixture: 'weights'");
      weights.assign(w.data(), w.data() + w.size());
    } else {
      weights.assign(parts.size(), 1.0);
    }
    return std::make_unique<GaussianMixture>(std::move(weights), std::move(parts));
  }
  if (name == "uniform-disk") {
    reject_unknown_keys(p, {"dim", "radius"}, name);
    return std::make_unique<UniformDisk>(dimension(p, 2, name), positive_number(p, "radius", 1.0, name));
  }
  if (name == "banana") {
    reject_unknown_keys(p, {"sigma1", "sigma2", "curvature"}, name);
    double b = 0.5;
    if (p.contains("curvature")) {
      if (!p.at("curvature").is_number()) throw ConfigError("banana: 'curvature' must be a number");
      b = p.at("curvature").get<double>();
    }
    return std::make_unique<Banana>(positive_number(p, "sigma1", 1.0, name), positive_number(p, "sigma2", 0.5, name), b);
  }
  if (name == "spherical-uniform") {
    reject_unknown_keys(p, {"dim"}, name);
    const int d = dimension(p, 2, name);
    if (d < 2) throw ConfigError("spherical-uniform: requires dim >= 2");
    return std::make_unique<SphericalUniform>(d);
  }
  throw ConfigError("unknown density family '" + std::string(name) + "'");
}

}  // namespace centerward
