#include "centerward/measures.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>

#include "centerward/errors.hpp"
#include "centerward/quadrature.hpp"
#include "centerward/rng.hpp"

namespace centerward {

double sphere_area(int d) {
  if (d < 1) throw DomainError("sphere_area: dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

UniformBall::UniformBall(int d) : dim_(d) {
  if (d < 1) throw DomainError("UniformBall: dimension must be >= 1");
  c_d_ = 1.0 / sphere_area(d);
}

double UniformBall::density(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DomainError("uniform_ball_density: dimension mismatch");
  const double r = norm(x);
  if (r == 0.0) throw DomainError("uniform_ball_density: density is singular at the origin");
  if (r >= 1.0) return 0.0;
  return c_d_ / std::pow(r, dim_ - 1);
}

double uniform_ball_density(int d, std::span<const double> x) {
  if (d < 2) throw DomainError("uniform_ball_density: requires d >= 2");
  return UniformBall(d).density(x);
}

int direction_uniforms(int d) {
  if (d <= 2) return 1;
  if (d == 3) return 2;
  return 2 * ((d + 1) / 2);
}

void uniform_direction(int d, std::span<const double> u, std::span<double> out) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (d) {
    case 1:
      out[0] = u[0] < 0.5 ? -1.0 : 1.0;
      return;
    case 2:
      out[0] = std::cos(two_pi * u[0]);
      out[1] = std::sin(two_pi * u[0]);
      return;
    case 3: {
      // Archimedes: the height of a uniform point on S^2 is uniform on [-1,1].
      const double z = 2.0 * u[0] - 1.0;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      out[0] = rho * std::cos(two_pi * u[1]);
      out[1] = rho * std::sin(two_pi * u[1]);
      out[2] = z;
      return;
    }
    default: {
      double s = 0.0;
      for (int k = 0; k < d; k += 2) {
        const double rad = std::sqrt(-2.0 * std::log1p(-u[k]));
        out[k] = rad * std::cos(two_pi * u[k + 1]);
        if (k + 1 < d) out[k + 1] = rad * std::sin(two_pi * u[k + 1]);
      }
      for (int k = 0; k < d; ++k) s += out[k] * out[k];
      s = std::sqrt(s);
      for (int k = 0; k < d; ++k) out[k] = s > 0.0 ? out[k] / s : (k == 0 ? 1.0 : 0.0);
    }
  }
}

PointSet sample_uniform_ball(int d, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_uniform_ball: n must be >= 1");
  UniformStream stream(seed);
  PointSet out(d, n);
  std::vector<double> u(static_cast<std::size_t>(direction_uniforms(d)));
  for (std::size_t i = 0; i < n; ++i) {
    const double r = stream.next();
    for (double& v : u) v = stream.next();
    auto x = out[i];
    uniform_direction(d, u, x);
    for (double& v : x) v *= r;
  }
  return out;
}

double radial_cumulative(const RadialProfile& profile, double q) {
  if (q <= 0.0) return 0.0;
  const int d = profile.dim;
  const double upper = std::min(q, profile.support);
  auto integrand = [&](double r) { return std::pow(r, d - 1) * profile.density(r); };
  // Unit panels keep the adaptive rule away from long, mostly-negligible intervals.
  double total = 0.0;
  double a = 0.0;
  while (a < upper) {
    const double b = std::min(upper, a + 1.0);
    total += integrate_adaptive(integrand, a, b, 1e-13);
    a = b;
  }
  return sphere_area(d) * total;
}

double radial_quantile_oracle(const RadialProfile& profile, double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("radial_quantile_oracle: s must lie in (0,1)");
  const double area = sphere_area(profile.dim);

  double lo = 0.0;
  double hi = std::isfinite(profile.support) ? profile.support : 1.0;
  double f_hi = radial_cumulative(profile, hi);
  for (int grow = 0; f_hi <= s; ++grow) {
    if (grow > 200) throw DomainError("radial_quantile_oracle: cumulative integral never reaches s");
    lo = hi;
    hi *= 2.0;
    f_hi = radial_cumulative(profile, hi);
  }

  // Newton on the monotone cumulative, safeguarded by the bracket.
  double q = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = radial_cumulative(profile, q) - s;
    if (g > 0.0) {
      hi = q;
    } else {
      lo = q;
    }
    if (hi - lo < 1e-13) break;
    const double slope = area * std::pow(q, profile.dim - 1) * profile.density(q);
    double next = (slope > 0.0 && std::isfinite(slope)) ? q - g / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - q);
    q = next;
    if (step < 1e-13) break;
  }
  return q;
}

std::vector<double> radial_quantile_map(const RadialProfile& profile, std::span<const double> x) {
  const double r = norm(x);
  if (!(r > 0.0 && r < 1.0)) throw DomainError("radial_quantile_map: requires 0 < |x| < 1");
  const double q = radial_quantile_oracle(profile, r);
  std::vector<double> y(x.begin(), x.end());
  for (double& v : y) v *= q / r;
  return y;
}

PointSet Density::sample(std::size_t n, std::uint64_t seed) const {
  UniformStream stream(seed);
  PointSet out(dim(), n);
  std::vector<double> u(static_cast<std::size_t>(uniform_dim()));
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : u) v = stream.next();
    transform(u, out[i]);
  }
  return out;
}

PointSet Density::quasi_sample(std::size_t n) const {
  PointSet out(dim(), n);
  std::vector<double> u(static_cast<std::size_t>(uniform_dim()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = radical_inverse(i + 1, nth_prime(static_cast<unsigned>(k)));
    transform(u, out[i]);
  }
  return out;
}

WeightedSample read_weighted_csv(std::istream& in, int dim) {
  if (dim < 1) throw ConfigError("csv: dimension must be >= 1");
  WeightedSample t;
  t.points.dim = dim;
  std::string line;
  int line_no = 0;
  bool any_weight = false, any_missing = false;
  const auto where = [&] { return "csv line " + std::to_string(line_no) + ": "; };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    std::vector<double> values;
    bool numeric = true;
    for (const auto& f : fields) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(f, &used));
        if (f.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (t.points.empty() && line_no == 1) continue;  // header
      throw ConfigError(where() + "non-numeric field");
    }
    const auto d = static_cast<std::size_t>(dim);
    if (values.size() != d && values.size() != d + 1)
      throw ConfigError(where() + "expected " + std::to_string(dim) + " coordinates and an optional weight");
    for (double v : values)
      if (!std::isfinite(v)) throw ConfigError(where() + "non-finite value");
    t.points.push_back(std::span<const double>(values.data(), d));
    if (values.size() == d + 1) {
      if (!(values[d] >= 0.0)) throw ConfigError(where() + "negative weight");
      t.weights.push_back(values[d]);
      any_weight = true;
    } else {
      t.weights.push_back(1.0);
      any_missing = true;
    }
  }
  if (t.points.empty()) throw ConfigError("csv: no rows");
  if (any_weight && any_missing) throw ConfigError("csv: either every row or no row carries a weight");
  double total = 0.0;
  for (double w : t.weights) total += w;
  if (!(total > 0.0)) throw ConfigError("csv: weights sum to zero");
  for (double& w : t.weights) w /= total;
  return t;
}

}  // namespace centerward
