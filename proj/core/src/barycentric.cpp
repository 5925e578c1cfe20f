#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <cstdio>
#include <ostream>
#include <string>

#include "centerward/entropic.hpp"
#include "centerward/errors.hpp"

namespace centerward {
namespace {

/// Conditional mean sum_k w_k z_k / sum_k w_k with log w_k = (pot_k - |q - z_k|^2/2)/eps + log m_k.
/// Returns false when no weight is finite.
bool conditional_mean(const PointSet& pts, const std::vector<double>& pot, const std::vector<double>& log_m,
                      const double* q, double eps, std::vector<double>& buf, double* out) {
  const int d = pts.dim;
  const std::size_t n = pts.size();
  buf.resize(n);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double* z = pts.coords.data() + k * static_cast<std::size_t>(d);
    double c = 0.0;
    for (int a = 0; a < d; ++a) c += (q[a] - z[a]) * (q[a] - z[a]);
    buf[k] = (pot[k] - 0.5 * c) / eps + log_m[k];
    mx = std::max(mx, buf[k]);
  }
  for (int a = 0; a < d; ++a) out[a] = 0.0;
  if (!std::isfinite(mx)) return false;
  const double cutoff = mx - 60.0;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (buf[k] < cutoff) continue;
    const double w = std::exp(buf[k] - mx);
    total += w;
    const double* z = pts.coords.data() + k * static_cast<std::size_t>(d);
    for (int a = 0; a < d; ++a) out[a] += w * z[a];
  }
  for (int a = 0; a < d; ++a) out[a] /= total;
  return true;
}

std::vector<double> log_of(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::log(x); });
  return out;
}

void require_solved(const GridCoupling& c) {
  if (c.f.size() != c.source.size() || c.g.size() != c.target.size() || !(c.epsilon > 0.0))
    throw StateError("coupling has not been solved");
}

}  // namespace

MapTable barycentric_map(const GridCoupling& coupling, MapDirection direction) {
  require_solved(coupling);
  const bool fwd = direction == MapDirection::SourceToTarget;
  const NodeSet& from = fwd ? coupling.source : coupling.target;
  const NodeSet& to = fwd ? coupling.target : coupling.source;
  const std::vector<double>& pot = fwd ? coupling.g : coupling.f;
  const std::vector<double> log_m = log_of(to.masses);
  const int d = from.dim();

  MapTable t;
  t.direction = direction;
  t.epsilon = coupling.epsilon;
  t.nodes = from.points;
  t.images = PointSet(d, from.size());
  std::vector<char> bad(from.size(), 0);
  const auto n = static_cast<std::ptrdiff_t>(from.size());
#pragma omp parallel
  {
    std::vector<double> buf;
#pragma omp for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      double* out = t.images.coords.data() + i * static_cast<std::size_t>(d);
      const double* q = from.points.coords.data() + i * static_cast<std::size_t>(d);
      if (!conditional_mean(to.points, pot, log_m, q, coupling.epsilon, buf, out)) bad[i] = 1;
    }
  }
  for (std::size_t i = 0; i < bad.size(); ++i)
    if (bad[i]) t.flagged.push_back(i);
  return t;
}

std::vector<double> entropic_inverse(const GridCoupling& coupling, std::span<const double> y) {
  require_solved(coupling);
  if (static_cast<int>(y.size()) != coupling.target.dim()) throw DomainError("entropic_inverse: dimension mismatch");
  std::vector<double> out(y.size()), buf;
  if (!conditional_mean(coupling.source.points, coupling.f, log_of(coupling.source.masses), y.data(), coupling.epsilon,
                        buf, out.data()))
    throw DomainError("entropic_inverse: point carries no mass");
  return out;
}

std::vector<double> entropic_forward(const GridCoupling& coupling, std::span<const double> x) {
  require_solved(coupling);
  if (static_cast<int>(x.size()) != coupling.source.dim()) throw DomainError("entropic_forward: dimension mismatch");
  if (norm(x) >= 1.0) throw DomainError("entropic_forward: point outside the open unit ball");
  std::vector<double> out(x.size()), buf;
  if (!conditional_mean(coupling.target.points, coupling.g, log_of(coupling.target.masses), x.data(), coupling.epsilon,
                        buf, out.data()))
    throw DomainError("entropic_forward: point carries no mass");
  return out;
}

PolarInterpolator::PolarInterpolator(const BallGrid& grid, const MapTable& table)
    : dim_(grid.dim), n_r_(grid.n_r), n_theta_(grid.n_theta()), n_phi_(grid.n_phi()), images_(table.images) {
  if (table.direction != MapDirection::SourceToTarget || table.images.size() != grid.nodes.size())
    throw DomainError("PolarInterpolator: table does not match the grid");
}

namespace {

struct Bracket {
  int lo, hi;
  double w;  // weight of hi
};

Bracket radial_bracket(double r, int n) {
  const double t = r * n - 0.5;
  if (t <= 0.0) return {0, 0, 0.0};
  if (t >= n - 1) return {n - 1, n - 1, 0.0};
  const int k = static_cast<int>(std::floor(t));
  return {k, k + 1, t - k};
}

Bracket periodic_bracket(double angle, double step, int n) {
  double u = angle / step;
  u -= n * std::floor(u / n);
  int k = static_cast<int>(std::floor(u));
  const double w = u - k;
  k %= n;
  return {k, (k + 1) % n, w};
}

/// Polar bands have nodes at (l + 1/2) * step; clamp at the poles.
Bracket band_bracket(double polar, double step, int n) {
  const double t = polar / step - 0.5;
  if (t <= 0.0) return {0, 0, 0.0};
  if (t >= n - 1) return {n - 1, n - 1, 0.0};
  const int k = static_cast<int>(std::floor(t));
  return {k, k + 1, t - k};
}

}  // namespace

std::vector<double> PolarInterpolator::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DomainError("PolarInterpolator: dimension mismatch");
  const double r = norm(x);
  if (r >= 1.0) throw DomainError("PolarInterpolator: point outside the open unit ball");
  std::vector<double> out(static_cast<std::size_t>(dim_), 0.0);
  const Bracket br = radial_bracket(r, n_r_);
  auto add = [&](int k, int l, int m, double w) {
    if (w == 0.0) return;
    const std::size_t idx = (static_cast<std::size_t>(k) * n_theta_ + l) * n_phi_ + m;
    const auto img = images_[idx];
    for (int a = 0; a < dim_; ++a) out[static_cast<std::size_t>(a)] += w * img[static_cast<std::size_t>(a)];
  };
  if (dim_ == 2) {
    const Bracket ba = periodic_bracket(std::atan2(x[1], x[0]), 2.0 * std::numbers::pi / n_theta_, n_theta_);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        add(a ? br.hi : br.lo, b ? ba.hi : ba.lo, 0, (a ? br.w : 1.0 - br.w) * (b ? ba.w : 1.0 - ba.w));
  } else {
    const double polar = r > 0.0 ? std::acos(std::clamp(x[2] / r, -1.0, 1.0)) : 0.0;
    const Bracket bt = band_bracket(polar, std::numbers::pi / n_theta_, n_theta_);
    const Bracket bp = periodic_bracket(std::atan2(x[1], x[0]), std::numbers::pi / (n_phi_ / 2), n_phi_);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          add(a ? br.hi : br.lo, b ? bt.hi : bt.lo, c ? bp.hi : bp.lo,
              (a ? br.w : 1.0 - br.w) * (b ? bt.w : 1.0 - bt.w) * (c ? bp.w : 1.0 - bp.w));
  }
  return out;
}

void write_coupling_csv(const GridCoupling& coupling, std::ostream& out, std::size_t max_entries) {
  require_solved(coupling);
  const std::size_t n = coupling.source.size(), m = coupling.target.size();
  if (n * m > max_entries)
    throw ConfigError("coupling has " + std::to_string(n * m) + " entries, above the export limit of " +
                      std::to_string(max_entries));
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", std::exp(coupling.log_plan(i, j)));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace centerward
