#include <algorithm>
#include <cmath>
#include <numbers>

#include "centerward/entropic.hpp"
#include "centerward/errors.hpp"

namespace centerward {
namespace {

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

}  // namespace

double MaResidualField::determinant_at(double r) const {
  if (ring_determinant.empty()) throw StateError("determinant_at: empty field");
  if (r <= ring_determinant.front().first) return ring_determinant.front().second;
  if (r >= ring_determinant.back().first) return ring_determinant.back().second;
  auto it = std::lower_bound(ring_determinant.begin(), ring_determinant.end(), r,
                             [](const auto& p, double v) { return p.first < v; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (r - lo.first) / (hi.first - lo.first);
  return (1.0 - w) * lo.second + w * hi.second;
}

MaResidualField ma_residual_field(const MapTable& table, const Density& density, const BallGrid& grid, double r_lo,
                                  double r_hi) {
  if (!(0.0 < r_lo && r_lo < r_hi && r_hi < 1.0)) throw DomainError("ma_residual_field: need 0 < r_lo < r_hi < 1");
  if (table.direction != MapDirection::SourceToTarget || table.images.size() != grid.nodes.size())
    throw DomainError("ma_residual_field: table does not match the grid");
  if (density.dim() != grid.dim) throw DomainError("ma_residual_field: dimension mismatch");
  const int d = grid.dim;
  const double dr = 1.0 / grid.n_r;
  const double dt = grid.theta_step();
  const double dp = grid.phi_step();
  const double area = sphere_area(d);

  MaResidualField out;
  auto img = [&](int k, int l, int m) { return table.images[grid.index(k, l, m)]; };
  for (int k = 1; k + 1 < grid.n_r; ++k) {
    const double r = grid.radius(k);
    if (r < r_lo || r > r_hi) continue;
    double ring_sum = 0.0;
    int ring_count = 0;
    const int l_begin = d == 2 ? 0 : 1;
    const int l_end = d == 2 ? grid.n_theta() : grid.n_theta() - 1;
    for (int l = l_begin; l < l_end; ++l) {
      for (int m = 0; m < grid.n_phi(); ++m) {
        double det;
        std::span<const double> q = img(k, l, m);
        if (d == 2) {
          const int lp = (l + 1) % grid.n_theta(), lm = (l + grid.n_theta() - 1) % grid.n_theta();
          const auto a = img(k + 1, l, 0), b = img(k - 1, l, 0), c = img(k, lp, 0), e = img(k, lm, 0);
          const double qr0 = (a[0] - b[0]) / (2 * dr), qr1 = (a[1] - b[1]) / (2 * dr);
          const double qt0 = (c[0] - e[0]) / (2 * dt), qt1 = (c[1] - e[1]) / (2 * dt);
          det = (qr0 * qt1 - qr1 * qt0) / r;
        } else {
          const int mp = (m + 1) % grid.n_phi(), mm = (m + grid.n_phi() - 1) % grid.n_phi();
          double qr[3], qt[3], qp[3];
          const auto a = img(k + 1, l, m), b = img(k - 1, l, m);
          const auto c = img(k, l + 1, m), e = img(k, l - 1, m);
          const auto g = img(k, l, mp), h = img(k, l, mm);
          for (int s = 0; s < 3; ++s) {
            qr[s] = (a[s] - b[s]) / (2 * dr);
            qt[s] = (c[s] - e[s]) / (2 * dt);
            qp[s] = (g[s] - h[s]) / (2 * dp);
          }
          const double triple = qr[0] * (qt[1] * qp[2] - qt[2] * qp[1]) - qr[1] * (qt[0] * qp[2] - qt[2] * qp[0]) +
                                qr[2] * (qt[0] * qp[1] - qt[1] * qp[0]);
          det = triple / (r * r * std::sin(grid.polar[grid.index(k, l, m)][1]));
        }
        const double u = 1.0 / (area * std::pow(r, d - 1));
        out.radii.push_back(r);
        out.determinant.push_back(det);
        out.residual.push_back(std::abs(det * density.eval(q) / u - 1.0));
        ring_sum += det;
        ++ring_count;
      }
    }
    if (ring_count) out.ring_determinant.emplace_back(r, ring_sum / ring_count);
  }
  if (out.residual.empty()) throw DomainError("ma_residual_field: no interior nodes in the annulus");
  out.median = quantile_of(out.residual, 0.5);
  out.p90 = quantile_of(out.residual, 0.9);
  out.max = *std::max_element(out.residual.begin(), out.residual.end());
  return out;
}

}  // namespace centerward
