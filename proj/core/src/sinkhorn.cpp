#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "centerward/entropic.hpp"
#include "centerward/errors.hpp"

namespace centerward {
namespace {

inline double half_sq(const double* x, const double* y, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    const double t = x[k] - y[k];
    s += t * t;
  }
  return 0.5 * s;
}

bool usable(double s) { return s > 1e-290 && s < 1e290; }

std::vector<double> logs(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::log(v[i]);
  return out;
}

void check_measure(const NodeSet& s, const char* which) {
  if (s.size() == 0) throw DomainError(std::string("sinkhorn_solve: empty ") + which);
  if (s.points.size() != s.size()) throw DomainError(std::string("sinkhorn_solve: malformed ") + which);
  for (double m : s.masses)
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError(std::string("sinkhorn_solve: ") + which + " masses must be positive");
  if (std::abs(s.total_mass() - 1.0) > 1e-9) throw DomainError(std::string("sinkhorn_solve: ") + which + " masses must sum to 1");
}

/// Retained kernel entries K_ij = exp((fa_i + ga_j - c_ij)/eps) for the
/// potentials (fa, ga) current at the last rebuild. Between rebuilds the
/// iterations only rescale rows and columns, so no exp per entry is needed.
class Support {
 public:
  bool dense = true;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> kernel;
  std::vector<double> fa, ga;

  std::size_t entries(std::size_t n, std::size_t m) const { return dense ? n * m : col.size(); }

  void build(const NodeSet& src, const NodeSet& tgt, const std::vector<double>& f, const std::vector<double>& g,
             double eps, double truncation, std::size_t limit) {
    const std::size_t n = src.size(), m = tgt.size();
    const int d = src.dim();
    dense = false;
    fa = f;
    ga = g;
    row_ptr.assign(n + 1, 0);
    col.clear();
    kernel.clear();
    const double inv = 1.0 / eps;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = src.points.coords.data() + i * static_cast<std::size_t>(d);
      for (std::size_t j = 0; j < m; ++j) {
        const double c = half_sq(x, tgt.points.coords.data() + j * static_cast<std::size_t>(d), d);
        const double s = (f[i] + g[j] - c) * inv;
        if (s >= -truncation) {
          col.push_back(static_cast<std::uint32_t>(j));
          kernel.push_back(s);
        }
      }
      if (col.size() > limit) {
        dense = true;
        row_ptr.clear();
        std::vector<std::uint32_t>().swap(col);
        std::vector<double>().swap(kernel);
        return;
      }
      row_ptr[i + 1] = col.size();
    }
    for (double& k : kernel) k = std::exp(k);
  }

  /// Largest |f - fa| + |g - ga|, in units of eps.
  double drift(const std::vector<double>& f, const std::vector<double>& g, double eps) const {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) a = std::max(a, std::abs(f[i] - fa[i]));
    for (std::size_t j = 0; j < g.size(); ++j) b = std::max(b, std::abs(g[j] - ga[j]));
    return (a + b) / eps;
  }
};

class Solver {
 public:
  Solver(const NodeSet& src, const NodeSet& tgt)
      : src_(src), tgt_(tgt), n_(src.size()), m_(tgt.size()), d_(src.dim()), log_a_(logs(src.masses)),
        log_b_(logs(tgt.masses)) {}

  /// f_i <- -eps log sum_j b_j exp((g_j - c_ij)/eps), making every row sum exact.
  void update_rows(std::vector<double>& f, const std::vector<double>& g, double eps, const Support& sup) const {
    const double inv = 1.0 / eps;
    const auto n = static_cast<std::ptrdiff_t>(n_);
    std::vector<double> vb;
    if (!sup.dense) {
      vb.resize(m_);
      for (std::size_t j = 0; j < m_; ++j) vb[j] = tgt_.masses[j] * std::exp((g[j] - sup.ga[j]) * inv);
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      double s = 0.0;
      if (sup.dense) {
        // Shifted by the previous f_i; the terms stay bounded once the other marginal is exact.
        const double* x = src_.points.coords.data() + i * static_cast<std::size_t>(d_);
        const double fi = f[i];
        for (std::size_t j = 0; j < m_; ++j)
          s += std::exp((fi + g[j] - half_sq(x, tgt_.points.coords.data() + j * static_cast<std::size_t>(d_), d_)) * inv +
                        log_b_[j]);
        if (usable(s)) {
          f[i] = fi - eps * std::log(s);
          continue;
        }
      } else {
        for (std::size_t k = sup.row_ptr[i]; k < sup.row_ptr[i + 1]; ++k) s += sup.kernel[k] * vb[sup.col[k]];
        if (usable(s)) {
          f[i] = sup.fa[i] - eps * std::log(s);
          continue;
        }
      }
      f[i] = row_lse_two_pass(i, g, eps);
    }
  }

  /// Column sums of the plan divided by b_j, for the current f and g.
  void column_ratios(const std::vector<double>& f, const std::vector<double>& g, double eps, const Support& sup,
                     std::vector<double>& ratio) const {
    const double inv = 1.0 / eps;
    ratio.assign(m_, 0.0);
    if (sup.dense) {
      for (std::size_t i = 0; i < n_; ++i) {
        const double* x = src_.points.coords.data() + i * static_cast<std::size_t>(d_);
        const double base = f[i] * inv + log_a_[i];
        for (std::size_t j = 0; j < m_; ++j)
          ratio[j] += std::exp(base + (g[j] - half_sq(x, tgt_.points.coords.data() + j * static_cast<std::size_t>(d_), d_)) * inv);
      }
      return;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const double ua = src_.masses[i] * std::exp((f[i] - sup.fa[i]) * inv);
      for (std::size_t k = sup.row_ptr[i]; k < sup.row_ptr[i + 1]; ++k) ratio[sup.col[k]] += ua * sup.kernel[k];
    }
    for (std::size_t j = 0; j < m_; ++j) ratio[j] *= std::exp((g[j] - sup.ga[j]) * inv);
  }

  /// Exact dense two-pass log-sum-exp column update.
  void update_columns_two_pass(const std::vector<double>& f, std::vector<double>& g, double eps) const {
    const double inv = 1.0 / eps;
    std::vector<double> mx(m_, -std::numeric_limits<double>::infinity()), sum(m_, 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < n_; ++i) {
        const double* x = src_.points.coords.data() + i * static_cast<std::size_t>(d_);
        const double base = f[i] * inv + log_a_[i];
        for (std::size_t j = 0; j < m_; ++j) {
          const double v = base - half_sq(x, tgt_.points.coords.data() + j * static_cast<std::size_t>(d_), d_) * inv;
          if (pass == 0) {
            mx[j] = std::max(mx[j], v);
          } else {
            sum[j] += std::exp(v - mx[j]);
          }
        }
      }
    }
    for (std::size_t j = 0; j < m_; ++j) g[j] = -eps * (mx[j] + std::log(sum[j]));
  }

  double dual(const std::vector<double>& f, const std::vector<double>& g) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += src_.masses[i] * f[i];
    for (std::size_t j = 0; j < m_; ++j) s += tgt_.masses[j] * g[j];
    return s;
  }

 private:
  double row_lse_two_pass(std::size_t i, const std::vector<double>& g, double eps) const {
    const double inv = 1.0 / eps;
    const double* x = src_.points.coords.data() + i * static_cast<std::size_t>(d_);
    double mx = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < m_; ++j) {
        const double v = (g[j] - half_sq(x, tgt_.points.coords.data() + j * static_cast<std::size_t>(d_), d_)) * inv + log_b_[j];
        if (pass == 0) {
          mx = std::max(mx, v);
        } else {
          sum += std::exp(v - mx);
        }
      }
    }
    return -eps * (mx + std::log(sum));
  }

  const NodeSet& src_;
  const NodeSet& tgt_;
  std::size_t n_, m_;
  int d_;
  std::vector<double> log_a_, log_b_;
};

}  // namespace

GridCoupling sinkhorn_solve(const NodeSet& source, const NodeSet& target, const SinkhornOptions& options) {
  check_measure(source, "source");
  check_measure(target, "target");
  if (source.dim() != target.dim()) throw DomainError("sinkhorn_solve: source and target dimensions differ");
  if (options.epsilons.empty()) throw DomainError("sinkhorn_solve: empty epsilon schedule");
  for (double e : options.epsilons)
    if (!(e > 0.0)) throw DomainError("sinkhorn_solve: epsilon must be positive");
  if (!(options.tol > 0.0)) throw DomainError("sinkhorn_solve: tol must be positive");
  if (target.size() > std::numeric_limits<std::uint32_t>::max()) throw DomainError("sinkhorn_solve: target too large");

  GridCoupling out;
  out.source = source;
  out.target = target;
  out.f.assign(source.size(), 0.0);
  out.g.assign(target.size(), 0.0);
  if (!options.initial_target_potential.empty()) {
    if (options.initial_target_potential.size() != target.size())
      throw DomainError("sinkhorn_solve: warm-start potential has the wrong size");
    out.g = options.initial_target_potential;
  }

  Solver solver(source, target);
  Support support;
  std::vector<double> ratio;
  int total = 0;

  for (std::size_t stage_idx = 0; stage_idx < options.epsilons.size(); ++stage_idx) {
    const double eps = options.epsilons[stage_idx];
    const bool last = stage_idx + 1 == options.epsilons.size();
    const double stage_tol = last ? options.tol : options.tol * options.intermediate_tol_factor;
    SinkhornStage stage;
    stage.epsilon = eps;

    // From cold potentials, make the rows feasible before choosing the support.
    if (stage_idx == 0) solver.update_rows(out.f, out.g, eps, Support{});
    support.build(source, target, out.f, out.g, eps, options.truncation, options.dense_limit);
    stage.dense = support.dense;
    stage.support = support.entries(source.size(), target.size());

    double err = std::numeric_limits<double>::infinity();
    for (;;) {
      solver.update_rows(out.f, out.g, eps, support);
      stage.dual_trace.push_back(solver.dual(out.f, out.g));

      solver.column_ratios(out.f, out.g, eps, support, ratio);
      bool ok = true;
      err = 0.0;
      for (std::size_t j = 0; j < target.size(); ++j) {
        if (!usable(ratio[j])) {
          ok = false;
          break;
        }
        err = std::max(err, target.masses[j] * std::abs(ratio[j] - 1.0));
      }
      if (!ok) err = std::numeric_limits<double>::infinity();
      if (err <= stage_tol) break;

      if (ok) {
        for (std::size_t j = 0; j < target.size(); ++j) out.g[j] -= eps * std::log(ratio[j]);
      } else {
        // A column may have lost all retained entries; recompute exactly and rebuild.
        solver.update_columns_two_pass(out.f, out.g, eps);
        if (!support.dense) {
          support.build(source, target, out.f, out.g, eps, options.truncation, options.dense_limit);
          ++stage.rebuilds;
          stage.dense = support.dense;
          stage.support = support.entries(source.size(), target.size());
        }
      }
      ++stage.iterations;
      ++total;
      if (total >= options.max_iter) {
        out.epsilon = eps;
        out.marginal_err = err;
        std::ostringstream msg;
        msg << "sinkhorn_solve: iteration budget " << options.max_iter << " exhausted at epsilon " << eps
            << ", marginal error " << err;
        throw ConvergenceError(msg.str(), err, total);
      }
      if (!support.dense && support.drift(out.f, out.g, eps) > 0.5 * options.truncation) {
        support.build(source, target, out.f, out.g, eps, options.truncation, options.dense_limit);
        ++stage.rebuilds;
        stage.dense = support.dense;
        stage.support = support.entries(source.size(), target.size());
      }
    }
    stage.marginal_err = err;
    out.stages.push_back(stage);
    if (options.log) {
      std::ostringstream msg;
      msg << "stage eps=" << eps << " iterations=" << stage.iterations << " marginal_err=" << err
          << " support=" << stage.support << (stage.dense ? " (dense)" : "") << " rebuilds=" << stage.rebuilds;
      options.log(msg.str());
    }
    out.epsilon = eps;
    out.marginal_err = err;
  }
  out.iterations = total;
  return out;
}

double GridCoupling::log_plan(std::size_t i, std::size_t j) const {
  const int d = source.dim();
  const double c = half_sq(source.points.coords.data() + i * static_cast<std::size_t>(d),
                           target.points.coords.data() + j * static_cast<std::size_t>(d), d);
  return (f[i] + g[j] - c) / epsilon + std::log(source.masses[i]) + std::log(target.masses[j]);
}

double GridCoupling::dual_objective() const {
  double s = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) s += source.masses[i] * f[i];
  for (std::size_t j = 0; j < target.size(); ++j) s += target.masses[j] * g[j];
  for (std::size_t i = 0; i < source.size(); ++i)
    for (std::size_t j = 0; j < target.size(); ++j) mass += std::exp(log_plan(i, j));
  return s - epsilon * mass + epsilon;
}

std::array<double, 2> GridCoupling::marginal_violation() const {
  std::vector<double> rows(source.size(), 0.0), cols(target.size(), 0.0);
  for (std::size_t i = 0; i < source.size(); ++i)
    for (std::size_t j = 0; j < target.size(); ++j) {
      const double p = std::exp(log_plan(i, j));
      rows[i] += p;
      cols[j] += p;
    }
  double rerr = 0.0, cerr = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) rerr = std::max(rerr, std::abs(rows[i] - source.masses[i]));
  for (std::size_t j = 0; j < cols.size(); ++j) cerr = std::max(cerr, std::abs(cols[j] - target.masses[j]));
  return {cerr, rerr};
}

}  // namespace centerward
