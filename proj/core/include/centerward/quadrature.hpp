#pragma once

#include <functional>

namespace centerward {

/// Adaptive Gauss-Legendre quadrature of f over [a, b].
///
/// Each panel is integrated with a 10-point rule and compared against the sum
/// of the two half panels; panels are split until the difference is below
/// abs_tol (distributed over panels by length). Integrable endpoint
/// singularities are fine because nodes are interior.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-12,
                          int max_depth = 40);

}  // namespace centerward
