#pragma once

#include <functional>

namespace crp {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (61 point) on [a, b]; b may be +infinity.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-10, double abs_tol = 1e-13);

/// Integral over (0, inf), split at `split` so the finite bulk and the tail
/// are refined independently.
QuadratureResult integrate_half_line(const std::function<double(double)>& f, double split,
                                     double rel_tol = 1e-10, double abs_tol = 1e-13);

}  // namespace crp
