#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crp/distribution.hpp"

namespace crp {

inline constexpr double kDefaultTailTol = 1e-12;

/// E[N_t] = sum_{n>=1} K^{*n}(t), summed until a term drops below tail_tol.
/// Gamma (and Exponential) laws use the closed form K^{*n} = Ga(rate, n shape);
/// Weibull laws with shape > 1 use a midpoint-mass grid convolution with
/// step mean(K)/2000, evaluated against the exact K in the last convolution.
double renewal_mean(const ParamDistribution& k, double t, double tail_tol = kDefaultTailTol);

/// E[N_u] at u = 0, h, 2h, ..., (n_points-1) h.
std::vector<double> renewal_mean_grid(const ParamDistribution& k, double step,
                                      std::size_t n_points, double tail_tol = kDefaultTailTol);

struct LinearityReport {
  std::vector<double> relative_deviation;  // one per grid point
  double max_rel_dev = 0.0;
  bool is_linear = false;
};

/// Compares E[N_t] with the Poisson line t / mean(K); linear iff the worst
/// relative deviation is at most 10 * tail_tol.
LinearityReport poisson_linearity_report(const ParamDistribution& k, std::span<const double> grid,
                                         double tail_tol = kDefaultTailTol);

struct TransformReport {
  enum class Method { ExponentialClosedForm, RenewalTransform };
  Method method = Method::ExponentialClosedForm;
  std::vector<double> s_values;    // points actually evaluated
  std::vector<double> deviations;  // |lhs - rhs| per evaluated point
  double max_abs_dev = 0.0;
  /// Points at (or numerically indistinguishable from) s = 0, where the
  /// renewal transform is unbounded; they are reported, not evaluated.
  std::size_t boundary_points = 0;
};

/// Laplace-Stieltjes relation between K and its renewal function. Memoryless K:
/// lst(K, s) against rate/(rate + s). Otherwise 1/(1 - lst(K, s)) against
/// 1 + s * int_0^inf e^{-su} E[N_u] du by the trapezoid rule.
TransformReport lst_relation_check(const ParamDistribution& k, std::span<const double> s_grid,
                                   double tail_tol = kDefaultTailTol);

}  // namespace crp
