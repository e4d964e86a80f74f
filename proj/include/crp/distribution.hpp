#pragma once

#include <string>

#include "crp/random.hpp"

namespace crp {

enum class Family { Exponential, Gamma, Weibull };

/// A positive-support parametric law. Parameters are validated on
/// construction, so every instance is admissible.
///
///   Exponential(rate)        density rate e^{-rate x}
///   Gamma(rate, shape)       density rate^shape x^{shape-1} e^{-rate x} / Gamma(shape)
///   Weibull(shape, scale)    density shape/scale^shape x^{shape-1} e^{-(x/scale)^shape}, shape >= 1
class ParamDistribution {
 public:
  static ParamDistribution exponential(double rate);
  static ParamDistribution gamma(double rate, double shape);
  static ParamDistribution weibull(double shape, double scale);

  Family family() const { return family_; }
  /// Exponential/Gamma rate; for Weibull the equivalent 1/scale.
  double rate() const;
  /// Gamma/Weibull shape; 1 for Exponential.
  double shape() const;
  /// Weibull scale; 1/rate otherwise.
  double scale() const;

  /// Gamma with integral shape, including the Exponential case.
  bool is_erlang() const;
  /// Memoryless law: Exponential, Gamma with shape 1 or Weibull with shape 1.
  bool is_exponential() const;

  std::string describe() const;

  friend bool operator==(const ParamDistribution&, const ParamDistribution&) = default;

 private:
  ParamDistribution(Family family, double a, double b) : family_(family), a_(a), b_(b) {}

  Family family_;
  double a_;  // rate (Exp/Gamma) or shape (Weibull)
  double b_;  // shape (Gamma) or scale (Weibull); unused for Exp
};

double density(const ParamDistribution& d, double x);
double log_density(const ParamDistribution& d, double x);

double cdf(const ParamDistribution& d, double x);
double survival(const ParamDistribution& d, double x);
/// ln survival(d, x) without forming survival(d, x) where a closed form
/// exists; -inf if the upper incomplete gamma underflows.
double log_survival(const ParamDistribution& d, double x);

/// Inverse CDF for p in [0, 1).
double quantile(const ParamDistribution& d, double p);

double sample(const ParamDistribution& d, UniformSource& rng);

double mean(const ParamDistribution& d);
double second_moment(const ParamDistribution& d);
double variance(const ParamDistribution& d);

/// E[e^{cX}]; throws DivergenceError when infinite.
double mgf(const ParamDistribution& d, double c);
/// Laplace-Stieltjes transform E[e^{-sX}], s >= 0.
double lst(const ParamDistribution& d, double s);

}  // namespace crp
