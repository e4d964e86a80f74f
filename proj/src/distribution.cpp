#include "crp/distribution.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "crp/errors.hpp"
#include "crp/quadrature.hpp"

namespace crp {

namespace {

// Closed-form Erlang survival is used up to this shape.
constexpr double kMaxErlangShape = 64.0;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be a positive finite number");
  }
}

void require_nonnegative_arg(double x) {
  if (!(x >= 0.0)) throw DomainError("argument must be nonnegative");
}

// ln sum_{i<n} y^i / i!
double log_erlang_partial_sum(double y, int n) {
  double term = 1.0;
  double sum = 1.0;
  for (int i = 1; i < n; ++i) {
    term *= y / i;
    sum += term;
  }
  return std::log(sum);
}

double standard_normal(UniformSource& rng) {
  const double u1 = rng.next_uniform();
  const double u2 = rng.next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Marsaglia & Tsang, unit rate.
double standard_gamma(double shape, UniformSource& rng) {
  if (shape < 1.0) {
    const double g = standard_gamma(shape + 1.0, rng);
    return g * std::pow(rng.next_uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double z = standard_normal(rng);
    double v = 1.0 + c * z;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.next_uniform();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
  }
}

double weibull_mgf_numeric(const ParamDistribution& d, double c) {
  const double k = d.shape();
  const double b = d.scale();
  auto integrand = [=](double x) {
    if (x <= 0.0) return 0.0;
    const double z = x / b;
    return std::exp(c * x + std::log(k / b) + (k - 1.0) * std::log(z) - std::pow(z, k));
  };
  const auto res = integrate_half_line(integrand, mean(d), 1e-10, 1e-300);
  if (!res.converged || !std::isfinite(res.value)) {
    throw DivergenceError("Weibull moment generating function did not converge");
  }
  return res.value;
}

}  // namespace

ParamDistribution ParamDistribution::exponential(double rate) {
  require_positive(rate, "exponential rate");
  return {Family::Exponential, rate, 1.0};
}

ParamDistribution ParamDistribution::gamma(double rate, double shape) {
  require_positive(rate, "gamma rate");
  require_positive(shape, "gamma shape");
  return {Family::Gamma, rate, shape};
}

ParamDistribution ParamDistribution::weibull(double shape, double scale) {
  require_positive(shape, "weibull shape");
  require_positive(scale, "weibull scale");
  if (shape < 1.0) throw DomainError("weibull shape must be >= 1");
  return {Family::Weibull, shape, scale};
}

double ParamDistribution::rate() const {
  return family_ == Family::Weibull ? 1.0 / b_ : a_;
}

double ParamDistribution::shape() const {
  switch (family_) {
    case Family::Exponential: return 1.0;
    case Family::Gamma: return b_;
    case Family::Weibull: return a_;
  }
  return 1.0;
}

double ParamDistribution::scale() const {
  return family_ == Family::Weibull ? b_ : 1.0 / a_;
}

bool ParamDistribution::is_erlang() const {
  if (family_ == Family::Exponential) return true;
  return family_ == Family::Gamma && b_ == std::floor(b_);
}

bool ParamDistribution::is_exponential() const { return shape() == 1.0; }

std::string ParamDistribution::describe() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(12);
  switch (family_) {
    case Family::Exponential: os << "Exp(rate=" << a_ << ")"; break;
    case Family::Gamma: os << "Ga(rate=" << a_ << ", shape=" << b_ << ")"; break;
    case Family::Weibull: os << "Weibull(shape=" << a_ << ", scale=" << b_ << ")"; break;
  }
  return os.str();
}

double log_density(const ParamDistribution& d, double x) {
  if (!(x > 0.0)) throw DomainError("density argument must be positive");
  switch (d.family()) {
    case Family::Exponential:
      return std::log(d.rate()) - d.rate() * x;
    case Family::Gamma: {
      const double r = d.rate();
      const double k = d.shape();
      return k * std::log(r) + (k - 1.0) * std::log(x) - r * x - std::lgamma(k);
    }
    case Family::Weibull: {
      const double k = d.shape();
      const double z = x / d.scale();
      return std::log(k / d.scale()) + (k - 1.0) * std::log(z) - std::pow(z, k);
    }
  }
  return 0.0;
}

double density(const ParamDistribution& d, double x) { return std::exp(log_density(d, x)); }

double cdf(const ParamDistribution& d, double x) {
  require_nonnegative_arg(x);
  if (x == 0.0) return 0.0;
  switch (d.family()) {
    case Family::Exponential: return -std::expm1(-d.rate() * x);
    case Family::Gamma: return boost::math::gamma_p(d.shape(), d.rate() * x);
    case Family::Weibull: return -std::expm1(-std::pow(x / d.scale(), d.shape()));
  }
  return 0.0;
}

double survival(const ParamDistribution& d, double x) {
  require_nonnegative_arg(x);
  if (x == 0.0) return 1.0;
  switch (d.family()) {
    case Family::Exponential: return std::exp(-d.rate() * x);
    case Family::Gamma:
      if (d.is_erlang() && d.shape() <= kMaxErlangShape) return std::exp(log_survival(d, x));
      return boost::math::gamma_q(d.shape(), d.rate() * x);
    case Family::Weibull: return std::exp(-std::pow(x / d.scale(), d.shape()));
  }
  return 1.0;
}

double log_survival(const ParamDistribution& d, double x) {
  require_nonnegative_arg(x);
  if (x == 0.0) return 0.0;
  switch (d.family()) {
    case Family::Exponential: return -d.rate() * x;
    case Family::Gamma: {
      const double y = d.rate() * x;
      if (d.is_erlang() && d.shape() <= kMaxErlangShape) {
        return -y + log_erlang_partial_sum(y, static_cast<int>(d.shape()));
      }
      return std::log(boost::math::gamma_q(d.shape(), y));
    }
    case Family::Weibull: return -std::pow(x / d.scale(), d.shape());
  }
  return 0.0;
}

double quantile(const ParamDistribution& d, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("quantile level must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  switch (d.family()) {
    case Family::Exponential: return -std::log1p(-p) / d.rate();
    case Family::Gamma: return boost::math::gamma_p_inv(d.shape(), p) / d.rate();
    case Family::Weibull: return d.scale() * std::pow(-std::log1p(-p), 1.0 / d.shape());
  }
  return 0.0;
}

double sample(const ParamDistribution& d, UniformSource& rng) {
  for (;;) {
    double x = 0.0;
    switch (d.family()) {
      case Family::Exponential: x = -std::log(rng.next_uniform()) / d.rate(); break;
      case Family::Gamma: x = standard_gamma(d.shape(), rng) / d.rate(); break;
      case Family::Weibull:
        x = d.scale() * std::pow(-std::log(rng.next_uniform()), 1.0 / d.shape());
        break;
    }
    // underflow to zero is resampled; the law has no atom at 0
    if (x > 0.0 && std::isfinite(x)) return x;
  }
}

double mean(const ParamDistribution& d) {
  switch (d.family()) {
    case Family::Exponential: return 1.0 / d.rate();
    case Family::Gamma: return d.shape() / d.rate();
    case Family::Weibull: return d.scale() * std::tgamma(1.0 + 1.0 / d.shape());
  }
  return 0.0;
}

double second_moment(const ParamDistribution& d) {
  switch (d.family()) {
    case Family::Exponential: return 2.0 / (d.rate() * d.rate());
    case Family::Gamma: return d.shape() * (d.shape() + 1.0) / (d.rate() * d.rate());
    case Family::Weibull:
      return d.scale() * d.scale() * std::tgamma(1.0 + 2.0 / d.shape());
  }
  return 0.0;
}

double variance(const ParamDistribution& d) {
  const double m = mean(d);
  return second_moment(d) - m * m;
}

double mgf(const ParamDistribution& d, double c) {
  if (c == 0.0) return 1.0;
  switch (d.family()) {
    case Family::Exponential:
    case Family::Gamma: {
      if (c >= d.rate()) throw DivergenceError("mgf argument outside the finiteness domain");
      return std::pow(d.rate() / (d.rate() - c), d.shape());
    }
    case Family::Weibull:
      if (d.is_exponential()) {
        if (c >= d.rate()) throw DivergenceError("mgf argument outside the finiteness domain");
        return d.rate() / (d.rate() - c);
      }
      return weibull_mgf_numeric(d, c);
  }
  return 1.0;
}

double lst(const ParamDistribution& d, double s) {
  if (!(s >= 0.0)) throw DomainError("Laplace-Stieltjes argument must be nonnegative");
  return mgf(d, -s);
}

}  // namespace crp
