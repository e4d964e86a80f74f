#include "crp/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crp/csv.hpp"
#include "crp/errors.hpp"
#include "crp/quadrature.hpp"

namespace crp {

namespace {

// Survival probabilities below this are treated as a degenerate tail.
const double kLogSurvivalFloor = std::log(1e-300);

void require_same_source(const ClaimTilt& tilt, const ParamDistribution& source_claim) {
  if (tilt.source() && *tilt.source() != source_claim) {
    throw DomainError("tilt '" + tilt.name() + "' was built against " +
                      tilt.source()->describe() + ", not " + source_claim.describe());
  }
}

double checked_log_survival(const ParamDistribution& d, double age, const char* which) {
  const double ls = log_survival(d, age);
  if (!(ls >= kLogSurvivalFloor)) {
    throw DegenerateTailError(std::string(which) + " survival underflow at age " +
                              std::to_string(age));
  }
  return ls;
}

// The declared closed form must reproduce w * p_source on a quantile grid.
bool declared_target_matches(const ClaimTilt& tilt, const ParamDistribution& source,
                             const ParamDistribution& target) {
  for (int i = 0; i < 100; ++i) {
    const double x = quantile(source, (i + 0.5) / 100.0);
    const double expected = log_density(target, x) - log_density(source, x);
    const double got = tilt.gamma(x);
    if (!(std::abs(got - expected) <= 1e-9 * std::max(1.0, std::abs(expected)))) return false;
  }
  return true;
}

}  // namespace

double ClaimTilt::weight(double x) const { return std::exp(gamma_(x)); }

ClaimTilt tilt_from_density_ratio(const ParamDistribution& source_claim,
                                  const ParamDistribution& target_claim) {
  ClaimTilt t(TiltKind::DensityRatio,
              "density-ratio " + source_claim.describe() + " -> " + target_claim.describe(),
              [source_claim, target_claim](double x) {
                return log_density(target_claim, x) - log_density(source_claim, x);
              });
  t.source_ = source_claim;
  t.target_ = target_claim;
  return t;
}

ClaimTilt esscher_tilt(double c, const ParamDistribution& source_claim) {
  const double log_norm = std::log(mgf(source_claim, c));
  ClaimTilt t(TiltKind::Esscher, "esscher c=" + format_number(c) + " on " + source_claim.describe(),
              [c, log_norm](double x) { return c * x - log_norm; });
  t.source_ = source_claim;
  t.esscher_c_ = c;
  return t;
}

ClaimTilt identity_tilt(const ParamDistribution& source_claim) {
  return esscher_tilt(0.0, source_claim);
}

ClaimTilt custom_tilt(std::string name, ClaimTilt::LogWeight gamma,
                      std::optional<ParamDistribution> source_claim,
                      std::optional<ParamDistribution> declared_target) {
  if (!gamma) throw DomainError("custom tilt needs a log-weight function");
  ClaimTilt t(TiltKind::Custom, std::move(name), std::move(gamma));
  t.source_ = source_claim;
  t.target_ = declared_target;
  return t;
}

ClaimTilt tabulated_tilt(std::string name, std::vector<double> xs, std::vector<double> gammas,
                         std::optional<ParamDistribution> source_claim,
                         std::optional<ParamDistribution> declared_target) {
  if (xs.size() < 2 || xs.size() != gammas.size()) {
    throw DomainError("tilt table needs at least two (x, gamma) pairs of equal length");
  }
  if (!std::is_sorted(xs.begin(), xs.end()) ||
      std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw DomainError("tilt table abscissae must be strictly increasing");
  }
  auto fn = [xs = std::move(xs), gs = std::move(gammas)](double x) {
    if (x <= xs.front()) return gs.front();
    if (x >= xs.back()) return gs.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const std::size_t lo = hi - 1;
    const double f = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return gs[lo] + f * (gs[hi] - gs[lo]);
  };
  return custom_tilt(std::move(name), std::move(fn), source_claim, declared_target);
}

TiltReport validate_tilt(const ClaimTilt& tilt, const ParamDistribution& source_claim,
                         int moment_order, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (moment_order < 0 || moment_order > 2) throw DomainError("moment order must be 0, 1 or 2");

  const double split = mean(source_claim);
  auto weighted = [&](int power) {
    return [&, power](double x) {
      if (!(x > 0.0)) return 0.0;
      const double v = std::exp(tilt.gamma(x) + log_density(source_claim, x));
      return power == 0 ? v : v * std::pow(x, power);
    };
  };

  TiltReport report;
  const auto mass = integrate_half_line(weighted(0), split, 1e-12, 1e-12);
  report.unit_mass = mass.value;
  report.unit_mass_error = mass.error;
  report.converged = mass.converged;
  for (int l = 1; l <= moment_order; ++l) {
    const auto m = integrate_half_line(weighted(l), split, 1e-10, 1e-12);
    report.moments.push_back(m.value);
    report.converged = report.converged && m.converged;
  }
  report.pass = report.converged && std::abs(report.unit_mass - 1.0) <= tol;
  return report;
}

ParamDistribution tilted_claim_law(const ParamDistribution& source_claim, const ClaimTilt& tilt) {
  require_same_source(tilt, source_claim);
  switch (tilt.kind()) {
    case TiltKind::DensityRatio:
      return *tilt.target();
    case TiltKind::Esscher: {
      const double c = tilt.esscher_parameter();
      if (c == 0.0) return source_claim;
      const double shifted = source_claim.rate() - c;
      switch (source_claim.family()) {
        case Family::Exponential: return ParamDistribution::exponential(shifted);
        case Family::Gamma: return ParamDistribution::gamma(shifted, source_claim.shape());
        case Family::Weibull:
          if (source_claim.is_exponential()) return ParamDistribution::weibull(1.0, 1.0 / shifted);
          throw UnsupportedError("Esscher transform of a Weibull law has no closed form");
      }
      break;
    }
    case TiltKind::Custom:
      if (tilt.target() && declared_target_matches(tilt, source_claim, *tilt.target())) {
        return *tilt.target();
      }
      throw UnsupportedError("custom tilt '" + tilt.name() +
                             "' has no verified closed-form claim law; use importance sampling");
  }
  throw UnsupportedError("unknown tilt kind");
}

double round_trip_deviation(const ClaimTilt& tilt, const ParamDistribution& source_claim,
                            std::size_t n_points) {
  const auto rebuilt = tilt_from_density_ratio(source_claim, tilted_claim_law(source_claim, tilt));
  double worst = 0.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double x = quantile(source_claim, (static_cast<double>(i) + 0.5) / n_points);
    const double g = tilt.gamma(x);
    worst = std::max(worst, std::abs(rebuilt.gamma(x) - g) / std::max(1.0, std::abs(g)));
  }
  return worst;
}

BetaTilt BetaTilt::from_alpha(ClaimTilt base, double alpha,
                              const ParamDistribution& source_interarrival) {
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
  const double mw = mean(source_interarrival);
  return BetaTilt(std::move(base), alpha, std::exp(alpha) / mw, mw);
}

BetaTilt BetaTilt::from_rate(ClaimTilt base, double rate,
                             const ParamDistribution& source_interarrival) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("Poisson rate must be positive");
  const double mw = mean(source_interarrival);
  return BetaTilt(std::move(base), std::log(rate) + std::log(mw), rate, mw);
}

bool satisfies_rate_condition(const BetaTilt& beta, const ParamDistribution& source_interarrival,
                              double tol) {
  const double rhs = std::log(beta.implied_rate()) + std::log(mean(source_interarrival));
  return std::abs(beta.alpha() - rhs) <= tol;
}

double rrm_log_density(const Path& path, double t, const MeasureSpec& source,
                       const MeasureSpec& target, const ClaimTilt& tilt) {
  const std::size_t n = count_at(path, t);
  const auto w = path.interarrivals();
  const auto x = path.claims();
  const ParamDistribution& k = source.interarrival;
  const ParamDistribution& lambda = target.interarrival;
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += tilt.gamma(x[j]) + log_density(lambda, w[j]) - log_density(k, w[j]);
  }
  const double age = t - path.arrival_time(n);
  acc += checked_log_survival(lambda, age, "target") - checked_log_survival(k, age, "source");
  return acc;
}

double rpm_log_density(const Path& path, double t, const MeasureSpec& source,
                       const BetaTilt& beta) {
  const double mw = mean(source.interarrival);
  if (std::abs(mw - beta.source_mean_interarrival()) > 1e-12 * mw) {
    throw DomainError("beta tilt was built for a different interarrival law");
  }
  const std::size_t n = count_at(path, t);
  const auto w = path.interarrivals();
  const auto x = path.claims();
  const double log_mw = std::log(mw);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += beta.beta(x[j]) - log_mw - log_density(source.interarrival, w[j]);
  }
  const double age = t - path.arrival_time(n);
  acc += -t * beta.implied_rate() - checked_log_survival(source.interarrival, age, "source");
  return acc;
}

MeasureSpec convert_to_cpp(const MeasureSpec& source, const BetaTilt& beta) {
  return MeasureSpec{ParamDistribution::exponential(beta.implied_rate()),
                     tilted_claim_law(source.claim, beta.base()), source.label + " -> CPP"};
}

MeasureSpec build_target_measure(const MeasureSpec& source, const ClaimTilt& tilt,
                                 const ParamDistribution& target_interarrival) {
  return MeasureSpec{target_interarrival, tilted_claim_law(source.claim, tilt),
                     source.label + " -> target"};
}

}  // namespace crp
