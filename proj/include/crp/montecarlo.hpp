#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "crp/process.hpp"
#include "crp/tilt.hpp"

namespace crp {

/// A real functional of a path observed up to time t. It must only read
/// information available at t (arrivals T_n <= t and their claims).
using PathFunctional = std::function<double(const Path&, double)>;

namespace functionals {
PathFunctional constant(double c);
/// N_t
PathFunctional count();
/// S_t
PathFunctional aggregate();
/// X_1 on {N_t >= 1}, 0 otherwise (X_1 is not observed before T_1).
PathFunctional first_claim();
}  // namespace functionals

struct IdentityDensity {};
/// Renewal target: interarrival law of `target` with claim tilt `tilt`.
struct RrmDensity {
  MeasureSpec target;
  ClaimTilt tilt;
};
/// Compound Poisson target selected by beta.
struct RpmDensity {
  BetaTilt beta;
};
/// Caller-supplied log-density, (path, t) -> ln M_t.
struct CustomDensity {
  std::function<double(const Path&, double)> log_density;
};
using DensitySpec = std::variant<IdentityDensity, RrmDensity, RpmDensity, CustomDensity>;

/// ln dQ/dP on F_t for the given density choice.
double log_density(const DensitySpec& density, const Path& path, double t,
                   const MeasureSpec& source);

struct EstimatorResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;   // paths entering the estimate
  std::uint64_t seed = 0;
  std::size_t excluded = 0;  // degenerate-tail paths dropped
};

/// Minimum number of paths accepted by the importance-sampling estimator.
inline constexpr std::size_t kMinImportancePaths = 1000;
/// Largest tolerated fraction of degenerate-tail exclusions.
inline constexpr double kMaxExcludedFraction = 1e-3;

/// E_Q[phi] estimated as the mean of phi * dQ/dP over paths simulated under
/// the source law up to t.
EstimatorResult is_expectation(const PathFunctional& phi, const MeasureSpec& source,
                               const DensitySpec& density, double t, std::size_t n_paths,
                               std::uint64_t seed);

/// Plain Monte Carlo mean of phi under `spec`.
EstimatorResult direct_expectation(const PathFunctional& phi, const MeasureSpec& spec, double t,
                                   std::size_t n_paths, std::uint64_t seed);

struct EventCheck {
  std::string label;
  std::size_t count = 0;   // paths in the event
  double difference = 0.0; // mean of 1_A (Y_t - Y_s)
  double std_error = 0.0;
  double z = 0.0;
  bool skipped = false;    // fewer than kMinEventPaths paths
};

inline constexpr std::size_t kMinEventPaths = 100;
inline constexpr double kZThreshold = 3.0;

struct MartingaleReport {
  double s = 0.0;
  double t = 0.0;
  std::string event_family;
  std::vector<EventCheck> events;
  std::size_t n_paths = 0;
  std::size_t excluded = 0;
  std::uint64_t seed = 0;
  bool pass = false;

  /// Largest |z| over evaluated events.
  double max_abs_z() const;
};

/// Paired test of E_P[1_A M_t] = E_P[1_A M_s] over the events
/// {N_s = 0}, {N_s = 1}, {N_s >= 2} and {S_s <= q} for the empirical
/// quartiles q of S_s.
MartingaleReport martingale_check(const MeasureSpec& source, const DensitySpec& density, double s,
                                  double t, std::size_t n_paths, std::uint64_t seed);

/// Same event family applied to Z_t = S_t - t p(spec) under direct
/// simulation from spec. Expected to pass exactly for compound Poisson laws.
MartingaleReport surplus_martingale_check(const MeasureSpec& spec, double s, double t,
                                          std::size_t n_paths, std::uint64_t seed);

struct WeightedSample {
  double value;
  double weight;
};

struct KsReport {
  double statistic = 0.0;  // D
  double p_value = 0.0;
  double n_eff = 0.0;      // (sum w)^2 / sum w^2
  bool unreliable = false; // n_eff < 100
};

/// Kolmogorov-Smirnov distance between the self-normalised weighted
/// empirical CDF and `target_cdf`; p-value from the asymptotic Kolmogorov
/// law at the effective sample size.
KsReport weighted_ks(std::span<const WeightedSample> samples,
                     const std::function<double(double)>& target_cdf);

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// n i.i.d. claims from the source law, each weighted by w(X), drawn from
/// substream `stream` of `seed`.
std::vector<WeightedSample> tilted_claim_sample(const ParamDistribution& source_claim,
                                                const ClaimTilt& tilt, std::size_t n,
                                                std::uint64_t seed, std::uint64_t stream = 0);

/// E[X_1] / E[W_1].
double premium_density(const MeasureSpec& spec);

}  // namespace crp
