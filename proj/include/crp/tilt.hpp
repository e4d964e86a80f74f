#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crp/distribution.hpp"
#include "crp/process.hpp"

namespace crp {

enum class TiltKind { DensityRatio, Esscher, Custom };

/// Reweighting of the claim-size law: weight w(x) = e^{gamma(x)} with
/// E_P[w(X_1)] = 1 under the source claim law. The link between gamma and
/// w is the natural logarithm throughout.
class ClaimTilt {
 public:
  using LogWeight = std::function<double(double)>;

  double gamma(double x) const { return gamma_(x); }
  double weight(double x) const;

  TiltKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Claim law the tilt was built against (absent for free-standing custom tilts).
  const std::optional<ParamDistribution>& source() const { return source_; }
  /// Density-ratio target, or the declared closed form of a custom tilt.
  const std::optional<ParamDistribution>& target() const { return target_; }
  /// Esscher parameter; 0 for other kinds.
  double esscher_parameter() const { return esscher_c_; }

 private:
  friend ClaimTilt tilt_from_density_ratio(const ParamDistribution&, const ParamDistribution&);
  friend ClaimTilt esscher_tilt(double, const ParamDistribution&);
  friend ClaimTilt custom_tilt(std::string, LogWeight, std::optional<ParamDistribution>,
                               std::optional<ParamDistribution>);

  ClaimTilt(TiltKind kind, std::string name, LogWeight gamma) noexcept
      : kind_(kind), name_(std::move(name)), gamma_(std::move(gamma)) {}

  TiltKind kind_;
  std::string name_;
  LogWeight gamma_;
  std::optional<ParamDistribution> source_;
  std::optional<ParamDistribution> target_;
  double esscher_c_ = 0.0;
};

/// gamma = ln(target density / source density).
ClaimTilt tilt_from_density_ratio(const ParamDistribution& source_claim,
                                  const ParamDistribution& target_claim);

/// gamma(x) = c x - ln E_P[e^{c X_1}]. Throws DivergenceError when the
/// moment generating function is infinite at c.
ClaimTilt esscher_tilt(double c, const ParamDistribution& source_claim);

/// w == 1.
ClaimTilt identity_tilt(const ParamDistribution& source_claim);

/// Arbitrary log-weight. `declared_target`, when given, is the closed-form law
/// w * p_source that tilted_claim_law verifies and returns.
ClaimTilt custom_tilt(std::string name, ClaimTilt::LogWeight gamma,
                      std::optional<ParamDistribution> source_claim = std::nullopt,
                      std::optional<ParamDistribution> declared_target = std::nullopt);

/// Custom tilt whose gamma interpolates a table linearly (held constant
/// outside the tabulated range).
ClaimTilt tabulated_tilt(std::string name, std::vector<double> xs, std::vector<double> gammas,
                         std::optional<ParamDistribution> source_claim = std::nullopt,
                         std::optional<ParamDistribution> declared_target = std::nullopt);

struct TiltReport {
  double unit_mass = 0.0;
  double unit_mass_error = 0.0;
  /// E_P[X^l w(X)] for l = 1..moment_order.
  std::vector<double> moments;
  bool converged = false;
  bool pass = false;
};

/// Certifies E_P[w(X_1)] = 1 to `tol` and finiteness of E_P[X^l w(X_1)]
/// for l up to `moment_order` (0, 1 or 2).
TiltReport validate_tilt(const ClaimTilt& tilt, const ParamDistribution& source_claim,
                         int moment_order = 0, double tol = 1e-10);

/// Claim law under the tilted measure, when it has a closed form.
ParamDistribution tilted_claim_law(const ParamDistribution& source_claim, const ClaimTilt& tilt);

/// Rebuilds the tilt from the ratio of tilted_claim_law to the source law and
/// returns the largest |gamma_rebuilt - gamma| / max(1, |gamma|) over the
/// source quantiles (i + 1/2) / n_points.
double round_trip_deviation(const ClaimTilt& tilt, const ParamDistribution& source_claim,
                            std::size_t n_points = 100);

/// beta = gamma + alpha together with the Poisson rate it implies,
/// rate = e^alpha / E_P[W_1].
class BetaTilt {
 public:
  static BetaTilt from_alpha(ClaimTilt base, double alpha,
                             const ParamDistribution& source_interarrival);
  static BetaTilt from_rate(ClaimTilt base, double rate,
                            const ParamDistribution& source_interarrival);

  double beta(double x) const { return base_.gamma(x) + alpha_; }
  const ClaimTilt& base() const { return base_; }
  double alpha() const { return alpha_; }
  double implied_rate() const { return rate_; }
  double source_mean_interarrival() const { return mean_interarrival_; }

 private:
  BetaTilt(ClaimTilt base, double alpha, double rate, double mean_w)
      : base_(std::move(base)), alpha_(alpha), rate_(rate), mean_interarrival_(mean_w) {}

  ClaimTilt base_;
  double alpha_;
  double rate_;
  double mean_interarrival_;
};

/// |alpha - ln(rate) - ln E_P[W_1]| <= tol.
bool satisfies_rate_condition(const BetaTilt& beta, const ParamDistribution& source_interarrival,
                              double tol = 1e-12);

/// ln of the density of the target renewal measure with respect to the
/// source on F_t:
///   sum_{j<=N_t} [gamma(X_j) + ln Lambda'(W_j) - ln K'(W_j)]
///   + ln(1 - Lambda(t - T_{N_t})) - ln(1 - K(t - T_{N_t})).
/// Only target.interarrival is read; the claim side is carried by `tilt`.
double rrm_log_density(const Path& path, double t, const MeasureSpec& source,
                       const MeasureSpec& target, const ClaimTilt& tilt);

/// ln of the density of the compound Poisson target selected by `beta`:
///   sum_{j<=N_t} [beta(X_j) - ln E_P[W_1] - ln K'(W_j)] - t rate - ln(1 - K(t - T_{N_t})).
double rpm_log_density(const Path& path, double t, const MeasureSpec& source,
                       const BetaTilt& beta);

/// Compound Poisson law with rate beta.implied_rate() and tilted claims.
MeasureSpec convert_to_cpp(const MeasureSpec& source, const BetaTilt& beta);

/// Renewal law with the given interarrival distribution and tilted claims.
MeasureSpec build_target_measure(const MeasureSpec& source, const ClaimTilt& tilt,
                                 const ParamDistribution& target_interarrival);

}  // namespace crp
