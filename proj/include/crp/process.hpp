#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "crp/distribution.hpp"
#include "crp/random.hpp"

namespace crp {

/// Law of a compound renewal process: i.i.d. interarrivals, i.i.d. claims,
/// the two sequences independent.
struct MeasureSpec {
  ParamDistribution interarrival = ParamDistribution::exponential(1.0);
  ParamDistribution claim = ParamDistribution::exponential(1.0);
  std::string label;

  bool is_compound_poisson() const { return interarrival.is_exponential(); }
};

/// One realised trajectory. Stores the raw draws W_1..W_m and X_1..X_m,
/// where T_{m-1} <= horizon < T_m: exactly one arrival past the horizon is
/// kept so the age t - T_{N_t} is known for every t in [0, horizon].
class Path {
 public:
  /// Validating constructor; also the hook for forced paths in tests.
  Path(std::vector<double> interarrivals, std::vector<double> claims, double horizon);

  std::span<const double> interarrivals() const { return interarrivals_; }
  std::span<const double> claims() const { return claims_; }
  /// T_1..T_m (T_0 = 0 is implicit).
  std::span<const double> arrival_times() const { return arrival_times_; }
  double horizon() const { return horizon_; }
  std::size_t size() const { return interarrivals_.size(); }

  /// T_n for 0 <= n <= m.
  double arrival_time(std::size_t n) const { return n == 0 ? 0.0 : arrival_times_[n - 1]; }

 private:
  std::vector<double> interarrivals_;
  std::vector<double> claims_;
  std::vector<double> arrival_times_;
  double horizon_;
};

/// Draws interarrivals until the running sum first exceeds `horizon`, then one
/// claim per retained arrival. Interarrivals are drawn before claims.
Path sample_path(const MeasureSpec& spec, double horizon, UniformSource& rng);

/// N_t = #{n >= 1 : T_n <= t}.
std::size_t count_at(const Path& path, double t);
/// S_t = X_1 + ... + X_{N_t}.
double aggregate_at(const Path& path, double t);
/// S_t - t * premium_rate.
double surplus_at(const Path& path, double t, double premium_rate);
/// t - T_{N_t}.
double age_at(const Path& path, double t);

/// Debug dump, columns `path_id,n,W_n,T_n,X_n`. Header written when requested.
void write_paths_csv(std::ostream& os, std::span<const Path> paths, bool header = true);

}  // namespace crp
