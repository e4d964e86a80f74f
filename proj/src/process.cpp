#include "crp/process.hpp"

#include <algorithm>
#include <ostream>

#include "crp/csv.hpp"
#include "crp/errors.hpp"

namespace crp {

Path::Path(std::vector<double> interarrivals, std::vector<double> claims, double horizon)
    : interarrivals_(std::move(interarrivals)), claims_(std::move(claims)), horizon_(horizon) {
  if (!(horizon_ > 0.0)) throw DomainError("path horizon must be positive");
  if (interarrivals_.empty()) throw DomainError("path needs at least the overshoot arrival");
  if (interarrivals_.size() != claims_.size()) {
    throw DomainError("interarrival and claim sequences differ in length");
  }
  arrival_times_.reserve(interarrivals_.size());
  double t = 0.0;
  for (std::size_t i = 0; i < interarrivals_.size(); ++i) {
    if (!(interarrivals_[i] > 0.0)) throw DomainError("interarrivals must be positive");
    if (!(claims_[i] > 0.0)) throw DomainError("claims must be positive");
    const double next = t + interarrivals_[i];
    if (!(next > t)) throw DomainError("arrival times must be strictly increasing");
    t = next;
    arrival_times_.push_back(t);
  }
  const std::size_t m = arrival_times_.size();
  if (!(arrival_times_[m - 1] > horizon_)) throw DomainError("last arrival must exceed the horizon");
  if (m >= 2 && arrival_times_[m - 2] > horizon_) {
    throw DomainError("only one arrival beyond the horizon may be retained");
  }
}

Path sample_path(const MeasureSpec& spec, double horizon, UniformSource& rng) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  std::vector<double> w;
  double t = 0.0;
  while (t <= horizon) {
    const double draw = sample(spec.interarrival, rng);
    const double next = t + draw;
    if (!(next > t)) continue;  // absorbed by rounding; redraw
    w.push_back(draw);
    t = next;
  }
  std::vector<double> x(w.size());
  for (double& xi : x) xi = sample(spec.claim, rng);
  return Path(std::move(w), std::move(x), horizon);
}

std::size_t count_at(const Path& path, double t) {
  if (!(t >= 0.0) || t > path.horizon()) throw DomainError("evaluation time outside [0, horizon]");
  const auto times = path.arrival_times();
  return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

double aggregate_at(const Path& path, double t) {
  const std::size_t n = count_at(path, t);
  const auto x = path.claims();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += x[j];
  return s;
}

double surplus_at(const Path& path, double t, double premium_rate) {
  return aggregate_at(path, t) - t * premium_rate;
}

double age_at(const Path& path, double t) { return t - path.arrival_time(count_at(path, t)); }

void write_paths_csv(std::ostream& os, std::span<const Path> paths, bool header) {
  if (header) os << "path_id,n,W_n,T_n,X_n\n";
  for (std::size_t id = 0; id < paths.size(); ++id) {
    const Path& p = paths[id];
    for (std::size_t n = 1; n <= p.size(); ++n) {
      os << id << ',' << n << ',' << format_number(p.interarrivals()[n - 1]) << ','
         << format_number(p.arrival_time(n)) << ',' << format_number(p.claims()[n - 1]) << '\n';
    }
  }
}

}  // namespace crp
