#include "crp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "crp/errors.hpp"
#include "parallel.hpp"

namespace crp {

namespace functionals {

PathFunctional constant(double c) {
  return [c](const Path&, double) { return c; };
}

PathFunctional count() {
  return [](const Path& p, double t) { return static_cast<double>(count_at(p, t)); };
}

PathFunctional aggregate() {
  return [](const Path& p, double t) { return aggregate_at(p, t); };
}

PathFunctional first_claim() {
  return [](const Path& p, double t) { return count_at(p, t) >= 1 ? p.claims()[0] : 0.0; };
}

}  // namespace functionals

double log_density(const DensitySpec& density, const Path& path, double t,
                   const MeasureSpec& source) {
  struct Visitor {
    const Path& path;
    double t;
    const MeasureSpec& source;
    double operator()(const IdentityDensity&) const {
      count_at(path, t);  // domain check only
      return 0.0;
    }
    double operator()(const RrmDensity& d) const {
      return rrm_log_density(path, t, source, d.target, d.tilt);
    }
    double operator()(const RpmDensity& d) const {
      return rpm_log_density(path, t, source, d.beta);
    }
    double operator()(const CustomDensity& d) const { return d.log_density(path, t); }
  };
  return std::visit(Visitor{path, t, source}, density);
}

namespace {

void check_exclusions(std::size_t excluded, std::size_t n) {
  if (static_cast<double>(excluded) > kMaxExcludedFraction * static_cast<double>(n)) {
    throw EstimationError(std::to_string(excluded) + " of " + std::to_string(n) +
                          " paths hit a degenerate tail");
  }
}

EstimatorResult summarise(std::vector<std::optional<double>> values, std::uint64_t seed) {
  std::vector<double> kept;
  kept.reserve(values.size());
  for (const auto& v : values) {
    if (v) kept.push_back(*v);
  }
  const std::size_t excluded = values.size() - kept.size();
  check_exclusions(excluded, values.size());
  const auto me = detail::mean_and_error(kept);
  return {me.mean, me.std_error, kept.size(), seed, excluded};
}

struct EventSample {
  std::size_t count_s;
  double aggregate_s;
  double increment;  // Y_t - Y_s
};

MartingaleReport event_family_check(std::vector<std::optional<EventSample>> raw, double s, double t,
                                    std::uint64_t seed, std::string family) {
  std::vector<EventSample> samples;
  samples.reserve(raw.size());
  for (const auto& r : raw) {
    if (r) samples.push_back(*r);
  }
  MartingaleReport rep;
  rep.s = s;
  rep.t = t;
  rep.seed = seed;
  rep.event_family = std::move(family);
  rep.n_paths = samples.size();
  rep.excluded = raw.size() - samples.size();
  check_exclusions(rep.excluded, raw.size());

  std::vector<double> agg(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) agg[i] = samples[i].aggregate_s;
  std::sort(agg.begin(), agg.end());
  auto quartile = [&](double p) {
    if (agg.empty()) return 0.0;
    const auto idx = static_cast<std::size_t>(p * static_cast<double>(agg.size() - 1));
    return agg[idx];
  };

  struct Event {
    std::string label;
    std::function<bool(const EventSample&)> member;
  };
  std::vector<Event> events{
      {"N_s=0", [](const EventSample& e) { return e.count_s == 0; }},
      {"N_s=1", [](const EventSample& e) { return e.count_s == 1; }},
      {"N_s>=2", [](const EventSample& e) { return e.count_s >= 2; }},
  };
  for (const auto& [name, p] : {std::pair{"q25", 0.25}, {"q50", 0.50}, {"q75", 0.75}}) {
    const double q = quartile(p);
    events.push_back({std::string("S_s<=") + name, [q](const EventSample& e) {
                        return e.aggregate_s <= q;
                      }});
  }

  rep.pass = true;
  std::vector<double> d(samples.size());
  for (const auto& ev : events) {
    EventCheck c;
    c.label = ev.label;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const bool in = ev.member(samples[i]);
      c.count += in ? 1 : 0;
      d[i] = in ? samples[i].increment : 0.0;
    }
    if (c.count < kMinEventPaths) {
      c.skipped = true;
    } else {
      const auto me = detail::mean_and_error(d);
      c.difference = me.mean;
      c.std_error = me.std_error;
      if (me.std_error > 0.0) {
        c.z = me.mean / me.std_error;
      } else {
        c.z = me.mean == 0.0 ? 0.0 : std::copysign(INFINITY, me.mean);
      }
      if (!(std::abs(c.z) <= kZThreshold)) rep.pass = false;
    }
    rep.events.push_back(std::move(c));
  }
  return rep;
}

void require_times(double s, double t) {
  if (!(s >= 0.0) || !(t > 0.0) || s > t) throw DomainError("need 0 <= s <= t and t > 0");
}

}  // namespace

EstimatorResult is_expectation(const PathFunctional& phi, const MeasureSpec& source,
                               const DensitySpec& density, double t, std::size_t n_paths,
                               std::uint64_t seed) {
  if (!(t > 0.0)) throw DomainError("evaluation time must be positive");
  if (n_paths < kMinImportancePaths) {
    throw EstimationError("importance sampling needs at least " +
                          std::to_string(kMinImportancePaths) + " paths");
  }
  std::vector<std::optional<double>> values(n_paths);
  detail::parallel_for(n_paths, [&](std::size_t i) {
    RandomStream rng(seed, i);
    const Path path = sample_path(source, t, rng);
    try {
      const double ld = log_density(density, path, t, source);
      values[i] = phi(path, t) * std::exp(ld);
    } catch (const DegenerateTailError&) {
      values[i].reset();
    }
  });
  return summarise(std::move(values), seed);
}

EstimatorResult direct_expectation(const PathFunctional& phi, const MeasureSpec& spec, double t,
                                   std::size_t n_paths, std::uint64_t seed) {
  if (!(t > 0.0)) throw DomainError("evaluation time must be positive");
  if (n_paths == 0) throw EstimationError("need at least one path");
  std::vector<std::optional<double>> values(n_paths);
  detail::parallel_for(n_paths, [&](std::size_t i) {
    RandomStream rng(seed, i);
    values[i] = phi(sample_path(spec, t, rng), t);
  });
  return summarise(std::move(values), seed);
}

double MartingaleReport::max_abs_z() const {
  double m = 0.0;
  for (const auto& e : events) {
    if (!e.skipped) m = std::max(m, std::abs(e.z));
  }
  return m;
}

MartingaleReport martingale_check(const MeasureSpec& source, const DensitySpec& density, double s,
                                  double t, std::size_t n_paths, std::uint64_t seed) {
  require_times(s, t);
  std::vector<std::optional<EventSample>> raw(n_paths);
  detail::parallel_for(n_paths, [&](std::size_t i) {
    RandomStream rng(seed, i);
    const Path path = sample_path(source, t, rng);
    try {
      const double ms = std::exp(log_density(density, path, s, source));
      const double mt = std::exp(log_density(density, path, t, source));
      raw[i] = EventSample{count_at(path, s), aggregate_at(path, s), mt - ms};
    } catch (const DegenerateTailError&) {
      raw[i].reset();
    }
  });
  return event_family_check(std::move(raw), s, t, seed, "density M");
}

MartingaleReport surplus_martingale_check(const MeasureSpec& spec, double s, double t,
                                          std::size_t n_paths, std::uint64_t seed) {
  require_times(s, t);
  const double rate = premium_density(spec);
  std::vector<std::optional<EventSample>> raw(n_paths);
  detail::parallel_for(n_paths, [&](std::size_t i) {
    RandomStream rng(seed, i);
    const Path path = sample_path(spec, t, rng);
    const double zs = surplus_at(path, s, rate);
    const double zt = surplus_at(path, t, rate);
    raw[i] = EventSample{count_at(path, s), aggregate_at(path, s), zt - zs};
  });
  return event_family_check(std::move(raw), s, t, seed, "surplus Z");
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // small-argument form of the CDF
    const double y = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      sum += std::exp(-odd * odd * y);
    }
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsReport weighted_ks(std::span<const WeightedSample> samples,
                     const std::function<double(double)>& target_cdf) {
  if (samples.size() < 1000) throw DomainError("weighted KS needs at least 1000 samples");
  std::vector<WeightedSample> sorted(samples.begin(), samples.end());
  for (const auto& s : sorted) {
    if (!(s.weight > 0.0) || !std::isfinite(s.weight)) {
      throw DomainError("KS weights must be positive and finite");
    }
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const WeightedSample& a, const WeightedSample& b) { return a.value < b.value; });
  std::vector<double> w(sorted.size());
  std::vector<double> w2(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    w[i] = sorted[i].weight;
    w2[i] = w[i] * w[i];
  }
  const double total = detail::pairwise_sum(w);
  const double total2 = detail::pairwise_sum(w2);

  KsReport r;
  r.n_eff = total * total / total2;
  r.unreliable = r.n_eff < 100.0;
  double cum = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = target_cdf(sorted[i].value);
    const double before = cum / total;
    cum += w[i];
    const double after = cum / total;
    r.statistic = std::max({r.statistic, std::abs(f - before), std::abs(after - f)});
  }
  const double root = std::sqrt(r.n_eff);
  r.p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * r.statistic);
  return r;
}

std::vector<WeightedSample> tilted_claim_sample(const ParamDistribution& source_claim,
                                                const ClaimTilt& tilt, std::size_t n,
                                                std::uint64_t seed, std::uint64_t stream) {
  std::vector<WeightedSample> out(n);
  RandomStream rng(seed, stream);
  for (auto& s : out) {
    s.value = sample(source_claim, rng);
    s.weight = tilt.weight(s.value);
  }
  return out;
}

double premium_density(const MeasureSpec& spec) { return mean(spec.claim) / mean(spec.interarrival); }

}  // namespace crp
