// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "crp/montecarlo.hpp"
#include "crp/random.hpp"
#include "crp/renewal.hpp"
#include "crp/scenario.hpp"

using crp::ParamDistribution;
using crp::Path;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr std::size_t kPaths = 100'000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

crp::ResolvedScenario builtin(const std::string& name) { return crp::resolve(*crp::find_builtin(name)); }

Outcome unit_mass() {
  Outcome o;
  const auto start = Clock::now();
  const auto r = builtin("example-2.2");
  for (double t : {2.0, 5.0, 10.0}) {
    const auto e = crp::is_expectation(crp::functionals::constant(1.0), r.scenario.source, r.density,
                                       t, kPaths, kSeed);
    const double z = (e.estimate - 1.0) / e.std_error;
    o.detail << " t=" << t << ": " << e.estimate << " (z=" << z << ")";
    o.require(std::abs(z) <= 3.0, "t=" + std::to_string(t));
  }
  const double secs = seconds_since(start);
  o.detail << " time=" << secs << "s";
  o.require(secs < 60.0, "runtime");
  return o;
}

Outcome coincidence() {
  Outcome o;
  const auto r = builtin("example-3.1");
  const auto& src = r.scenario.source;
  const crp::MeasureSpec exp_target{ParamDistribution::exponential(r.beta->implied_rate()),
                                    r.target.claim, "Q"};
  double worst = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) {
    crp::RandomStream rng(kSeed, i);
    const Path p = crp::sample_path(src, r.scenario.horizon, rng);
    for (double t : {0.25, 0.5, 1.0, 1.5, 2.0}) {
      worst = std::max(worst, std::abs(crp::rrm_log_density(p, t, src, exp_target, r.tilt) -
                                       crp::rpm_log_density(p, t, src, *r.beta)));
    }
  }
  o.detail << " max|rrm-rpm|=" << worst << " over 1000 paths";
  o.require(worst <= 1e-10, "path-wise difference");
  return o;
}

Outcome poisson_closed_form() {
  Outcome o;
  const auto r = builtin("example-2.1");
  const auto& src = r.scenario.source;
  const double theta = src.interarrival.rate();
  const double rho = r.target.interarrival.rate();
  const std::vector<Path> forced{
      Path({6.0}, {1.0}, 5.0),
      Path({0.2, 5.0}, {0.4, 1.0}, 5.0),
      Path({0.5, 0.5, 0.5, 0.5, 4.0}, {0.1, 2.0, 3.0, 0.7, 1.0}, 5.0),
      Path({1.0, 1.0, 1.0, 1.0, 1.0, 0.5}, {5.0, 4.0, 3.0, 2.0, 1.0, 0.1}, 5.0),
      Path({0.01, 0.01, 0.01, 4.96, 3.0}, {9.0, 0.01, 1.0, 2.0, 1.0}, 5.0)};
  double worst = 0.0;
  for (const auto& p : forced) {
    for (double t : {0.0, 0.005, 0.5, 1.0, 2.5, 4.99, 5.0}) {
      const std::size_t n = crp::count_at(p, t);
      double claims = 0.0;
      for (std::size_t j = 0; j < n; ++j) claims += r.tilt.gamma(p.claims()[j]);
      const double closed = std::pow(rho / theta, static_cast<double>(n)) *
                            std::exp(-t * (rho - theta)) * std::exp(claims);
      const double general = std::exp(crp::rrm_log_density(p, t, src, r.target, r.tilt));
      worst = std::max(worst, std::abs(general - closed) / closed);
    }
  }
  o.detail << " max relative deviation=" << worst;
  o.require(worst <= 1e-12, "relative deviation");
  return o;
}

Outcome esscher_mean() {
  Outcome o;
  const auto r = builtin("example-4.3");
  const double horizon = r.scenario.horizon;
  const auto e = crp::is_expectation(crp::functionals::first_claim(), r.scenario.source, r.density,
                                     horizon, kPaths, kSeed);
  const double arrived = crp::cdf(r.target.interarrival, horizon);
  const double est = e.estimate / arrived;
  const double se = e.std_error / arrived;
  const double z = (est - 1.0) / se;
  const double p_p = crp::premium_density(r.scenario.source);
  const double p_q = crp::premium_density(r.cpp);
  o.detail << " E_Q[X_1]=" << est << " se=" << se << " z=" << z << "; p(P)=" << p_p
           << " p(Q)=" << p_q;
  o.require(std::abs(z) <= 3.0, "mean");
  o.require(p_q > p_p, "loading");
  return o;
}

Outcome tilted_marginals() {
  Outcome o;
  const std::uint64_t seeds[] = {1, 2, 3, 4, 5};
  for (const char* name : {"example-3.1", "example-4.1", "example-4.2"}) {
    const auto r = builtin(name);
    const auto& q = r.target.claim;
    int passes = 0;
    o.detail << " " << name << " vs " << q.describe() << " p=";
    for (auto seed : seeds) {
      const auto sample = crp::tilted_claim_sample(r.scenario.source.claim, r.tilt, 10'000, seed);
      const auto ks = crp::weighted_ks(sample, [&](double x) { return crp::cdf(q, x); });
      o.detail << ks.p_value << (seed == 5 ? "" : ",");
      if (!ks.unreliable && ks.p_value > 0.01) ++passes;
    }
    o.detail << " (" << passes << "/5);";
    o.require(passes >= 4, name);
  }
  return o;
}

Outcome poisson_characterization() {
  Outcome o;
  double worst_exp = 0.0;
  for (double theta : {0.5, 1.0, 2.0}) {
    for (double t : {0.5, 1.0, 3.0, 10.0}) {
      const double m = crp::renewal_mean(ParamDistribution::exponential(theta), t);
      worst_exp = std::max(worst_exp, std::abs(m - theta * t));
    }
  }
  o.require(worst_exp <= 1e-10, "exponential linearity");

  // independent series: sum_n P(Ga(shape 2n, rate 2) <= t), shape-2 Erlang tail sums
  auto series = [](double t) {
    double total = 0.0;
    for (int n = 1; n < 200; ++n) {
      double term = 0.0, pw = 1.0;
      const double x = 2.0 * t;
      for (int k = 0; k < 2 * n; ++k) {
        if (k > 0) pw *= x / k;
        term += pw;
      }
      const double cdf_n = 1.0 - std::exp(-x) * term;
      total += cdf_n;
      if (cdf_n < 1e-17) break;
    }
    return total;
  };
  const auto ga = ParamDistribution::gamma(2.0, 2.0);
  double worst_ga = 0.0;
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    worst_ga = std::max(worst_ga, std::abs(crp::renewal_mean(ga, t) - series(t)));
  }
  const double m05 = crp::renewal_mean(ga, 0.5);
  const double closed = 0.5 - 0.25 + 0.25 * std::exp(-2.0);
  const double rel = std::abs(m05 - 0.5) / 0.5;
  o.detail << " exp max dev=" << worst_exp << "; Ga(2,2) max dev vs series=" << worst_ga
           << "; m(0.5)=" << m05 << " closed=" << closed << " rel dev from line=" << rel;
  o.require(worst_ga <= 1e-6, "gamma series");
  o.require(std::abs(m05 - closed) <= 1e-6, "gamma closed form");
  o.require(rel > 0.4, "nonlinearity");
  return o;
}

Outcome surplus_martingale() {
  Outcome o;
  for (const auto& s : crp::builtin_scenarios()) {
    const auto r = crp::resolve(s);
    const auto rep = crp::surplus_martingale_check(r.cpp, 1.0, 3.0, kPaths, kSeed);
    o.detail << " " << s.name << " max|z|=" << rep.max_abs_z() << ";";
    o.require(rep.pass, s.name);
  }
  const crp::MeasureSpec raw{ParamDistribution::gamma(2.0, 2.0), ParamDistribution::gamma(2.0, 2.0), "P"};
  const auto rep = crp::surplus_martingale_check(raw, 1.0, 3.0, kPaths, kSeed);
  o.detail << " unconverted Ga(2,2) max|z|=" << rep.max_abs_z();
  o.require(!rep.pass, "unconverted source should fail");
  return o;
}

Outcome round_trip() {
  Outcome o;
  for (const auto& s : crp::builtin_scenarios()) {
    const auto r = crp::resolve(s);
    const double dev = crp::round_trip_deviation(r.tilt, s.source.claim, 100);
    o.detail << " " << s.name << "=" << dev << ";";
    o.require(dev <= 1e-10, s.name);
  }
  return o;
}

Outcome is_vs_direct(Clock::time_point suite_start) {
  Outcome o;
  for (const auto& s : crp::builtin_scenarios()) {
    const auto r = crp::resolve(s);
    const std::pair<const char*, crp::PathFunctional> phis[] = {
        {"N_t", crp::functionals::count()}, {"S_t", crp::functionals::aggregate()}};
    for (const auto& [label, phi] : phis) {
      const auto is = crp::is_expectation(phi, s.source, r.density, s.horizon, kPaths, kSeed);
      const auto direct = crp::direct_expectation(phi, r.target, s.horizon, kPaths, kSeed + 1);
      const double z = (is.estimate - direct.estimate) / std::hypot(is.std_error, direct.std_error);
      o.detail << " " << s.name << " " << label << " z=" << z << ";";
      o.require(std::abs(z) <= 3.0, std::string(s.name) + " " + label);
    }
  }
  const double secs = seconds_since(suite_start);
  o.detail << " suite time=" << secs << "s";
  o.require(secs < 600.0, "suite runtime");
  return o;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"unit mass of the renewal density", unit_mass},
      {"renewal/Poisson density coincidence", coincidence},
      {"Poisson closed form on forced paths", poisson_closed_form},
      {"Esscher tilted mean and loading", esscher_mean},
      {"tilted claim marginals (weighted KS)", tilted_marginals},
      {"Poisson characterization of the renewal mean", poisson_characterization},
      {"surplus martingale of the compound Poisson conversion", surplus_martingale},
      {"claim tilt round trip", round_trip},
  };
  int failures = 0;
  int index = 0;
  auto report = [&](const char* name, Outcome o) {
    ++index;
    std::printf("%s %d %s:%s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };
  for (const auto& c : criteria) {
    try {
      report(c.name, c.run());
    } catch (const std::exception& e) {
      Outcome o;
      o.require(false, e.what());
      report(c.name, std::move(o));
    }
  }
  try {
    report("importance sampling against direct simulation", is_vs_direct(start));
  } catch (const std::exception& e) {
    Outcome o;
    o.require(false, e.what());
    report("importance sampling against direct simulation", std::move(o));
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
