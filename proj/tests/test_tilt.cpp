#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "crp/errors.hpp"
#include "crp/random.hpp"
#include "crp/tilt.hpp"

using crp::ParamDistribution;
using crp::Path;

TEST_CASE("density-ratio tilt is the log likelihood ratio") {
  const auto p = ParamDistribution::exponential(1.0);
  const auto q = ParamDistribution::exponential(0.8);
  const auto tilt = crp::tilt_from_density_ratio(p, q);
  for (double x : {0.1, 1.0, 7.0}) {
    CHECK(tilt.gamma(x) == doctest::Approx(std::log(0.8) + 0.2 * x).epsilon(1e-14));
    CHECK(tilt.weight(x) == doctest::Approx(0.8 * std::exp(0.2 * x)).epsilon(1e-14));
  }
  CHECK(crp::tilted_claim_law(p, tilt) == q);
}

TEST_CASE("tilt validation") {
  const auto src = ParamDistribution::gamma(3.0, 2.0);
  SUBCASE("esscher") {
    const auto r = crp::validate_tilt(crp::esscher_tilt(1.0, src), src, 2);
    CHECK(r.pass);
    CHECK(r.unit_mass == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(r.moments.size() == 2);
    CHECK(r.moments[0] == doctest::Approx(1.0).epsilon(1e-10));        // a/(b-c)
    CHECK(r.moments[1] == doctest::Approx(6.0 / 4.0).epsilon(1e-10));  // a(a+1)/(b-c)^2
  }
  SUBCASE("identity") {
    const auto r = crp::validate_tilt(crp::identity_tilt(src), src, 1);
    CHECK(r.pass);
    CHECK(r.moments[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("wrong normalisation is rejected") {
    const auto bad = crp::custom_tilt("shifted", [](double x) { return 0.5 * x; }, src);
    const auto r = crp::validate_tilt(bad, src);
    CHECK_FALSE(r.pass);
    CHECK(r.unit_mass == doctest::Approx(std::pow(3.0 / 2.5, 2.0)).epsilon(1e-9));
  }
  SUBCASE("moment order out of range") {
    CHECK_THROWS_AS(crp::validate_tilt(crp::identity_tilt(src), src, 3), crp::DomainError);
  }
}

TEST_CASE("esscher tilt") {
  const auto src = ParamDistribution::gamma(3.0, 2.0);
  const auto t = crp::esscher_tilt(1.0, src);
  CHECK(t.kind() == crp::TiltKind::Esscher);
  CHECK(t.esscher_parameter() == 1.0);
  CHECK(t.gamma(1.0) == doctest::Approx(1.0 - 2.0 * std::log(1.5)).epsilon(1e-14));
  CHECK(crp::tilted_claim_law(src, t) == ParamDistribution::gamma(2.0, 2.0));
  CHECK_THROWS_AS(crp::esscher_tilt(3.0, src), crp::DivergenceError);
  CHECK(crp::tilted_claim_law(ParamDistribution::exponential(1.0),
                              crp::esscher_tilt(0.3, ParamDistribution::exponential(1.0))) ==
        ParamDistribution::exponential(0.7));
  CHECK(crp::tilted_claim_law(ParamDistribution::weibull(1.0, 2.0),
                              crp::esscher_tilt(0.25, ParamDistribution::weibull(1.0, 2.0)))
            .rate() == doctest::Approx(0.25));
  const auto w = ParamDistribution::weibull(2.0, 1.0);
  CHECK_THROWS_AS(crp::tilted_claim_law(w, crp::esscher_tilt(0.5, w)), crp::UnsupportedError);
}

TEST_CASE("tilt source mismatch") {
  const auto tilt = crp::esscher_tilt(0.5, ParamDistribution::exponential(1.0));
  CHECK_THROWS_AS(crp::tilted_claim_law(ParamDistribution::exponential(2.0), tilt),
                  crp::DomainError);
}

TEST_CASE("custom tilt with declared target") {
  const double c = 2.1;
  const auto src = ParamDistribution::gamma(1.0, 2.0);
  const double m = crp::mean(src);
  auto g = [=](double x) {
    return std::log(m / (2.0 * c)) - std::log(x) + 2.0 * (c - 1.0) / (c * m) * x;
  };
  const auto good = crp::custom_tilt("loading", g, src, ParamDistribution::exponential(1.0 / c));
  CHECK(crp::validate_tilt(good, src, 2).pass);
  CHECK(crp::tilted_claim_law(src, good) == ParamDistribution::exponential(1.0 / c));
  CHECK(crp::round_trip_deviation(good, src) <= 1e-10);

  const auto wrong = crp::custom_tilt("loading", g, src, ParamDistribution::exponential(0.5));
  CHECK_THROWS_AS(crp::tilted_claim_law(src, wrong), crp::UnsupportedError);

  const auto undeclared = crp::custom_tilt("loading", g, src);
  CHECK_THROWS_AS(crp::tilted_claim_law(src, undeclared), crp::UnsupportedError);
}

TEST_CASE("tabulated tilt interpolates") {
  const auto t = crp::tabulated_tilt("table", {0.0, 1.0, 3.0}, {0.0, 1.0, -1.0});
  CHECK(t.gamma(0.5) == doctest::Approx(0.5));
  CHECK(t.gamma(2.0) == doctest::Approx(0.0));
  CHECK(t.gamma(10.0) == doctest::Approx(-1.0));
  CHECK(t.kind() == crp::TiltKind::Custom);
  CHECK_THROWS_AS(crp::tabulated_tilt("bad", {1.0, 0.5}, {0.0, 0.0}), crp::DomainError);
}

TEST_CASE("round trip reproduces each tilt kind") {
  const auto src = ParamDistribution::gamma(2.0, 2.0);
  CHECK(crp::round_trip_deviation(crp::tilt_from_density_ratio(src, ParamDistribution::exponential(1.5)),
                                  src) <= 1e-10);
  CHECK(crp::round_trip_deviation(crp::esscher_tilt(1.0, src), src) <= 1e-10);
  CHECK(crp::round_trip_deviation(crp::identity_tilt(src), src) == 0.0);
}

TEST_CASE("beta tilt and the rate condition") {
  const auto w = ParamDistribution::gamma(2.0, 2.0);  // E[W] = 1
  const auto claim = ParamDistribution::exponential(1.0);
  const auto base = crp::identity_tilt(claim);
  SUBCASE("alpha zero gives the reciprocal mean interarrival") {
    const auto b = crp::BetaTilt::from_alpha(base, 0.0, ParamDistribution::gamma(4.0, 2.0));
    CHECK(b.implied_rate() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(crp::satisfies_rate_condition(b, ParamDistribution::gamma(4.0, 2.0)));
  }
  SUBCASE("rate and alpha constructors agree") {
    const auto b1 = crp::BetaTilt::from_rate(base, 4.0 / 3.0, w);
    const auto b2 = crp::BetaTilt::from_alpha(base, std::log(4.0 / 3.0), w);
    CHECK(b1.alpha() == doctest::Approx(b2.alpha()).epsilon(1e-15));
    CHECK(b2.implied_rate() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(b1.beta(0.7) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-15));
    CHECK(crp::satisfies_rate_condition(b1, w));
    CHECK_FALSE(crp::satisfies_rate_condition(b1, ParamDistribution::gamma(1.0, 2.0)));
  }
  CHECK_THROWS_AS(crp::BetaTilt::from_rate(base, 0.0, w), crp::DomainError);
}

TEST_CASE("renewal density reduces to the Poisson closed form") {
  // Poisson(theta) -> Poisson(rho), identity claims: (rho/theta)^N e^{-t(rho-theta)}
  const double theta = 1.0, rho = 1.5;
  const auto claim = ParamDistribution::exponential(1.0);
  const crp::MeasureSpec src{ParamDistribution::exponential(theta), claim, "P"};
  const crp::MeasureSpec tgt{ParamDistribution::exponential(rho), claim, "Q"};
  const auto tilt = crp::identity_tilt(claim);
  const Path p({0.3, 0.9, 2.0}, {1.0, 2.0, 3.0}, 2.0);
  for (double t : {0.0, 0.2, 1.2, 2.0}) {
    const double n = static_cast<double>(crp::count_at(p, t));
    const double closed = n * std::log(rho / theta) - t * (rho - theta);
    CHECK(crp::rrm_log_density(p, t, src, tgt, tilt) == doctest::Approx(closed).epsilon(1e-13));
  }
}

TEST_CASE("density at time zero is one") {
  const auto claim = ParamDistribution::gamma(2.0, 2.0);
  const crp::MeasureSpec src{ParamDistribution::gamma(2.0, 2.0), claim, "P"};
  const crp::MeasureSpec tgt{ParamDistribution::weibull(2.0, 1.0), claim, "Q"};
  const auto tilt = crp::esscher_tilt(1.0, claim);
  const Path p({0.3, 2.0}, {1.0, 2.0}, 1.0);
  CHECK(crp::rrm_log_density(p, 0.0, src, tgt, tilt) == 0.0);
  const auto beta = crp::BetaTilt::from_alpha(tilt, 0.2, src.interarrival);
  CHECK(crp::rpm_log_density(p, 0.0, src, beta) == 0.0);
}

TEST_CASE("renewal and Poisson densities coincide for exponential targets") {
  const auto claim = ParamDistribution::gamma(2.0, 2.0);
  const crp::MeasureSpec src{ParamDistribution::gamma(2.0, 2.0), claim, "P"};
  const auto tilt = crp::tilt_from_density_ratio(claim, ParamDistribution::exponential(1.5));
  const auto beta = crp::BetaTilt::from_rate(tilt, 1.3, src.interarrival);
  const crp::MeasureSpec tgt{ParamDistribution::exponential(1.3), ParamDistribution::exponential(1.5), "Q"};
  for (std::uint64_t i = 0; i < 200; ++i) {
    crp::RandomStream rng(11, i);
    const Path p = crp::sample_path(src, 4.0, rng);
    for (double t : {0.5, 2.0, 4.0}) {
      const double a = crp::rrm_log_density(p, t, src, tgt, tilt);
      const double b = crp::rpm_log_density(p, t, src, beta);
      CHECK(std::abs(a - b) <= 1e-10);
    }
  }
}

TEST_CASE("degenerate tails are reported") {
  const auto claim = ParamDistribution::exponential(1.0);
  const crp::MeasureSpec src{ParamDistribution::gamma(1.0, 40.0), claim, "P"};
  const crp::MeasureSpec tgt{ParamDistribution::exponential(1.0), claim, "Q"};
  // age 1000 under Ga(1,40): survival ~ e^{-1000} underflows the guard
  const Path p({2000.0}, {1.0}, 1000.0);
  CHECK_THROWS_AS(crp::rrm_log_density(p, 1000.0, src, tgt, crp::identity_tilt(claim)),
                  crp::DegenerateTailError);
}

TEST_CASE("beta checks its interarrival law") {
  const auto claim = ParamDistribution::exponential(1.0);
  const crp::MeasureSpec src{ParamDistribution::gamma(2.0, 2.0), claim, "P"};
  const auto beta = crp::BetaTilt::from_alpha(crp::identity_tilt(claim), 0.0,
                                              ParamDistribution::gamma(1.0, 2.0));
  const Path p({2.0}, {1.0}, 1.0);
  CHECK_THROWS_AS(crp::rpm_log_density(p, 1.0, src, beta), crp::DomainError);
}

TEST_CASE("conversion to compound Poisson") {
  const auto claim = ParamDistribution::gamma(3.0, 2.0);
  const crp::MeasureSpec src{ParamDistribution::gamma(2.0, 2.0), claim, "P"};
  const auto beta = crp::BetaTilt::from_alpha(crp::esscher_tilt(1.0, claim), 0.0, src.interarrival);
  const auto cpp = crp::convert_to_cpp(src, beta);
  CHECK(cpp.is_compound_poisson());
  CHECK(cpp.interarrival.rate() == doctest::Approx(1.0));
  CHECK(cpp.claim == ParamDistribution::gamma(2.0, 2.0));

  const auto rrm = crp::build_target_measure(src, crp::esscher_tilt(1.0, claim),
                                             ParamDistribution::weibull(2.0, 1.0));
  CHECK_FALSE(rrm.is_compound_poisson());
  CHECK(rrm.claim == ParamDistribution::gamma(2.0, 2.0));
}
