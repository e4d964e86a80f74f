#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "crp/csv.hpp"
#include "crp/errors.hpp"
#include "crp/process.hpp"
#include "crp/random.hpp"

using crp::ParamDistribution;
using crp::Path;

TEST_CASE("forced path evaluators") {
  const Path p({0.5, 1.0, 2.0}, {1.0, 2.0, 4.0}, 2.0);
  CHECK(p.size() == 3);
  CHECK(p.arrival_time(0) == 0.0);
  CHECK(p.arrival_time(3) == 3.5);

  CHECK(crp::count_at(p, 0.0) == 0);
  CHECK(crp::count_at(p, 0.4999) == 0);
  CHECK(crp::count_at(p, 0.5) == 1);
  CHECK(crp::count_at(p, 1.4999) == 1);
  CHECK(crp::count_at(p, 1.5) == 2);
  CHECK(crp::count_at(p, 2.0) == 2);

  CHECK(crp::aggregate_at(p, 0.2) == 0.0);
  CHECK(crp::aggregate_at(p, 0.5) == 1.0);
  CHECK(crp::aggregate_at(p, 2.0) == 3.0);

  CHECK(crp::age_at(p, 0.2) == doctest::Approx(0.2));
  CHECK(crp::age_at(p, 1.6) == doctest::Approx(0.1));
  CHECK(crp::age_at(p, 1.5) == 0.0);

  CHECK(crp::surplus_at(p, 2.0, 1.25) == doctest::Approx(3.0 - 2.5));

  CHECK_THROWS_AS(crp::count_at(p, -0.1), crp::DomainError);
  CHECK_THROWS_AS(crp::count_at(p, 2.5), crp::DomainError);
}

TEST_CASE("path validation") {
  CHECK_THROWS_AS(Path({1.0}, {1.0, 2.0}, 0.5), crp::DomainError);
  CHECK_THROWS_AS(Path({1.0, -0.1}, {1.0, 2.0}, 0.5), crp::DomainError);
  CHECK_THROWS_AS(Path({1.0, 0.0}, {1.0, 2.0}, 0.5), crp::DomainError);
  CHECK_THROWS_AS(Path({1.0, 1.0}, {1.0, 2.0}, 0.5), crp::DomainError);  // two past horizon
  CHECK_THROWS_AS(Path({1.0}, {1.0}, 1.5), crp::DomainError);            // none past horizon
  CHECK_THROWS_AS(Path({}, {}, 1.0), crp::DomainError);
  CHECK_NOTHROW(Path({2.0}, {1.0}, 1.0));
}

TEST_CASE("first arrival after the horizon is never counted") {
  const Path p({3.0}, {10.0}, 1.0);
  CHECK(crp::count_at(p, 1.0) == 0);
  CHECK(crp::aggregate_at(p, 1.0) == 0.0);
  CHECK(crp::age_at(p, 1.0) == 1.0);
}

TEST_CASE("sampler draws interarrivals then claims") {
  const crp::MeasureSpec spec{ParamDistribution::exponential(1.0),
                              ParamDistribution::exponential(2.0), "P"};
  // W_1 = -ln .5, W_2 = -ln .2 overshoots t=1, then two claims
  crp::ScriptedUniforms u({0.5, 0.2, 0.9, 0.1});
  const Path p = crp::sample_path(spec, 1.0, u);
  CHECK(u.consumed() == 4);
  REQUIRE(p.size() == 2);
  CHECK(p.interarrivals()[0] == doctest::Approx(-std::log(0.5)).epsilon(1e-15));
  CHECK(p.interarrivals()[1] == doctest::Approx(-std::log(0.2)).epsilon(1e-15));
  CHECK(p.claims()[0] == doctest::Approx(-std::log(0.9) / 2.0).epsilon(1e-15));
  CHECK(p.claims()[1] == doctest::Approx(-std::log(0.1) / 2.0).epsilon(1e-15));
}

TEST_CASE("substreams are reproducible and distinct") {
  const crp::MeasureSpec spec{ParamDistribution::gamma(2.0, 2.0),
                              ParamDistribution::gamma(3.0, 2.0), "P"};
  crp::RandomStream a(42, 7), b(42, 7), c(42, 8);
  const Path pa = crp::sample_path(spec, 5.0, a);
  const Path pb = crp::sample_path(spec, 5.0, b);
  const Path pc = crp::sample_path(spec, 5.0, c);
  CHECK(std::vector<double>(pa.claims().begin(), pa.claims().end()) ==
        std::vector<double>(pb.claims().begin(), pb.claims().end()));
  CHECK(pa.interarrivals()[0] != pc.interarrivals()[0]);
}

TEST_CASE("counts are Poisson for exponential interarrivals") {
  const double theta = 2.0, t = 3.0;
  const crp::MeasureSpec spec{ParamDistribution::exponential(theta),
                              ParamDistribution::exponential(1.0), "P"};
  const int n = 50000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    crp::RandomStream rng(5, i);
    sum += static_cast<double>(crp::count_at(crp::sample_path(spec, t, rng), t));
  }
  const double se = std::sqrt(theta * t / n);
  CHECK(std::abs(sum / n - theta * t) <= 3.0 * se);
}

TEST_CASE("csv dump") {
  const std::vector<Path> paths{Path({0.5, 1.0}, {1.0, 2.0}, 1.0), Path({2.0}, {3.0}, 1.0)};
  std::ostringstream os;
  crp::write_paths_csv(os, paths);
  CHECK(os.str() ==
        "path_id,n,W_n,T_n,X_n\n"
        "0,1,0.5,0.5,1\n"
        "0,2,1,1.5,2\n"
        "1,1,2,2,3\n");
}

TEST_CASE("check rows quote text fields") {
  std::ostringstream os;
  crp::write_check_row(os, {"s", "weighted_ks", "D vs Ga(rate=2, shape=2)", 0.5, 0.0, 0.0, true, 42, 10});
  CHECK(os.str() == "s,weighted_ks,\"D vs Ga(rate=2, shape=2)\",0.5,0,0,1,42,10\n");
}
