#include "crp/scenario.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <sstream>

#include "crp/errors.hpp"
#include "crp/renewal.hpp"

namespace crp {

namespace {

using Dist = ParamDistribution;

constexpr std::size_t kKsSamples = 10'000;
constexpr std::size_t kCoincidencePaths = 1'000;
constexpr double kKsLevel = 0.01;
constexpr std::uint64_t kKsReplicates = 5;
constexpr int kKsRequired = 4;
constexpr double kCoincidenceTol = 1e-10;
constexpr double kRoundTripTol = 1e-10;

Scenario example_2_1() {
  Scenario s;
  s.name = "example-2.1";
  s.description = "Poisson(1) to Poisson(1.5), claims Exp(1) to Exp(0.8)";
  s.source = {Dist::exponential(1.0), Dist::exponential(1.0), "P"};
  s.tilt.kind = TiltConfig::Kind::DensityRatio;
  s.tilt.target_claim = Dist::exponential(0.8);
  s.target.interarrival = Dist::exponential(1.5);
  s.horizon = 5.0;
  s.t_grid = {1.0, 2.5, 5.0};
  return s;
}

Scenario example_2_2() {
  Scenario s;
  s.name = "example-2.2";
  s.description = "Ga(1,2) to Ga(1.5,3) interarrivals, claims Exp(1) to Exp(2)";
  s.source = {Dist::gamma(1.0, 2.0), Dist::exponential(1.0), "P"};
  s.tilt.kind = TiltConfig::Kind::DensityRatio;
  s.tilt.target_claim = Dist::exponential(2.0);
  s.target.interarrival = Dist::gamma(1.5, 3.0);
  s.horizon = 10.0;
  s.t_grid = {2.0, 5.0, 10.0};
  return s;
}

Scenario example_3_1() {
  Scenario s;
  s.name = "example-3.1";
  s.description = "Ga(2,2) renewal with Ga(2,2) claims to Poisson(1) with Exp(1.5) claims";
  s.source = {Dist::gamma(2.0, 2.0), Dist::gamma(2.0, 2.0), "P"};
  s.tilt.kind = TiltConfig::Kind::DensityRatio;
  s.tilt.target_claim = Dist::exponential(1.5);
  s.target.rate = 1.0;
  s.horizon = 2.0;
  s.t_grid = {1.0, 1.5, 2.0};
  return s;
}

Scenario example_4_1() {
  // claims Ga(zeta, 2), gamma(x) = ln(m/(2c)) - ln x + 2(c-1)/(c m) x with m = E_P[X_1]
  constexpr double xi = 2.0, k = 2.0, zeta = 1.0, c = 1.9, d = 1.5;
  const Dist claim = Dist::gamma(zeta, 2.0);
  const double m = mean(claim);
  Scenario s;
  s.name = "example-4.1";
  s.description = "Ga(2,2) renewal, Ga(1,2) claims; loading via claims Exp(zeta/c), rate xi/d";
  s.source = {Dist::gamma(xi, k), claim, "P"};
  s.tilt.kind = TiltConfig::Kind::Custom;
  s.tilt.custom_name = "log(m/(2c)) - log x + 2(c-1)x/(c m)";
  s.tilt.custom_gamma = [m](double x) {
    return std::log(m / (2.0 * c)) - std::log(x) + 2.0 * (c - 1.0) / (c * m) * x;
  };
  s.tilt.declared_target = Dist::exponential(zeta / c);
  s.target.alpha = std::log(xi / d * mean(s.source.interarrival));
  s.horizon = 2.0;
  s.t_grid = {1.0, 1.5, 2.0};
  s.expect_loading = true;
  return s;
}

Scenario example_4_2() {
  Scenario s;
  s.name = "example-4.2";
  s.description = "Weibull(2,1) renewal, Exp(1) claims; Esscher c=0.3, alpha=0";
  s.source = {Dist::weibull(2.0, 1.0), Dist::exponential(1.0), "P"};
  s.tilt.kind = TiltConfig::Kind::Esscher;
  s.tilt.esscher_c = 0.3;
  s.target.alpha = 0.0;
  s.horizon = 2.0;
  s.t_grid = {0.5, 1.0, 2.0};
  s.expect_loading = true;
  return s;
}

Scenario example_4_3() {
  Scenario s;
  s.name = "example-4.3";
  s.description = "Ga(2,2) renewal, Ga(3,2) claims; Esscher c=1, alpha=0";
  s.source = {Dist::gamma(2.0, 2.0), Dist::gamma(3.0, 2.0), "P"};
  s.tilt.kind = TiltConfig::Kind::Esscher;
  s.tilt.esscher_c = 1.0;
  s.target.alpha = 0.0;
  s.horizon = 2.0;
  s.t_grid = {1.0, 1.5, 2.0};
  s.expect_loading = true;
  return s;
}

ClaimTilt build_tilt(const Scenario& sc) {
  const auto& cfg = sc.tilt;
  const Dist& claim = sc.source.claim;
  switch (cfg.kind) {
    case TiltConfig::Kind::DensityRatio:
      if (!cfg.target_claim) throw ConfigError("density-ratio tilt needs a target claim law");
      return tilt_from_density_ratio(claim, *cfg.target_claim);
    case TiltConfig::Kind::Esscher:
      try {
        return esscher_tilt(cfg.esscher_c, claim);
      } catch (const DivergenceError& e) {
        throw ConfigError(std::string("Esscher parameter: ") + e.what());
      }
    case TiltConfig::Kind::Custom:
      if (cfg.custom_gamma) {
        return custom_tilt(cfg.custom_name, cfg.custom_gamma, claim, cfg.declared_target);
      }
      return tabulated_tilt(cfg.custom_name.empty() ? "table" : cfg.custom_name, cfg.table_x,
                            cfg.table_gamma, claim, cfg.declared_target);
  }
  throw ConfigError("unknown tilt kind");
}

void validate(const Scenario& sc) {
  if (sc.name.empty() || sc.name.find_first_of(",\n\"") != std::string::npos) {
    throw ConfigError("scenario name must be nonempty and free of commas, quotes and newlines");
  }
  if (!(sc.horizon > 0.0) || !std::isfinite(sc.horizon)) throw ConfigError("horizon must be positive");
  if (sc.t_grid.empty()) throw ConfigError("t_grid must be nonempty");
  for (double t : sc.t_grid) {
    if (!(t > 0.0) || t > sc.horizon) throw ConfigError("t_grid points must lie in (0, horizon]");
  }
  if (!std::is_sorted(sc.t_grid.begin(), sc.t_grid.end())) throw ConfigError("t_grid must be sorted");
  if (sc.n_paths < kMinImportancePaths) {
    throw ConfigError("n_paths must be at least " + std::to_string(kMinImportancePaths));
  }
  if (!(sc.tol > 0.0)) throw ConfigError("tol must be positive");
  const int targets = static_cast<int>(sc.target.alpha.has_value()) +
                      static_cast<int>(sc.target.rate.has_value()) +
                      static_cast<int>(sc.target.interarrival.has_value());
  if (targets != 1) throw ConfigError("target needs exactly one of alpha, rate or an interarrival law");
}

CheckRow row(const Scenario& sc, std::string check, std::string statistic, double value,
             double se, double z, bool pass, std::size_t n) {
  return CheckRow{sc.name, std::move(check), std::move(statistic), value, se, z, pass, sc.seed, n};
}

double z_score(double diff, double se) {
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
}

std::string label_with_t(const std::string& stat, double t) {
  return stat + " t=" + format_number(t);
}

void add_martingale_rows(RunResult& out, const Scenario& sc, const std::string& check,
                         const MartingaleReport& rep) {
  for (const auto& e : rep.events) {
    const bool ok = e.skipped || std::abs(e.z) <= kZThreshold;
    std::string stat = e.label + " s=" + format_number(rep.s) + " t=" + format_number(rep.t);
    if (e.skipped) stat += " (skipped)";
    out.rows.push_back(row(sc, check, stat, e.difference, e.std_error, e.z, ok, rep.n_paths));
  }
  out.pass = out.pass && rep.pass;
}

// number parsing without locale dependence
double parse_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) throw ConfigError("'" + key + "' is not a number: " + text);
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::string token;
  std::string normalised = text;
  std::replace(normalised.begin(), normalised.end(), ',', ' ');
  std::istringstream is(normalised);
  while (is >> token) out.push_back(parse_double(token, key));
  return out;
}

using Tree = boost::property_tree::ptree;

std::optional<std::string> get(const Tree& tree, const std::string& section, const std::string& key) {
  const auto sec = tree.get_child_optional(section);
  if (!sec) return std::nullopt;
  const auto v = sec->get_optional<std::string>(key);
  if (!v) return std::nullopt;
  return *v;
}

std::string require(const Tree& tree, const std::string& section, const std::string& key) {
  auto v = get(tree, section, key);
  if (!v) throw ConfigError("missing [" + section + "] " + key);
  return *v;
}

Dist parse_distribution(const Tree& tree, const std::string& section, const std::string& prefix) {
  const std::string family = require(tree, section, prefix + "family");
  auto num = [&](const std::string& key) {
    return parse_double(require(tree, section, prefix + key), "[" + section + "] " + prefix + key);
  };
  try {
    if (family == "exponential" || family == "exp") return Dist::exponential(num("rate"));
    if (family == "gamma" || family == "ga") return Dist::gamma(num("rate"), num("shape"));
    if (family == "weibull") return Dist::weibull(num("shape"), num("scale"));
  } catch (const DomainError& e) {
    throw ConfigError("[" + section + "]: " + e.what());
  }
  throw ConfigError("[" + section + "] unknown family '" + family + "'");
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("'" + key + "' is not a boolean: " + text);
}

}  // namespace

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> catalog{example_2_1(), example_2_2(), example_3_1(),
                                             example_4_1(), example_4_2(), example_4_3()};
  return catalog;
}

std::optional<Scenario> find_builtin(const std::string& name) {
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

ResolvedScenario resolve(const Scenario& sc) {
  validate(sc);
  try {
    ClaimTilt tilt = build_tilt(sc);
    const TiltReport report = validate_tilt(tilt, sc.source.claim, 0, 1e-8);
    if (!report.pass) {
      throw ConfigError("claim tilt does not integrate to one (mass " +
                        format_number(report.unit_mass) + ")");
    }
    const Dist& k = sc.source.interarrival;
    std::optional<BetaTilt> beta;
    MeasureSpec target{k, sc.source.claim, ""};
    DensitySpec density = IdentityDensity{};
    if (sc.target.interarrival) {
      target = build_target_measure(sc.source, tilt, *sc.target.interarrival);
      density = RrmDensity{target, tilt};
    } else {
      beta = sc.target.alpha ? BetaTilt::from_alpha(tilt, *sc.target.alpha, k)
                             : BetaTilt::from_rate(tilt, *sc.target.rate, k);
      target = convert_to_cpp(sc.source, *beta);
      density = RpmDensity{*beta};
    }
    target.label = "Q";
    BetaTilt cpp_beta = beta ? *beta : BetaTilt::from_alpha(tilt, 0.0, k);
    MeasureSpec cpp = convert_to_cpp(sc.source, cpp_beta);
    cpp.label = "Q_cpp";
    return ResolvedScenario{sc, std::move(tilt), std::move(beta), std::move(target),
                            std::move(density), std::move(cpp_beta), std::move(cpp)};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(sc.name + ": " + e.what());
  }
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  Tree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  Scenario sc;
  sc.name = get(tree, "scenario", "name").value_or(path.stem().string());
  sc.description = get(tree, "scenario", "description").value_or("");
  sc.horizon = parse_double(require(tree, "scenario", "horizon"), "horizon");
  sc.t_grid = get(tree, "scenario", "t_grid") ? parse_list(*get(tree, "scenario", "t_grid"), "t_grid")
                                               : std::vector<double>{sc.horizon};
  if (auto v = get(tree, "scenario", "n_paths")) {
    const double n = parse_double(*v, "n_paths");
    if (!(n >= 0.0) || n != std::floor(n)) throw ConfigError("n_paths must be a whole number");
    sc.n_paths = static_cast<std::size_t>(n);
  }
  if (auto v = get(tree, "scenario", "seed")) {
    const double seed = parse_double(*v, "seed");
    if (!(seed >= 0.0) || seed != std::floor(seed)) throw ConfigError("seed must be a whole number");
    sc.seed = static_cast<std::uint64_t>(seed);
  }
  if (auto v = get(tree, "scenario", "expect_loading")) sc.expect_loading = parse_bool(*v, "expect_loading");
  if (auto v = get(tree, "scenario", "tol")) sc.tol = parse_double(*v, "tol");

  sc.source = {parse_distribution(tree, "interarrival", ""), parse_distribution(tree, "claim", ""), "P"};

  const std::string kind = require(tree, "tilt", "kind");
  if (kind == "density-ratio") {
    sc.tilt.kind = TiltConfig::Kind::DensityRatio;
    sc.tilt.target_claim = parse_distribution(tree, "tilt", "target_");
  } else if (kind == "esscher") {
    sc.tilt.kind = TiltConfig::Kind::Esscher;
    sc.tilt.esscher_c = parse_double(require(tree, "tilt", "c"), "[tilt] c");
  } else if (kind == "custom") {
    sc.tilt.kind = TiltConfig::Kind::Custom;
    sc.tilt.custom_name = get(tree, "tilt", "name").value_or("table");
    sc.tilt.table_x = parse_list(require(tree, "tilt", "x"), "[tilt] x");
    sc.tilt.table_gamma = parse_list(require(tree, "tilt", "gamma"), "[tilt] gamma");
    if (get(tree, "tilt", "target_family")) {
      sc.tilt.declared_target = parse_distribution(tree, "tilt", "target_");
    }
  } else {
    throw ConfigError("[tilt] unknown kind '" + kind + "'");
  }

  if (auto v = get(tree, "target", "alpha")) sc.target.alpha = parse_double(*v, "[target] alpha");
  if (auto v = get(tree, "target", "rate"); v && !get(tree, "target", "family")) {
    sc.target.rate = parse_double(*v, "[target] rate");
  }
  if (get(tree, "target", "family")) sc.target.interarrival = parse_distribution(tree, "target", "");
  return sc;
}

std::vector<std::filesystem::path> config_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ini") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Scenario lookup_scenario(const std::string& key, const std::filesystem::path& config_dir) {
  if (auto s = find_builtin(key)) return *s;
  const std::filesystem::path direct(key);
  std::error_code ec;
  if (std::filesystem::is_regular_file(direct, ec)) return load_scenario_file(direct);
  for (const auto& p : config_files(config_dir)) {
    if (p.stem() == key) return load_scenario_file(p);
  }
  throw ConfigError("unknown scenario '" + key + "'");
}

RunResult run_scenario(const ResolvedScenario& r) {
  const Scenario& sc = r.scenario;
  const MeasureSpec& src = sc.source;
  const double horizon = sc.horizon;
  const std::size_t n = sc.n_paths;
  RunResult out;
  auto add = [&](CheckRow cr) {
    out.pass = out.pass && cr.pass;
    out.rows.push_back(std::move(cr));
  };

  // claim tilt: unit mass and the moment classes l = 1, 2
  const TiltReport tr = validate_tilt(r.tilt, src.claim, 2, sc.tol);
  add(row(sc, "validate_tilt", "unit_mass", tr.unit_mass, tr.unit_mass_error, 0.0, tr.pass, 0));
  for (std::size_t l = 0; l < tr.moments.size(); ++l) {
    const double m = tr.moments[l];
    add(row(sc, "validate_tilt", "E_P[X^" + std::to_string(l + 1) + " w]", m, 0.0, 0.0,
            tr.converged && std::isfinite(m), 0));
  }

  const double rt = round_trip_deviation(r.tilt, src.claim);
  add(row(sc, "round_trip", "max_rel_gamma_dev", rt, 0.0, 0.0, rt <= kRoundTripTol, 100));

  for (double t : sc.t_grid) {
    const auto e = is_expectation(functionals::constant(1.0), src, r.density, t, n, sc.seed);
    const double z = z_score(e.estimate - 1.0, e.std_error);
    add(row(sc, "unit_mass", label_with_t("E_P[M_t]", t), e.estimate, e.std_error, z,
            std::abs(z) <= kZThreshold, e.n_paths));
  }

  if (r.beta) {
    // renewal-form density with an exponential target against the Poisson form
    const MeasureSpec exp_target{Dist::exponential(r.beta->implied_rate()), r.target.claim, "Q"};
    double worst = 0.0;
    for (std::size_t i = 0; i < kCoincidencePaths; ++i) {
      RandomStream rng(sc.seed, i);
      const Path p = sample_path(src, horizon, rng);
      for (double t : sc.t_grid) {
        const double a = rrm_log_density(p, t, src, exp_target, r.beta->base());
        const double b = rpm_log_density(p, t, src, *r.beta);
        worst = std::max(worst, std::abs(a - b));
      }
    }
    add(row(sc, "density_coincidence", "max_abs_log_diff", worst, 0.0, 0.0, worst <= kCoincidenceTol,
            kCoincidencePaths));
  }

  const double s_mart = sc.t_grid.front() < horizon ? sc.t_grid.front() : horizon / 2.0;
  add_martingale_rows(out, sc, "martingale", martingale_check(src, r.density, s_mart, horizon, n, sc.seed));

  // marginal passes when kKsRequired of kKsReplicates independent samples do
  const Dist q_claim = r.target.claim;
  int ks_passes = 0;
  for (std::uint64_t rep = 0; rep < kKsReplicates; ++rep) {
    const auto samples = tilted_claim_sample(src.claim, r.tilt, kKsSamples, sc.seed, rep);
    const auto ks = weighted_ks(samples, [&](double x) { return cdf(q_claim, x); });
    const bool ok = !ks.unreliable && ks.p_value > kKsLevel;
    ks_passes += ok ? 1 : 0;
    const std::string tag = " #" + std::to_string(rep);
    out.rows.push_back(row(sc, "weighted_ks", "D vs " + q_claim.describe() + tag, ks.statistic, 0.0,
                           0.0, ok, kKsSamples));
    out.rows.push_back(row(sc, "weighted_ks", "p_value" + tag, ks.p_value, 0.0, 0.0, ok, kKsSamples));
    out.rows.push_back(row(sc, "weighted_ks", "n_eff" + tag, ks.n_eff, 0.0, 0.0, !ks.unreliable,
                           kKsSamples));
  }
  add(row(sc, "weighted_ks", "replicates_passed", ks_passes, 0.0, 0.0, ks_passes >= kKsRequired,
          kKsSamples * kKsReplicates));

  {
    // E_Q[X_1] = E_Q[X_1; N_t >= 1] / Q(T_1 <= t) since X_1 is independent of T_1 under Q
    const auto e = is_expectation(functionals::first_claim(), src, r.density, horizon, n, sc.seed);
    const double arrived = cdf(r.target.interarrival, horizon);
    const double est = e.estimate / arrived;
    const double se = e.std_error / arrived;
    const double z = z_score(est - mean(q_claim), se);
    add(row(sc, "first_claim_mean", "E_Q[X_1]", est, se, z, std::abs(z) <= kZThreshold, e.n_paths));
  }

  const double p_p = premium_density(src);
  const double p_q = premium_density(r.cpp);
  add(row(sc, "premium", "p(P)", p_p, 0.0, 0.0, true, 0));
  add(row(sc, "premium", "p(Q)", p_q, 0.0, 0.0, std::isfinite(p_q), 0));
  add(row(sc, "premium", "loading", p_q - p_p, 0.0, 0.0, !sc.expect_loading || p_q > p_p, 0));

  const std::pair<const char*, PathFunctional> phis[] = {{"N_t", functionals::count()},
                                                         {"S_t", functionals::aggregate()},
                                                         {"X_1;N_t>=1", functionals::first_claim()}};
  for (const auto& [label, phi] : phis) {
    const auto is = is_expectation(phi, src, r.density, horizon, n, sc.seed);
    const auto direct = direct_expectation(phi, r.target, horizon, n, sc.seed + 1);
    const double se = std::hypot(is.std_error, direct.std_error);
    const double z = z_score(is.estimate - direct.estimate, se);
    add(row(sc, "is_vs_direct", label_with_t(label, horizon), is.estimate - direct.estimate, se, z,
            std::abs(z) <= kZThreshold, is.n_paths));
  }

  add_martingale_rows(out, sc, "surplus_martingale",
                      surplus_martingale_check(r.cpp, s_mart, horizon, n, sc.seed));

  {
    const double series = renewal_mean(src.interarrival, horizon);
    const auto mc = direct_expectation(functionals::count(), src, horizon, n, sc.seed);
    const double z = z_score(mc.estimate - series, mc.std_error);
    add(row(sc, "renewal", label_with_t("E_P[N_t] series", horizon), series, mc.std_error, z,
            std::abs(z) <= kZThreshold, mc.n_paths));
    const auto lin = poisson_linearity_report(src.interarrival, sc.t_grid);
    add(row(sc, "renewal", "max_rel_dev_from_linear", lin.max_rel_dev, 0.0, 0.0,
            lin.is_linear == src.is_compound_poisson(), 0));
  }
  return out;
}

}  // namespace crp
