// crp: command-line front end for the compound renewal change-of-measure library.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crp/csv.hpp"
#include "crp/errors.hpp"
#include "crp/montecarlo.hpp"
#include "crp/renewal.hpp"
#include "crp/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

#ifndef CRP_DEFAULT_CONFIG_DIR
#define CRP_DEFAULT_CONFIG_DIR "scenarios"
#endif

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<long long> n_paths;
  std::optional<double> horizon;
  std::optional<double> tol;
  std::string out;
  std::string config_dir = CRP_DEFAULT_CONFIG_DIR;
};

void add_common(CLI::App* cmd, Common& c, bool positional = true) {
  if (positional) cmd->add_option("scenario", c.scenario, "built-in name, INI file or config stem")->required();
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--n-paths", c.n_paths, "number of simulated paths");
  cmd->add_option("--horizon", c.horizon, "simulation horizon");
  cmd->add_option("--tol", c.tol, "tilt unit-mass tolerance");
  cmd->add_option("--out", c.out, "write CSV here instead of stdout");
  cmd->add_option("--config-dir", c.config_dir, "directory of user scenario files");
}

crp::Scenario scenario_with_overrides(const Common& c) {
  crp::Scenario sc = crp::lookup_scenario(c.scenario, c.config_dir);
  if (c.seed) sc.seed = *c.seed;
  if (c.n_paths) {
    if (*c.n_paths < 0) throw crp::ConfigError("--n-paths must be nonnegative");
    sc.n_paths = static_cast<std::size_t>(*c.n_paths);
  }
  if (c.tol) sc.tol = *c.tol;
  if (c.horizon) {
    sc.horizon = *c.horizon;
    std::vector<double> grid;
    for (double t : sc.t_grid) {
      if (t < sc.horizon) grid.push_back(t);
    }
    grid.push_back(sc.horizon);
    sc.t_grid = grid;
  }
  return sc;
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw crp::ConfigError("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void key_value(std::ostream& os, const std::string& key, const std::string& value) {
  os << key << ',' << value << '\n';
}

void key_value(std::ostream& os, const std::string& key, double value) {
  key_value(os, key, crp::format_number(value));
}

int cmd_list(const Common& c) {
  std::cout << "name,origin,description\n";
  for (const auto& s : crp::builtin_scenarios()) {
    std::cout << s.name << ",builtin," << s.description << '\n';
  }
  for (const auto& path : crp::config_files(c.config_dir)) {
    std::string name = path.stem().string();
    std::string desc;
    try {
      const auto sc = crp::load_scenario_file(path);
      name = sc.name;
      desc = sc.description;
    } catch (const crp::ConfigError& e) {
      desc = std::string("invalid: ") + e.what();
    }
    std::replace(desc.begin(), desc.end(), ',', ';');
    std::cout << name << ",config:" << path.filename().string() << ',' << desc << '\n';
  }
  return kExitPass;
}

int cmd_run(const Common& c) {
  const auto resolved = crp::resolve(scenario_with_overrides(c));
  const auto result = crp::run_scenario(resolved);
  Output out(c.out);
  crp::write_check_csv(out.stream(), result.rows);
  return result.pass ? kExitPass : kExitFail;
}

int cmd_simulate(const Common& c, const std::string& measure) {
  crp::Scenario sc = scenario_with_overrides(c);
  if (!c.n_paths) sc.n_paths = 10;
  if (sc.n_paths == 0) throw crp::ConfigError("--n-paths must be positive");
  const bool under_q = measure == "Q";
  if (!under_q && measure != "P") throw crp::ConfigError("--measure must be P or Q");
  crp::MeasureSpec spec = sc.source;
  if (under_q) {
    auto for_resolve = sc;
    for_resolve.n_paths = std::max(for_resolve.n_paths, crp::kMinImportancePaths);
    spec = crp::resolve(for_resolve).target;
  }
  std::vector<crp::Path> paths;
  paths.reserve(sc.n_paths);
  for (std::size_t i = 0; i < sc.n_paths; ++i) {
    crp::RandomStream rng(sc.seed, i);
    paths.push_back(crp::sample_path(spec, sc.horizon, rng));
  }
  Output out(c.out);
  out.stream() << "# scenario=" << sc.name << " measure=" << measure << " seed=" << sc.seed
               << " horizon=" << crp::format_number(sc.horizon) << '\n';
  crp::write_paths_csv(out.stream(), paths);
  return kExitPass;
}

int cmd_convert(const Common& c, std::optional<double> rate, std::optional<double> alpha) {
  crp::Scenario sc = scenario_with_overrides(c);
  if (rate && alpha) throw crp::ConfigError("give at most one of --rate and --alpha");
  if (rate || alpha) {
    sc.target = {};
    if (rate) sc.target.rate = *rate;
    if (alpha) sc.target.alpha = *alpha;
  }
  const auto r = crp::resolve(sc);
  const auto& beta = r.cpp_beta;
  Output out(c.out);
  auto& os = out.stream();
  os << "key,value\n";
  key_value(os, "scenario", sc.name);
  key_value(os, "seed", std::to_string(sc.seed));
  key_value(os, "source_interarrival", sc.source.interarrival.describe());
  key_value(os, "source_claim", sc.source.claim.describe());
  key_value(os, "mean_interarrival", crp::mean(sc.source.interarrival));
  key_value(os, "alpha", beta.alpha());
  key_value(os, "rho", beta.implied_rate());
  key_value(os, "condition_residual",
            beta.alpha() - std::log(beta.implied_rate()) - std::log(crp::mean(sc.source.interarrival)));
  key_value(os, "target_interarrival", r.cpp.interarrival.describe());
  key_value(os, "target_claim", r.cpp.claim.describe());
  return kExitPass;
}

int cmd_premium(const Common& c) {
  const auto r = crp::resolve(scenario_with_overrides(c));
  const double pp = crp::premium_density(r.scenario.source);
  const double pq = crp::premium_density(r.cpp);
  Output out(c.out);
  auto& os = out.stream();
  os << "key,value\n";
  key_value(os, "scenario", r.scenario.name);
  key_value(os, "seed", std::to_string(r.scenario.seed));
  key_value(os, "p_P", pp);
  key_value(os, "p_Q", pq);
  key_value(os, "loading", pq - pp);
  key_value(os, "loading_ratio", pq / pp - 1.0);
  return kExitPass;
}

int cmd_renewal(const std::string& family, std::optional<double> rate, std::optional<double> shape,
                std::optional<double> scale, const std::vector<double>& ts, double tol,
                const std::string& out_path) {
  auto need = [](const std::optional<double>& v, const char* name) {
    if (!v) throw crp::ConfigError(std::string("--") + name + " is required for this family");
    return *v;
  };
  std::optional<crp::ParamDistribution> k;
  try {
    if (family == "exp" || family == "exponential") {
      k = crp::ParamDistribution::exponential(need(rate, "rate"));
    } else if (family == "ga" || family == "gamma") {
      k = crp::ParamDistribution::gamma(need(rate, "rate"), need(shape, "shape"));
    } else if (family == "weibull") {
      k = crp::ParamDistribution::weibull(need(shape, "shape"), need(scale, "scale"));
    } else {
      throw crp::ConfigError("unknown family '" + family + "'");
    }
  } catch (const crp::DomainError& e) {
    throw crp::ConfigError(e.what());
  }
  Output out(out_path);
  auto& os = out.stream();
  os << "t,E_N_t,poisson_line,rel_dev\n";
  const double line_rate = 1.0 / crp::mean(*k);
  for (double t : ts) {
    if (!(t >= 0.0)) throw crp::ConfigError("--t values must be nonnegative");
    const double m = crp::renewal_mean(*k, t, tol);
    const double line = t * line_rate;
    const double dev = t > 0.0 ? std::abs(m - line) / line : 0.0;
    os << crp::format_number(t) << ',' << crp::format_number(m) << ',' << crp::format_number(line)
       << ',' << crp::format_number(dev) << '\n';
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compound renewal processes under change of measure"};
  app.require_subcommand(1);

  Common list_opts, run_opts, sim_opts, conv_opts, prem_opts;
  auto* list = app.add_subcommand("list", "list built-in and configured scenarios");
  list->add_option("--config-dir", list_opts.config_dir, "directory of user scenario files");

  auto* run = app.add_subcommand("run", "run a scenario's check suite and emit CSV");
  add_common(run, run_opts);

  std::string measure = "P";
  auto* simulate = app.add_subcommand("simulate", "dump simulated paths as CSV");
  add_common(simulate, sim_opts);
  simulate->add_option("--measure", measure, "P (source) or Q (target)");

  std::optional<double> conv_rate, conv_alpha;
  auto* convert = app.add_subcommand("convert", "print the compound Poisson conversion");
  add_common(convert, conv_opts);
  convert->add_option("--rate", conv_rate, "target Poisson rate");
  convert->add_option("--alpha", conv_alpha, "additive constant alpha");

  auto* premium = app.add_subcommand("premium", "print premium densities and loading");
  add_common(premium, prem_opts);

  std::string family;
  std::optional<double> rate, shape, scale;
  std::vector<double> ts;
  double tol = crp::kDefaultTailTol;
  std::string renewal_out;
  auto* renewal = app.add_subcommand("renewal", "print E[N_t] from the renewal series");
  renewal->add_option("--family", family, "exp | ga | weibull")->required();
  renewal->add_option("--rate", rate, "rate (exp, ga)");
  renewal->add_option("--shape", shape, "shape (ga, weibull)");
  renewal->add_option("--scale", scale, "scale (weibull)");
  renewal->add_option("--t", ts, "evaluation times")->required();
  renewal->add_option("--tol", tol, "series tail tolerance");
  renewal->add_option("--out", renewal_out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*list) return cmd_list(list_opts);
    if (*run) return cmd_run(run_opts);
    if (*simulate) return cmd_simulate(sim_opts, measure);
    if (*convert) return cmd_convert(conv_opts, conv_rate, conv_alpha);
    if (*premium) return cmd_premium(prem_opts);
    if (*renewal) return cmd_renewal(family, rate, shape, scale, ts, tol, renewal_out);
  } catch (const crp::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const crp::EstimationError& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
