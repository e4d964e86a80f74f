#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crp/csv.hpp"
#include "crp/montecarlo.hpp"
#include "crp/process.hpp"
#include "crp/tilt.hpp"

namespace crp {

struct TiltConfig {
  enum class Kind { DensityRatio, Esscher, Custom };
  Kind kind = Kind::Esscher;
  std::optional<ParamDistribution> target_claim;  // density-ratio target
  double esscher_c = 0.0;
  // custom: a closed-form log-weight or an interpolation table
  std::string custom_name;
  ClaimTilt::LogWeight custom_gamma;
  std::vector<double> table_x;
  std::vector<double> table_gamma;
  std::optional<ParamDistribution> declared_target;
};

/// Exactly one field is set: alpha or rate select a compound Poisson target
/// through alpha = ln(rate) + ln E_P[W_1]; interarrival selects a renewal target.
struct TargetConfig {
  std::optional<double> alpha;
  std::optional<double> rate;
  std::optional<ParamDistribution> interarrival;
};

struct Scenario {
  std::string name;
  std::string description;
  MeasureSpec source;
  TiltConfig tilt;
  TargetConfig target;
  double horizon = 1.0;
  std::vector<double> t_grid;
  std::size_t n_paths = 100'000;
  std::uint64_t seed = 42;
  /// Require p(Q) > p(P).
  bool expect_loading = false;
  double tol = 1e-10;
};

/// A scenario with its tilt, target law and densities constructed.
struct ResolvedScenario {
  Scenario scenario;
  ClaimTilt tilt;
  std::optional<BetaTilt> beta;  // set for compound Poisson targets
  MeasureSpec target;            // Q
  DensitySpec density;           // dQ/dP
  /// Compound Poisson conversion of the source: the target itself when it is
  /// compound Poisson, otherwise the claim tilt with rate 1 / E_P[W_1].
  BetaTilt cpp_beta;
  MeasureSpec cpp;
};

/// Validates and constructs; throws ConfigError on any inconsistency.
ResolvedScenario resolve(const Scenario& scenario);

/// The six built-in scenarios, in catalog order.
const std::vector<Scenario>& builtin_scenarios();
std::optional<Scenario> find_builtin(const std::string& name);

/// Parses an INI scenario file. Throws ConfigError.
Scenario load_scenario_file(const std::filesystem::path& path);
/// `*.ini` files in `dir`, sorted by file name; empty if dir is missing.
std::vector<std::filesystem::path> config_files(const std::filesystem::path& dir);

/// Built-in name, a path to an INI file, or the stem of an INI file in
/// `config_dir`. Throws ConfigError when nothing matches.
Scenario lookup_scenario(const std::string& key, const std::filesystem::path& config_dir);

struct RunResult {
  std::vector<CheckRow> rows;
  bool pass = true;
};

/// Full check suite: tilt validation, round trip, unit mass, martingale
/// property, tilted claim marginal, premium comparison, importance sampling
/// against direct simulation, surplus martingale of the compound Poisson
/// conversion and renewal checks.
RunResult run_scenario(const ResolvedScenario& resolved);

}  // namespace crp
