#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nise/dataset.hpp"
#include "nise/rng.hpp"

namespace nise {

// One structural equation of the market model: quantity on the left, price
// plus three shifters plus an intercept and a normal disturbance on the
// right.
struct EquationConfig {
  double gamma_p = 0.0;            // price coefficient
  Eigen::Vector3d beta{0, 0, 0};   // shifter coefficients
  double intercept = 0.0;
  double sd_u = 1.0;
};

struct ScenarioConfig {
  EquationConfig demand;  // shifters: inc, ps, pc
  EquationConfig supply;  // shifters: r, pf, t
  std::vector<std::string> exog_in_demand;  // estimation specification
  std::vector<std::string> instruments;
  Index n = 0;
  std::string label;

  void validate() const;
};

// The three designs of the simulation study: `base`, `weak` (supply shifter
// coefficients cut to 0.5, -0.3, -0.2), and `misspecified` (rain moved into
// the demand specification; the data-generating process stays at base).
ScenarioConfig builtin_scenario(const std::string& name, Index n);

// Parses key=value overrides (see README) on top of the base scenario.
ScenarioConfig scenario_from_config(const std::string& text, Index n);

struct MarketSample {
  Dataset data;  // endog (q, p); exog and instruments per the scenario
  Vector u_d;    // demand disturbance, kept only for diagnostics
};

// Draws the six exogenous variables and both disturbances, solves the two
// equations for the equilibrium price, and computes quantity from the demand
// equation, so every observation satisfies both structural equations
// exactly.
MarketSample gen_market_sample(const ScenarioConfig& cfg, RngStream& rng);

// Same, with an injectable normal source (test hook for degenerate draws).
MarketSample gen_market_sample_with(const ScenarioConfig& cfg,
                                    const std::function<double()>& next_normal);

struct EstimatorSelection {
  bool ols = true;
  bool tsls = true;
  bool nise = true;
};

struct EstimatorSummary {
  std::vector<std::string> coefficient_names;
  Vector median;  // per coefficient, across successful replications
  Vector qn;      // Qn scale per coefficient
  int failures = 0;
};

struct ReplicationSummary {
  std::optional<EstimatorSummary> ols;
  std::optional<EstimatorSummary> tsls;
  std::optional<EstimatorSummary> nise;
  std::optional<double> median_p_f;
  std::optional<double> median_p_j;
  std::optional<double> median_p_z;
  double median_corr_p_ud = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
};

// Runs `reps` independent replications (replication r draws from substream
// (seed, r)), fits the selected estimators on each generated sample, and
// reports medians and Qn scales. Identical output for any `threads`.
ReplicationSummary run_replications(const ScenarioConfig& cfg, int reps,
                                    std::uint64_t seed,
                                    const EstimatorSelection& sel = {},
                                    int threads = 1);

}  // namespace nise
