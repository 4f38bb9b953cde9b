#include "nise/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "nise/estimators.hpp"
#include "nise/stats.hpp"

namespace nise {

namespace {

constexpr std::array<const char*, 6> kVariablePool = {"inc", "ps",
                                                      "pc",  "r",
                                                      "pf",  "t"};

bool known_variable(const std::string& name) {
  return std::find(kVariablePool.begin(), kVariablePool.end(), name) !=
         kVariablePool.end();
}

double median_or_nan(std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return median(v);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (std::abs(supply.gamma_p - demand.gamma_p) < 1e-12) {
    throw Error(
        "scenario: demand and supply price coefficients coincide, no "
        "reduced form exists");
  }
  if (!(demand.sd_u > 0.0) || !(supply.sd_u > 0.0)) {
    throw Error("scenario: disturbance standard deviations must be positive");
  }
  if (n < 1) throw Error("scenario: n must be positive");
  for (const auto& list : {exog_in_demand, instruments}) {
    for (const auto& name : list) {
      if (!known_variable(name)) {
        throw Error("scenario: unknown variable '" + name +
                    "' (expected one of inc, ps, pc, r, pf, t)");
      }
    }
  }
  for (const auto& name : exog_in_demand) {
    if (std::find(instruments.begin(), instruments.end(), name) !=
        instruments.end()) {
      throw Error("scenario: variable '" + name +
                  "' listed both as exogenous and as instrument");
    }
  }
}

ScenarioConfig builtin_scenario(const std::string& name, Index n) {
  ScenarioConfig cfg;
  cfg.n = n;
  cfg.demand = {-1.00, {1.50, 0.50, -0.50}, 3.00, 2.0};
  cfg.supply = {0.75, {2.50, -1.50, -1.00}, 0.50, 2.0};
  cfg.exog_in_demand = {"inc", "ps", "pc"};
  cfg.instruments = {"r", "pf", "t"};
  cfg.label = name;

  if (name == "base") {
    // as initialized
  } else if (name == "weak") {
    cfg.supply.beta = {0.5, -0.3, -0.2};
  } else if (name == "misspecified") {
    cfg.exog_in_demand = {"inc", "ps", "pc", "r"};
    cfg.instruments = {"pf", "t"};
  } else {
    throw UnknownScenario("unknown scenario '" + name +
                          "' (expected base, weak, or misspecified)");
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig scenario_from_config(const std::string& text, Index n) {
  ScenarioConfig cfg = builtin_scenario("base", n);
  cfg.label = "custom";

  auto parse_list = [](const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto begin = item.find_first_not_of(" \t");
      const auto end = item.find_last_not_of(" \t");
      if (begin == std::string::npos) continue;
      out.push_back(item.substr(begin, end - begin + 1));
    }
    return out;
  };

  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("scenario config line " + std::to_string(lineno) +
                  ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string()
                                    : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    auto as_double = [&](const std::string& v) {
      try {
        std::size_t pos;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
      } catch (const std::exception&) {
        throw Error("scenario config line " + std::to_string(lineno) +
                    ": bad number '" + v + "'");
      }
    };

    if (key == "label") cfg.label = value;
    else if (key == "n") cfg.n = static_cast<Index>(as_double(value));
    else if (key == "demand.gamma_p") cfg.demand.gamma_p = as_double(value);
    else if (key == "demand.beta.inc") cfg.demand.beta(0) = as_double(value);
    else if (key == "demand.beta.ps") cfg.demand.beta(1) = as_double(value);
    else if (key == "demand.beta.pc") cfg.demand.beta(2) = as_double(value);
    else if (key == "demand.intercept") cfg.demand.intercept = as_double(value);
    else if (key == "demand.sd_u") cfg.demand.sd_u = as_double(value);
    else if (key == "supply.gamma_p") cfg.supply.gamma_p = as_double(value);
    else if (key == "supply.beta.r") cfg.supply.beta(0) = as_double(value);
    else if (key == "supply.beta.pf") cfg.supply.beta(1) = as_double(value);
    else if (key == "supply.beta.t") cfg.supply.beta(2) = as_double(value);
    else if (key == "supply.intercept") cfg.supply.intercept = as_double(value);
    else if (key == "supply.sd_u") cfg.supply.sd_u = as_double(value);
    else if (key == "exog_in_demand") cfg.exog_in_demand = parse_list(value);
    else if (key == "instruments") cfg.instruments = parse_list(value);
    else {
      throw Error("scenario config line " + std::to_string(lineno) +
                  ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

MarketSample gen_market_sample_with(
    const ScenarioConfig& cfg, const std::function<double()>& next_normal) {
  cfg.validate();
  const Index n = cfg.n;

  Matrix pool(n, 6);  // inc, ps, pc, r, pf, t
  Vector u_d(n), u_s(n), p(n), q(n);

  const double denom = cfg.supply.gamma_p - cfg.demand.gamma_p;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < 6; ++j) pool(i, j) = next_normal();
    u_d(i) = cfg.demand.sd_u * next_normal();
    u_s(i) = cfg.supply.sd_u * next_normal();

    const double demand_part = cfg.demand.beta.dot(pool.row(i).head<3>()) +
                               cfg.demand.intercept + u_d(i);
    const double supply_part = cfg.supply.beta.dot(pool.row(i).tail<3>()) +
                               cfg.supply.intercept + u_s(i);
    p(i) = (demand_part - supply_part) / denom;
    q(i) = cfg.demand.gamma_p * p(i) + demand_part;
  }

  std::map<std::string, Index> column{{"inc", 0}, {"ps", 1}, {"pc", 2},
                                      {"r", 3},   {"pf", 4}, {"t", 5}};

  MarketSample sample;
  sample.u_d = u_d;
  Dataset& d = sample.data;
  d.endog.resize(n, 2);
  d.endog.col(0) = q;
  d.endog.col(1) = p;
  d.endog_names = {"q", "p"};

  d.exog.resize(n, static_cast<Index>(cfg.exog_in_demand.size()));
  for (std::size_t j = 0; j < cfg.exog_in_demand.size(); ++j) {
    d.exog.col(static_cast<Index>(j)) =
        pool.col(column.at(cfg.exog_in_demand[j]));
    d.exog_names.push_back(cfg.exog_in_demand[j]);
  }
  d.instruments.resize(n, static_cast<Index>(cfg.instruments.size()));
  for (std::size_t j = 0; j < cfg.instruments.size(); ++j) {
    d.instruments.col(static_cast<Index>(j)) =
        pool.col(column.at(cfg.instruments[j]));
    d.instrument_names.push_back(cfg.instruments[j]);
  }
  d.intercept = true;
  return sample;
}

MarketSample gen_market_sample(const ScenarioConfig& cfg, RngStream& rng) {
  return gen_market_sample_with(cfg, [&rng] { return rng.next_normal(); });
}

ReplicationSummary run_replications(const ScenarioConfig& cfg, int reps,
                                    std::uint64_t seed,
                                    const EstimatorSelection& sel,
                                    int threads) {
  if (reps < 1) throw Error("run_replications: reps must be at least 1");
  cfg.validate();

  const Index k =
      1 + static_cast<Index>(cfg.exog_in_demand.size()) + 1;  // p, X, const
  const double nan = std::numeric_limits<double>::quiet_NaN();

  struct Slot {
    Vector ols, tsls, nise;
    double p_f, p_j, p_z, corr;
    bool ols_ok = false, tsls_ok = false, nise_ok = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(reps));

  auto run_rep = [&](int r) {
    Slot& slot = slots[static_cast<std::size_t>(r)];
    slot.p_f = slot.p_j = slot.p_z = slot.corr = nan;

    RngStream rng(seed, static_cast<std::uint64_t>(r));
    const MarketSample sample = gen_market_sample(cfg, rng);
    const Dataset& data = sample.data;

    const Vector price = data.endog.col(1);
    try {
      slot.corr = pearson_corr(
          std::span<const double>(price.data(), static_cast<std::size_t>(price.size())),
          std::span<const double>(sample.u_d.data(),
                                  static_cast<std::size_t>(sample.u_d.size())));
    } catch (const Error&) {
    }

    if (sel.ols) {
      try {
        slot.ols = ols_fit(data, 0).coefficients;
        slot.ols_ok = true;
      } catch (const Error&) {
      }
    }
    if (sel.tsls) {
      try {
        const TslsFit fit = tsls_fit(data, 0);
        slot.tsls = fit.coefficients;
        slot.tsls_ok = true;
        if (fit.first_stage) slot.p_f = fit.first_stage->p_value;
        if (fit.sargan) slot.p_j = fit.sargan->p_value;
      } catch (const Error&) {
      }
    }
    if (sel.nise) {
      try {
        const NiseFit fit = nise_fit(data);
        slot.nise = fit.coefficient_vector();
        slot.nise_ok = true;
        if (fit.z) slot.p_z = fit.z->p_value;
      } catch (const Error&) {
      }
    }
  };

  threads = std::max(1, threads);
  if (threads == 1) {
    for (int r = 0; r < reps; ++r) run_rep(r);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int r = t; r < reps; r += threads) run_rep(r);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<std::string> names{"p"};
  names.insert(names.end(), cfg.exog_in_demand.begin(),
               cfg.exog_in_demand.end());
  names.push_back("intercept");

  auto summarize = [&](auto member_vec, auto member_ok) {
    EstimatorSummary s;
    s.coefficient_names = names;
    s.median.resize(k);
    s.qn.resize(k);
    std::vector<double> col;
    col.reserve(static_cast<std::size_t>(reps));
    int successes = 0;
    for (const Slot& slot : slots) {
      if (slot.*member_ok) ++successes;
    }
    s.failures = reps - successes;
    for (Index j = 0; j < k; ++j) {
      col.clear();
      for (const Slot& slot : slots) {
        if (slot.*member_ok) col.push_back((slot.*member_vec)(j));
      }
      s.median(j) = median_or_nan(col);
      s.qn(j) = col.size() >= 2 ? qn_scale(col) : 0.0;
    }
    return s;
  };

  ReplicationSummary summary;
  summary.replications = reps;
  summary.seed = seed;
  if (sel.ols) summary.ols = summarize(&Slot::ols, &Slot::ols_ok);
  if (sel.tsls) summary.tsls = summarize(&Slot::tsls, &Slot::tsls_ok);
  if (sel.nise) summary.nise = summarize(&Slot::nise, &Slot::nise_ok);

  auto collect_p = [&](double Slot::* member) -> std::optional<double> {
    std::vector<double> v;
    for (const Slot& slot : slots) {
      if (!std::isnan(slot.*member)) v.push_back(slot.*member);
    }
    if (v.empty()) return std::nullopt;
    return median(v);
  };
  if (sel.tsls) {
    summary.median_p_f = collect_p(&Slot::p_f);
    summary.median_p_j = collect_p(&Slot::p_j);
  }
  if (sel.nise) summary.median_p_z = collect_p(&Slot::p_z);

  {
    std::vector<double> v;
    for (const Slot& slot : slots) {
      if (!std::isnan(slot.corr)) v.push_back(slot.corr);
    }
    summary.median_corr_p_ud = v.empty() ? nan : median(v);
  }
  return summary;
}

}  // namespace nise
