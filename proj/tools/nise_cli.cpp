// Command-line front end: `estimate` fits OLS/TSLS/NISE on a CSV file,
// `simulate` runs the market Monte Carlo and prints a replication summary.
//
// Exit codes: 0 success, 1 estimation/model failure, 2 usage or file error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nise/csv.hpp"
#include "nise/estimators.hpp"
#include "nise/report.hpp"
#include "nise/resample.hpp"
#include "nise/simulate.hpp"

namespace {

using nise::Index;
using nise::Matrix;
using nise::Vector;

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

void emit(const nise::RunReport& report, bool as_json,
          const std::string& out_path) {
  const std::string text =
      as_json ? nise::render_json_lines(report) : nise::render_text(report);
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
      throw nise::CsvError("cannot open '" + out_path + "' for writing");
    }
    file << text;
  }
}

struct EstimateOptions {
  std::string data_path;
  std::string endog_csv, exog_csv, instruments_csv, log_csv;
  std::string method;
  int bootstrap = 0;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool json = false;
};

struct SimulateOptions {
  std::string scenario;
  std::string config_path;
  Index n = 0;
  int reps = 0;
  std::optional<std::uint64_t> seed;
  std::string emit_data;
  std::string out_path;
  bool json = false;
};

std::string estimate_invocation(const EstimateOptions& o) {
  std::ostringstream s;
  s << "--data " << o.data_path << " --endog " << o.endog_csv << " --exog "
    << o.exog_csv;
  if (!o.instruments_csv.empty()) s << " --instruments " << o.instruments_csv;
  s << " --method " << o.method;
  if (!o.log_csv.empty()) s << " --log " << o.log_csv;
  if (o.bootstrap > 0) s << " --bootstrap " << o.bootstrap;
  if (o.seed) s << " --seed " << *o.seed;
  return s.str();
}

std::string simulate_invocation(const SimulateOptions& o) {
  std::ostringstream s;
  if (!o.config_path.empty()) {
    s << "--config " << o.config_path;
  } else {
    s << "--scenario " << o.scenario;
  }
  s << " --n " << o.n << " --reps " << o.reps;
  if (o.seed) s << " --seed " << *o.seed;
  return s.str();
}

void append_fit_rows(nise::RunReport& report, const std::string& estimator,
                     const std::vector<std::string>& names,
                     const Vector& values, const Vector& ses,
                     const nise::BootstrapResult* boot) {
  for (Index j = 0; j < values.size(); ++j) {
    nise::ReportCoefficient row;
    row.estimator = estimator;
    row.name = names[static_cast<std::size_t>(j)];
    row.value = values(j);
    if (ses.size() == values.size()) row.se = ses(j);
    if (boot) {
      row.se_qn = boot->se_qn(j);
      row.se_sd = boot->se_sd(j);
    }
    report.coefficients.push_back(std::move(row));
  }
}

int cmd_estimate(const EstimateOptions& opt) {
  const auto endog_names = split_names(opt.endog_csv);
  const auto exog_names = split_names(opt.exog_csv);
  const auto instrument_names = split_names(opt.instruments_csv);

  // Usage-level checks that CLI11 cannot express.
  const bool wants_tsls = opt.method == "tsls" || opt.method == "all";
  if (endog_names.empty()) {
    std::cerr << "error: --endog needs at least one column\n";
    return 2;
  }
  if (exog_names.empty()) {
    std::cerr << "error: --exog needs at least one column\n";
    return 2;
  }
  if (wants_tsls && instrument_names.empty()) {
    std::cerr << "error: --method " << opt.method
              << " requires --instruments\n";
    return 2;
  }
  if (opt.bootstrap > 0 && !opt.seed) {
    std::cerr << "error: --bootstrap requires --seed\n";
    return 2;
  }
  for (const auto& name : endog_names) {
    if (std::find(exog_names.begin(), exog_names.end(), name) !=
            exog_names.end() ||
        std::find(instrument_names.begin(), instrument_names.end(), name) !=
            instrument_names.end()) {
      std::cerr << "error: column '" << name
                << "' listed under --endog and under another flag\n";
      return 2;
    }
  }

  nise::Dataset data;
  try {
    const nise::CsvTable table = nise::read_csv(opt.data_path);
    data.endog = table.columns(endog_names);
    data.endog_names = endog_names;
    data.exog = table.columns(exog_names);
    data.exog_names = exog_names;
    if (!instrument_names.empty()) {
      data.instruments = table.columns(instrument_names);
      data.instrument_names = instrument_names;
    }
  } catch (const nise::CsvError& e) {
    std::cerr << "error: --data: " << e.what() << "\n";
    return 2;
  }

  nise::RunReport report;
  report.command = "estimate";
  report.invocation = estimate_invocation(opt);

  try {
    // --log transforms named columns in place; nonpositive values are a
    // model-level failure, not a usage error.
    for (const auto& name : split_names(opt.log_csv)) {
      auto apply = [&](Matrix& block, const std::vector<std::string>& names) {
        for (std::size_t j = 0; j < names.size(); ++j) {
          if (names[j] != name) continue;
          auto col = block.col(static_cast<Index>(j));
          if ((col.array() <= 0.0).any()) {
            throw nise::Error("--log " + name +
                              ": column has nonpositive values");
          }
          col = col.array().log();
          return true;
        }
        return false;
      };
      if (!apply(data.endog, data.endog_names) &&
          !apply(data.exog, data.exog_names) &&
          !apply(data.instruments, data.instrument_names)) {
        throw nise::CsvError("--log: column '" + name + "' not selected");
      }
    }

    data.validate();
    report.scalars.push_back({"", "n", static_cast<double>(data.n())});

    const bool run_ols = opt.method == "ols" || opt.method == "all";
    const bool run_nise = opt.method == "nise" || opt.method == "all";

    auto bootstrap_for = [&](const nise::FitProcedure& fit)
        -> std::optional<nise::BootstrapResult> {
      if (opt.bootstrap <= 0) return std::nullopt;
      return nise::pairs_bootstrap(data, fit, opt.bootstrap, *opt.seed,
                                   default_threads());
    };

    if (run_ols) {
      const nise::OlsFit fit = nise::ols_fit(data, 0);
      const auto boot = bootstrap_for([](const nise::Dataset& d) {
        return nise::ols_fit(d, 0).coefficients;
      });
      append_fit_rows(report, "ols", fit.coefficient_names, fit.coefficients,
                      fit.covariance.diagonal().cwiseSqrt(),
                      boot ? &*boot : nullptr);
      report.scalars.push_back({"ols", "sigma2", fit.sigma2});
      report.scalars.push_back({"ols", "r_squared", fit.r_squared});
    }
    if (wants_tsls) {
      const nise::TslsFit fit = nise::tsls_fit(data, 0);
      const auto boot = bootstrap_for([](const nise::Dataset& d) {
        return nise::tsls_fit(d, 0).coefficients;
      });
      append_fit_rows(report, "tsls", fit.coefficient_names, fit.coefficients,
                      fit.covariance.diagonal().cwiseSqrt(),
                      boot ? &*boot : nullptr);
      report.scalars.push_back({"tsls", "sigma2", fit.sigma2});
      if (fit.first_stage) report.tests.push_back({"tsls", *fit.first_stage});
      if (fit.sargan) {
        report.tests.push_back({"tsls", *fit.sargan});
      } else {
        report.warnings.push_back(
            "J test unavailable: the equation is just identified");
      }
    }
    if (run_nise) {
      const nise::NiseFit fit = nise::nise_fit(data);
      const auto boot = bootstrap_for([](const nise::Dataset& d) {
        return nise::nise_fit(d).coefficient_vector();
      });
      Vector ses(fit.coefficient_vector().size());
      ses.head(fit.covariance.rows()) = fit.covariance.diagonal().cwiseSqrt();
      if (data.intercept) {
        ses(ses.size() - 1) = std::sqrt(fit.intercept_variance);
      }
      append_fit_rows(report, "nise", fit.coefficient_names,
                      fit.coefficient_vector(), ses, boot ? &*boot : nullptr);
      report.scalars.push_back({"nise", "sigma2", fit.sigma2});
      report.scalars.push_back({"nise", "lambda_min", fit.lambda_min});
      if (fit.z) {
        report.tests.push_back({"nise", *fit.z});
      } else {
        report.warnings.push_back(
            "Z test unavailable: it needs at least two endogenous and two "
            "exogenous variables");
      }
      if (fit.lambda_clamped) {
        report.warnings.push_back("lambda_min clamped to 0 from round-off");
      }
    }
  } catch (const nise::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nise::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  emit(report, opt.json, opt.out_path);
  return 0;
}

int cmd_simulate(const SimulateOptions& opt) {
  if (opt.scenario.empty() == opt.config_path.empty()) {
    std::cerr << "error: exactly one of --scenario or --config is required\n";
    return 2;
  }
  if (!opt.seed) {
    std::cerr << "error: --seed is required (no wall-clock seeding)\n";
    return 2;
  }

  nise::ScenarioConfig cfg;
  try {
    if (!opt.config_path.empty()) {
      std::ifstream file(opt.config_path);
      if (!file) {
        throw nise::CsvError("cannot open '" + opt.config_path + "'");
      }
      std::ostringstream buffer;
      buffer << file.rdbuf();
      cfg = nise::scenario_from_config(buffer.str(), opt.n);
      cfg.n = opt.n;
    } else {
      cfg = nise::builtin_scenario(opt.scenario, opt.n);
    }
  } catch (const nise::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  nise::RunReport report;
  report.command = "simulate";
  report.invocation = simulate_invocation(opt);

  try {
    if (!opt.emit_data.empty()) {
      nise::RngStream rng(*opt.seed, 0);
      const nise::MarketSample sample = nise::gen_market_sample(cfg, rng);
      std::vector<std::string> header = sample.data.endog_names;
      header.insert(header.end(), sample.data.exog_names.begin(),
                    sample.data.exog_names.end());
      header.insert(header.end(), sample.data.instrument_names.begin(),
                    sample.data.instrument_names.end());
      Matrix values(sample.data.n(), static_cast<Index>(header.size()));
      values.leftCols(sample.data.g()) = sample.data.endog;
      values.middleCols(sample.data.g(), sample.data.h()) = sample.data.exog;
      values.rightCols(sample.data.l()) = sample.data.instruments;
      nise::write_csv(opt.emit_data, header, values);
    }

    const nise::ReplicationSummary summary = nise::run_replications(
        cfg, opt.reps, *opt.seed, {}, default_threads());

    auto add_estimator = [&](const char* label,
                             const std::optional<nise::EstimatorSummary>& s) {
      if (!s) return;
      for (Index j = 0; j < s->median.size(); ++j) {
        nise::ReportCoefficient row;
        row.estimator = label;
        row.name = s->coefficient_names[static_cast<std::size_t>(j)];
        row.value = s->median(j);
        row.se_qn = s->qn(j);
        report.coefficients.push_back(std::move(row));
      }
      if (s->failures > 0) {
        report.scalars.push_back(
            {label, "failures", static_cast<double>(s->failures)});
      }
    };
    add_estimator("ols", summary.ols);
    add_estimator("tsls", summary.tsls);
    add_estimator("nise", summary.nise);

    auto add_median_p = [&](const char* estimator, const char* name,
                            const std::optional<double>& p) {
      if (!p) return;
      nise::ReportTest t;
      t.estimator = estimator;
      t.record.name = name;
      t.record.p_value = *p;
      t.median_p = true;
      report.tests.push_back(std::move(t));
    };
    add_median_p("tsls", "F", summary.median_p_f);
    add_median_p("tsls", "J", summary.median_p_j);
    add_median_p("nise", "Z", summary.median_p_z);

    report.scalars.push_back({"", "corr(p,u_d)", summary.median_corr_p_ud});
    report.scalars.push_back(
        {"", "replications", static_cast<double>(summary.replications)});
  } catch (const nise::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nise::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  emit(report, opt.json, opt.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous-equation estimation without instruments"};
  app.require_subcommand(1);

  EstimateOptions eopt;
  CLI::App* est = app.add_subcommand(
      "estimate", "Fit OLS/TSLS/NISE to a CSV data set");
  est->add_option("--data", eopt.data_path, "CSV file with a header row")
      ->required();
  est->add_option("--endog", eopt.endog_csv,
                  "comma-separated endogenous columns; the first is the "
                  "normalized left-hand variable")
      ->required();
  est->add_option("--exog", eopt.exog_csv,
                  "comma-separated included exogenous columns")
      ->required();
  est->add_option("--instruments", eopt.instruments_csv,
                  "comma-separated excluded exogenous columns (TSLS)");
  est->add_option("--method", eopt.method, "ols, tsls, nise, or all")
      ->required()
      ->check(CLI::IsMember({"ols", "tsls", "nise", "all"}));
  est->add_option("--bootstrap", eopt.bootstrap,
                  "pairs-bootstrap resample count");
  std::uint64_t eseed = 0;
  CLI::Option* eseed_opt = est->add_option("--seed", eseed, "RNG seed");
  est->add_option("--log", eopt.log_csv,
                  "apply the natural log to the named columns");
  est->add_option("--out", eopt.out_path, "also write the report here");
  est->add_flag("--json", eopt.json, "line-delimited JSON instead of a table");

  SimulateOptions sopt;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run the market Monte Carlo and summarize replications");
  sim->add_option("--scenario", sopt.scenario, "base, weak, or misspecified");
  sim->add_option("--config", sopt.config_path,
                  "key=value scenario override file");
  sim->add_option("--n", sopt.n, "observations per replication")->required();
  sim->add_option("--reps", sopt.reps, "replication count")->required();
  std::uint64_t sseed = 0;
  CLI::Option* sseed_opt = sim->add_option("--seed", sseed, "RNG seed");
  sim->add_option("--emit-data", sopt.emit_data,
                  "write one generated sample to this CSV path");
  sim->add_option("--out", sopt.out_path, "also write the report here");
  sim->add_flag("--json", sopt.json, "line-delimited JSON instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (eseed_opt->count() > 0) eopt.seed = eseed;
  if (sseed_opt->count() > 0) sopt.seed = sseed;

  if (est->parsed()) return cmd_estimate(eopt);
  return cmd_simulate(sopt);
}
