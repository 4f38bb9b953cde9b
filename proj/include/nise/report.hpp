#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nise/diagnostics.hpp"

namespace nise {

// Everything the CLI prints, held as data so the fixed-width table and the
// line-delimited JSON payload are two renderings of the same numbers.
struct ReportCoefficient {
  std::string estimator;
  std::string name;
  double value = 0.0;               // estimate, or median across replications
  std::optional<double> se;         // analytic standard error
  std::optional<double> se_qn;      // bootstrap Qn scale, or cross-replication Qn
  std::optional<double> se_sd;      // bootstrap standard deviation
};

struct ReportTest {
  std::string estimator;
  TestRecord record;
  bool median_p = false;  // true when p_value is a median across replications
};

struct ReportScalar {
  std::string estimator;  // empty for run-level scalars
  std::string name;
  double value = 0.0;
};

struct RunReport {
  std::string command;     // estimate | simulate
  std::string invocation;  // echo of the parsed flags
  std::vector<ReportCoefficient> coefficients;
  std::vector<ReportTest> tests;
  std::vector<ReportScalar> scalars;
  std::vector<std::string> warnings;
};

// Fixed-width table, three decimals, one estimator per column.
std::string render_text(const RunReport& report);

// Line-delimited JSON, full precision, one record per line.
std::string render_json_lines(const RunReport& report);

}  // namespace nise
