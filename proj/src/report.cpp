#include "nise/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace nise {

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::vector<std::string> ordered_estimators(const RunReport& r) {
  std::vector<std::string> order;
  auto add = [&](const std::string& e) {
    if (e.empty()) return;
    if (std::find(order.begin(), order.end(), e) == order.end()) {
      order.push_back(e);
    }
  };
  for (const auto& c : r.coefficients) add(c.estimator);
  for (const auto& t : r.tests) add(t.estimator);
  for (const auto& s : r.scalars) add(s.estimator);
  return order;
}

std::vector<std::string> ordered_names(const RunReport& r) {
  std::vector<std::string> order;
  for (const auto& c : r.coefficients) {
    if (std::find(order.begin(), order.end(), c.name) == order.end()) {
      order.push_back(c.name);
    }
  }
  return order;
}

}  // namespace

std::string render_text(const RunReport& report) {
  std::ostringstream out;
  out << "# " << report.command << "  " << report.invocation << "\n";

  const auto estimators = ordered_estimators(report);
  const auto names = ordered_names(report);
  constexpr int kLabel = 14;
  constexpr int kCell = 12;

  auto cell = [&](const std::string& s) {
    std::string padded = s;
    if (static_cast<int>(padded.size()) < kCell) {
      padded.insert(0, kCell - padded.size(), ' ');
    }
    return padded;
  };
  auto label = [&](const std::string& s) {
    std::string padded = s;
    if (static_cast<int>(padded.size()) < kLabel) {
      padded.append(kLabel - padded.size(), ' ');
    }
    return padded;
  };

  const auto* first_coef =
      report.coefficients.empty() ? nullptr : &report.coefficients.front();
  const bool shows_spread =
      first_coef && (first_coef->se_qn || first_coef->se);

  if (!report.coefficients.empty()) {
    out << label("");
    for (const auto& e : estimators) out << cell(e);
    out << "\n";

    auto find_coef = [&](const std::string& est, const std::string& name)
        -> const ReportCoefficient* {
      for (const auto& c : report.coefficients) {
        if (c.estimator == est && c.name == name) return &c;
      }
      return nullptr;
    };

    for (const auto& name : names) {
      out << label(name);
      for (const auto& e : estimators) {
        const auto* c = find_coef(e, name);
        out << cell(c ? fixed3(c->value) : "");
      }
      out << "\n";
      if (shows_spread) {
        out << label("");
        for (const auto& e : estimators) {
          const auto* c = find_coef(e, name);
          const std::optional<double> spread =
              c ? (c->se_qn ? c->se_qn : c->se) : std::nullopt;
          out << cell(spread ? fixed3(*spread) : "");
        }
        out << "\n";
      }
    }
  }

  for (const auto& t : report.tests) {
    out << label(t.record.name + (t.median_p ? " signif" : " test"));
    for (const auto& e : estimators) {
      if (e == t.estimator) {
        out << cell(fixed3(t.record.p_value));
      } else {
        out << cell("");
      }
    }
    if (!t.median_p) {
      out << "   statistic=" << fixed3(t.record.statistic) << " df="
          << t.record.df1;
      if (t.record.df2 > 0) out << "," << t.record.df2;
    }
    out << "\n";
  }

  std::vector<std::string> scalar_names;
  for (const auto& s : report.scalars) {
    if (std::find(scalar_names.begin(), scalar_names.end(), s.name) ==
        scalar_names.end()) {
      scalar_names.push_back(s.name);
    }
  }
  for (const auto& name : scalar_names) {
    out << label(name);
    const auto* run_level = [&]() -> const ReportScalar* {
      for (const auto& s : report.scalars) {
        if (s.name == name && s.estimator.empty()) return &s;
      }
      return nullptr;
    }();
    if (run_level) {
      out << cell(fixed3(run_level->value));
    } else {
      for (const auto& e : estimators) {
        bool printed = false;
        for (const auto& s : report.scalars) {
          if (s.name == name && s.estimator == e) {
            out << cell(fixed3(s.value));
            printed = true;
            break;
          }
        }
        if (!printed) out << cell("");
      }
    }
    out << "\n";
  }

  for (const auto& w : report.warnings) {
    out << "warning: " << w << "\n";
  }
  return out.str();
}

std::string render_json_lines(const RunReport& report) {
  std::ostringstream out;
  using nlohmann::json;

  json run{{"record", "run"},
           {"command", report.command},
           {"invocation", report.invocation}};
  out << run.dump() << "\n";

  for (const auto& c : report.coefficients) {
    json j{{"record", "coefficient"},
           {"estimator", c.estimator},
           {"name", c.name},
           {"value", c.value}};
    if (c.se) j["se"] = *c.se;
    if (c.se_qn) j["se_qn"] = *c.se_qn;
    if (c.se_sd) j["se_sd"] = *c.se_sd;
    out << j.dump() << "\n";
  }
  for (const auto& t : report.tests) {
    json j{{"record", "test"},
           {"estimator", t.estimator},
           {"name", t.record.name},
           {"statistic", t.record.statistic},
           {"df1", t.record.df1},
           {"p_value", t.record.p_value},
           {"median_p", t.median_p}};
    if (t.record.df2 > 0) j["df2"] = t.record.df2;
    out << j.dump() << "\n";
  }
  for (const auto& s : report.scalars) {
    json j{{"record", "scalar"}, {"name", s.name}, {"value", s.value}};
    if (!s.estimator.empty()) j["estimator"] = s.estimator;
    out << j.dump() << "\n";
  }
  for (const auto& w : report.warnings) {
    out << json{{"record", "warning"}, {"text", w}}.dump() << "\n";
  }
  return out.str();
}

}  // namespace nise
