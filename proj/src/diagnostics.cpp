#include "nise/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nise/estimators.hpp"
#include "nise/stats.hpp"

namespace nise {

TestRecord bartlett_z(const Vector& r_squared, Index n, Index g, Index h) {
  if (g < 2 || h < 2) {
    throw PreconditionFailed(
        "bartlett_z: the Z test requires at least two endogenous and two "
        "exogenous variables");
  }
  if (r_squared.size() != std::min(g, h)) {
    throw PreconditionFailed(
        "bartlett_z: expected min(G,H) squared canonical correlations");
  }
  double sum = 0.0;
  for (Index i = 0; i < r_squared.size(); ++i) {
    const double r2 = r_squared(i);
    if (!(r2 >= 0.0 && r2 < 1.0)) {
      throw InvalidCorrelation("bartlett_z: squared correlation " +
                               std::to_string(r2) + " outside [0,1)");
    }
    if (i >= 1) sum += std::log1p(-r2);
  }
  const double multiplier =
      static_cast<double>(n) - 1.0 - (static_cast<double>(g + h) + 1.0) / 2.0;

  TestRecord rec;
  rec.name = "Z";
  rec.statistic = std::max(0.0, -multiplier * sum);
  rec.df1 = static_cast<int>((g - 1) * (h - 1));
  rec.p_value = chi_square_sf(rec.statistic, rec.df1);
  return rec;
}

TestRecord first_stage_f(const Dataset& data, Index endog_rhs) {
  data.validate();
  if (data.l() < 1) {
    throw NoInstruments("first_stage_f: no instrument block");
  }
  if (endog_rhs < 0 || endog_rhs >= data.g()) {
    throw Error("first_stage_f: bad endogenous column index");
  }

  const Index n = data.n();
  const Vector y2 = data.endog.col(endog_rhs);

  Matrix unrestricted(n, data.h() + data.l());
  if (data.h() > 0) unrestricted.leftCols(data.h()) = data.exog;
  unrestricted.rightCols(data.l()) = data.instruments;

  const double rss_u =
      ols_fit(y2, unrestricted, data.intercept).residuals.squaredNorm();

  double rss_r;
  if (data.h() > 0) {
    rss_r = ols_fit(y2, data.exog, data.intercept).residuals.squaredNorm();
  } else if (data.intercept) {
    rss_r = (y2.array() - y2.mean()).matrix().squaredNorm();
  } else {
    rss_r = y2.squaredNorm();
  }

  const int df1 = static_cast<int>(data.l());
  const int df2 =
      static_cast<int>(n - data.h() - data.l() - (data.intercept ? 1 : 0));
  if (df2 < 1) throw Error("first_stage_f: nonpositive denominator df");

  TestRecord rec;
  rec.name = "F";
  rec.df1 = df1;
  rec.df2 = df2;
  const double numer = std::max(0.0, rss_r - rss_u) / df1;
  const double denom = rss_u / df2;
  if (denom <= 0.0) {
    rec.statistic =
        numer <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    rec.p_value = numer <= 0.0 ? 1.0 : 0.0;
  } else {
    rec.statistic = numer / denom;
    rec.p_value = f_sf(rec.statistic, df1, df2);
  }
  return rec;
}

TestRecord sargan_j(const TslsFit& tsls, const Dataset& data) {
  const Index m = static_cast<Index>(tsls.rhs_endog.size());
  if (data.l() <= m) {
    throw JustIdentified(
        "sargan_j: the equation is just identified; the J test needs more "
        "instruments than RHS endogenous variables");
  }
  const Index n = data.n();
  Matrix z(n, data.h() + data.l());
  if (data.h() > 0) z.leftCols(data.h()) = data.exog;
  z.rightCols(data.l()) = data.instruments;

  const OlsFit aux = ols_fit(tsls.residuals, z, data.intercept);

  TestRecord rec;
  rec.name = "J";
  rec.statistic = std::max(0.0, static_cast<double>(n) * aux.r_squared);
  rec.df1 = static_cast<int>(data.l() - m);
  rec.p_value = chi_square_sf(rec.statistic, rec.df1);
  return rec;
}

}  // namespace nise
