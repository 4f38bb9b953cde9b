#pragma once

#include <string>

#include "nise/dataset.hpp"

namespace nise {

struct TslsFit;

struct TestRecord {
  std::string name;
  double statistic = 0.0;
  int df1 = 0;
  int df2 = 0;  // 0 when the reference distribution has a single df
  double p_value = 1.0;
};

// Bartlett's large-sample chi-square approximation to Wilks' lambda:
//   Z = -(n - 1 - (G+H+1)/2) * sum_{i=2..min(G,H)} ln(1 - r_i^2),
// df = (G-1)(H-1). Rejection is evidence against "exactly one linear
// relation", i.e. specification error or identification failure.
// r_squared must hold the min(G,H) squared canonical correlations in
// descending order; requires G >= 2 and H >= 2.
TestRecord bartlett_z(const Vector& r_squared, Index n, Index g, Index h);

// Joint F test for the exclusion of the instrument block from the
// first-stage regression of one endogenous regressor on [X, W, 1].
// df = (L, n - H - L - 1).
TestRecord first_stage_f(const Dataset& data, Index endog_rhs);

// Sargan overidentification test: n * R^2 from regressing the TSLS
// structural residuals on [X, W, 1]; df = L - (number of RHS endogenous).
TestRecord sargan_j(const TslsFit& tsls, const Dataset& data);

}  // namespace nise
