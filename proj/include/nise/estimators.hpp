#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nise/dataset.hpp"
#include "nise/diagnostics.hpp"
#include "nise/linalg.hpp"

namespace nise {

struct OlsFit {
  Vector coefficients;  // slopes in design order, intercept last when enabled
  Vector residuals;
  double sigma2 = 0.0;  // RSS / (n - k)
  Matrix covariance;    // sigma2 * (D^T D)^{-1} over the full design
  double r_squared = 0.0;
  bool intercept = true;
  std::vector<std::string> coefficient_names;  // set by the Dataset overload
};

struct TslsFit {
  // Order: RHS endogenous, then exogenous, then intercept.
  Vector coefficients;
  std::vector<std::string> coefficient_names;
  Vector residuals;  // structural: y - D b with the original regressors
  double sigma2 = 0.0;
  Matrix covariance;  // sigma2 * (Dhat^T Dhat)^{-1} over the stage-2 design
  Index lhs = 0;
  std::vector<Index> rhs_endog;  // endogenous column indices on the RHS
  std::optional<TestRecord> first_stage;  // F for the first RHS endogenous
  std::optional<TestRecord> sargan;       // present when overidentified
};

struct NiseFit {
  Vector c;                  // G-vector, c1 > 0, c^T (Yd^T Yd) c = 1
  double lambda_min = 1.0;   // in (0, 1], clamped at 0 with a warning
  Vector endog_coefficients; // -c_g / c_1 for g = 2..G
  Vector b;                  // exogenous slopes, intercept last when enabled
  Vector r_squared;          // min(G,H) squared canonical corrs, descending
  double sigma2 = 0.0;       // from the composite OLS regression
  Matrix covariance;         // over (-c_2/c_1, .., -c_G/c_1, b slopes)
  double intercept_variance = 0.0;
  Vector residuals;          // composite OLS residuals
  std::optional<TestRecord> z;  // attached when G >= 2 and H >= 2
  bool lambda_clamped = false;
  std::vector<std::string> coefficient_names;

  // (-c_2/c_1, .., -c_G/c_1, b slopes, intercept) as one vector.
  Vector coefficient_vector() const;
};

struct CanonicalCorrelations {
  Vector r_squared;       // min(G,H) entries, descending
  Matrix y_coefficients;  // column j pairs with r_squared[j]
};

// OLS of y on X (intercept column appended when enabled).
OlsFit ols_fit(const Vector& y, const Matrix& x, bool intercept = true);

// The naive single-equation regression of endogenous column `lhs` on the
// remaining endogenous columns, the exogenous block, and an intercept.
OlsFit ols_fit(const Dataset& data, Index lhs = 0);

// Two-stage least squares for endogenous column `lhs`; instruments are the
// dataset's W block.
TslsFit tsls_fit(const Dataset& data, Index lhs = 0);

// Squared canonical correlations between Y and X. With demean on (the
// default) both blocks are centered, which is the same as carrying an
// intercept inside the projection.
CanonicalCorrelations canonical_correlations(const Matrix& y, const Matrix& x,
                                             bool demean = true);

// The non-instrumental simultaneous-equation estimator: c is the eigenvector
// at the smallest eigenvalue of (Y^T M Y) v = lambda (Y^T Y) v with the
// intercept partialled into M, the first endogenous variable is normalized
// to coefficient one, and b comes from the OLS regression of the composite
// variable y_1 + sum_g (c_g/c_1) y_g on [X, 1].
NiseFit nise_fit(const Dataset& data);

// Asymptotic covariance of (-c_2/c_1, .., -c_G/c_1, b): n^{-1} sigma^2 A^{-1}
// where A is the sample covariance (divisor n) of (ytilde_2, .., ytilde_G, X)
// and ytilde_g = lambda_min * y_g - e_g with e_g the residual of y_g on
// [X, 1].
Matrix nise_cov(const NiseFit& fit, const Dataset& data);

}  // namespace nise
