#include "nise/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace nise {

namespace {

Matrix append_intercept(const Matrix& x, Index n) {
  Matrix d(n, x.cols() + 1);
  if (x.cols() > 0) d.leftCols(x.cols()) = x;
  d.col(x.cols()).setOnes();
  return d;
}

Matrix demean_columns(const Matrix& m) {
  return m.rowwise() - m.colwise().mean();
}

Matrix symmetrize(Matrix m) { return 0.5 * (m + m.transpose().eval()); }

// Inverse of a symmetric positive-definite matrix through the module's own
// Cholesky, so the pivot rule decides singularity.
Matrix spd_inverse(const Matrix& a) {
  const Matrix l = cholesky(a);
  Matrix inv = Matrix::Identity(a.rows(), a.cols());
  l.triangularView<Eigen::Lower>().solveInPlace(inv);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(inv);
  return symmetrize(std::move(inv));
}

// Clamp an eigenvalue of the canonical problem into [0, 1]. Values slightly
// outside are round-off; anything worse is an eigensolver failure.
double clamp_lambda(double lambda, bool* clamped) {
  constexpr double kSlack = 1e-12;
  if (lambda < 0.0) {
    if (lambda <= -kSlack) {
      throw NoConvergence("canonical eigenvalue " + std::to_string(lambda) +
                          " is negative beyond tolerance");
    }
    if (clamped) *clamped = true;
    return 0.0;
  }
  if (lambda > 1.0) {
    if (lambda >= 1.0 + kSlack) {
      throw NoConvergence("canonical eigenvalue " + std::to_string(lambda) +
                          " exceeds one beyond tolerance");
    }
    return 1.0;
  }
  return lambda;
}

}  // namespace

OlsFit ols_fit(const Vector& y, const Matrix& x, bool intercept) {
  const Index n = y.rows();
  if (x.cols() > 0 && x.rows() != n) {
    throw Error("ols_fit: row count mismatch");
  }
  const Matrix design = intercept ? append_intercept(x, n) : x;
  const Index k = design.cols();
  if (k == 0) throw Error("ols_fit: empty design");
  if (n <= k) throw Error("ols_fit: need n > k observations");

  OlsFit fit;
  fit.intercept = intercept;
  fit.coefficients = least_squares(design, y);
  fit.residuals = y - design * fit.coefficients;

  const double rss = fit.residuals.squaredNorm();
  fit.sigma2 = rss / static_cast<double>(n - k);
  fit.covariance = fit.sigma2 * spd_inverse(symmetrize(design.transpose() * design));

  const double tss = intercept ? (y.array() - y.mean()).matrix().squaredNorm()
                               : y.squaredNorm();
  fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
  return fit;
}

OlsFit ols_fit(const Dataset& data, Index lhs) {
  data.validate();
  if (lhs < 0 || lhs >= data.g()) throw Error("ols_fit: bad lhs index");
  Matrix x(data.n(), data.g() - 1 + data.h());
  Index col = 0;
  for (Index j = 0; j < data.g(); ++j) {
    if (j != lhs) x.col(col++) = data.endog.col(j);
  }
  if (data.h() > 0) x.rightCols(data.h()) = data.exog;
  OlsFit fit = ols_fit(data.endog.col(lhs), x, data.intercept);
  for (Index j = 0; j < data.g(); ++j) {
    if (j == lhs) continue;
    fit.coefficient_names.push_back(
        data.endog_names.empty() ? "y" + std::to_string(j + 1)
                                 : data.endog_names[static_cast<size_t>(j)]);
  }
  for (Index j = 0; j < data.h(); ++j) {
    fit.coefficient_names.push_back(
        data.exog_names.empty() ? "x" + std::to_string(j + 1)
                                : data.exog_names[static_cast<size_t>(j)]);
  }
  if (data.intercept) fit.coefficient_names.push_back("intercept");
  return fit;
}

TslsFit tsls_fit(const Dataset& data, Index lhs) {
  data.validate();
  if (lhs < 0 || lhs >= data.g()) throw Error("tsls_fit: bad lhs index");

  TslsFit fit;
  fit.lhs = lhs;
  for (Index j = 0; j < data.g(); ++j) {
    if (j != lhs) fit.rhs_endog.push_back(j);
  }
  const Index m = static_cast<Index>(fit.rhs_endog.size());
  if (data.l() < m) {
    throw OrderConditionFailed(
        "tsls_fit: " + std::to_string(m) + " endogenous regressors but only " +
        std::to_string(data.l()) + " instruments");
  }

  const Index n = data.n();
  Matrix z(n, data.h() + data.l());
  if (data.h() > 0) z.leftCols(data.h()) = data.exog;
  if (data.l() > 0) z.rightCols(data.l()) = data.instruments;
  const Matrix z_design = data.intercept ? append_intercept(z, n) : z;

  Matrix rhs(n, m);
  for (Index i = 0; i < m; ++i) rhs.col(i) = data.endog.col(fit.rhs_endog[i]);

  // Stage 1: fitted values of each RHS endogenous variable on [X, W, 1].
  const Matrix stage1_resid = residual_maker(z_design, rhs);
  const Matrix fitted = rhs - stage1_resid;

  // Stage 2 on fitted values; structural residuals use the originals.
  auto assemble = [&](const Matrix& endog_block) {
    Matrix d(n, m + data.h());
    if (m > 0) d.leftCols(m) = endog_block;
    if (data.h() > 0) d.rightCols(data.h()) = data.exog;
    return data.intercept ? append_intercept(d, n) : d;
  };
  const Matrix design_hat = assemble(fitted);
  const Matrix design_orig = assemble(rhs);
  const Vector y = data.endog.col(lhs);

  fit.coefficients = least_squares(design_hat, y);
  fit.residuals = y - design_orig * fit.coefficients;

  const Index k = design_hat.cols();
  if (n <= k) throw Error("tsls_fit: need n > k observations");
  fit.sigma2 = fit.residuals.squaredNorm() / static_cast<double>(n - k);
  fit.covariance =
      fit.sigma2 * spd_inverse(symmetrize(design_hat.transpose() * design_hat));

  for (Index j : fit.rhs_endog) {
    fit.coefficient_names.push_back(
        data.endog_names.empty() ? "y" + std::to_string(j + 1)
                                 : data.endog_names[static_cast<size_t>(j)]);
  }
  for (Index j = 0; j < data.h(); ++j) {
    fit.coefficient_names.push_back(
        data.exog_names.empty() ? "x" + std::to_string(j + 1)
                                : data.exog_names[static_cast<size_t>(j)]);
  }
  if (data.intercept) fit.coefficient_names.push_back("intercept");

  if (m >= 1 && data.l() >= 1) {
    fit.first_stage = first_stage_f(data, fit.rhs_endog.front());
  }
  if (data.l() > m) {
    fit.sargan = sargan_j(fit, data);
  }
  return fit;
}

CanonicalCorrelations canonical_correlations(const Matrix& y, const Matrix& x,
                                             bool demean) {
  if (y.cols() < 1 || x.cols() < 1) {
    throw Error("canonical_correlations: empty block");
  }
  if (y.rows() != x.rows()) {
    throw Error("canonical_correlations: row count mismatch");
  }
  const Matrix yd = demean ? demean_columns(y) : y;
  const Matrix xd = demean ? demean_columns(x) : x;

  const Matrix resid = residual_maker(xd, yd);  // throws RankDeficient on X
  const Matrix a = symmetrize(resid.transpose() * resid);
  const Matrix b = symmetrize(yd.transpose() * yd);

  EigenSolution sol;
  try {
    sol = gen_sym_eig(a, b);
  } catch (const NotPositiveDefinite&) {
    throw RankDeficient("canonical_correlations: endogenous block is rank deficient");
  }

  const Index count = std::min(y.cols(), x.cols());
  CanonicalCorrelations cc;
  cc.r_squared.resize(count);
  cc.y_coefficients.resize(y.cols(), count);
  for (Index i = 0; i < count; ++i) {
    cc.r_squared(i) = 1.0 - clamp_lambda(sol.eigenvalues(i), nullptr);
    cc.y_coefficients.col(i) = sol.eigenvectors.col(i);
  }
  return cc;
}

Vector NiseFit::coefficient_vector() const {
  Vector v(endog_coefficients.size() + b.size());
  if (endog_coefficients.size() > 0) {
    v.head(endog_coefficients.size()) = endog_coefficients;
  }
  v.tail(b.size()) = b;
  return v;
}

NiseFit nise_fit(const Dataset& data) {
  data.validate();
  const Index n = data.n();
  const Index g = data.g();

  if (data.effective_exog_count() == 0) {
    throw EmptyExogenous(
        "nise_fit: X contains no non-constant exogenous variable; with an "
        "empty X the smallest eigenvalue is identically 1 and the fit is "
        "vacuous");
  }
  const Index h = data.h();

  const Matrix yd = data.intercept ? demean_columns(data.endog) : data.endog;
  const Matrix xd = data.intercept ? demean_columns(data.exog) : data.exog;

  const Matrix resid = residual_maker(xd, yd);
  const Matrix a = symmetrize(resid.transpose() * resid);
  const Matrix b_gram = symmetrize(yd.transpose() * yd);

  EigenSolution sol;
  try {
    sol = gen_sym_eig(a, b_gram);
  } catch (const NotPositiveDefinite&) {
    throw RankDeficient("nise_fit: endogenous block is rank deficient");
  }

  NiseFit fit;
  fit.lambda_min = clamp_lambda(sol.eigenvalues(0), &fit.lambda_clamped);

  Vector c = sol.eigenvectors.col(0);
  if (std::abs(c(0)) < 1e-8) {
    throw NormalizationFailure(
        "nise_fit: the normalizing endogenous variable is absent from the "
        "detected relation (|c_1| < 1e-8)");
  }
  if (c(0) < 0.0) c = -c;
  fit.c = c;

  fit.endog_coefficients.resize(g - 1);
  for (Index j = 1; j < g; ++j) {
    fit.endog_coefficients(j - 1) = -c(j) / c(0);
  }

  // Composite left-hand variable y_1 + sum_g (c_g/c_1) y_g, regressed on X.
  const Vector composite = (data.endog * c) / c(0);
  const OlsFit comp = ols_fit(composite, data.exog, data.intercept);
  fit.b = comp.coefficients;
  fit.sigma2 = comp.sigma2;
  fit.residuals = comp.residuals;
  if (data.intercept) {
    fit.intercept_variance = comp.covariance(h, h);
  }

  const Index count = std::min(g, h);
  fit.r_squared.resize(count);
  for (Index i = 0; i < count; ++i) {
    fit.r_squared(i) = 1.0 - clamp_lambda(sol.eigenvalues(i), nullptr);
  }

  for (Index j = 1; j < g; ++j) {
    fit.coefficient_names.push_back(
        data.endog_names.empty() ? "y" + std::to_string(j + 1)
                                 : data.endog_names[static_cast<size_t>(j)]);
  }
  for (Index j = 0; j < h; ++j) {
    fit.coefficient_names.push_back(
        data.exog_names.empty() ? "x" + std::to_string(j + 1)
                                : data.exog_names[static_cast<size_t>(j)]);
  }
  if (data.intercept) fit.coefficient_names.push_back("intercept");

  if (g >= 2 && h >= 2) {
    bool in_range = true;
    for (Index i = 0; i < fit.r_squared.size(); ++i) {
      if (!(fit.r_squared(i) >= 0.0 && fit.r_squared(i) < 1.0)) in_range = false;
    }
    if (in_range) {
      fit.z = bartlett_z(fit.r_squared, n, g, h);
    }
  }

  fit.covariance = nise_cov(fit, data);
  return fit;
}

Matrix nise_cov(const NiseFit& fit, const Dataset& data) {
  const Index n = data.n();
  const Index g = data.g();
  const Index h = data.h();

  Matrix v(n, g - 1 + h);
  if (g > 1) {
    const Matrix x_design = data.intercept
                                ? append_intercept(data.exog, n)
                                : data.exog;
    for (Index j = 1; j < g; ++j) {
      const Vector y_g = data.endog.col(j);
      const Vector e_g = residual_maker(x_design, y_g).col(0);
      v.col(j - 1) = fit.lambda_min * y_g - e_g;
    }
  }
  if (h > 0) v.rightCols(h) = data.exog;

  const Matrix vc = data.intercept ? demean_columns(v) : v;
  const Matrix a =
      symmetrize(vc.transpose() * vc) / static_cast<double>(n);

  Matrix a_inv;
  try {
    a_inv = spd_inverse(a);
  } catch (const NotPositiveDefinite&) {
    throw SingularA("nise_cov: covariance matrix of (ytilde, X) is singular");
  }
  return (fit.sigma2 / static_cast<double>(n)) * a_inv;
}

}  // namespace nise
