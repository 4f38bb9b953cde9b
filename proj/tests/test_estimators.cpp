#include <doctest.h>

#include <cmath>

#include "nise/estimators.hpp"
#include "test_util.hpp"

using namespace nise;
using testutil::random_matrix;
using testutil::to_rows;
using testutil::to_vec;

namespace {

Dataset simple_dataset(RngStream& rng, Index n, Index g, Index h,
                       Index l = 0) {
  Matrix y = random_matrix(rng, n, g);
  Matrix x = random_matrix(rng, n, h);
  Matrix w = l > 0 ? random_matrix(rng, n, l) : Matrix(0, 0);
  return make_dataset(std::move(y), std::move(x), std::move(w));
}

}  // namespace

TEST_CASE("ols_fit recovers a noise-free line") {
  RngStream rng(50);
  const Index n = 12;
  Matrix x = random_matrix(rng, n, 1);
  const Vector y = 1.5 * x.col(0) + Vector::Constant(n, 3.0);
  const OlsFit fit = ols_fit(y, x);
  CHECK(fit.coefficients(0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(fit.coefficients(1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.sigma2 == doctest::Approx(0.0).scale(1.0).epsilon(1e-18));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("ols_fit slope is zero when y is orthogonal to the regressors") {
  const Index n = 8;
  Matrix x(n, 1);
  Vector y(n);
  // x alternates +-1, y alternates in pairs, both mean zero, orthogonal
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = (i % 2 == 0) ? 1.0 : -1.0;
    y(i) = (i % 4 < 2) ? 1.0 : -1.0;
  }
  CHECK(std::abs(x.col(0).dot(y)) < 1e-15);
  const OlsFit fit = ols_fit(y, x);
  CHECK(std::abs(fit.coefficients(0)) < 1e-12);
  CHECK(std::abs(fit.coefficients(1)) < 1e-12);
}

TEST_CASE("ols_fit matches the normal-equations oracle on 4 observations") {
  Matrix x(4, 1);
  x << 0.5, -1.25, 2.0, 0.75;
  Vector y(4);
  y << 1.0, 0.25, -0.5, 2.0;
  const OlsFit fit = ols_fit(y, x);

  oracle::Rows design(4, std::vector<double>(2, 1.0));
  for (int i = 0; i < 4; ++i) design[static_cast<std::size_t>(i)][0] = x(i, 0);
  const auto expect = oracle::normal_equations_ols(design, to_vec(y));
  CHECK(fit.coefficients(0) == doctest::Approx(expect[0]).epsilon(1e-10));
  CHECK(fit.coefficients(1) == doctest::Approx(expect[1]).epsilon(1e-10));
}

TEST_CASE("ols_fit residuals are orthogonal to the design") {
  RngStream rng(51);
  const Matrix x = random_matrix(rng, 40, 3);
  Vector y = x * Vector::Ones(3) + random_matrix(rng, 40, 1).col(0);
  const OlsFit fit = ols_fit(y, x);
  CHECK((x.transpose() * fit.residuals).cwiseAbs().maxCoeff() <=
        1e-8 * y.norm());
  CHECK(std::abs(fit.residuals.sum()) <= 1e-8 * y.norm());
  CHECK(fit.sigma2 >= 0.0);
  CHECK(fit.covariance.isApprox(fit.covariance.transpose(), 1e-12));
}

TEST_CASE("tsls_fit equals OLS when the endogenous regressor is exactly "
          "first-stage fitted") {
  RngStream rng(52);
  const Index n = 30;
  const Matrix x = random_matrix(rng, n, 1);
  const Matrix w = random_matrix(rng, n, 1);
  Matrix endog(n, 2);
  endog.col(1) = 2.0 * x.col(0) - w.col(0);  // in span([X, W, 1])
  endog.col(0) = 0.5 * endog.col(1) + x.col(0) +
                 Vector::Constant(n, 1.0) +
                 0.3 * random_matrix(rng, n, 1).col(0);
  const Dataset data = make_dataset(endog, x, w);

  const TslsFit tsls = tsls_fit(data, 0);
  const OlsFit ols = ols_fit(data, 0);
  CHECK((tsls.coefficients - ols.coefficients).cwiseAbs().maxCoeff() <=
        1e-10);
}

TEST_CASE("just-identified tsls_fit matches the direct IV formula") {
  RngStream rng(53);
  const Index n = 25;
  const Dataset data = simple_dataset(rng, n, 2, 2, 1);  // L = G-1 = 1

  const TslsFit fit = tsls_fit(data, 0);

  // oracle: (Z^T Xt)^{-1} Z^T y with Z = [X, W, 1], Xt = [y2, X, 1]
  Matrix z(n, 4), xt(n, 4);
  z << data.exog, data.instruments, Vector::Ones(n);
  xt << data.endog.col(1), data.exog, Vector::Ones(n);
  const auto beta = oracle::iv_direct(to_rows(z), to_rows(xt),
                                      to_vec(data.endog.col(0)));
  for (Index j = 0; j < 4; ++j) {
    CHECK(fit.coefficients(j) ==
          doctest::Approx(beta[static_cast<std::size_t>(j)]).epsilon(1e-10));
  }
  CHECK_FALSE(fit.sargan.has_value());
}

TEST_CASE("tsls first-stage residuals are orthogonal to X, W and the "
          "intercept") {
  RngStream rng(54);
  const Index n = 40;
  const Dataset data = simple_dataset(rng, n, 2, 2, 3);
  const TslsFit fit = tsls_fit(data, 0);

  Matrix z(n, 6);
  z << data.exog, data.instruments, Vector::Ones(n);
  const Vector y2 = data.endog.col(1);
  const Vector stage1_resid = residual_maker(z, y2).col(0);
  CHECK((z.transpose() * stage1_resid).cwiseAbs().maxCoeff() <=
        1e-8 * y2.norm());

  // structural residuals are orthogonal to the stage-2 fitted design
  Matrix dhat(n, 4);
  dhat << (y2 - stage1_resid), data.exog, Vector::Ones(n);
  CHECK((dhat.transpose() * fit.residuals).cwiseAbs().maxCoeff() <=
        1e-7 * data.endog.col(0).norm());
  CHECK(fit.first_stage.has_value());
  CHECK(fit.sargan.has_value());
}

TEST_CASE("tsls_fit enforces the order condition") {
  RngStream rng(55);
  const Dataset data = simple_dataset(rng, 20, 3, 2, 1);  // needs L >= 2
  CHECK_THROWS_AS(tsls_fit(data, 0), OrderConditionFailed);
}

TEST_CASE("canonical_correlations with G=1 equals the regression R^2") {
  RngStream rng(56);
  const Index n = 30;
  const Matrix x = random_matrix(rng, n, 3);
  const Vector y =
      x * Vector::Constant(3, 0.7) + random_matrix(rng, n, 1).col(0);
  const auto cc = canonical_correlations(y, x);
  const OlsFit ols = ols_fit(y, x);
  REQUIRE(cc.r_squared.size() == 1);
  CHECK(cc.r_squared(0) == doctest::Approx(ols.r_squared).epsilon(1e-10));
}

TEST_CASE("canonical_correlations are all one when Y = XQ") {
  RngStream rng(57);
  const Matrix x = random_matrix(rng, 20, 2);
  Matrix q(2, 2);
  q << 1.0, 2.0, -0.5, 1.5;
  const auto cc = canonical_correlations(x * q, x);
  REQUIRE(cc.r_squared.size() == 2);
  CHECK(cc.r_squared(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cc.r_squared(1) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("canonical_correlations match the nonsymmetric-form oracle") {
  RngStream rng(58);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 8;
    const Matrix y = random_matrix(rng, n, 2);
    const Matrix x = random_matrix(rng, n, 3);
    const auto cc = canonical_correlations(y, x);

    // oracle: eigenvalues of (Yd^T Yd)^{-1} (Yd^T M Yd) on demeaned blocks
    const Matrix yd = y.rowwise() - y.colwise().mean();
    const Matrix xd = x.rowwise() - x.colwise().mean();
    oracle::Rows myd(static_cast<std::size_t>(n));
    for (Index c = 0; c < 2; ++c) {
      const auto col = oracle::project_out(to_rows(xd), to_vec(yd.col(c)));
      for (Index i = 0; i < n; ++i) {
        myd[static_cast<std::size_t>(i)].push_back(
            col[static_cast<std::size_t>(i)]);
      }
    }
    const auto ydt = oracle::transpose(to_rows(yd));
    const auto a = oracle::matmul(ydt, myd);             // Yd^T M Yd
    const auto b = oracle::matmul(ydt, to_rows(yd));     // Yd^T Yd
    const auto lambdas =
        oracle::charpoly_eigenvalues(oracle::matmul(oracle::gj_inverse(b), a));
    // ascending lambdas pair with descending r^2
    REQUIRE(cc.r_squared.size() == 2);
    CHECK(cc.r_squared(0) == doctest::Approx(1.0 - lambdas[0]).epsilon(1e-8));
    CHECK(cc.r_squared(1) == doctest::Approx(1.0 - lambdas[1]).epsilon(1e-8));
  }
}

TEST_CASE("canonical_correlations rejects rank-deficient blocks") {
  RngStream rng(59);
  Matrix x(15, 2);
  x.col(0) = random_matrix(rng, 15, 1);
  x.col(1) = Vector::Ones(15);  // constant dies on demeaning
  const Matrix y = random_matrix(rng, 15, 2);
  CHECK_THROWS_AS(canonical_correlations(y, x), RankDeficient);
}

TEST_CASE("nise_fit with G=1 degenerates to OLS") {
  RngStream rng(60);
  const Index n = 25;
  Matrix x = random_matrix(rng, n, 2);
  Matrix y(n, 1);
  y.col(0) = x * Vector::Constant(2, 1.2) +
             Vector::Constant(n, -0.5) + random_matrix(rng, n, 1).col(0);
  const Dataset data = make_dataset(y, x);

  const NiseFit fit = nise_fit(data);
  const OlsFit ols = ols_fit(y.col(0), x);
  CHECK(fit.endog_coefficients.size() == 0);
  CHECK(fit.lambda_min == doctest::Approx(1.0 - ols.r_squared).epsilon(1e-10));
  CHECK((fit.b - ols.coefficients).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_FALSE(fit.z.has_value());
}

TEST_CASE("nise_fit identifies an exact linear relation") {
  RngStream rng(61);
  const Index n = 20;
  Matrix x = random_matrix(rng, n, 1);
  Matrix endog(n, 2);
  endog.col(1) = random_matrix(rng, n, 1);
  endog.col(0) =
      2.0 * endog.col(1) + x.col(0) + Vector::Constant(n, 3.0);
  const Dataset data = make_dataset(endog, x);

  const NiseFit fit = nise_fit(data);
  CHECK(fit.lambda_min == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(fit.endog_coefficients(0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(fit.b(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fit.b(1) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(fit.c(0) > 0.0);
}

TEST_CASE("nise_fit matches the constrained grid-search oracle on a tiny "
          "instance") {
  RngStream rng(62);
  const Index n = 12;
  const Matrix x = random_matrix(rng, n, 2);
  Matrix endog(n, 2);
  endog.col(1) = random_matrix(rng, n, 1);
  endog.col(0) = 1.4 * endog.col(1) - x.col(0) + 0.5 * x.col(1) +
                 Vector::Constant(n, 0.3) +
                 0.4 * random_matrix(rng, n, 1).col(0);
  const Dataset data = make_dataset(endog, x);
  const NiseFit fit = nise_fit(data);

  // oracle: minimize gamma' (Yd' M Yd) gamma / gamma' (Yd' Yd) gamma over
  // directions; the constraint gamma' (Y'Y) gamma = 1 only fixes the scale,
  // which the ratio removes.
  const Matrix yd = data.endog.rowwise() - data.endog.colwise().mean();
  const Matrix xd = data.exog.rowwise() - data.exog.colwise().mean();
  oracle::Rows myd(static_cast<std::size_t>(n));
  for (Index c = 0; c < 2; ++c) {
    const auto col = oracle::project_out(to_rows(xd), to_vec(yd.col(c)));
    for (Index i = 0; i < n; ++i) {
      myd[static_cast<std::size_t>(i)].push_back(
          col[static_cast<std::size_t>(i)]);
    }
  }
  const auto a =
      oracle::matmul(oracle::transpose(myd), myd);  // (MYd)'(MYd)
  const auto b = oracle::matmul(oracle::transpose(to_rows(yd)), to_rows(yd));
  const auto gamma = oracle::rayleigh_grid_min(a, b);
  const double coef = -gamma[1] / gamma[0];
  CHECK(fit.endog_coefficients(0) == doctest::Approx(coef).epsilon(1e-3));
}

TEST_CASE("nise_fit normalization, r1^2 identity and composite residual "
          "orthogonality") {
  RngStream rng(63);
  const Index n = 60;
  const Matrix x = random_matrix(rng, n, 3);
  Matrix endog(n, 2);
  endog.col(1) = random_matrix(rng, n, 1);
  endog.col(0) = -0.8 * endog.col(1) + x * Vector::Constant(3, 0.6) +
                 random_matrix(rng, n, 1).col(0);
  const Dataset data = make_dataset(endog, x);
  const NiseFit fit = nise_fit(data);

  // c' (Yd' Yd) c = 1 with the demeaned endogenous Gram
  const Matrix yd = data.endog.rowwise() - data.endog.colwise().mean();
  const double norm = fit.c.dot(yd.transpose() * yd * fit.c);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fit.c(0) > 0.0);
  CHECK(fit.lambda_min > 0.0);
  CHECK(fit.lambda_min <= 1.0);

  const auto cc = canonical_correlations(data.endog, data.exog);
  CHECK(fit.r_squared(0) == doctest::Approx(1.0 - fit.lambda_min)
                                .epsilon(1e-10));
  CHECK(fit.r_squared(0) == doctest::Approx(cc.r_squared(0)).epsilon(1e-10));

  Matrix design(n, 4);
  design << data.exog, Vector::Ones(n);
  CHECK((design.transpose() * fit.residuals).cwiseAbs().maxCoeff() <=
        1e-8 * data.endog.col(0).norm());

  CHECK(fit.z.has_value());  // G=2, H=3
  CHECK(fit.covariance.isApprox(fit.covariance.transpose(), 1e-10));
  CHECK(fit.sigma2 >= 0.0);
}

TEST_CASE("nise_fit scale equivariance in the endogenous block") {
  RngStream rng(64);
  const Index n = 40;
  const Matrix x = random_matrix(rng, n, 2);
  Matrix endog(n, 2);
  endog.col(1) = random_matrix(rng, n, 1);
  endog.col(0) = 0.7 * endog.col(1) + x.col(0) -
                 0.4 * x.col(1) + random_matrix(rng, n, 1).col(0);
  const Dataset base = make_dataset(endog, x);
  const NiseFit f0 = nise_fit(base);

  const double k = -3.7;
  Matrix scaled = endog;
  scaled.col(1) *= k;
  const Dataset mod = make_dataset(scaled, x);
  const NiseFit f1 = nise_fit(mod);

  CHECK(f1.endog_coefficients(0) ==
        doctest::Approx(f0.endog_coefficients(0) / k).epsilon(1e-8));
  CHECK(f1.lambda_min == doctest::Approx(f0.lambda_min).epsilon(1e-8));
  CHECK((f1.r_squared - f0.r_squared).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((f1.b - f0.b).cwiseAbs().maxCoeff() <= 1e-8);
  // fitted composite values agree: composite - residuals
  const Vector fitted0 =
      (base.endog * f0.c) / f0.c(0) - f0.residuals;
  const Vector fitted1 = (mod.endog * f1.c) / f1.c(0) - f1.residuals;
  CHECK((fitted0 - fitted1).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("nise_fit is invariant to a change of basis in X") {
  RngStream rng(65);
  const Index n = 35;
  const Matrix x = random_matrix(rng, n, 2);
  Matrix endog(n, 2);
  endog.col(1) = random_matrix(rng, n, 1);
  endog.col(0) = -1.1 * endog.col(1) + 0.9 * x.col(0) + 0.2 * x.col(1) +
                 random_matrix(rng, n, 1).col(0);
  Matrix q(2, 2);
  q << 0.8, -1.2, 2.0, 0.6;

  const Dataset d0 = make_dataset(endog, x);
  const Dataset d1 = make_dataset(endog, x * q);
  const NiseFit f0 = nise_fit(d0);
  const NiseFit f1 = nise_fit(d1);

  CHECK((f0.c - f1.c).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(f0.lambda_min == doctest::Approx(f1.lambda_min).epsilon(1e-8));
  CHECK((f0.r_squared - f1.r_squared).cwiseAbs().maxCoeff() <= 1e-8);
  // slopes transform as Q^{-1} b, the intercept is unchanged
  const Vector mapped = q.inverse() * f0.b.head(2);
  CHECK((f1.b.head(2) - mapped).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(f1.b(2) == doctest::Approx(f0.b(2)).epsilon(1e-8));
}

TEST_CASE("nise_fit refuses an effectively empty X") {
  RngStream rng(66);
  Matrix endog = random_matrix(rng, 20, 2);

  Dataset no_x = make_dataset(endog, Matrix(20, 0));
  CHECK_THROWS_AS(nise_fit(no_x), EmptyExogenous);

  Dataset const_x = make_dataset(endog, Matrix::Ones(20, 1));
  CHECK_THROWS_AS(nise_fit(const_x), EmptyExogenous);
}

TEST_CASE("nise_fit reports a normalization failure when y1 is absent from "
          "the relation") {
  RngStream rng(67);
  const Index n = 24;
  const Matrix x = random_matrix(rng, n, 1);
  Matrix endog(n, 2);
  endog.col(0) = random_matrix(rng, n, 1);  // unrelated noise
  endog.col(1) = x.col(0);                  // exact relation without y1
  const Dataset data = make_dataset(endog, x);
  CHECK_THROWS_AS(nise_fit(data), NormalizationFailure);
}

TEST_CASE("nise_cov with G=1 equals the OLS slope covariance exactly") {
  RngStream rng(68);
  const Index n = 30;
  const Matrix x = random_matrix(rng, n, 2);
  Matrix y(n, 1);
  y.col(0) = x * Vector::Constant(2, 0.9) + random_matrix(rng, n, 1).col(0);
  const Dataset data = make_dataset(y, x);

  const NiseFit fit = nise_fit(data);
  const OlsFit ols = ols_fit(y.col(0), x);
  CHECK((fit.covariance - ols.covariance.topLeftCorner(2, 2))
            .cwiseAbs()
            .maxCoeff() <= 1e-10 * ols.covariance.norm());
  CHECK(fit.intercept_variance ==
        doctest::Approx(ols.covariance(2, 2)).epsilon(1e-10));
}

TEST_CASE("nise_cov is symmetric positive definite on regular data") {
  RngStream rng(69);
  const Index n = 80;
  const Matrix x = random_matrix(rng, n, 3);
  Matrix endog(n, 2);
  endog.col(1) = random_matrix(rng, n, 1);
  endog.col(0) = 0.5 * endog.col(1) + x * Vector::Constant(3, 1.0) +
                 random_matrix(rng, n, 1).col(0);
  const NiseFit fit = nise_fit(make_dataset(endog, x));
  CHECK(fit.covariance.isApprox(fit.covariance.transpose(), 1e-10));
  const auto sol = sym_eig(fit.covariance);
  CHECK(sol.eigenvalues(0) > 0.0);
}

TEST_CASE("dataset validation rejects undersized samples") {
  RngStream rng(70);
  Matrix endog = random_matrix(rng, 5, 2);
  Matrix x = random_matrix(rng, 5, 2);
  CHECK_THROWS_AS(make_dataset(endog, x), Error);
}
