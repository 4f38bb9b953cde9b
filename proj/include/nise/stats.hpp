#pragma once

#include <span>

#include "nise/errors.hpp"

namespace nise {

// Sample median; mean of the two middle order statistics for even lengths.
double median(std::span<const double> x);

// Qn robust scale of Rousseeuw and Croux: the k-th order statistic of the
// pairwise absolute differences, k = C(h,2) with h = floor(n/2)+1, scaled by
// the consistency constant 2.2219 and the finite-sample factor d_n.
double qn_scale(std::span<const double> x);

// Finite-sample correction factor for qn_scale (published table for n <= 9,
// odd/even asymptotic expansion beyond).
double qn_finite_sample_factor(int n);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double x, int df);

// Upper tail of the F distribution with (df1, df2) degrees of freedom.
double f_sf(double x, int df1, int df2);

// Sample Pearson correlation.
double pearson_corr(std::span<const double> x, std::span<const double> y);

// Regularized incomplete gamma Q(a, x) and incomplete beta I_x(a, b); the
// tail functions above are thin wrappers over these.
double regularized_gamma_q(double a, double x);
double regularized_beta(double x, double a, double b);

}  // namespace nise
