#include "nise/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace nise {

namespace {

constexpr double kQnConsistency = 2.2219;

double median_of_sorted(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

void require_finite(std::span<const double> x, const char* where) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(std::string(where) + ": non-finite entry");
  }
}

}  // namespace

double median(std::span<const double> x) {
  if (x.empty()) throw EmptyInput("median: empty sample");
  require_finite(x, "median");
  std::vector<double> v(x.begin(), x.end());
  return median_of_sorted(v);
}

double qn_finite_sample_factor(int n) {
  switch (n) {
    case 2: return 0.399;
    case 3: return 0.994;
    case 4: return 0.512;
    case 5: return 0.844;
    case 6: return 0.611;
    case 7: return 0.857;
    case 8: return 0.669;
    case 9: return 0.872;
    default:
      if (n < 2) throw TooFewPoints("qn_finite_sample_factor: need n >= 2");
      return (n % 2 == 1) ? n / (n + 1.4) : n / (n + 3.8);
  }
}

double qn_scale(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw EmptyInput("qn_scale: empty sample");
  if (n < 2) throw TooFewPoints("qn_scale: need at least two points");
  require_finite(x, "qn_scale");

  const std::size_t h = n / 2 + 1;
  const std::size_t k = h * (h - 1) / 2;  // C(h,2) >= 1 for n >= 2

  std::vector<double> gaps;
  gaps.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      gaps.push_back(std::abs(x[i] - x[j]));
    }
  }
  std::nth_element(gaps.begin(), gaps.begin() + (k - 1), gaps.end());
  return kQnConsistency * qn_finite_sample_factor(static_cast<int>(n)) *
         gaps[k - 1];
}

namespace {

constexpr int kMaxIterations = 400;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// P(a,x) by series expansion, for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw NoConvergence("regularized gamma series failed to converge");
}

// Q(a,x) by modified Lentz continued fraction, for x >= a + 1.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw NoConvergence("regularized gamma continued fraction failed to converge");
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NoConvergence("incomplete beta continued fraction failed to converge");
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw Error("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double regularized_beta(double x, double a, double b) {
  if (x < 0.0 || x > 1.0) throw Error("regularized_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(ln_front) * beta_cf(a, b, x) / a;
  }
  return 1.0 - std::exp(ln_front) * beta_cf(b, a, 1.0 - x) / b;
}

double chi_square_sf(double x, int df) {
  if (df < 1) throw InvalidDf("chi_square_sf: df must be positive");
  if (x < 0.0) throw Error("chi_square_sf: x must be nonnegative");
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double f_sf(double x, int df1, int df2) {
  if (df1 < 1 || df2 < 1) throw InvalidDf("f_sf: degrees of freedom must be positive");
  if (x < 0.0) throw Error("f_sf: x must be nonnegative");
  if (x == 0.0) return 1.0;
  return regularized_beta(df2 / (df2 + df1 * x), 0.5 * df2, 0.5 * df1);
}

double pearson_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("pearson_corr: length mismatch");
  if (x.size() < 2) throw TooFewPoints("pearson_corr: need at least two points");
  require_finite(x, "pearson_corr");
  require_finite(y, "pearson_corr");

  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw ZeroVariance("pearson_corr: constant input");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace nise
