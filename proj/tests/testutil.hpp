#pragma once

// Shared statistical helpers for the test suites: these are independent
// oracles (CDFs via continued fractions, KS/chi-square p-values, Kendall's
// tau) kept apart from the library code they help check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace testutil {

// regularized lower incomplete gamma P(a, x)
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad args");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {  // series
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // continued fraction for Q
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// CDF of Gamma(shape, rate)
inline double gamma_cdf(double x, double shape, double rate) {
  if (x <= 0.0) return 0.0;
  return gamma_p(shape, rate * x);
}

inline double chi2_pvalue(double stat, int df) {
  return gamma_q(0.5 * df, 0.5 * stat);
}

// regularized incomplete beta I_x(a, b)
inline double beta_inc(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  auto betacf = [](double a_, double b_, double x_) {
    double qab = a_ + b_, qap = a_ + 1.0, qam = a_ - 1.0;
    double c = 1.0, d = 1.0 - qab * x_ / qap;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
      int m2 = 2 * m;
      double aa = m * (b_ - m) * x_ / ((qam + m2) * (a_ + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < 1e-300) d = 1e-300;
      c = 1.0 + aa / c;
      if (std::fabs(c) < 1e-300) c = 1e-300;
      d = 1.0 / d;
      h *= d * c;
      aa = -(a_ + m) * (qab + m) * x_ / ((a_ + m2) * (qap + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < 1e-300) d = 1e-300;
      c = 1.0 + aa / c;
      if (std::fabs(c) < 1e-300) c = 1e-300;
      d = 1.0 / d;
      double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h;
  };
  double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// asymptotic Kolmogorov distribution Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2l^2}
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-10) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

// one-sample KS p-value against a continuous CDF (Stephens' correction)
inline double ks_pvalue(std::vector<double> sample,
                        const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double F = cdf(sample[i]);
    d = std::max(d, std::fabs(F - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - F));
  }
  double sn = std::sqrt(n);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

// two-sample KS p-value
inline double ks2_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  double ne = std::sqrt(na * nb / (na + nb));
  return kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
}

// chi-square two-sample homogeneity p-value over binned counts
inline double chi2_two_sample_pvalue(const std::vector<double>& o1,
                                     const std::vector<double>& o2) {
  double n1 = 0.0, n2 = 0.0;
  for (double v : o1) n1 += v;
  for (double v : o2) n2 += v;
  double stat = 0.0;
  int used = 0;
  for (std::size_t c = 0; c < o1.size(); ++c) {
    double tot = o1[c] + o2[c];
    if (tot < 1.0) continue;
    double e1 = tot * n1 / (n1 + n2), e2 = tot * n2 / (n1 + n2);
    stat += (o1[c] - e1) * (o1[c] - e1) / e1 + (o2[c] - e2) * (o2[c] - e2) / e2;
    ++used;
  }
  return chi2_pvalue(stat, used - 1);
}

// Kendall's tau via inversion counting, O(n log n); assumes no ties
inline double kendall_tau(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<double> v(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) v[i] = pts[i].second;
  // merge sort counting inversions
  std::function<long long(std::vector<double>&, std::size_t, std::size_t)>
      count = [&](std::vector<double>& arr, std::size_t lo, std::size_t hi)
      -> long long {
    if (hi - lo < 2) return 0;
    std::size_t mid = (lo + hi) / 2;
    long long inv = count(arr, lo, mid) + count(arr, mid, hi);
    std::vector<double> tmp;
    tmp.reserve(hi - lo);
    std::size_t i = lo, j = mid;
    while (i < mid && j < hi) {
      if (arr[i] <= arr[j]) {
        tmp.push_back(arr[i++]);
      } else {
        inv += static_cast<long long>(mid - i);
        tmp.push_back(arr[j++]);
      }
    }
    while (i < mid) tmp.push_back(arr[i++]);
    while (j < hi) tmp.push_back(arr[j++]);
    std::copy(tmp.begin(), tmp.end(), arr.begin() + lo);
    return inv;
  };
  long long inv = count(v, 0, v.size());
  double n = static_cast<double>(v.size());
  double pairs = n * (n - 1.0) / 2.0;
  return 1.0 - 2.0 * static_cast<double>(inv) / pairs;
}

}  // namespace testutil
