#include "mixcop/mvn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mixcop/errors.hpp"
#include "mixcop/special.hpp"

namespace mixcop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Phi^{-1} guarded against exact 0/1 arguments from saturated endpoints.
double safe_quantile(double p) {
  const double eps = 1e-16;
  return norm_quantile(std::min(1.0 - eps, std::max(eps, p)));
}

// first sixteen primes, enough for dimension 15 plus slack
const double kSqrtPrimes[] = {
    1.4142135623730951, 1.7320508075688772, 2.23606797749979,
    2.6457513110645907, 3.3166247903554,    3.605551275463989,
    4.123105625617661,  4.358898943540674,  4.795831523312719,
    5.385164807134504,  5.567764362830022,  6.082762530298219,
    6.403124237432849,  6.557438524302,     6.855654600401044,
    7.280109889280518};

}  // namespace

double bvn_cdf(double h, double k, double rho) {
  if (std::isnan(h) || std::isnan(k)) return std::numeric_limits<double>::quiet_NaN();
  if (h == -kInf || k == -kInf) return 0.0;
  if (h == kInf) return norm_cdf(k);
  if (k == kInf) return norm_cdf(h);
  rho = std::min(1.0, std::max(-1.0, rho));
  if (rho == 0.0) return norm_cdf(h) * norm_cdf(k);
  if (rho == 1.0) return norm_cdf(std::min(h, k));
  if (rho == -1.0) return std::max(0.0, norm_cdf(h) + norm_cdf(k) - 1.0);

  // Drezner-Wesolowsky integral with r = sin(phi); the integrand is smooth on
  // [0, asin(rho)] for all |rho| < 1, so fixed Gauss-Legendre converges fast.
  const GaussLegendre& gl = gauss_legendre(96);
  const double upper = std::asin(rho);
  const double c = 0.5 * upper;
  double sum = 0.0;
  for (int i = 0; i < gl.nodes.size(); ++i) {
    const double phi = c * (gl.nodes[i] + 1.0);
    const double sp = std::sin(phi);
    const double cp2 = 1.0 - sp * sp;
    sum += gl.weights[i] *
           std::exp(-(h * h - 2.0 * sp * h * k + k * k) / (2.0 * cp2));
  }
  double p = norm_cdf(h) * norm_cdf(k) + c * sum / (2.0 * M_PI);
  return clamp01(p);
}

namespace {

// Genz separation-of-variables setup: reorder variables so that the expected
// truncation probabilities shrink along the recursion, computing the Cholesky
// factor of the reordered correlation matrix as we go.
struct SovSetup {
  Eigen::MatrixXd chol;  // lower triangular
  Eigen::VectorXd a, b;  // reordered bounds
  int m = 0;
};

SovSetup sov_prepare(Eigen::VectorXd a, Eigen::VectorXd b, Eigen::MatrixXd c) {
  const int m = static_cast<int>(a.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  for (int k = 0; k < m; ++k) {
    // choose the remaining variable with the smallest (e - d)
    int best = k;
    double best_width = 2.0;
    for (int j = k; j < m; ++j) {
      double s = 0.0;
      for (int l = 0; l < k; ++l) s += L(j, l) * y[l];
      double var = c(j, j);
      for (int l = 0; l < k; ++l) var -= L(j, l) * L(j, l);
      double sd = std::sqrt(std::max(var, 0.0));
      double lo, hi;
      if (sd > 0.0) {
        lo = (a[j] == -kInf) ? -kInf : (a[j] - s) / sd;
        hi = (b[j] == kInf) ? kInf : (b[j] - s) / sd;
      } else {
        lo = (a[j] == -kInf) ? -kInf : ((a[j] - s) <= 0.0 ? -kInf : kInf);
        hi = (b[j] == kInf) ? kInf : ((b[j] - s) >= 0.0 ? kInf : -kInf);
      }
      double width = ((hi == kInf) ? 1.0 : norm_cdf(hi)) -
                     ((lo == -kInf) ? 0.0 : norm_cdf(lo));
      if (width < best_width) {
        best_width = width;
        best = j;
      }
    }
    if (best != k) {
      std::swap(a[k], a[best]);
      std::swap(b[k], b[best]);
      c.row(k).swap(c.row(best));
      c.col(k).swap(c.col(best));
      L.row(k).head(k).swap(L.row(best).head(k));
    }

    double var = c(k, k);
    for (int l = 0; l < k; ++l) var -= L(k, l) * L(k, l);
    L(k, k) = std::sqrt(std::max(var, 0.0));
    for (int j = k + 1; j < m; ++j) {
      if (L(k, k) > 0.0) {
        double s = c(j, k);
        for (int l = 0; l < k; ++l) s -= L(j, l) * L(k, l);
        L(j, k) = s / L(k, k);
      } else {
        L(j, k) = 0.0;
      }
    }

    // conditional expectation of the truncated coordinate, used for ordering
    double s = 0.0;
    for (int l = 0; l < k; ++l) s += L(k, l) * y[l];
    if (L(k, k) > 0.0) {
      double lo = (a[k] == -kInf) ? -kInf : (a[k] - s) / L(k, k);
      double hi = (b[k] == kInf) ? kInf : (b[k] - s) / L(k, k);
      double plo = (lo == -kInf) ? 0.0 : norm_cdf(lo);
      double phi_ = (hi == kInf) ? 1.0 : norm_cdf(hi);
      double dlo = (lo == -kInf) ? 0.0 : norm_pdf(lo);
      double dhi = (hi == kInf) ? 0.0 : norm_pdf(hi);
      double w = phi_ - plo;
      y[k] = (w > 1e-15) ? (dlo - dhi) / w : 0.5 * (std::max(lo, -10.0) + std::min(hi, 10.0));
    } else {
      y[k] = 0.0;
    }
  }
  return SovSetup{std::move(L), std::move(a), std::move(b), m};
}

// integrand along one quasi-random point w in [0,1]^(m-1)
double sov_evaluate(const SovSetup& su, const double* w) {
  const int m = su.m;
  double d, e;
  auto bounds = [&](int i, double s, double& dd, double& ee) {
    double lkk = su.chol(i, i);
    if (lkk > 0.0) {
      dd = (su.a[i] == -kInf) ? 0.0 : norm_cdf((su.a[i] - s) / lkk);
      ee = (su.b[i] == kInf) ? 1.0 : norm_cdf((su.b[i] - s) / lkk);
    } else {
      dd = (su.a[i] == -kInf) ? 0.0 : ((su.a[i] - s) <= 0.0 ? 0.0 : 1.0);
      ee = (su.b[i] == kInf) ? 1.0 : ((su.b[i] - s) >= 0.0 ? 1.0 : 0.0);
    }
  };
  bounds(0, 0.0, d, e);
  double f = e - d;
  double y[32];
  for (int i = 1; i < m; ++i) {
    if (f <= 0.0) return 0.0;
    y[i - 1] = safe_quantile(d + w[i - 1] * (e - d));
    double s = 0.0;
    for (int l = 0; l < i; ++l) s += su.chol(i, l) * y[l];
    bounds(i, s, d, e);
    f *= std::max(0.0, e - d);
  }
  return f;
}

}  // namespace

MvnResult mvn_rectangle(const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper,
                        const Eigen::MatrixXd& corr, double abstol) {
  const int m = static_cast<int>(lower.size());
  if (upper.size() != m || corr.rows() != m || corr.cols() != m)
    throw std::invalid_argument("mvn_rectangle: dimension mismatch");
  for (int j = 0; j < m; ++j)
    if (upper[j] <= lower[j]) return {0.0, 0.0};

  if (m == 1) {
    double lo = (lower[0] == -kInf) ? 0.0 : norm_cdf(lower[0]);
    double hi = (upper[0] == kInf) ? 1.0 : norm_cdf(upper[0]);
    return {std::max(0.0, hi - lo), 0.0};
  }
  if (m == 2) {
    const double r = corr(0, 1);
    double p = bvn_cdf(upper[0], upper[1], r) - bvn_cdf(lower[0], upper[1], r) -
               bvn_cdf(upper[0], lower[1], r) + bvn_cdf(lower[0], lower[1], r);
    return {clamp01(p), 1e-14};
  }
  if (m > 32) throw std::invalid_argument("mvn_rectangle: dimension > 32");

  SovSetup su = sov_prepare(lower, upper, corr);

  // fixed shifts so the estimator is a deterministic function of the inputs
  const int n_shifts = 12;
  double shift[n_shifts][32];
  {
    std::uint64_t x = 0x5bd1e995733221adULL;
    auto nextu = [&x]() {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      z ^= z >> 31;
      return static_cast<double>(z >> 11) * 0x1.0p-53;
    };
    for (int s = 0; s < n_shifts; ++s)
      for (int j = 0; j < 32; ++j) shift[s][j] = nextu();
  }

  const int dim = m - 1;
  int n_points = 256;
  const int max_points = 16384;
  double mean = 0.0, err = kInf;
  while (true) {
    double batch[n_shifts];
    for (int s = 0; s < n_shifts; ++s) {
      double acc = 0.0;
      for (int q = 1; q <= n_points; ++q) {
        double w[32];
        for (int j = 0; j < dim; ++j) {
          double v = q * kSqrtPrimes[j] + shift[s][j];
          w[j] = v - std::floor(v);
        }
        acc += sov_evaluate(su, w);
        // antithetic point improves the rule at negligible cost
        for (int j = 0; j < dim; ++j) w[j] = 1.0 - w[j];
        acc += sov_evaluate(su, w);
      }
      batch[s] = acc / (2.0 * n_points);
    }
    mean = 0.0;
    for (double v : batch) mean += v;
    mean /= n_shifts;
    double var = 0.0;
    for (double v : batch) var += (v - mean) * (v - mean);
    var /= (n_shifts - 1.0);
    err = 3.0 * std::sqrt(var / n_shifts);
    if (err < abstol || n_points >= max_points) break;
    n_points *= 2;
  }
  if (err >= abstol) diagnostics().mvn_low_accuracy++;
  return {clamp01(mean), err};
}

MvnResult mvn_cdf(const Eigen::VectorXd& upper, const Eigen::MatrixXd& corr,
                  double abstol) {
  Eigen::VectorXd lower =
      Eigen::VectorXd::Constant(upper.size(), -kInf);
  return mvn_rectangle(lower, upper, corr, abstol);
}

}  // namespace mixcop
