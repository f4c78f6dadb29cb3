#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>

namespace mixcop {

// standard normal CDF
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// inverse of the standard normal CDF (Wichura's AS 241, double precision)
double norm_quantile(double p);

double log_sum_exp(std::span<const double> v);
double log_sum_exp(const Eigen::VectorXd& v);
inline double log_sum_exp(double a, double b) {
  double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Gauss-Legendre nodes/weights on [-1,1], computed once per order and cached.
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
const GaussLegendre& gauss_legendre(int order);

}  // namespace mixcop
