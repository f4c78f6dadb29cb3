#pragma once

#include <Eigen/Dense>

namespace mixcop {

struct MvnResult {
  double p = 0.0;
  double error = 0.0;  // estimated absolute error
};

// Bivariate standard-normal CDF P(Z1 <= h, Z2 <= k) with correlation rho.
// Deterministic quadrature, absolute accuracy around 1e-14.
double bvn_cdf(double h, double k, double rho);

// P(lower <= Z <= upper) for Z ~ N(0, corr), corr a correlation matrix.
// Infinite bounds are allowed. Dimensions 1 and 2 are evaluated in closed
// form / by quadrature; higher dimensions use separation-of-variables with
// variable reordering and a shifted Richtmyer quasi-Monte Carlo rule. The
// point set and shifts are fixed, so results are deterministic.
MvnResult mvn_rectangle(const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper,
                        const Eigen::MatrixXd& corr, double abstol = 1e-7);

// one-sided CDF P(Z <= upper)
MvnResult mvn_cdf(const Eigen::VectorXd& upper, const Eigen::MatrixXd& corr,
                  double abstol = 1e-7);

}  // namespace mixcop
