#pragma once

#include <Eigen/Dense>
#include <functional>

#include "mixcop/copula.hpp"
#include "mixcop/marginals.hpp"

namespace mixcop {

// Alternating-sign sum over the 2^k corners of the rectangle [lower, upper];
// equals the probability mass of the rectangle when g is a (conditional) CDF.
// Corners are visited in Gray-code order. k = 0 returns g of the empty vector.
double difference_operator(const std::function<double(const Eigen::VectorXd&)>& g,
                           const Eigen::VectorXd& lower,
                           const Eigen::VectorXd& upper);

struct LikelihoodTerm {
  double log_continuous_part = 0.0;  // log c_C(b_C) + sum log f_j(x_j)
  double log_rectangle_mass = 0.0;   // log of the corner sum over D
  double log_density = 0.0;
  bool clamped = false;  // the corner sum fell to <= 0 and was floored
};

// Density of one observation with respect to the mixed dominating measure:
// continuous copula density times marginal densities times the rectangle mass
// of the jump coordinates. Refuses |D(x)| > 20.
LikelihoodTerm log_likelihood_point(const Copula& cop,
                                    const std::vector<MixedMarginal>& margs,
                                    const Eigen::VectorXd& x);
// same, with a precomputed partition
LikelihoodTerm log_likelihood_point(const Copula& cop,
                                    const std::vector<MixedMarginal>& margs,
                                    const Eigen::VectorXd& x,
                                    const PartitionResult& part);

// sum of log densities over rows; reduction order is fixed by row index
// regardless of the worker count
double log_likelihood_dataset(const Copula& cop,
                              const std::vector<MixedMarginal>& margs,
                              const Eigen::MatrixXd& X, int workers = 1);

// Conditional density of the latent PIT coordinates U_D given X = x,
// evaluated at u_D (ordered like part.discrete_idx). Zero outside the
// half-open rectangle [a, b).
double latent_conditional_density(const Copula& cop,
                                  const std::vector<MixedMarginal>& margs,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u_D);
double latent_conditional_density(const Copula& cop, const PartitionResult& part,
                                  const Eigen::VectorXd& u_D);

// rectangle mass Delta_{a_D}^{b_D} C_{D|C}(. | b_C) for a partition
double rectangle_mass(const Copula& cop, const PartitionResult& part);

// run a function over rows 0..n-1 on `workers` threads; results must be
// written to per-row slots so the combination order stays fixed
void parallel_for_rows(int n, int workers, const std::function<void(int)>& fn);

}  // namespace mixcop
