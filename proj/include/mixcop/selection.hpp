#pragma once

#include <Eigen/Dense>

#include "mixcop/mcmc.hpp"

namespace mixcop {

// DIC3 = -4 E[log p(y|theta) | y] + 2 log phat(y), with
// phat(y) = prod_i mean_t f(y_i | theta_t). Uses the per-sweep log
// likelihoods and the per-observation predictive accumulators of the run.
double dic3(const PosteriorDraws& draws);

struct ModelScore {
  double dic3 = 0.0;
  double lpds_cv = 0.0;
  Eigen::VectorXd per_fold;  // per-fold LPDS contributions, summing to lpds_cv
  double mc_se = 0.0;        // Monte Carlo standard error of lpds_cv
};

// B-fold cross-validated log predictive score. Rows are shuffled with the run
// seed into B near-equal folds; for each fold a chain runs on the complement
// (marginals re-fit on the training rows) and the held-out rows are scored by
// the draw-averaged predictive density.
ModelScore lpds_cv(const Eigen::MatrixXd& X,
                   const std::vector<std::vector<double>>& atom_candidates,
                   const ModelSpec& spec, const PriorConfig& prior,
                   const RunConfig& run, int B);

// fold assignment used by lpds_cv (exposed for tests): fold id per row
std::vector<int> fold_assignment(int n, int B, std::uint64_t seed);

}  // namespace mixcop
