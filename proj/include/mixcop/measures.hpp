#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mixcop/copula.hpp"
#include "mixcop/marginals.hpp"
#include "mixcop/mcmc.hpp"

namespace mixcop {

struct TransitionMatrix {
  Eigen::VectorXd bounds1, bounds2;  // strictly increasing cut points
  Eigen::MatrixXd P;                 // row-stochastic over defined rows
  std::vector<bool> row_defined;     // false when the row class is empty
};

// class cut points at the k/classes sample quantiles
Eigen::VectorXd class_boundaries(const Eigen::VectorXd& sample, int classes);

TransitionMatrix transition_matrix_from_data(const Eigen::VectorXd& y1,
                                             const Eigen::VectorXd& y2,
                                             const Eigen::VectorXd& bounds1,
                                             const Eigen::VectorXd& bounds2);

// transition matrix of the pair (i,j) under the fitted model, estimated from
// n_mc posterior-predictive draws
TransitionMatrix transition_matrix_from_model(
    const Copula& cop, const std::vector<MixedMarginal>& margs, int i, int j,
    const Eigen::VectorXd& bounds1, const Eigen::VectorXd& bounds2, int n_mc,
    Rng& rng);

// Shorrocks mobility index (m - trace P) / (m - 1)
double shorrocks_m1(const Eigen::MatrixXd& P);

// Conditional transition probabilities in and out of the zero atom, computed
// exactly from the 2x2 rectangle masses at zero. Both margins must carry an
// atom at 0.
struct ZeroTransition {
  double both_zero = 0.0;        // joint cells
  double zero_to_positive_joint = 0.0;
  double positive_to_zero_joint = 0.0;
  double both_positive = 0.0;
  double stay_zero = 0.0;        // conditionals
  double zero_to_positive = 0.0;
  double positive_to_zero = 0.0;
  double stay_positive = 0.0;
};
ZeroTransition zero_transition_probs(const Copula& cop,
                                     const std::vector<MixedMarginal>& margs,
                                     int i, int j);

// FGT poverty index (1/n) sum ((z-y)/z)^alpha over y <= z
double fgt(const Eigen::VectorXd& incomes, double z, int alpha);

// Foster duration-adjusted chronic poverty: grand mean of the censored
// normalized gap matrix with identification d_i >= tau
double foster_chronic(const Eigen::MatrixXd& panel, double z, double tau,
                      int alpha);

// x_ij = F_j^{-1}(u_ij) for copula draws u; the simulate command and the
// posterior-predictive functionals share this
Eigen::MatrixXd simulate_panel(const Copula& cop,
                               const std::vector<MixedMarginal>& margs, int n,
                               Rng& rng);

struct FunctionalSpec {
  std::string name;  // spearman | shorrocks | zero_transition | fgt | foster
  int i = 0, j = 1;  // pair measures
  int classes = 5;   // shorrocks
  std::string which = "stay_zero";  // zero_transition component
  double z = 0.0;    // poverty line
  double tau = 0.5;  // duration cutoff
  int alpha = 0;     // FGT order
  int column = 0;    // fgt column
  int first_col = 0, last_col = -1;  // foster period range (-1: all columns)
  void validate(int m) const;
};

struct PosteriorSummary {
  double mean = 0.0;
  double lo = 0.0;   // 2.5% quantile over draws
  double hi = 0.0;   // 97.5% quantile
  Eigen::VectorXd per_draw;
};

// Evaluates the functional once per kept draw (common random numbers across
// draws) and summarizes with an equal-tailed 95% credible interval.
PosteriorSummary posterior_functional(const PosteriorDraws& draws,
                                      const FunctionalSpec& spec,
                                      const std::vector<MixedMarginal>& margs,
                                      int n_mc, std::uint64_t seed,
                                      int workers = 1);

// evaluate a functional for one concrete copula; class boundaries for
// shorrocks come from the marginal quantiles
double evaluate_functional(const Copula& cop, const FunctionalSpec& spec,
                           const std::vector<MixedMarginal>& margs, int n_mc,
                           Rng rng);

}  // namespace mixcop
