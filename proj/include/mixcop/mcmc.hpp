#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mixcop/copula.hpp"
#include "mixcop/latent.hpp"
#include "mixcop/marginals.hpp"

namespace mixcop {

enum class Family { gaussian, clayton, gumbel };

std::string family_name(Family f);
Family family_from_name(const std::string& s);

struct ModelSpec {
  std::vector<Family> components;  // distinct, canonical order
  void validate() const;
  bool has(Family f) const;
  int index_of(Family f) const;  // -1 if absent
  std::string describe() const;
};

struct PriorConfig {
  Eigen::VectorXd dirichlet_phi;  // per active component; defaults to ones
  double clayton_shape = 1.0;
  double clayton_rate = 0.1;
  double gumbel_shape = 1.0;  // prior on theta_gu - 1
  double gumbel_rate = 0.1;
  double step_theta_cl = 0.5;
  double step_theta_gu = 0.5;
  double step_r = 0.2;
  void validate(int n_components) const;
};

struct RunConfig {
  int burnin = 10000;
  int keep = 10000;
  int thin = 1;
  std::uint64_t seed = 1;
  enum class LatentKernel { mh_block, gibbs_single };
  LatentKernel latent_kernel = LatentKernel::mh_block;
  double adapt_target = 0.35;  // must stay in [0.3, 0.4]
  int folds = 5;
  int workers = 1;
  bool likelihood_off = false;  // sample the priors (validation mode)
  void validate() const;
};

struct ChainState {
  Eigen::MatrixXd latent;  // n x m
  std::vector<int> d;      // component index per row
  Eigen::VectorXd w;       // simplex over active components
  double theta_cl = 1.0;
  double theta_gu = 1.5;
  Eigen::MatrixXd R;      // unit-diagonal upper-triangular Cholesky factor
  Eigen::MatrixXd gamma;  // correlation derived from R
  long sweep = 0;
};

// Multiplicative Robbins-Monro adaptation of a random-walk step size toward a
// target acceptance rate; frozen after burn-in.
class RobbinsMonroStep {
 public:
  RobbinsMonroStep(double sigma0 = 0.5, double target = 0.35,
                   double lo = 1e-3, double hi = 10.0);
  double sigma() const { return sigma_; }
  void record(bool accepted);
  void maybe_adapt();  // adapts once per 50 recorded proposals until frozen
  void freeze() { frozen_ = true; }
  double acceptance_rate() const;

 private:
  double sigma_, target_, lo_, hi_;
  long batch_props_ = 0, batch_acc_ = 0;
  long total_props_ = 0, total_acc_ = 0;
  long batches_ = 0;
  bool frozen_ = false;
};

struct AcceptanceRates {
  double theta_cl = 0.0;
  double theta_gu = 0.0;
  double correlation = 0.0;
  double latent = 0.0;
};

struct PosteriorDraws {
  std::vector<Family> components;
  int m = 0;
  int n_obs = 0;
  Eigen::MatrixXd weights;      // keep x K
  Eigen::VectorXd theta_cl;     // empty when the family is absent
  Eigen::VectorXd theta_gu;
  Eigen::MatrixXd gamma_upper;  // keep x m(m-1)/2, row-major upper triangle
  Eigen::VectorXd loglik;       // per kept sweep
  Eigen::VectorXd pred_log_mean;  // per obs: log mean_t f(x_i | theta_t)
  AcceptanceRates acceptance;
  std::uint64_t seed = 0;
  int burnin = 0, keep = 0, thin = 1;
  int n_kept() const { return static_cast<int>(loglik.size()); }
};

// One Metropolis-within-Gibbs sampler instance. Step methods are exposed so
// each conditional update can be tested on its own.
class MixtureSampler {
 public:
  MixtureSampler(Eigen::MatrixXd X, std::vector<MixedMarginal> margs,
                 ModelSpec spec, PriorConfig prior, RunConfig run);

  void step_indicators();
  void step_weights();
  void step_theta(Family which);
  void step_correlation();
  void refresh_latent();
  void sweep();  // indicators, weights, Gamma, theta_cl, theta_gu, latent
  void freeze_adaptation();

  double data_loglik() const;  // mixed-measure log likelihood at current state
  void per_row_loglik(const Eigen::MatrixXd& rows,
                      const std::vector<PartitionResult>& parts,
                      Eigen::VectorXd& out) const;

  std::shared_ptr<const Copula> component_copula(Family f) const;
  MixtureCopula current_copula() const;

  const ChainState& state() const { return state_; }
  ChainState& mutable_state() { return state_; }
  const std::vector<PartitionResult>& partitions() const { return parts_; }
  const ModelSpec& spec() const { return spec_; }
  AcceptanceRates acceptance_rates() const;
  const std::vector<MixedMarginal>& marginals() const { return margs_; }

 private:
  void rebuild_component(Family f);
  void check_invariants() const;
  Rng row_rng(int row, int salt) const;
  Rng sweep_rng(int salt) const;

  Eigen::MatrixXd X_;
  std::vector<MixedMarginal> margs_;
  ModelSpec spec_;
  PriorConfig prior_;
  RunConfig run_;
  int n_ = 0, m_ = 0, K_ = 0;

  std::vector<PartitionResult> parts_;
  Eigen::VectorXd marginal_log_const_;  // per row: sum of log f_j over C(x_i)
  ChainState state_;
  std::vector<std::shared_ptr<const Copula>> comp_;  // current component copulas

  RobbinsMonroStep step_cl_, step_gu_;
  std::vector<RobbinsMonroStep> step_r_;  // one per free element of R
  long latent_props_ = 0, latent_acc_ = 0;
};

// rebuild the mixture copula of one kept draw
MixtureCopula copula_from_draw(const PosteriorDraws& draws, int t);

// Draw-averaged predictive accumulators for a set of scored rows.
struct ScoreAccum {
  Eigen::VectorXd log_mean;     // per row: log mean_t f(row | theta_t)
  Eigen::VectorXd log_mean_sq;  // per row: log mean_t f(row | theta_t)^2
};

// Runs the full chain. When score_rows is given, those rows are (support-
// clamped and) scored against each kept draw into score_out.
PosteriorDraws run_chain(const Eigen::MatrixXd& X,
                         const std::vector<MixedMarginal>& margs,
                         const ModelSpec& spec, const PriorConfig& prior,
                         const RunConfig& run,
                         const Eigen::MatrixXd* score_rows = nullptr,
                         ScoreAccum* score_out = nullptr);

}  // namespace mixcop
