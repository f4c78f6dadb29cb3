#include "mixcop/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixcop/errors.hpp"

namespace mixcop {

double dic3(const PosteriorDraws& draws) {
  const int T = draws.n_kept();
  if (T < 1) throw UsageError("dic3: no kept draws");
  double mean_ll = draws.loglik.mean();
  double log_phat = draws.pred_log_mean.sum();
  return -4.0 * mean_ll + 2.0 * log_phat;
}

std::vector<int> fold_assignment(int n, int B, std::uint64_t seed) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = Rng::derive(seed, 0xf01d, 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[i], idx[j]);
  }
  std::vector<int> fold(n);
  for (int r = 0; r < n; ++r) fold[idx[r]] = r % B;
  return fold;
}

ModelScore lpds_cv(const Eigen::MatrixXd& X,
                   const std::vector<std::vector<double>>& atom_candidates,
                   const ModelSpec& spec, const PriorConfig& prior,
                   const RunConfig& run, int B) {
  const int n = static_cast<int>(X.rows());
  const int m = static_cast<int>(X.cols());
  if (B < 2) throw UsageError("lpds_cv: need B >= 2");
  if (B > n) throw UsageError("lpds_cv: more folds than rows");
  if (static_cast<int>(atom_candidates.size()) != m)
    throw UsageError("lpds_cv: atom candidate list per column required");

  std::vector<int> fold = fold_assignment(n, B, run.seed);

  ModelScore score;
  score.per_fold.resize(B);
  double se2 = 0.0;
  for (int b = 0; b < B; ++b) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) (fold[i] == b ? test : train).push_back(i);
    if (static_cast<int>(train.size()) < 10)
      throw DataError("lpds_cv: training complement of fold " +
                      std::to_string(b) + " has fewer than 10 rows");

    Eigen::MatrixXd Xtr(train.size(), m), Xte(test.size(), m);
    for (std::size_t r = 0; r < train.size(); ++r) Xtr.row(r) = X.row(train[r]);
    for (std::size_t r = 0; r < test.size(); ++r) Xte.row(r) = X.row(test[r]);

    // marginals re-fit on the training rows only
    std::vector<MixedMarginal> margs;
    for (int j = 0; j < m; ++j) {
      std::vector<double> col(Xtr.rows());
      for (int r = 0; r < Xtr.rows(); ++r) col[r] = Xtr(r, j);
      margs.push_back(fit_empirical(col, atom_candidates[j]));
    }

    RunConfig fold_run = run;
    fold_run.seed = run.seed + 7919 * (b + 1);
    ScoreAccum acc;
    run_chain(Xtr, margs, spec, prior, fold_run, &Xte, &acc);

    double fold_lpds = acc.log_mean.sum();
    score.per_fold[b] = fold_lpds;
    // delta-method MC error: Var(log phat_j) ~ (E f^2 / (E f)^2 - 1) / T
    const double T = static_cast<double>(run.keep);
    for (int j = 0; j < acc.log_mean.size(); ++j) {
      double r = std::exp(acc.log_mean_sq[j] - 2.0 * acc.log_mean[j]);
      se2 += std::max(0.0, r - 1.0) / T;
    }
  }
  score.lpds_cv = score.per_fold.sum();
  score.mc_se = std::sqrt(se2);
  return score;
}

}  // namespace mixcop
