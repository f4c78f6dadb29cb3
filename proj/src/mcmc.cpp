#include "mixcop/mcmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "mixcop/errors.hpp"
#include "mixcop/likelihood.hpp"
#include "mixcop/special.hpp"

namespace mixcop {

namespace {
constexpr double kRMax = 50.0;  // hard bound on free Cholesky elements
}

std::string family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::clayton: return "clayton";
    case Family::gumbel: return "gumbel";
  }
  return "?";
}

Family family_from_name(const std::string& s) {
  if (s == "gaussian") return Family::gaussian;
  if (s == "clayton") return Family::clayton;
  if (s == "gumbel") return Family::gumbel;
  throw UsageError("unknown copula family: " + s);
}

void ModelSpec::validate() const {
  if (components.empty())
    throw UsageError("model spec: at least one component required");
  for (std::size_t i = 0; i < components.size(); ++i)
    for (std::size_t j = i + 1; j < components.size(); ++j)
      if (components[i] == components[j])
        throw UsageError("model spec: duplicate component family");
}

bool ModelSpec::has(Family f) const { return index_of(f) >= 0; }

int ModelSpec::index_of(Family f) const {
  for (std::size_t i = 0; i < components.size(); ++i)
    if (components[i] == f) return static_cast<int>(i);
  return -1;
}

std::string ModelSpec::describe() const {
  std::string s;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) s += "+";
    s += family_name(components[i]);
  }
  return s;
}

void PriorConfig::validate(int n_components) const {
  if (dirichlet_phi.size() != n_components)
    throw UsageError("prior: dirichlet_phi length must match component count");
  for (Eigen::Index i = 0; i < dirichlet_phi.size(); ++i)
    if (!(dirichlet_phi[i] > 0.0))
      throw UsageError("prior: dirichlet_phi entries must be positive");
  for (double v : {clayton_shape, clayton_rate, gumbel_shape, gumbel_rate,
                   step_theta_cl, step_theta_gu, step_r})
    if (!(v > 0.0)) throw UsageError("prior: all scalars must be positive");
}

void RunConfig::validate() const {
  if (keep < 1) throw UsageError("run: zero kept draws requested");
  if (burnin < 0 || thin < 1) throw UsageError("run: bad burnin/thinning");
  if (!(adapt_target >= 0.3 && adapt_target <= 0.4))
    throw UsageError("run: adapt_target must lie in [0.3, 0.4]");
  if (workers < 0) throw UsageError("run: workers must be >= 0");
}

RobbinsMonroStep::RobbinsMonroStep(double sigma0, double target, double lo,
                                   double hi)
    : sigma_(sigma0), target_(target), lo_(lo), hi_(hi) {}

void RobbinsMonroStep::record(bool accepted) {
  batch_props_++;
  total_props_++;
  if (accepted) {
    batch_acc_++;
    total_acc_++;
  }
}

void RobbinsMonroStep::maybe_adapt() {
  if (frozen_ || batch_props_ < 50) return;
  double rate = static_cast<double>(batch_acc_) / batch_props_;
  batches_++;
  sigma_ *= std::exp((rate - target_) / std::sqrt(static_cast<double>(batches_)));
  sigma_ = std::min(hi_, std::max(lo_, sigma_));
  batch_props_ = batch_acc_ = 0;
}

double RobbinsMonroStep::acceptance_rate() const {
  return total_props_ ? static_cast<double>(total_acc_) / total_props_ : 0.0;
}

// ---------------------------------------------------------------------------

MixtureSampler::MixtureSampler(Eigen::MatrixXd X,
                               std::vector<MixedMarginal> margs, ModelSpec spec,
                               PriorConfig prior, RunConfig run)
    : X_(std::move(X)),
      margs_(std::move(margs)),
      spec_(std::move(spec)),
      prior_(std::move(prior)),
      run_(run) {
  spec_.validate();
  K_ = static_cast<int>(spec_.components.size());
  if (prior_.dirichlet_phi.size() == 0)
    prior_.dirichlet_phi = Eigen::VectorXd::Ones(K_);
  prior_.validate(K_);
  run_.validate();

  n_ = static_cast<int>(X_.rows());
  m_ = static_cast<int>(X_.cols());
  if (n_ < 1) throw DataError("mcmc: empty dataset");
  if (static_cast<int>(margs_.size()) != m_)
    throw UsageError("mcmc: marginal count mismatch");

  LatentState ls = init_latent(margs_, X_);
  state_.latent = std::move(ls.u);
  parts_ = std::move(ls.parts);

  marginal_log_const_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    double c = 0.0;
    for (int j : parts_[i].continuous_idx)
      c += std::log(margs_[j].continuous_density(X_(i, j)));
    marginal_log_const_[i] = c;
  }

  state_.w = Eigen::VectorXd::Constant(K_, 1.0 / K_);
  state_.theta_cl = 1.0;
  state_.theta_gu = 1.5;
  state_.R = Eigen::MatrixXd::Identity(m_, m_);
  state_.gamma = Eigen::MatrixXd::Identity(m_, m_);
  state_.d.assign(n_, 0);

  comp_.resize(K_);
  for (Family f : spec_.components) rebuild_component(f);

  step_cl_ = RobbinsMonroStep(prior_.step_theta_cl, run_.adapt_target);
  step_gu_ = RobbinsMonroStep(prior_.step_theta_gu, run_.adapt_target);
  step_r_.assign(m_ * (m_ - 1) / 2,
                 RobbinsMonroStep(prior_.step_r, run_.adapt_target, 1e-3, 5.0));

  // spread the starting indicators with one conditional draw
  step_indicators();
}

Rng MixtureSampler::row_rng(int row, int salt) const {
  return Rng::derive(run_.seed, static_cast<std::uint64_t>(state_.sweep) + 1,
                     static_cast<std::uint64_t>(row) + 1,
                     static_cast<std::uint64_t>(salt));
}

Rng MixtureSampler::sweep_rng(int salt) const {
  return Rng::derive(run_.seed, static_cast<std::uint64_t>(state_.sweep) + 1, 0,
                     static_cast<std::uint64_t>(salt) + 100);
}

void MixtureSampler::rebuild_component(Family f) {
  int k = spec_.index_of(f);
  switch (f) {
    case Family::gaussian:
      comp_[k] = std::make_shared<GaussianCopula>(state_.gamma);
      break;
    case Family::clayton:
      comp_[k] = std::make_shared<ClaytonCopula>(state_.theta_cl, m_);
      break;
    case Family::gumbel:
      comp_[k] = std::make_shared<GumbelCopula>(state_.theta_gu, m_);
      break;
  }
}

std::shared_ptr<const Copula> MixtureSampler::component_copula(Family f) const {
  int k = spec_.index_of(f);
  if (k < 0) throw UsageError("component_copula: family not in model");
  return comp_[k];
}

MixtureCopula MixtureSampler::current_copula() const {
  std::vector<MixtureCopula::Component> cs;
  for (int k = 0; k < K_; ++k) cs.push_back({state_.w[k], comp_[k]});
  return MixtureCopula(std::move(cs));
}

void MixtureSampler::step_indicators() {
  if (K_ == 1) {
    std::fill(state_.d.begin(), state_.d.end(), 0);
    return;
  }
  Eigen::VectorXd logw(K_);
  for (int k = 0; k < K_; ++k) logw[k] = std::log(state_.w[k]);
  std::vector<int> draws(n_);
  std::atomic<bool> failed{false};
  parallel_for_rows(n_, run_.workers, [&](int i) {
    Eigen::VectorXd lp = logw;
    if (!run_.likelihood_off) {
      for (int k = 0; k < K_; ++k)
        lp[k] += comp_[k]->log_pdf(state_.latent.row(i));
    }
    double lse = log_sum_exp(lp);
    if (!std::isfinite(lse)) {
      failed = true;
      return;
    }
    Eigen::VectorXd p = (lp.array() - lse).exp();
    Rng rng = row_rng(i, 1);
    draws[i] = rng.categorical(p);
  });
  if (failed)
    throw NumericalError("step_indicators: all component densities vanished "
                         "for some row (sweep " +
                         std::to_string(state_.sweep) + ")");
  state_.d = std::move(draws);
}

void MixtureSampler::step_weights() {
  if (K_ == 1) {
    state_.w[0] = 1.0;
    return;
  }
  Eigen::VectorXd alpha = prior_.dirichlet_phi;
  for (int i = 0; i < n_; ++i) alpha[state_.d[i]] += 1.0;
  Rng rng = sweep_rng(0);
  state_.w = rng.dirichlet(alpha);
}

void MixtureSampler::step_theta(Family which) {
  if (!spec_.has(which) || which == Family::gaussian) return;
  const bool clayton = (which == Family::clayton);
  const int kc = spec_.index_of(which);
  RobbinsMonroStep& step = clayton ? step_cl_ : step_gu_;
  double& theta = clayton ? state_.theta_cl : state_.theta_gu;

  Rng rng = sweep_rng(clayton ? 1 : 2);
  const double prop = theta + step.sigma() * rng.normal();
  const double u_accept = rng.uniform();  // fixed stream consumption

  const bool in_domain = clayton ? (prop > 0.0) : (prop >= 1.0);
  bool accept = false;
  if (in_domain) {
    double delta;
    if (run_.likelihood_off) {
      delta = 0.0;
    } else {
      std::shared_ptr<const Copula> cand =
          clayton ? std::static_pointer_cast<const Copula>(
                        std::make_shared<ClaytonCopula>(prop, m_))
                  : std::static_pointer_cast<const Copula>(
                        std::make_shared<GumbelCopula>(prop, m_));
      Eigen::VectorXd diff = Eigen::VectorXd::Zero(n_);
      parallel_for_rows(n_, run_.workers, [&](int i) {
        if (state_.d[i] != kc) return;
        diff[i] = cand->log_pdf(state_.latent.row(i)) -
                  comp_[kc]->log_pdf(state_.latent.row(i));
      });
      delta = 0.0;
      for (int i = 0; i < n_; ++i) delta += diff[i];
    }
    // gamma prior on theta (Clayton) resp. theta-1 (Gumbel)
    double shape = clayton ? prior_.clayton_shape : prior_.gumbel_shape;
    double rate = clayton ? prior_.clayton_rate : prior_.gumbel_rate;
    double cur_v = clayton ? theta : theta - 1.0;
    double prop_v = clayton ? prop : prop - 1.0;
    if (prop_v <= 0.0 && shape != 1.0) {
      accept = false;  // log prior undefined at the boundary
    } else {
      double lp = (shape - 1.0) * (prop_v > 0.0 ? std::log(prop_v) : 0.0) -
                  rate * prop_v;
      double lc = (shape - 1.0) * (cur_v > 0.0 ? std::log(cur_v) : 0.0) -
                  rate * cur_v;
      delta += lp - lc;
      accept = std::log(u_accept) < delta;
    }
  }
  step.record(accept);
  if (state_.sweep < run_.burnin) step.maybe_adapt();
  if (accept) {
    theta = prop;
    rebuild_component(which);
  }
}

void MixtureSampler::step_correlation() {
  if (!spec_.has(Family::gaussian) || m_ < 2) return;
  const int kg = spec_.index_of(Family::gaussian);

  // scatter of the transformed latents over Gaussian-assigned rows
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m_, m_);
  long ng = 0;
  if (!run_.likelihood_off) {
    Eigen::VectorXd z(m_);
    for (int i = 0; i < n_; ++i) {  // cheap enough to stay sequential
      if (state_.d[i] != kg) continue;
      ++ng;
      for (int j = 0; j < m_; ++j) z[j] = norm_quantile(state_.latent(i, j));
      S.selfadjointView<Eigen::Lower>().rankUpdate(z);
    }
    S.triangularView<Eigen::StrictlyUpper>() = S.transpose();
  }

  auto gamma_of = [&](const Eigen::MatrixXd& R) {
    Eigen::MatrixXd sigma = R.transpose() * R;
    Eigen::VectorXd isd = sigma.diagonal().array().rsqrt();
    Eigen::MatrixXd g = isd.asDiagonal() * sigma * isd.asDiagonal();
    g.diagonal().setOnes();
    return g;
  };
  // log of prod_{i: gaussian} c_G(u_i; Gamma) up to the constant tr(S)
  auto log_target = [&](const Eigen::MatrixXd& gamma, bool& ok) {
    if (run_.likelihood_off || ng == 0) {
      ok = true;
      return 0.0;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gamma);
    if (llt.info() != Eigen::Success) {
      ok = false;
      return 0.0;
    }
    double logdet = 0.0;
    for (int i = 0; i < m_; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    double tr = llt.solve(S).trace();
    ok = true;
    return -0.5 * (ng * logdet + tr);
  };

  Rng rng = sweep_rng(3);
  bool cur_ok = true;
  double cur_lt = log_target(state_.gamma, cur_ok);
  int elem = 0;
  for (int jstar = 0; jstar < m_; ++jstar) {
    for (int j = jstar + 1; j < m_; ++j, ++elem) {
      RobbinsMonroStep& step = step_r_[elem];
      const double r_old = state_.R(jstar, j);
      const double r_prop = r_old + step.sigma() * rng.normal();
      const double u_accept = rng.uniform();
      bool accept = false;
      if (std::fabs(r_prop) <= kRMax) {
        state_.R(jstar, j) = r_prop;
        Eigen::MatrixXd gamma_prop = gamma_of(state_.R);
        bool ok = true;
        double lt = log_target(gamma_prop, ok);
        if (ok && std::log(u_accept) < lt - cur_lt) {
          accept = true;
          state_.gamma = std::move(gamma_prop);
          cur_lt = lt;
        } else {
          state_.R(jstar, j) = r_old;
        }
      }
      step.record(accept);
      if (state_.sweep < run_.burnin) step.maybe_adapt();
    }
  }
  rebuild_component(Family::gaussian);
}

void MixtureSampler::refresh_latent() {
  if (run_.likelihood_off) return;  // latents are not part of the prior check
  MixtureCopula mix = current_copula();
  std::atomic<long> acc{0}, props{0};
  parallel_for_rows(n_, run_.workers, [&](int i) {
    if (parts_[i].discrete_idx.empty()) return;
    Rng rng = row_rng(i, 2);
    props++;
    if (run_.latent_kernel == RunConfig::LatentKernel::gibbs_single) {
      refresh_row_gibbs(mix, parts_[i], state_.latent.row(i), rng);
      acc++;
    } else {
      if (refresh_row_mh(mix, parts_[i], state_.latent.row(i), rng)) acc++;
    }
  });
  latent_props_ += props.load();
  latent_acc_ += acc.load();
}

void MixtureSampler::sweep() {
  step_indicators();
  step_weights();
  step_correlation();
  step_theta(Family::clayton);
  step_theta(Family::gumbel);
  refresh_latent();
  check_invariants();
  state_.sweep++;
}

void MixtureSampler::freeze_adaptation() {
  step_cl_.freeze();
  step_gu_.freeze();
  for (auto& s : step_r_) s.freeze();
}

void MixtureSampler::check_invariants() const {
  if (std::fabs(state_.w.sum() - 1.0) > 1e-12)
    throw NumericalError("invariant violated at sweep " +
                         std::to_string(state_.sweep) + ": weights off simplex");
  if (!(state_.theta_cl > 0.0) || !(state_.theta_gu >= 1.0))
    throw NumericalError("invariant violated at sweep " +
                         std::to_string(state_.sweep) + ": theta out of domain");
  for (int i = 0; i < n_; ++i)
    for (int j : parts_[i].discrete_idx) {
      double u = state_.latent(i, j);
      if (!(u >= parts_[i].lower[j] && u < parts_[i].upper[j]))
        throw NumericalError(
            "invariant violated at sweep " + std::to_string(state_.sweep) +
            ": latent out of bounds at row " + std::to_string(i));
    }
}

void MixtureSampler::per_row_loglik(const Eigen::MatrixXd& rows,
                                    const std::vector<PartitionResult>& parts,
                                    Eigen::VectorXd& out) const {
  MixtureCopula mix = current_copula();
  const int nr = static_cast<int>(rows.rows());
  out.resize(nr);
  parallel_for_rows(nr, run_.workers, [&](int i) {
    out[i] = log_likelihood_point(mix, margs_, rows.row(i), parts[i]).log_density;
  });
}

double MixtureSampler::data_loglik() const {
  MixtureCopula mix = current_copula();
  Eigen::VectorXd rowll(n_);
  parallel_for_rows(n_, run_.workers, [&](int i) {
    LikelihoodTerm t = log_likelihood_point(mix, margs_, X_.row(i), parts_[i]);
    rowll[i] = t.log_continuous_part + t.log_rectangle_mass;
  });
  double total = 0.0;
  for (int i = 0; i < n_; ++i) total += rowll[i];
  return total;
}

AcceptanceRates MixtureSampler::acceptance_rates() const {
  AcceptanceRates r;
  r.theta_cl = step_cl_.acceptance_rate();
  r.theta_gu = step_gu_.acceptance_rate();
  double rsum = 0.0;
  for (const auto& s : step_r_) rsum += s.acceptance_rate();
  r.correlation = step_r_.empty() ? 0.0 : rsum / step_r_.size();
  r.latent = latent_props_ ? static_cast<double>(latent_acc_) / latent_props_
                           : 0.0;
  return r;
}

// ---------------------------------------------------------------------------

MixtureCopula copula_from_draw(const PosteriorDraws& draws, int t) {
  if (t < 0 || t >= draws.n_kept())
    throw std::invalid_argument("copula_from_draw: draw index out of range");
  std::vector<MixtureCopula::Component> comps;
  for (std::size_t k = 0; k < draws.components.size(); ++k) {
    std::shared_ptr<const Copula> c;
    switch (draws.components[k]) {
      case Family::gaussian: {
        Eigen::MatrixXd gamma = Eigen::MatrixXd::Identity(draws.m, draws.m);
        int e = 0;
        for (int i = 0; i < draws.m; ++i)
          for (int j = i + 1; j < draws.m; ++j, ++e)
            gamma(i, j) = gamma(j, i) = draws.gamma_upper(t, e);
        c = std::make_shared<GaussianCopula>(gamma);
        break;
      }
      case Family::clayton:
        c = std::make_shared<ClaytonCopula>(draws.theta_cl[t], draws.m);
        break;
      case Family::gumbel:
        c = std::make_shared<GumbelCopula>(draws.theta_gu[t], draws.m);
        break;
    }
    comps.push_back({draws.weights(t, k), std::move(c)});
  }
  return MixtureCopula(std::move(comps));
}

PosteriorDraws run_chain(const Eigen::MatrixXd& X,
                         const std::vector<MixedMarginal>& margs,
                         const ModelSpec& spec, const PriorConfig& prior,
                         const RunConfig& run,
                         const Eigen::MatrixXd* score_rows,
                         ScoreAccum* score_out) {
  MixtureSampler sampler(X, margs, spec, prior, run);
  const int n = static_cast<int>(X.rows());
  const int m = static_cast<int>(X.cols());
  const int K = static_cast<int>(spec.components.size());
  const int n_upper = m * (m - 1) / 2;

  PosteriorDraws out;
  out.components = spec.components;
  out.m = m;
  out.n_obs = n;
  out.seed = run.seed;
  out.burnin = run.burnin;
  out.keep = run.keep;
  out.thin = run.thin;
  out.weights.resize(run.keep, K);
  if (spec.has(Family::clayton)) out.theta_cl.resize(run.keep);
  if (spec.has(Family::gumbel)) out.theta_gu.resize(run.keep);
  if (spec.has(Family::gaussian)) out.gamma_upper.resize(run.keep, n_upper);
  out.loglik.resize(run.keep);

  const double neg_inf = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd pred_acc = Eigen::VectorXd::Constant(n, neg_inf);

  // clamp held-out rows into the training support before scoring
  Eigen::MatrixXd score_clamped;
  std::vector<PartitionResult> score_parts;
  Eigen::VectorXd score_acc, score_acc2;
  if (score_rows) {
    score_clamped = *score_rows;
    for (int i = 0; i < score_clamped.rows(); ++i)
      for (int j = 0; j < m; ++j)
        score_clamped(i, j) = margs[j].clamp_to_support(score_clamped(i, j));
    for (int i = 0; i < score_clamped.rows(); ++i)
      score_parts.push_back(partition(margs, score_clamped.row(i)));
    score_acc = Eigen::VectorXd::Constant(score_clamped.rows(), neg_inf);
    score_acc2 = Eigen::VectorXd::Constant(score_clamped.rows(), neg_inf);
  }

  const long total_sweeps =
      static_cast<long>(run.burnin) + static_cast<long>(run.keep) * run.thin;
  int kept = 0;
  Eigen::VectorXd row_ll;
  for (long t = 0; t < total_sweeps; ++t) {
    if (t == run.burnin) sampler.freeze_adaptation();
    sampler.sweep();
    const bool past_burnin = t >= run.burnin;
    if (!past_burnin) continue;
    const long offset = t - run.burnin;
    if ((offset + 1) % run.thin != 0) continue;

    const ChainState& st = sampler.state();
    out.weights.row(kept) = st.w;
    if (out.theta_cl.size()) out.theta_cl[kept] = st.theta_cl;
    if (out.theta_gu.size()) out.theta_gu[kept] = st.theta_gu;
    if (out.gamma_upper.size()) {
      int e = 0;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j, ++e)
          out.gamma_upper(kept, e) = st.gamma(i, j);
    }
    if (run.likelihood_off) {
      out.loglik[kept] = 0.0;
    } else {
      sampler.per_row_loglik(X, sampler.partitions(), row_ll);
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        total += row_ll[i];
        pred_acc[i] = log_sum_exp(pred_acc[i], row_ll[i]);
      }
      out.loglik[kept] = total;
      if (score_rows) {
        Eigen::VectorXd sll;
        sampler.per_row_loglik(score_clamped, score_parts, sll);
        for (int i = 0; i < sll.size(); ++i) {
          score_acc[i] = log_sum_exp(score_acc[i], sll[i]);
          score_acc2[i] = log_sum_exp(score_acc2[i], 2.0 * sll[i]);
        }
      }
    }
    ++kept;
  }

  out.pred_log_mean = pred_acc.array() - std::log(static_cast<double>(kept));
  if (score_rows && score_out) {
    score_out->log_mean =
        score_acc.array() - std::log(static_cast<double>(kept));
    score_out->log_mean_sq =
        score_acc2.array() - std::log(static_cast<double>(kept));
  }
  out.acceptance = sampler.acceptance_rates();
  return out;
}

}  // namespace mixcop
