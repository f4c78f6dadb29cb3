#include "mixcop/measures.hpp"

#include <algorithm>
#include <cmath>

#include "mixcop/errors.hpp"
#include "mixcop/likelihood.hpp"

namespace mixcop {

namespace {

double interp_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * (static_cast<double>(v.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(v.size() - 1, lo + 1);
  const double t = pos - static_cast<double>(lo);
  return (1.0 - t) * v[lo] + t * v[hi];
}

int class_of(double y, const Eigen::VectorXd& bounds) {
  int c = 0;
  while (c < bounds.size() && y >= bounds[c]) ++c;
  return c;
}

}  // namespace

Eigen::VectorXd class_boundaries(const Eigen::VectorXd& sample, int classes) {
  if (classes < 2) throw UsageError("class_boundaries: need >= 2 classes");
  std::vector<double> v(sample.data(), sample.data() + sample.size());
  Eigen::VectorXd b(classes - 1);
  for (int k = 1; k < classes; ++k)
    b[k - 1] = interp_quantile(v, static_cast<double>(k) / classes);
  for (int k = 1; k < classes - 1; ++k)
    if (!(b[k] > b[k - 1]))
      throw DataError("class_boundaries: ties make boundaries non-increasing");
  return b;
}

TransitionMatrix transition_matrix_from_data(const Eigen::VectorXd& y1,
                                             const Eigen::VectorXd& y2,
                                             const Eigen::VectorXd& bounds1,
                                             const Eigen::VectorXd& bounds2) {
  if (y1.size() != y2.size())
    throw std::invalid_argument("transition_matrix: column length mismatch");
  const int m = static_cast<int>(bounds1.size()) + 1;
  if (bounds2.size() + 1 != m)
    throw std::invalid_argument("transition_matrix: class count mismatch");
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index r = 0; r < y1.size(); ++r)
    counts(class_of(y1[r], bounds1), class_of(y2[r], bounds2)) += 1.0;

  TransitionMatrix out;
  out.bounds1 = bounds1;
  out.bounds2 = bounds2;
  out.P = Eigen::MatrixXd::Zero(m, m);
  out.row_defined.assign(m, false);
  for (int i = 0; i < m; ++i) {
    double rowsum = counts.row(i).sum();
    if (rowsum > 0.0) {
      out.P.row(i) = counts.row(i) / rowsum;
      out.row_defined[i] = true;
    }
  }
  return out;
}

TransitionMatrix transition_matrix_from_model(
    const Copula& cop, const std::vector<MixedMarginal>& margs, int i, int j,
    const Eigen::VectorXd& bounds1, const Eigen::VectorXd& bounds2, int n_mc,
    Rng& rng) {
  Eigen::RowVectorXd row(cop.dim());
  Eigen::VectorXd y1(n_mc), y2(n_mc);
  for (int r = 0; r < n_mc; ++r) {
    cop.sample_row(rng, row);
    y1[r] = margs[i].quantile(row[i]);
    y2[r] = margs[j].quantile(row[j]);
  }
  return transition_matrix_from_data(y1, y2, bounds1, bounds2);
}

double shorrocks_m1(const Eigen::MatrixXd& P) {
  const int m = static_cast<int>(P.rows());
  if (m < 2 || P.cols() != m)
    throw std::invalid_argument("shorrocks_m1: need a square matrix, m >= 2");
  return (m - P.trace()) / (m - 1.0);
}

ZeroTransition zero_transition_probs(const Copula& cop,
                                     const std::vector<MixedMarginal>& margs,
                                     int i, int j) {
  const double mass1 = margs[i].atom_mass(0.0);
  const double mass2 = margs[j].atom_mass(0.0);
  if (!(mass1 > 0.0) || !(mass2 > 0.0))
    throw DataError(
        "zero_transition_probs: both margins need a point mass at 0; a model "
        "without it cannot produce these estimates");
  const double a1 = margs[i].cdf_left(0.0), b1 = margs[i].cdf(0.0);
  const double a2 = margs[j].cdf_left(0.0), b2 = margs[j].cdf(0.0);
  IndexList pair{i, j};
  auto corner = [&](double u1, double u2) {
    Eigen::VectorXd u(2);
    u << u1, u2;
    return cop.cdf(u, pair);
  };
  ZeroTransition out;
  out.both_zero =
      corner(b1, b2) - corner(a1, b2) - corner(b1, a2) + corner(a1, a2);
  out.zero_to_positive_joint = mass1 - out.both_zero;
  out.positive_to_zero_joint = mass2 - out.both_zero;
  out.both_positive = 1.0 - mass1 - mass2 + out.both_zero;
  out.stay_zero = out.both_zero / mass1;
  out.zero_to_positive = 1.0 - out.stay_zero;
  out.positive_to_zero = out.positive_to_zero_joint / (1.0 - mass1);
  out.stay_positive = 1.0 - out.positive_to_zero;
  return out;
}

double fgt(const Eigen::VectorXd& incomes, double z, int alpha) {
  if (!(z > 0.0)) throw std::invalid_argument("fgt: poverty line must be > 0");
  double s = 0.0;
  for (Eigen::Index r = 0; r < incomes.size(); ++r) {
    if (incomes[r] <= z)
      s += std::pow((z - incomes[r]) / z, static_cast<double>(alpha));
  }
  return s / static_cast<double>(incomes.size());
}

double foster_chronic(const Eigen::MatrixXd& panel, double z, double tau,
                      int alpha) {
  if (!(z > 0.0))
    throw std::invalid_argument("foster_chronic: poverty line must be > 0");
  if (!(tau > 0.0 && tau <= 1.0))
    throw std::invalid_argument("foster_chronic: tau must be in (0,1]");
  const int n = static_cast<int>(panel.rows());
  const int T = static_cast<int>(panel.cols());
  double grand = 0.0;
  for (int r = 0; r < n; ++r) {
    int poor = 0;
    for (int t = 0; t < T; ++t)
      if (panel(r, t) <= z) ++poor;
    const double d = static_cast<double>(poor) / T;
    if (d < tau) continue;  // censored to zero
    for (int t = 0; t < T; ++t)
      if (panel(r, t) <= z)
        grand += std::pow((z - panel(r, t)) / z, static_cast<double>(alpha));
  }
  return grand / (static_cast<double>(n) * T);
}

Eigen::MatrixXd simulate_panel(const Copula& cop,
                               const std::vector<MixedMarginal>& margs, int n,
                               Rng& rng) {
  const int m = cop.dim();
  if (static_cast<int>(margs.size()) != m)
    throw std::invalid_argument("simulate_panel: marginal count mismatch");
  Eigen::MatrixXd X(n, m);
  Eigen::RowVectorXd u(m);
  for (int i = 0; i < n; ++i) {
    cop.sample_row(rng, u);
    for (int j = 0; j < m; ++j) X(i, j) = margs[j].quantile(u[j]);
  }
  return X;
}

void FunctionalSpec::validate(int m) const {
  auto pair_ok = [&]() {
    return i >= 0 && j >= 0 && i < m && j < m && i != j;
  };
  if (name == "spearman" || name == "shorrocks" || name == "zero_transition") {
    if (!pair_ok()) throw UsageError(name + ": bad column pair");
    if (name == "shorrocks" && classes < 2)
      throw UsageError("shorrocks: need >= 2 classes");
    if (name == "zero_transition" && which != "stay_zero" &&
        which != "zero_to_positive" && which != "positive_to_zero" &&
        which != "stay_positive")
      throw UsageError("zero_transition: unknown component " + which);
  } else if (name == "fgt") {
    if (column < 0 || column >= m) throw UsageError("fgt: bad column");
    if (!(z > 0.0)) throw UsageError("fgt: poverty line must be > 0");
  } else if (name == "foster") {
    if (!(z > 0.0)) throw UsageError("foster: poverty line must be > 0");
    if (!(tau > 0.0 && tau <= 1.0))
      throw UsageError("foster: tau must be in (0,1]");
    int last = last_col < 0 ? m - 1 : last_col;
    if (first_col < 0 || last >= m || first_col > last)
      throw UsageError("foster: bad column range");
  } else {
    throw UsageError(
        "unknown measure '" + name +
        "'; valid: spearman, shorrocks, zero_transition, fgt, foster");
  }
}

double evaluate_functional(const Copula& cop, const FunctionalSpec& spec,
                           const std::vector<MixedMarginal>& margs, int n_mc,
                           Rng rng) {
  if (spec.name == "spearman") {
    return spearman_rho(cop, spec.i, spec.j, n_mc, rng).rho;
  }
  if (spec.name == "zero_transition") {
    ZeroTransition zt = zero_transition_probs(cop, margs, spec.i, spec.j);
    if (spec.which == "stay_zero") return zt.stay_zero;
    if (spec.which == "zero_to_positive") return zt.zero_to_positive;
    if (spec.which == "positive_to_zero") return zt.positive_to_zero;
    return zt.stay_positive;
  }
  if (spec.name == "shorrocks") {
    Eigen::VectorXd b1(spec.classes - 1), b2(spec.classes - 1);
    for (int k = 1; k < spec.classes; ++k) {
      double p = static_cast<double>(k) / spec.classes;
      b1[k - 1] = margs[spec.i].quantile(p);
      b2[k - 1] = margs[spec.j].quantile(p);
    }
    TransitionMatrix tm = transition_matrix_from_model(
        cop, margs, spec.i, spec.j, b1, b2, n_mc, rng);
    return shorrocks_m1(tm.P);
  }
  if (spec.name == "fgt") {
    Eigen::VectorXd col(n_mc);
    for (int r = 0; r < n_mc; ++r)
      col[r] = margs[spec.column].quantile(rng.uniform());
    return fgt(col, spec.z, spec.alpha);
  }
  // foster
  Eigen::MatrixXd panel = simulate_panel(cop, margs, n_mc, rng);
  int last = spec.last_col < 0 ? cop.dim() - 1 : spec.last_col;
  Eigen::MatrixXd slice =
      panel.middleCols(spec.first_col, last - spec.first_col + 1);
  return foster_chronic(slice, spec.z, spec.tau, spec.alpha);
}

PosteriorSummary posterior_functional(const PosteriorDraws& draws,
                                      const FunctionalSpec& spec,
                                      const std::vector<MixedMarginal>& margs,
                                      int n_mc, std::uint64_t seed,
                                      int workers) {
  spec.validate(draws.m);
  const int T = draws.n_kept();
  if (T < 1) throw UsageError("posterior_functional: no draws");
  PosteriorSummary out;
  out.per_draw.resize(T);
  parallel_for_rows(T, workers, [&](int t) {
    MixtureCopula cop = copula_from_draw(draws, t);
    // identical stream for every draw: common random numbers
    out.per_draw[t] =
        evaluate_functional(cop, spec, margs, n_mc, Rng::derive(seed, 0xc12, 0));
  });
  out.mean = out.per_draw.mean();
  std::vector<double> v(out.per_draw.data(), out.per_draw.data() + T);
  out.lo = interp_quantile(v, 0.025);
  out.hi = interp_quantile(v, 0.975);
  return out;
}

}  // namespace mixcop
