#include "mixcop/latent.hpp"

#include <cmath>

#include "mixcop/errors.hpp"

namespace mixcop {

namespace {

// truncation interval [C(a|cond), C(b|cond)) of one coordinate
struct Interval {
  double lo, hi;
};

Interval truncation_interval(const Copula& cop, int j, double a, double b,
                             const Eigen::VectorXd& cond_u,
                             const IndexList& cond_idx) {
  Eigen::VectorXd point(1);
  IndexList A{j};
  Interval iv;
  point[0] = a;
  iv.lo = (a <= 0.0) ? 0.0 : cop.conditional_cdf(point, A, cond_u, cond_idx);
  point[0] = b;
  iv.hi = (b >= 1.0) ? 1.0 : cop.conditional_cdf(point, A, cond_u, cond_idx);
  return iv;
}

}  // namespace

LatentState init_latent(const std::vector<MixedMarginal>& margs,
                        const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int m = static_cast<int>(X.cols());
  if (static_cast<int>(margs.size()) != m)
    throw std::invalid_argument("init_latent: marginal count mismatch");
  LatentState st;
  st.u.resize(n, m);
  st.parts.reserve(n);
  for (int i = 0; i < n; ++i) {
    st.parts.push_back(partition(margs, X.row(i)));
    const PartitionResult& p = st.parts.back();
    for (int j = 0; j < m; ++j) {
      // midpoint start for jump coordinates, pinned PIT elsewhere
      st.u(i, j) = margs[j].is_atom(X(i, j))
                       ? 0.5 * (p.lower[j] + p.upper[j])
                       : p.upper[j];
    }
  }
  return st;
}

BlockProposal propose_block(const Copula& cop, const PartitionResult& part,
                            Rng& rng, const IndexList* ordering) {
  const IndexList& order = ordering ? *ordering : part.discrete_idx;
  const auto& C = part.continuous_idx;
  const int k = static_cast<int>(order.size());

  BlockProposal out;
  out.u_new.resize(k);
  out.log_interval_prod = 0.0;
  if (k == 0) return out;

  // conditioning set grows by one drawn coordinate per step
  Eigen::VectorXd cond_u(C.size() + k);
  IndexList cond_idx;
  cond_idx.reserve(C.size() + k);
  for (std::size_t i = 0; i < C.size(); ++i) {
    cond_u[i] = part.upper[C[i]];
    cond_idx.push_back(C[i]);
  }

  for (int step = 0; step < k; ++step) {
    const int j = order[step];
    const double a = part.lower[j], b = part.upper[j];
    Eigen::VectorXd cu = cond_u.head(cond_idx.size());
    Interval iv = truncation_interval(cop, j, a, b, cu, cond_idx);
    double width = iv.hi - iv.lo;
    double u_j;
    if (!(width > 1e-300)) {
      u_j = 0.5 * (a + b);  // fall back to the midpoint and flag
      out.degenerate = true;
      diagnostics().latent_degenerate++;
      out.log_interval_prod += std::log(1e-300);
    } else {
      double w = iv.lo + rng.uniform() * width;
      u_j = cop.conditional_quantile(w, j, cu, cond_idx);
      u_j = std::min(std::nextafter(b, 0.0), std::max(u_j, a + 1e-300));
      out.log_interval_prod += std::log(width);
    }
    out.u_new[step] = u_j;
    cond_u[cond_idx.size()] = u_j;
    cond_idx.push_back(j);
  }
  return out;
}

namespace {

// sum_k log[C(b_k | prefix, b_C) - C(a_k | prefix, b_C)] for a given latent
double truncation_log_product(const Copula& cop, const PartitionResult& part,
                              const Eigen::VectorXd& u, const IndexList& order,
                              bool& underflow) {
  const auto& C = part.continuous_idx;
  const int k = static_cast<int>(order.size());
  Eigen::VectorXd cond_u(C.size() + k);
  IndexList cond_idx;
  cond_idx.reserve(C.size() + k);
  for (std::size_t i = 0; i < C.size(); ++i) {
    cond_u[i] = part.upper[C[i]];
    cond_idx.push_back(C[i]);
  }
  double total = 0.0;
  for (int step = 0; step < k; ++step) {
    const int j = order[step];
    Eigen::VectorXd cu = cond_u.head(cond_idx.size());
    Interval iv =
        truncation_interval(cop, j, part.lower[j], part.upper[j], cu, cond_idx);
    double width = iv.hi - iv.lo;
    if (!(width > 0.0)) {
      underflow = true;
      return -std::numeric_limits<double>::infinity();
    }
    total += std::log(width);
    cond_u[cond_idx.size()] = u[step];
    cond_idx.push_back(j);
  }
  return total;
}

}  // namespace

double mh_accept_ratio(const Copula& cop, const PartitionResult& part,
                       const Eigen::VectorXd& u_new,
                       const Eigen::VectorXd& u_old, const IndexList* ordering) {
  const IndexList& order = ordering ? *ordering : part.discrete_idx;
  if (u_new.size() != static_cast<Eigen::Index>(order.size()) ||
      u_old.size() != u_new.size())
    throw std::invalid_argument("mh_accept_ratio: length mismatch");
  if (order.empty()) return 1.0;
  bool under_new = false, under_old = false;
  double log_new = truncation_log_product(cop, part, u_new, order, under_new);
  double log_old = truncation_log_product(cop, part, u_old, order, under_old);
  if (under_old) {
    // zero denominator: reject and flag
    diagnostics().latent_zero_ratio++;
    return 0.0;
  }
  return std::exp(log_new - log_old);
}

bool refresh_row_mh(const Copula& cop, const PartitionResult& part,
                    RowRef u_row, Rng& rng) {
  const IndexList& D = part.discrete_idx;
  if (D.empty()) return true;
  BlockProposal prop = propose_block(cop, part, rng);

  Eigen::VectorXd u_old(D.size());
  for (std::size_t i = 0; i < D.size(); ++i) u_old[i] = u_row[D[i]];

  bool under_old = false;
  double log_old = truncation_log_product(cop, part, u_old, D, under_old);
  double log_alpha = prop.log_interval_prod - log_old;
  bool accept;
  if (under_old) {
    diagnostics().latent_zero_ratio++;
    accept = false;
  } else {
    accept = (log_alpha >= 0.0) || (std::log(rng.uniform()) < log_alpha);
  }
  if (accept)
    for (std::size_t i = 0; i < D.size(); ++i) u_row[D[i]] = prop.u_new[i];
  return accept;
}

void gibbs_single_margin(const Copula& cop, const PartitionResult& part,
                         RowRef u_row, int j, Rng& rng) {
  const int m = static_cast<int>(u_row.size());
  const double a = part.lower[j], b = part.upper[j];
  if (!(a < b))
    throw std::invalid_argument("gibbs_single_margin: j is not a jump index");
  IndexList rest;
  rest.reserve(m - 1);
  for (int l = 0; l < m; ++l)
    if (l != j) rest.push_back(l);
  Eigen::VectorXd u_rest(m - 1);
  for (int l = 0; l < m - 1; ++l) u_rest[l] = u_row[rest[l]];

  Interval iv = truncation_interval(cop, j, a, b, u_rest, rest);
  double width = iv.hi - iv.lo;
  if (!(width > 1e-300)) {
    diagnostics().latent_degenerate++;
    return;  // keep the current value
  }
  double w = iv.lo + rng.uniform() * width;
  double u_j = cop.conditional_quantile(w, j, u_rest, rest);
  u_row[j] = std::min(std::nextafter(b, 0.0), std::max(u_j, a + 1e-300));
}

void refresh_row_gibbs(const Copula& cop, const PartitionResult& part,
                       RowRef u_row, Rng& rng) {
  for (int j : part.discrete_idx) gibbs_single_margin(cop, part, u_row, j, rng);
}

}  // namespace mixcop
