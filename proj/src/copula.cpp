#include "mixcop/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixcop/errors.hpp"
#include "mixcop/mvn.hpp"
#include "mixcop/special.hpp"

namespace mixcop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUMin = 1e-300;
constexpr double kUMax = 1.0 - 1e-16;

void check_cdf_domain(const Eigen::VectorXd& u) {
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (!(u[i] >= 0.0 && u[i] <= 1.0))
      throw std::domain_error("copula cdf: u outside [0,1]");
}

void check_interior(const Eigen::VectorXd& u) {
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (!(u[i] > 0.0 && u[i] < 1.0))
      throw std::domain_error("copula density: u must be strictly inside (0,1)");
}

double clamp_unit(double u) { return std::min(kUMax, std::max(kUMin, u)); }

}  // namespace

IndexList all_indices(int m) {
  IndexList idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

IndexList complement(int m, const IndexList& idx) {
  std::vector<bool> in(m, false);
  for (int j : idx) in[j] = true;
  IndexList out;
  for (int j = 0; j < m; ++j)
    if (!in[j]) out.push_back(j);
  return out;
}

double Copula::cdf(const Eigen::VectorXd& u) const {
  return cdf(u, all_indices(dim()));
}

double Copula::log_pdf(const Eigen::VectorXd& u) const {
  return log_pdf(u, all_indices(dim()));
}

double Copula::pdf(const Eigen::VectorXd& u, const IndexList& idx) const {
  return std::exp(log_pdf(u, idx));
}

double Copula::pdf(const Eigen::VectorXd& u) const {
  return std::exp(log_pdf(u));
}

void Copula::check_subset(const IndexList& idx) const {
  for (int j : idx)
    if (j < 0 || j >= dim())
      throw std::invalid_argument("copula: index out of range");
}

void Copula::check_disjoint(const IndexList& A, const IndexList& B) {
  for (int a : A)
    for (int b : B)
      if (a == b)
        throw std::invalid_argument(
            "copula conditional: A and B must be disjoint");
}

Eigen::MatrixXd Copula::sample(int n, Rng& rng) const {
  Eigen::MatrixXd out(n, dim());
  for (int i = 0; i < n; ++i) sample_row(rng, out.row(i));
  return out;
}

double Copula::conditional_quantile(double tau, int j,
                                    const Eigen::VectorXd& uB,
                                    const IndexList& B) const {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::domain_error("conditional_quantile: tau must be in (0,1)");
  if (B.empty()) return tau;  // one-dimensional margins are uniform
  check_subset(B);

  IndexList AB = B;
  AB.push_back(j);
  Eigen::VectorXd uAB(uB.size() + 1);
  uAB.head(uB.size()) = uB;
  const double log_pdf_B = log_pdf(uB, B);

  Eigen::VectorXd uA(1);
  IndexList A{j};
  auto eval_cdf = [&](double x) {
    uA[0] = x;
    return conditional_cdf(uA, A, uB, B);
  };

  double lo = 1e-12, hi = 1.0 - 1e-12;
  double glo = eval_cdf(lo) - tau;
  if (glo >= 0.0) return lo;
  double ghi = eval_cdf(hi) - tau;
  if (ghi <= 0.0) return hi;

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    double g = eval_cdf(x) - tau;
    if (std::fabs(g) <= 1e-10) return x;
    if (g < 0.0)
      lo = x;
    else
      hi = x;
    if (hi - lo < 1e-15) return 0.5 * (lo + hi);
    // Newton step with the conditional density as derivative
    uAB[uB.size()] = x;
    double d = std::exp(log_pdf(uAB, AB) - log_pdf_B);
    double xn = (d > 1e-300) ? x - g / d : 0.5 * (lo + hi);
    x = (xn > lo && xn < hi) ? xn : 0.5 * (lo + hi);
  }
  throw NumericalError(
      "conditional_quantile: no convergence after 200 iterations (tau=" +
      std::to_string(tau) + ", family=" + name() + ")");
}

// ---------------------------------------------------------------------------
// Gaussian
// ---------------------------------------------------------------------------

GaussianCopula::GaussianCopula(Eigen::MatrixXd correlation)
    : gamma_(std::move(correlation)) {
  const int m = static_cast<int>(gamma_.rows());
  if (m < 2 || gamma_.cols() != m)
    throw std::invalid_argument("gaussian copula: need square matrix, m >= 2");
  for (int i = 0; i < m; ++i) {
    if (std::fabs(gamma_(i, i) - 1.0) > 1e-12)
      throw std::invalid_argument("gaussian copula: diagonal must be 1");
    gamma_(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      if (std::fabs(gamma_(i, j) - gamma_(j, i)) > 1e-10)
        throw std::invalid_argument("gaussian copula: matrix not symmetric");
      double v = 0.5 * (gamma_(i, j) + gamma_(j, i));
      if (!(std::fabs(v) < 1.0))
        throw std::invalid_argument("gaussian copula: |rho| must be < 1");
      gamma_(i, j) = gamma_(j, i) = v;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gamma_);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("gaussian copula: matrix not positive definite");
  chol_lower_ = llt.matrixL();
}

std::unique_ptr<Copula> GaussianCopula::clone() const {
  return std::make_unique<GaussianCopula>(gamma_);
}

double GaussianCopula::cdf(const Eigen::VectorXd& u,
                           const IndexList& idx) const {
  check_subset(idx);
  check_cdf_domain(u);
  // drop saturated coordinates (exact marginalization), short-circuit zeros
  IndexList keep;
  std::vector<double> vals;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (u[k] == 0.0) return 0.0;
    if (u[k] < 1.0) {
      keep.push_back(idx[k]);
      vals.push_back(u[k]);
    }
  }
  const int k = static_cast<int>(keep.size());
  if (k == 0) return 1.0;
  if (k == 1) return vals[0];
  Eigen::VectorXd z(k);
  for (int i = 0; i < k; ++i) z[i] = norm_quantile(vals[i]);
  Eigen::MatrixXd sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = gamma_(keep[i], keep[j]);
  return mvn_cdf(z, sub).p;
}

double GaussianCopula::log_pdf(const Eigen::VectorXd& u,
                               const IndexList& idx) const {
  check_subset(idx);
  check_interior(u);
  const int k = static_cast<int>(idx.size());
  if (k <= 1) return 0.0;
  Eigen::VectorXd z(k);
  for (int i = 0; i < k; ++i) z[i] = norm_quantile(u[i]);
  Eigen::MatrixXd sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = gamma_(idx[i], idx[j]);
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  if (llt.info() != Eigen::Success)
    throw NumericalError("gaussian log_pdf: submatrix not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < k; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  Eigen::VectorXd sol = llt.solve(z);
  double quad = z.dot(sol) - z.squaredNorm();
  return -0.5 * (logdet + quad);
}

void GaussianCopula::conditional_moments(int j, const Eigen::VectorXd& zB,
                                         const IndexList& B, double& mu,
                                         double& sd) const {
  const int nb = static_cast<int>(B.size());
  Eigen::MatrixXd gBB(nb, nb);
  Eigen::VectorXd gjB(nb);
  for (int r = 0; r < nb; ++r) {
    gjB[r] = gamma_(j, B[r]);
    for (int c = 0; c < nb; ++c) gBB(r, c) = gamma_(B[r], B[c]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gBB);
  if (llt.info() != Eigen::Success)
    throw NumericalError("gaussian conditional: B-submatrix not PD");
  Eigen::VectorXd w = llt.solve(gjB);
  mu = w.dot(zB);
  double var = 1.0 - w.dot(gjB);
  sd = std::sqrt(std::max(var, 1e-300));
}

double GaussianCopula::conditional_cdf(const Eigen::VectorXd& uA,
                                       const IndexList& A,
                                       const Eigen::VectorXd& uB,
                                       const IndexList& B) const {
  check_subset(A);
  check_subset(B);
  check_disjoint(A, B);
  check_cdf_domain(uA);
  check_interior(uB);
  if (B.empty()) return cdf(uA, A);

  IndexList keep;
  std::vector<double> vals;
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (uA[k] == 0.0) return 0.0;
    if (uA[k] < 1.0) {
      keep.push_back(A[k]);
      vals.push_back(uA[k]);
    }
  }
  const int ka = static_cast<int>(keep.size());
  if (ka == 0) return 1.0;

  const int nb = static_cast<int>(B.size());
  Eigen::VectorXd zB(nb);
  for (int i = 0; i < nb; ++i) zB[i] = norm_quantile(uB[i]);

  if (ka == 1) {
    double mu, sd;
    conditional_moments(keep[0], zB, B, mu, sd);
    return norm_cdf((norm_quantile(vals[0]) - mu) / sd);
  }

  // conditional normal over the remaining A-block
  Eigen::MatrixXd gBB(nb, nb), gAB(ka, nb), gAA(ka, ka);
  for (int r = 0; r < nb; ++r)
    for (int c = 0; c < nb; ++c) gBB(r, c) = gamma_(B[r], B[c]);
  for (int r = 0; r < ka; ++r) {
    for (int c = 0; c < nb; ++c) gAB(r, c) = gamma_(keep[r], B[c]);
    for (int c = 0; c < ka; ++c) gAA(r, c) = gamma_(keep[r], keep[c]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gBB);
  if (llt.info() != Eigen::Success)
    throw NumericalError("gaussian conditional: B-submatrix not PD");
  Eigen::MatrixXd W = llt.solve(gAB.transpose());  // nb x ka
  Eigen::VectorXd mu = W.transpose() * zB;
  Eigen::MatrixXd cov = gAA - gAB * W;
  Eigen::VectorXd upper(ka);
  Eigen::VectorXd isd(ka);
  for (int i = 0; i < ka; ++i) {
    isd[i] = 1.0 / std::sqrt(std::max(cov(i, i), 1e-300));
    upper[i] = (norm_quantile(vals[i]) - mu[i]) * isd[i];
  }
  Eigen::MatrixXd corr(ka, ka);
  for (int i = 0; i < ka; ++i)
    for (int j2 = 0; j2 < ka; ++j2)
      corr(i, j2) = cov(i, j2) * isd[i] * isd[j2];
  for (int i = 0; i < ka; ++i) corr(i, i) = 1.0;
  return mvn_cdf(upper, corr).p;
}

double GaussianCopula::conditional_quantile(double tau, int j,
                                            const Eigen::VectorXd& uB,
                                            const IndexList& B) const {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::domain_error("conditional_quantile: tau must be in (0,1)");
  if (B.empty()) return tau;
  check_subset(B);
  check_interior(uB);
  const int nb = static_cast<int>(B.size());
  Eigen::VectorXd zB(nb);
  for (int i = 0; i < nb; ++i) zB[i] = norm_quantile(uB[i]);
  double mu, sd;
  conditional_moments(j, zB, B, mu, sd);
  return clamp_unit(norm_cdf(mu + sd * norm_quantile(tau)));
}

void GaussianCopula::sample_row(Rng& rng,
                                RowRef out) const {
  const int m = dim();
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) z[i] = rng.normal();
  Eigen::VectorXd x = chol_lower_ * z;
  for (int i = 0; i < m; ++i) out[i] = clamp_unit(norm_cdf(x[i]));
}

// ---------------------------------------------------------------------------
// Clayton
// ---------------------------------------------------------------------------

namespace {

// log(1 + sum_j psi(u_j)) = log(sum_j u_j^{-theta} - (k-1)), overflow-safe
double clayton_log_s(const Eigen::VectorXd& u, double theta) {
  const int k = static_cast<int>(u.size());
  if (k == 0) return 0.0;
  double maxlt = -kInf;
  Eigen::VectorXd lt(k);
  for (int i = 0; i < k; ++i) {
    lt[i] = -theta * std::log(u[i]);
    maxlt = std::max(maxlt, lt[i]);
  }
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += std::exp(lt[i] - maxlt);
  double lse = maxlt + std::log(s);
  return lse + std::log1p(-(k - 1.0) * std::exp(-lse));
}

}  // namespace

ClaytonCopula::ClaytonCopula(double theta, int dim) : theta_(theta), m_(dim) {
  if (!(theta > 0.0))
    throw std::invalid_argument("clayton copula: theta must be > 0");
  if (dim < 2) throw std::invalid_argument("clayton copula: need m >= 2");
}

std::unique_ptr<Copula> ClaytonCopula::clone() const {
  return std::make_unique<ClaytonCopula>(theta_, m_);
}

double ClaytonCopula::cdf(const Eigen::VectorXd& u, const IndexList& idx) const {
  check_subset(idx);
  check_cdf_domain(u);
  std::vector<double> vals;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) return 0.0;
    if (u[i] < 1.0) vals.push_back(u[i]);
  }
  if (vals.empty()) return 1.0;
  if (vals.size() == 1) return vals[0];
  Eigen::Map<const Eigen::VectorXd> v(vals.data(), vals.size());
  return std::exp(-clayton_log_s(v, theta_) / theta_);
}

double ClaytonCopula::log_pdf(const Eigen::VectorXd& u,
                              const IndexList& idx) const {
  check_subset(idx);
  check_interior(u);
  const int k = static_cast<int>(u.size());
  if (k <= 1) return 0.0;
  double lead = 0.0;
  for (int i = 1; i < k; ++i) lead += std::log(theta_ * i + 1.0);
  double sum_log_u = u.array().log().sum();
  return lead - (1.0 + theta_) * sum_log_u -
         (k + 1.0 / theta_) * clayton_log_s(u, theta_);
}

double ClaytonCopula::conditional_cdf(const Eigen::VectorXd& uA,
                                      const IndexList& A,
                                      const Eigen::VectorXd& uB,
                                      const IndexList& B) const {
  check_subset(A);
  check_subset(B);
  check_disjoint(A, B);
  check_cdf_domain(uA);
  check_interior(uB);
  if (B.empty()) return cdf(uA, A);
  std::vector<double> vals(uB.data(), uB.data() + uB.size());
  for (Eigen::Index i = 0; i < uA.size(); ++i) {
    if (uA[i] == 0.0) return 0.0;
    if (uA[i] < 1.0) vals.push_back(uA[i]);
  }
  if (vals.size() == static_cast<std::size_t>(uB.size())) return 1.0;
  const double n = static_cast<double>(uB.size());
  Eigen::Map<const Eigen::VectorXd> vAB(vals.data(), vals.size());
  double log_sAB = clayton_log_s(vAB, theta_);
  double log_sB = clayton_log_s(uB, theta_);
  return std::exp(-(1.0 / theta_ + n) * (log_sAB - log_sB));
}

double ClaytonCopula::conditional_quantile(double tau, int j,
                                           const Eigen::VectorXd& uB,
                                           const IndexList& B) const {
  (void)j;  // exchangeable family: the target index does not matter
  if (!(tau > 0.0 && tau < 1.0))
    throw std::domain_error("conditional_quantile: tau must be in (0,1)");
  if (B.empty()) return tau;
  check_subset(B);
  check_interior(uB);
  const double n = static_cast<double>(B.size());
  // invert ((1+t_B)/(1+t_B+t_A))^(1/theta+n) = tau in log space
  double log_sB = clayton_log_s(uB, theta_);
  double rm1 = std::expm1(-std::log(tau) / (1.0 / theta_ + n));
  double log_sA1 = log_sB + std::log(rm1 + std::exp(-log_sB));
  return clamp_unit(std::exp(-log_sA1 / theta_));
}

void ClaytonCopula::sample_row(Rng& rng,
                               RowRef out) const {
  const double v = rng.gamma(1.0 / theta_, 1.0);
  for (int j = 0; j < m_; ++j) {
    double e = rng.exponential();
    out[j] = clamp_unit(std::exp(-std::log1p(e / v) / theta_));
  }
}

// ---------------------------------------------------------------------------
// Gumbel
// ---------------------------------------------------------------------------

GumbelCopula::GumbelCopula(double theta, int dim) : theta_(theta), m_(dim) {
  if (!(theta >= 1.0))
    throw std::invalid_argument("gumbel copula: theta must be >= 1");
  if (dim < 2) throw std::invalid_argument("gumbel copula: need m >= 2");
  const double alpha = 1.0 / theta_;
  log_coeffs_.resize(m_);
  // a_{nk} = (n!/k!) sum_{j=1}^{k} C(k,j) C(j*alpha, n) (-1)^(n-j), positive
  for (int n = 1; n <= m_; ++n) {
    log_coeffs_[n - 1].resize(n);
    for (int k = 1; k <= n; ++k) {
      long double sum = 0.0L;
      for (int j = 1; j <= k; ++j) {
        long double term = 1.0L;
        // C(k, j)
        for (int i = 0; i < j; ++i)
          term *= static_cast<long double>(k - i) / static_cast<long double>(i + 1);
        // C(j*alpha, n)
        long double y = static_cast<long double>(j) * alpha;
        for (int i = 0; i < n; ++i)
          term *= (y - i) / static_cast<long double>(i + 1);
        if ((n - j) % 2 == 1) term = -term;
        sum += term;
      }
      // n!/k!
      for (int i = k + 1; i <= n; ++i) sum *= i;
      log_coeffs_[n - 1][k - 1] =
          (sum <= 0.0L) ? -kInf : static_cast<double>(std::log(sum));
    }
  }
}

std::unique_ptr<Copula> GumbelCopula::clone() const {
  return std::make_unique<GumbelCopula>(theta_, m_);
}

const std::vector<double>& GumbelCopula::log_poly_coeffs(int n) const {
  return log_coeffs_.at(n - 1);
}

double GumbelCopula::log_dpsi_inv(int n, double t) const {
  const double alpha = 1.0 / theta_;
  const double logt = std::log(t);
  const auto& lc = log_coeffs_[n - 1];
  double m = -kInf;
  for (int k = 1; k <= n; ++k) m = std::max(m, lc[k - 1] + k * alpha * logt);
  double s = 0.0;
  for (int k = 1; k <= n; ++k) s += std::exp(lc[k - 1] + k * alpha * logt - m);
  return -std::exp(alpha * logt) + m + std::log(s) - n * logt;
}

double gumbel_log_dpsi_inv_for_test(const GumbelCopula& c, int n, double t) {
  return c.log_dpsi_inv(n, t);
}

namespace {

double gumbel_t(const Eigen::VectorXd& u, double theta) {
  double t = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    t += std::pow(-std::log(u[i]), theta);
  return t;
}

}  // namespace

double GumbelCopula::cdf(const Eigen::VectorXd& u, const IndexList& idx) const {
  check_subset(idx);
  check_cdf_domain(u);
  std::vector<double> vals;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) return 0.0;
    if (u[i] < 1.0) vals.push_back(u[i]);
  }
  if (vals.empty()) return 1.0;
  if (vals.size() == 1) return vals[0];
  Eigen::Map<const Eigen::VectorXd> v(vals.data(), vals.size());
  return std::exp(-std::pow(gumbel_t(v, theta_), 1.0 / theta_));
}

double GumbelCopula::log_pdf(const Eigen::VectorXd& u,
                             const IndexList& idx) const {
  check_subset(idx);
  check_interior(u);
  const int k = static_cast<int>(u.size());
  if (k <= 1) return 0.0;
  double t = gumbel_t(u, theta_);
  double log_gen = 0.0;  // sum of log |psi'(u_j)|
  for (int i = 0; i < k; ++i) {
    double nl = -std::log(u[i]);
    log_gen += std::log(theta_) + (theta_ - 1.0) * std::log(nl) - std::log(u[i]);
  }
  return log_dpsi_inv(k, t) + log_gen;
}

double GumbelCopula::conditional_cdf(const Eigen::VectorXd& uA,
                                     const IndexList& A,
                                     const Eigen::VectorXd& uB,
                                     const IndexList& B) const {
  check_subset(A);
  check_subset(B);
  check_disjoint(A, B);
  check_cdf_domain(uA);
  check_interior(uB);
  if (B.empty()) return cdf(uA, A);
  double tA = 0.0;
  for (Eigen::Index i = 0; i < uA.size(); ++i) {
    if (uA[i] == 0.0) return 0.0;
    if (uA[i] < 1.0) tA += std::pow(-std::log(uA[i]), theta_);
  }
  if (tA == 0.0) return 1.0;
  const int n = static_cast<int>(B.size());
  double tB = gumbel_t(uB, theta_);
  return std::exp(log_dpsi_inv(n, tA + tB) - log_dpsi_inv(n, tB));
}

void GumbelCopula::sample_row(Rng& rng,
                              RowRef out) const {
  if (theta_ == 1.0) {  // independence
    for (int j = 0; j < m_; ++j) out[j] = rng.uniform();
    return;
  }
  const double v = rng.positive_stable(1.0 / theta_);
  for (int j = 0; j < m_; ++j) {
    double e = rng.exponential();
    out[j] = clamp_unit(std::exp(-std::pow(e / v, 1.0 / theta_)));
  }
}

// ---------------------------------------------------------------------------
// Mixture
// ---------------------------------------------------------------------------

MixtureCopula::MixtureCopula(std::vector<Component> components)
    : comps_(std::move(components)) {
  if (comps_.empty())
    throw std::invalid_argument("mixture copula: no components");
  double total = 0.0;
  for (const auto& c : comps_) {
    if (!c.copula) throw std::invalid_argument("mixture copula: null component");
    if (!(c.weight > 0.0))
      throw std::invalid_argument("mixture copula: weights must be > 0");
    if (c.copula->dim() != comps_.front().copula->dim())
      throw std::invalid_argument("mixture copula: dimension mismatch");
    total += c.weight;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("mixture copula: weights must sum to 1");
}

int MixtureCopula::dim() const { return comps_.front().copula->dim(); }

std::unique_ptr<Copula> MixtureCopula::clone() const {
  return std::make_unique<MixtureCopula>(comps_);
}

double MixtureCopula::cdf(const Eigen::VectorXd& u, const IndexList& idx) const {
  double p = 0.0;
  for (const auto& c : comps_) p += c.weight * c.copula->cdf(u, idx);
  return p;
}

double MixtureCopula::log_pdf(const Eigen::VectorXd& u,
                              const IndexList& idx) const {
  Eigen::VectorXd terms(comps_.size());
  for (std::size_t k = 0; k < comps_.size(); ++k)
    terms[k] = std::log(comps_[k].weight) + comps_[k].copula->log_pdf(u, idx);
  return log_sum_exp(terms);
}

Eigen::VectorXd MixtureCopula::posterior_weights(const Eigen::VectorXd& uB,
                                                 const IndexList& B) const {
  Eigen::VectorXd lam(comps_.size());
  if (B.empty()) {
    for (std::size_t k = 0; k < comps_.size(); ++k) lam[k] = comps_[k].weight;
    return lam;
  }
  for (std::size_t k = 0; k < comps_.size(); ++k)
    lam[k] = std::log(comps_[k].weight) + comps_[k].copula->log_pdf(uB, B);
  double lse = log_sum_exp(lam);
  if (!std::isfinite(lse))
    throw NumericalError("mixture conditional: all component densities vanish");
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    lam[k] = std::exp(lam[k] - lse);
  return lam;
}

double MixtureCopula::conditional_cdf(const Eigen::VectorXd& uA,
                                      const IndexList& A,
                                      const Eigen::VectorXd& uB,
                                      const IndexList& B) const {
  check_disjoint(A, B);
  Eigen::VectorXd lam = posterior_weights(uB, B);
  double p = 0.0;
  for (std::size_t k = 0; k < comps_.size(); ++k)
    p += lam[k] * comps_[k].copula->conditional_cdf(uA, A, uB, B);
  return p;
}

void MixtureCopula::sample_row(Rng& rng,
                               RowRef out) const {
  Eigen::VectorXd w(comps_.size());
  for (std::size_t k = 0; k < comps_.size(); ++k) w[k] = comps_[k].weight;
  int k = rng.categorical(w);
  comps_[k].copula->sample_row(rng, out);
}

// ---------------------------------------------------------------------------

SpearmanEstimate spearman_rho(const Copula& cop, int i, int j, int n_mc,
                              Rng& rng) {
  if (i < 0 || j < 0 || i >= cop.dim() || j >= cop.dim() || i == j)
    throw std::invalid_argument("spearman_rho: bad pair");
  Eigen::RowVectorXd row(cop.dim());
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < n_mc; ++r) {
    cop.sample_row(rng, row);
    double p = row[i] * row[j];
    s += p;
    s2 += p * p;
  }
  double mean = s / n_mc;
  double var = std::max(0.0, s2 / n_mc - mean * mean);
  return {12.0 * mean - 3.0, 12.0 * std::sqrt(var / n_mc)};
}

}  // namespace mixcop
