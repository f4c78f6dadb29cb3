#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "mixcop/rng.hpp"

namespace mixcop {

using IndexList = std::vector<int>;
// writable view of one matrix row (rows of a column-major matrix are strided)
using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

// Copula over m coordinates. All evaluation members are pure; values are
// immutable after construction, so instances can be shared across threads.
// Subset arguments select marginal copulas: these families are closed under
// marginalization (Archimedean keep theta, the Gaussian keeps the submatrix).
class Copula {
 public:
  virtual ~Copula() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Copula> clone() const = 0;

  // marginal copula CDF over the coordinates `idx` at u (same length);
  // u componentwise in (0,1]
  virtual double cdf(const Eigen::VectorXd& u, const IndexList& idx) const = 0;
  double cdf(const Eigen::VectorXd& u) const;

  // log marginal copula density over `idx`; u strictly interior
  virtual double log_pdf(const Eigen::VectorXd& u,
                         const IndexList& idx) const = 0;
  double log_pdf(const Eigen::VectorXd& u) const;
  double pdf(const Eigen::VectorXd& u, const IndexList& idx) const;
  double pdf(const Eigen::VectorXd& u) const;

  // conditional CDF C_{A|B}(u_A | u_B); A and B disjoint, u_B interior
  virtual double conditional_cdf(const Eigen::VectorXd& uA, const IndexList& A,
                                 const Eigen::VectorXd& uB,
                                 const IndexList& B) const = 0;

  // u_j solving C_{j|B}(u_j | u_B) = tau; |C - tau| <= 1e-10 on exit
  virtual double conditional_quantile(double tau, int j,
                                      const Eigen::VectorXd& uB,
                                      const IndexList& B) const;

  // one exact draw; `out` must have length dim()
  virtual void sample_row(Rng& rng, RowRef out) const = 0;
  Eigen::MatrixXd sample(int n, Rng& rng) const;

 protected:
  void check_subset(const IndexList& idx) const;
  static void check_disjoint(const IndexList& A, const IndexList& B);
};

class GaussianCopula final : public Copula {
 public:
  using Copula::cdf;
  using Copula::log_pdf;
  explicit GaussianCopula(Eigen::MatrixXd correlation);

  int dim() const override { return static_cast<int>(gamma_.rows()); }
  std::string name() const override { return "gaussian"; }
  std::unique_ptr<Copula> clone() const override;

  double cdf(const Eigen::VectorXd& u, const IndexList& idx) const override;
  double log_pdf(const Eigen::VectorXd& u, const IndexList& idx) const override;
  double conditional_cdf(const Eigen::VectorXd& uA, const IndexList& A,
                         const Eigen::VectorXd& uB,
                         const IndexList& B) const override;
  double conditional_quantile(double tau, int j, const Eigen::VectorXd& uB,
                              const IndexList& B) const override;
  void sample_row(Rng& rng, RowRef out) const override;

  const Eigen::MatrixXd& correlation() const { return gamma_; }

 private:
  // conditional mean and sd of coordinate j in z-space given z_B
  void conditional_moments(int j, const Eigen::VectorXd& zB, const IndexList& B,
                           double& mu, double& sd) const;

  Eigen::MatrixXd gamma_;
  Eigen::MatrixXd chol_lower_;  // Cholesky of gamma for sampling
};

class ClaytonCopula final : public Copula {
 public:
  using Copula::cdf;
  using Copula::log_pdf;
  ClaytonCopula(double theta, int dim);

  int dim() const override { return m_; }
  std::string name() const override { return "clayton"; }
  std::unique_ptr<Copula> clone() const override;

  double cdf(const Eigen::VectorXd& u, const IndexList& idx) const override;
  double log_pdf(const Eigen::VectorXd& u, const IndexList& idx) const override;
  double conditional_cdf(const Eigen::VectorXd& uA, const IndexList& A,
                         const Eigen::VectorXd& uB,
                         const IndexList& B) const override;
  double conditional_quantile(double tau, int j, const Eigen::VectorXd& uB,
                              const IndexList& B) const override;
  void sample_row(Rng& rng, RowRef out) const override;

  double theta() const { return theta_; }

 private:
  double theta_;
  int m_;
};

class GumbelCopula final : public Copula {
 public:
  using Copula::cdf;
  using Copula::log_pdf;
  GumbelCopula(double theta, int dim);

  int dim() const override { return m_; }
  std::string name() const override { return "gumbel"; }
  std::unique_ptr<Copula> clone() const override;

  double cdf(const Eigen::VectorXd& u, const IndexList& idx) const override;
  double log_pdf(const Eigen::VectorXd& u, const IndexList& idx) const override;
  double conditional_cdf(const Eigen::VectorXd& uA, const IndexList& A,
                         const Eigen::VectorXd& uB,
                         const IndexList& B) const override;
  void sample_row(Rng& rng, RowRef out) const override;

  double theta() const { return theta_; }
  // coefficients of the degree-n derivative polynomial, all positive
  const std::vector<double>& log_poly_coeffs(int n) const;

 private:
  // log |psi_inv^{(n)}(t)| evaluated stably through the polynomial form
  double log_dpsi_inv(int n, double t) const;

  double theta_;
  int m_;
  std::vector<std::vector<double>> log_coeffs_;  // [n-1][k-1] = log a_{nk}
  friend double gumbel_log_dpsi_inv_for_test(const GumbelCopula&, int, double);
};

class MixtureCopula final : public Copula {
 public:
  using Copula::cdf;
  using Copula::log_pdf;
  struct Component {
    double weight;
    std::shared_ptr<const Copula> copula;
  };

  explicit MixtureCopula(std::vector<Component> components);

  int dim() const override;
  std::string name() const override { return "mixture"; }
  std::unique_ptr<Copula> clone() const override;

  double cdf(const Eigen::VectorXd& u, const IndexList& idx) const override;
  double log_pdf(const Eigen::VectorXd& u, const IndexList& idx) const override;
  double conditional_cdf(const Eigen::VectorXd& uA, const IndexList& A,
                         const Eigen::VectorXd& uB,
                         const IndexList& B) const override;
  void sample_row(Rng& rng, RowRef out) const override;

  const std::vector<Component>& components() const { return comps_; }

 private:
  // posterior component weights given u_B (prior weights when B is empty)
  Eigen::VectorXd posterior_weights(const Eigen::VectorXd& uB,
                                    const IndexList& B) const;

  std::vector<Component> comps_;
};

// Monte Carlo estimate of Spearman's rho for the pair (i,j):
// 12 E[u_i u_j] - 3, with a standard-error estimate.
struct SpearmanEstimate {
  double rho;
  double se;
};
SpearmanEstimate spearman_rho(const Copula& cop, int i, int j, int n_mc,
                              Rng& rng);

IndexList all_indices(int m);
IndexList complement(int m, const IndexList& idx);

}  // namespace mixcop
