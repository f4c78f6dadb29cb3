#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace mixcop {

struct Atom {
  double location = 0.0;
  double mass = 0.0;  // in (0,1]
};

// Continuous component of a mixed marginal. Implementations are immutable.
class ContinuousDist {
 public:
  virtual ~ContinuousDist() = default;
  virtual double cdf(double x) const = 0;
  virtual double pdf(double x) const = 0;
  virtual double quantile(double p) const = 0;  // p in (0,1)
  // closed support of the positive-density region (may be infinite)
  virtual std::pair<double, double> support() const = 0;
  virtual std::string describe() const = 0;
};

std::shared_ptr<const ContinuousDist> make_normal(double mu, double sigma);
std::shared_ptr<const ContinuousDist> make_lognormal(double mu, double sigma);
std::shared_ptr<const ContinuousDist> make_exponential(double rate);
std::shared_ptr<const ContinuousDist> make_uniform(double lo, double hi);
// strictly increasing piecewise-linear CDF with knots (x_i, F_i),
// F_0 = 0, F_last = 1
std::shared_ptr<const ContinuousDist> make_piecewise_linear(
    std::vector<double> x, std::vector<double> F);

enum class MarginalKind { parametric, empirical };

// A univariate distribution made of a continuous density component plus a
// finite list of atoms. Immutable after construction; safe to share across
// threads.
class MixedMarginal {
 public:
  MixedMarginal(std::vector<Atom> atoms, double continuous_weight,
                std::shared_ptr<const ContinuousDist> continuous,
                MarginalKind kind = MarginalKind::parametric);

  // right-continuous CDF, includes the atom mass at x
  double cdf(double x) const;
  // left limit F(x-), excludes the atom mass at x
  double cdf_left(double x) const;
  // generalized inverse inf{x : F(x) >= u}; maps the whole gap
  // (F(l-), F(l)] of an atom l back to l
  double quantile(double u) const;
  // Lebesgue density of the continuous part (already weighted); only
  // meaningful at non-atoms
  double continuous_density(double x) const;

  bool is_atom(double x) const;
  double atom_mass(double x) const;

  const std::vector<Atom>& atoms() const { return atoms_; }
  double continuous_weight() const { return weight_; }
  const std::shared_ptr<const ContinuousDist>& continuous() const {
    return cont_;
  }
  MarginalKind kind() const { return kind_; }

  // nearest point of the support with positive density / atom mass, used to
  // clamp out-of-support values when scoring held-out data
  double clamp_to_support(double x) const;

 private:
  std::vector<Atom> atoms_;
  double weight_;
  std::shared_ptr<const ContinuousDist> cont_;
  MarginalKind kind_;
  std::vector<double> cum_mass_;  // cumulative atom masses
};

// Per-observation classification of coordinates into continuity points and
// jump points, with the PIT interval bounds.
struct PartitionResult {
  std::vector<int> continuous_idx;  // ascending
  std::vector<int> discrete_idx;    // ascending
  Eigen::VectorXd lower;            // a_j = F_j(x_j-)
  Eigen::VectorXd upper;            // b_j = F_j(x_j)
};

PartitionResult partition(const std::vector<MixedMarginal>& margs,
                          const Eigen::VectorXd& x);

// Empirical fit: atoms from ties above the frequency threshold
// max(2/n, 1e-3) or from the explicit candidate list; the rest becomes a
// piecewise-linear CDF through the distinct order statistics with values
// c/(n+1), which keeps PITs of data points strictly inside (0,1).
MixedMarginal fit_empirical(const std::vector<double>& sample,
                            const std::vector<double>& atom_candidates = {});

}  // namespace mixcop
