#include "mixcop/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "mixcop/errors.hpp"
#include "mixcop/special.hpp"

namespace mixcop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class NormalDist final : public ContinuousDist {
 public:
  NormalDist(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    if (sigma <= 0.0) throw std::domain_error("normal: sigma must be > 0");
  }
  double cdf(double x) const override { return norm_cdf((x - mu_) / sigma_); }
  double pdf(double x) const override {
    return norm_pdf((x - mu_) / sigma_) / sigma_;
  }
  double quantile(double p) const override {
    return mu_ + sigma_ * norm_quantile(p);
  }
  std::pair<double, double> support() const override { return {-kInf, kInf}; }
  std::string describe() const override {
    std::ostringstream os;
    os << "normal(" << mu_ << "," << sigma_ << ")";
    return os.str();
  }

 private:
  double mu_, sigma_;
};

class LognormalDist final : public ContinuousDist {
 public:
  LognormalDist(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    if (sigma <= 0.0) throw std::domain_error("lognormal: sigma must be > 0");
  }
  double cdf(double x) const override {
    return x <= 0.0 ? 0.0 : norm_cdf((std::log(x) - mu_) / sigma_);
  }
  double pdf(double x) const override {
    if (x <= 0.0) return 0.0;
    return norm_pdf((std::log(x) - mu_) / sigma_) / (sigma_ * x);
  }
  double quantile(double p) const override {
    return std::exp(mu_ + sigma_ * norm_quantile(p));
  }
  std::pair<double, double> support() const override { return {0.0, kInf}; }
  std::string describe() const override {
    std::ostringstream os;
    os << "lognormal(" << mu_ << "," << sigma_ << ")";
    return os.str();
  }

 private:
  double mu_, sigma_;
};

class ExponentialDist final : public ContinuousDist {
 public:
  explicit ExponentialDist(double rate) : rate_(rate) {
    if (rate <= 0.0) throw std::domain_error("exponential: rate must be > 0");
  }
  double cdf(double x) const override {
    return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x);
  }
  double pdf(double x) const override {
    return x < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * x);
  }
  double quantile(double p) const override { return -std::log1p(-p) / rate_; }
  std::pair<double, double> support() const override { return {0.0, kInf}; }
  std::string describe() const override {
    std::ostringstream os;
    os << "exponential(" << rate_ << ")";
    return os.str();
  }

 private:
  double rate_;
};

class UniformDist final : public ContinuousDist {
 public:
  UniformDist(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(hi > lo)) throw std::domain_error("uniform: need hi > lo");
  }
  double cdf(double x) const override {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    return (x - lo_) / (hi_ - lo_);
  }
  double pdf(double x) const override {
    return (x >= lo_ && x <= hi_) ? 1.0 / (hi_ - lo_) : 0.0;
  }
  double quantile(double p) const override { return lo_ + p * (hi_ - lo_); }
  std::pair<double, double> support() const override { return {lo_, hi_}; }
  std::string describe() const override {
    std::ostringstream os;
    os << "uniform(" << lo_ << "," << hi_ << ")";
    return os.str();
  }

 private:
  double lo_, hi_;
};

class PiecewiseLinearCdf final : public ContinuousDist {
 public:
  PiecewiseLinearCdf(std::vector<double> x, std::vector<double> F)
      : x_(std::move(x)), F_(std::move(F)) {
    if (x_.size() != F_.size() || x_.size() < 2)
      throw std::invalid_argument("piecewise cdf: need >= 2 knots");
    if (std::fabs(F_.front()) > 1e-14 || std::fabs(F_.back() - 1.0) > 1e-14)
      throw std::invalid_argument("piecewise cdf: F must run from 0 to 1");
    F_.front() = 0.0;
    F_.back() = 1.0;
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1]) || !(F_[i] > F_[i - 1]))
        throw std::invalid_argument("piecewise cdf: knots must be increasing");
  }
  double cdf(double x) const override {
    if (x <= x_.front()) return 0.0;
    if (x >= x_.back()) return 1.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    double t = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
    return F_[i - 1] + t * (F_[i] - F_[i - 1]);
  }
  double pdf(double x) const override {
    if (x < x_.front() || x >= x_.back()) return 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) i = 1;
    return (F_[i] - F_[i - 1]) / (x_[i] - x_[i - 1]);
  }
  double quantile(double p) const override {
    if (p <= 0.0) return x_.front();
    if (p >= 1.0) return x_.back();
    auto it = std::lower_bound(F_.begin(), F_.end(), p);
    std::size_t i = static_cast<std::size_t>(it - F_.begin());
    if (i == 0) return x_.front();
    double t = (p - F_[i - 1]) / (F_[i] - F_[i - 1]);
    return x_[i - 1] + t * (x_[i] - x_[i - 1]);
  }
  std::pair<double, double> support() const override {
    return {x_.front(), x_.back()};
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "piecewise_linear(" << x_.size() << " knots)";
    return os.str();
  }

 private:
  std::vector<double> x_, F_;
};

}  // namespace

std::shared_ptr<const ContinuousDist> make_normal(double mu, double sigma) {
  return std::make_shared<NormalDist>(mu, sigma);
}
std::shared_ptr<const ContinuousDist> make_lognormal(double mu, double sigma) {
  return std::make_shared<LognormalDist>(mu, sigma);
}
std::shared_ptr<const ContinuousDist> make_exponential(double rate) {
  return std::make_shared<ExponentialDist>(rate);
}
std::shared_ptr<const ContinuousDist> make_uniform(double lo, double hi) {
  return std::make_shared<UniformDist>(lo, hi);
}
std::shared_ptr<const ContinuousDist> make_piecewise_linear(
    std::vector<double> x, std::vector<double> F) {
  return std::make_shared<PiecewiseLinearCdf>(std::move(x), std::move(F));
}

MixedMarginal::MixedMarginal(std::vector<Atom> atoms, double continuous_weight,
                             std::shared_ptr<const ContinuousDist> continuous,
                             MarginalKind kind)
    : atoms_(std::move(atoms)),
      weight_(continuous_weight),
      cont_(std::move(continuous)),
      kind_(kind) {
  double mass = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& at = atoms_[i];
    if (!(at.mass > 0.0) || at.mass > 1.0 + 1e-12)
      throw std::invalid_argument("atom mass must be in (0,1]");
    if (i > 0 && !(at.location > atoms_[i - 1].location))
      throw std::invalid_argument(
          "atom locations must be strictly sorted without duplicates");
    mass += at.mass;
  }
  if (weight_ < -1e-12 || weight_ > 1.0 + 1e-12)
    throw std::invalid_argument("continuous weight must be in [0,1]");
  if (std::fabs(mass + weight_ - 1.0) > 1e-12)
    throw std::invalid_argument(
        "atom masses plus continuous weight must sum to 1");
  if (weight_ > 0.0 && !cont_)
    throw std::invalid_argument("positive continuous weight needs a density");
  cum_mass_.resize(atoms_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    acc += atoms_[i].mass;
    cum_mass_[i] = acc;
  }
}

double MixedMarginal::cdf(double x) const {
  double v = (weight_ > 0.0) ? weight_ * cont_->cdf(x) : 0.0;
  // atoms at locations <= x (exact comparison: atoms are exact parsed values)
  auto it = std::upper_bound(
      atoms_.begin(), atoms_.end(), x,
      [](double lhs, const Atom& at) { return lhs < at.location; });
  if (it != atoms_.begin()) v += cum_mass_[it - atoms_.begin() - 1];
  return std::min(1.0, v);
}

double MixedMarginal::cdf_left(double x) const {
  double v = (weight_ > 0.0) ? weight_ * cont_->cdf(x) : 0.0;
  auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), x,
      [](const Atom& at, double rhs) { return at.location < rhs; });
  if (it != atoms_.begin()) v += cum_mass_[it - atoms_.begin() - 1];
  return std::min(1.0, v);
}

double MixedMarginal::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("quantile: u must be in (0,1)");
  // find the first atom with F(l) >= u
  std::size_t lo = 0, hi = atoms_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    double Fl = cum_mass_[mid] +
                (weight_ > 0.0 ? weight_ * cont_->cdf(atoms_[mid].location) : 0.0);
    if (Fl >= u)
      hi = mid;
    else
      lo = mid + 1;
  }
  double below = (lo == 0) ? 0.0 : cum_mass_[lo - 1];
  if (lo < atoms_.size()) {
    double Fl_left =
        below + (weight_ > 0.0 ? weight_ * cont_->cdf(atoms_[lo].location) : 0.0);
    if (u > Fl_left) return atoms_[lo].location;  // inside the gap
  }
  // continuous stretch with atom mass `below` under it
  return cont_->quantile((u - below) / weight_);
}

double MixedMarginal::continuous_density(double x) const {
  return (weight_ > 0.0) ? weight_ * cont_->pdf(x) : 0.0;
}

bool MixedMarginal::is_atom(double x) const { return atom_mass(x) > 0.0; }

double MixedMarginal::atom_mass(double x) const {
  auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), x,
      [](const Atom& at, double rhs) { return at.location < rhs; });
  if (it != atoms_.end() && it->location == x) return it->mass;
  return 0.0;
}

double MixedMarginal::clamp_to_support(double x) const {
  if (is_atom(x)) return x;
  if (weight_ > 0.0) {
    auto [lo, hi] = cont_->support();
    // nudge strictly inside so the PIT stays interior and the density positive
    if (std::isfinite(lo) && std::isfinite(hi)) {
      double pad = 1e-9 * (hi - lo);
      if (x <= lo) x = lo + pad;
      if (x >= hi) x = hi - pad;
    }
    return x;
  }
  // purely discrete: snap to the nearest atom
  double best = atoms_.front().location, dist = kInf;
  for (const Atom& at : atoms_) {
    double d = std::fabs(x - at.location);
    if (d < dist) {
      dist = d;
      best = at.location;
    }
  }
  return best;
}

PartitionResult partition(const std::vector<MixedMarginal>& margs,
                          const Eigen::VectorXd& x) {
  const int m = static_cast<int>(margs.size());
  if (x.size() != m)
    throw std::invalid_argument("partition: dimension mismatch");
  PartitionResult out;
  out.lower.resize(m);
  out.upper.resize(m);
  for (int j = 0; j < m; ++j) {
    out.upper[j] = margs[j].cdf(x[j]);
    if (margs[j].is_atom(x[j])) {
      out.discrete_idx.push_back(j);
      out.lower[j] = margs[j].cdf_left(x[j]);
    } else {
      out.continuous_idx.push_back(j);
      out.lower[j] = out.upper[j];
    }
  }
  return out;
}

MixedMarginal fit_empirical(const std::vector<double>& sample,
                            const std::vector<double>& atom_candidates) {
  const std::size_t n = sample.size();
  if (n < 2) throw DataError("fit_empirical: need at least 2 observations");
  for (double v : sample)
    if (!std::isfinite(v)) throw DataError("fit_empirical: non-finite value");

  std::map<double, long> counts;
  for (double v : sample) counts[v]++;

  const double threshold = std::max(2.0, 1e-3 * static_cast<double>(n));
  auto is_candidate = [&](double v) {
    return std::find(atom_candidates.begin(), atom_candidates.end(), v) !=
           atom_candidates.end();
  };

  std::vector<Atom> atoms;
  std::vector<std::pair<double, long>> cont_vals;  // distinct value, count
  for (auto& [v, c] : counts) {
    if (static_cast<double>(c) >= threshold || is_candidate(v))
      atoms.push_back({v, static_cast<double>(c) / static_cast<double>(n)});
    else
      cont_vals.push_back({v, c});
  }

  double atom_total = 0.0;
  for (const Atom& at : atoms) atom_total += at.mass;
  double weight = 1.0 - atom_total;

  if (cont_vals.empty()) {
    // fully discrete column
    return MixedMarginal(std::move(atoms), 0.0, nullptr,
                         MarginalKind::empirical);
  }

  // Continuous knots carry overall CDF targets R/(n+1); converting them to the
  // continuous component keeps every data PIT strictly below 1 while atom
  // masses stay the exact empirical frequencies.
  const std::size_t q = cont_vals.size();
  std::vector<double> xs, Fs;
  xs.reserve(q + 2);
  Fs.reserve(q + 2);
  double gap;
  if (q >= 2) {
    gap = (cont_vals.back().first - cont_vals.front().first) /
          static_cast<double>(q - 1);
  } else {
    gap = std::max(1.0, std::fabs(cont_vals.front().first));
  }
  xs.push_back(cont_vals.front().first - gap);
  Fs.push_back(0.0);

  // running total count <= value, walking atoms and continuous values jointly
  std::size_t ai = 0;
  long run_total = 0;
  double atom_below = 0.0;
  for (auto& [v, c] : cont_vals) {
    while (ai < atoms.size() && atoms[ai].location < v) {
      run_total += static_cast<long>(
          std::llround(atoms[ai].mass * static_cast<double>(n)));
      atom_below += atoms[ai].mass;
      ++ai;
    }
    run_total += c;
    double target = static_cast<double>(run_total) / static_cast<double>(n + 1);
    Fs.push_back((target - atom_below) / weight);
    xs.push_back(v);
  }
  xs.push_back(cont_vals.back().first + gap);
  Fs.push_back(1.0);

  return MixedMarginal(std::move(atoms), weight,
                       make_piecewise_linear(std::move(xs), std::move(Fs)),
                       MarginalKind::empirical);
}

}  // namespace mixcop
