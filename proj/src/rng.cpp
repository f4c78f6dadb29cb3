#include "mixcop/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "mixcop/errors.hpp"
#include "mixcop/special.hpp"

namespace mixcop {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : s_) w = splitmix64(x);
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                std::uint64_t c) {
  std::uint64_t x = seed;
  std::uint64_t h = splitmix64(x);
  x ^= a * 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(x);
  x ^= b * 0xc2b2ae3d27d4eb4fULL;
  h ^= splitmix64(x);
  x ^= c * 0x165667b19e3779f9ULL;
  h ^= splitmix64(x);
  return Rng(h);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  for (;;) {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    if (u > 0.0 && u < 1.0) return u;
  }
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() { return norm_quantile(uniform()); }

double Rng::exponential() { return -std::log(uniform()); }

double Rng::gamma(double shape, double scale) {
  if (shape <= 0.0 || scale <= 0.0)
    throw std::domain_error("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // boost to shape+1 and correct with the power of a uniform
    double g = gamma(shape + 1.0, 1.0);
    return scale * g * std::pow(uniform(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze
  const double d = shape - 1.0 / 3.0;
  const double cc = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + cc * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return scale * d * v;
  }
}

double Rng::positive_stable(double alpha) {
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::domain_error("positive_stable: alpha must be in (0,1]");
  if (alpha == 1.0) return 1.0;
  // Kanter's representation: Laplace transform exp(-t^alpha)
  const double w = M_PI * uniform();
  const double e = exponential();
  const double ratio = std::sin(alpha * w) / std::pow(std::sin(w), 1.0 / alpha);
  return ratio * std::pow(std::sin((1.0 - alpha) * w) / e, (1.0 - alpha) / alpha);
}

Eigen::VectorXd Rng::dirichlet(const Eigen::VectorXd& alpha) {
  Eigen::VectorXd g(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k)
    g[k] = std::max(gamma(alpha[k], 1.0), 1e-300);
  return g / g.sum();
}

int Rng::categorical(const Eigen::VectorXd& weights) {
  double total = weights.sum();
  if (!(total > 0.0))
    throw NumericalError("categorical: nonpositive total weight");
  double u = uniform() * total;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u <= acc) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size() - 1);
}

}  // namespace mixcop
