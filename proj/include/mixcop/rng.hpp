#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace mixcop {

// xoshiro256++ stream seeded through splitmix64. Every consumer gets its own
// stream derived from (seed, salt words), so results do not depend on how work
// is split across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                    std::uint64_t c = 0);

  std::uint64_t next_u64();

  // uniform on the open interval (0,1); never returns an endpoint
  double uniform();
  double uniform(double lo, double hi);

  double normal();  // standard normal via inverse CDF
  double exponential();
  double gamma(double shape, double scale = 1.0);
  // one-sided stable with Laplace transform exp(-t^alpha), 0 < alpha <= 1
  double positive_stable(double alpha);

  Eigen::VectorXd dirichlet(const Eigen::VectorXd& alpha);
  // index draw proportional to the entries of an unnormalized weight vector
  int categorical(const Eigen::VectorXd& weights);

 private:
  std::uint64_t s_[4];
};

}  // namespace mixcop
