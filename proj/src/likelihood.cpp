#include "mixcop/likelihood.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>

#include "mixcop/errors.hpp"

namespace mixcop {

namespace {
constexpr double kMassFloor = 1e-300;
constexpr int kMaxDiscrete = 20;
}  // namespace

double difference_operator(const std::function<double(const Eigen::VectorXd&)>& g,
                           const Eigen::VectorXd& lower,
                           const Eigen::VectorXd& upper) {
  const int k = static_cast<int>(lower.size());
  if (upper.size() != k)
    throw std::invalid_argument("difference_operator: bound length mismatch");
  if (k == 0) return g(Eigen::VectorXd());
  if (k > kMaxDiscrete)
    throw std::invalid_argument(
        "difference_operator: more than 20 differenced coordinates");

  // Gray-code walk: start at the all-upper corner (sign +1); each step flips
  // one coordinate and the sign of the corner term.
  Eigen::VectorXd corner = upper;
  double sum = g(corner);
  int sign = 1;
  std::uint64_t gray = 0;
  const std::uint64_t n = 1ULL << k;
  for (std::uint64_t i = 1; i < n; ++i) {
    std::uint64_t next_gray = i ^ (i >> 1);
    int bit = 0;
    std::uint64_t diff = gray ^ next_gray;
    while (!(diff & 1)) {
      diff >>= 1;
      ++bit;
    }
    gray = next_gray;
    corner[bit] = (gray >> bit) & 1 ? lower[bit] : upper[bit];
    sign = -sign;
    sum += sign * g(corner);
  }
  return sum;
}

double rectangle_mass(const Copula& cop, const PartitionResult& part) {
  const auto& D = part.discrete_idx;
  const auto& C = part.continuous_idx;
  const int k = static_cast<int>(D.size());
  if (k == 0) return 1.0;
  if (k > kMaxDiscrete)
    throw std::invalid_argument(
        "rectangle_mass: |D(x)| > 20 is refused (2^|D| corner evaluations)");
  Eigen::VectorXd aD(k), bD(k), bC(C.size());
  for (int i = 0; i < k; ++i) {
    aD[i] = part.lower[D[i]];
    bD[i] = part.upper[D[i]];
  }
  for (std::size_t i = 0; i < C.size(); ++i) bC[i] = part.upper[C[i]];
  auto g = [&](const Eigen::VectorXd& corner) {
    return cop.conditional_cdf(corner, D, bC, C);
  };
  return difference_operator(g, aD, bD);
}

LikelihoodTerm log_likelihood_point(const Copula& cop,
                                    const std::vector<MixedMarginal>& margs,
                                    const Eigen::VectorXd& x) {
  return log_likelihood_point(cop, margs, x, partition(margs, x));
}

LikelihoodTerm log_likelihood_point(const Copula& cop,
                                    const std::vector<MixedMarginal>& margs,
                                    const Eigen::VectorXd& x,
                                    const PartitionResult& part) {
  LikelihoodTerm out;
  const auto& C = part.continuous_idx;

  double log_cont = 0.0;
  if (!C.empty()) {
    Eigen::VectorXd bC(C.size());
    for (std::size_t i = 0; i < C.size(); ++i) bC[i] = part.upper[C[i]];
    log_cont = cop.log_pdf(bC, C);
    for (int j : C) log_cont += std::log(margs[j].continuous_density(x[j]));
  }
  out.log_continuous_part = log_cont;

  double mass = rectangle_mass(cop, part);
  if (!(mass > 0.0)) {
    // cancellation in the alternating sum; floor it and count the event
    mass = kMassFloor;
    out.clamped = true;
    diagnostics().rectangle_clamped++;
  }
  out.log_rectangle_mass = std::log(std::min(mass, 1.0));
  out.log_density = out.log_continuous_part + out.log_rectangle_mass;
  return out;
}

void parallel_for_rows(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || n < 2 * workers) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int chunk = std::max(1, n / (workers * 8));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        int start = next.fetch_add(chunk);
        if (start >= n) break;
        int end = std::min(n, start + chunk);
        for (int i = start; i < end; ++i) fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

double log_likelihood_dataset(const Copula& cop,
                              const std::vector<MixedMarginal>& margs,
                              const Eigen::MatrixXd& X, int workers) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd rowll(n);
  std::atomic<int> bad_row{-1};
  parallel_for_rows(n, workers, [&](int i) {
    try {
      rowll[i] = log_likelihood_point(cop, margs, X.row(i)).log_density;
    } catch (const std::exception&) {
      int expected = -1;
      bad_row.compare_exchange_strong(expected, i);
      rowll[i] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  if (bad_row.load() >= 0)
    throw NumericalError("log_likelihood_dataset: evaluation failed at row " +
                         std::to_string(bad_row.load()));
  // fixed summation order: results do not depend on the worker count
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += rowll[i];
  return total;
}

double latent_conditional_density(const Copula& cop, const PartitionResult& part,
                                  const Eigen::VectorXd& u_D) {
  const auto& D = part.discrete_idx;
  const auto& C = part.continuous_idx;
  if (u_D.size() != static_cast<Eigen::Index>(D.size()))
    throw std::invalid_argument("latent_conditional_density: length mismatch");
  if (D.empty()) return 1.0;  // density of the empty vector
  for (std::size_t i = 0; i < D.size(); ++i)
    if (!(u_D[i] >= part.lower[D[i]] && u_D[i] < part.upper[D[i]])) return 0.0;

  double mass = rectangle_mass(cop, part);
  if (!(mass > 0.0)) return 0.0;

  // conditional copula density c_{D|C}(u_D | b_C)
  double log_num;
  if (C.empty()) {
    log_num = cop.log_pdf(u_D, D);
  } else {
    Eigen::VectorXd bC(C.size());
    IndexList DC = D;
    for (std::size_t i = 0; i < C.size(); ++i) {
      bC[i] = part.upper[C[i]];
      DC.push_back(C[i]);
    }
    Eigen::VectorXd uDC(DC.size());
    uDC.head(u_D.size()) = u_D;
    uDC.tail(bC.size()) = bC;
    log_num = cop.log_pdf(uDC, DC) - cop.log_pdf(bC, C);
  }
  return std::exp(log_num - std::log(mass));
}

double latent_conditional_density(const Copula& cop,
                                  const std::vector<MixedMarginal>& margs,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u_D) {
  return latent_conditional_density(cop, partition(margs, x), u_D);
}

}  // namespace mixcop
