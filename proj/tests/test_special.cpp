#include <doctest.h>

#include <cmath>

#include "mixcop/mvn.hpp"
#include "mixcop/rng.hpp"
#include "mixcop/special.hpp"

#include "testutil.hpp"

using namespace mixcop;

TEST_CASE("normal quantile inverts the normal cdf") {
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(norm_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-13));
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-6}) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(norm_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(norm_quantile(1.0), std::domain_error);
}

TEST_CASE("bivariate normal cdf against closed forms") {
  // Phi2(0,0,rho) = 1/4 + asin(rho)/(2 pi)
  for (double rho : {-0.9, -0.5, 0.0, 0.3, 0.7, 0.95, 0.999}) {
    double expect = 0.25 + std::asin(rho) / (2.0 * M_PI);
    CHECK(bvn_cdf(0.0, 0.0, rho) == doctest::Approx(expect).epsilon(1e-12));
  }
  // independence factorizes
  CHECK(bvn_cdf(0.3, -0.7, 0.0) ==
        doctest::Approx(norm_cdf(0.3) * norm_cdf(-0.7)).epsilon(1e-14));
  // comonotone / countermonotone limits
  CHECK(bvn_cdf(0.5, 1.5, 1.0) == doctest::Approx(norm_cdf(0.5)));
  CHECK(bvn_cdf(0.5, 1.5, -1.0) ==
        doctest::Approx(std::max(0.0, norm_cdf(0.5) + norm_cdf(1.5) - 1.0)));
  // symmetry
  CHECK(bvn_cdf(0.8, -0.2, 0.6) == doctest::Approx(bvn_cdf(-0.2, 0.8, 0.6)));
}

TEST_CASE("trivariate mvn cdf agrees with Monte Carlo and product forms") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd b(3);
  b << 0.5, -0.3, 1.1;
  // independence: product of the univariate CDFs
  double expect = norm_cdf(0.5) * norm_cdf(-0.3) * norm_cdf(1.1);
  MvnResult r = mvn_cdf(b, id);
  CHECK(r.p == doctest::Approx(expect).epsilon(1e-7));

  // correlated case vs plain Monte Carlo
  Eigen::MatrixXd g(3, 3);
  g << 1.0, 0.5, 0.3, 0.5, 1.0, 0.4, 0.3, 0.4, 1.0;
  MvnResult rc = mvn_cdf(b, g);
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  Eigen::MatrixXd L = llt.matrixL();
  Rng rng(42);
  int hits = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z(3);
    for (int j = 0; j < 3; ++j) z[j] = rng.normal();
    Eigen::VectorXd x = L * z;
    if (x[0] <= b[0] && x[1] <= b[1] && x[2] <= b[2]) ++hits;
  }
  double mc = static_cast<double>(hits) / n;
  double se = std::sqrt(mc * (1 - mc) / n);
  CHECK(std::fabs(rc.p - mc) < 4.0 * se + 1e-6);
  CHECK(rc.error < 1e-5);

  // rectangle with infinities reduces to the bivariate case
  Eigen::VectorXd lo(3), hi(3);
  lo << -0.5, -std::numeric_limits<double>::infinity(),
      -std::numeric_limits<double>::infinity();
  hi << 0.5, 0.7, std::numeric_limits<double>::infinity();
  MvnResult rr = mvn_rectangle(lo, hi, g);
  double expect2 = bvn_cdf(0.5, 0.7, 0.5) - bvn_cdf(-0.5, 0.7, 0.5);
  CHECK(rr.p == doctest::Approx(expect2).epsilon(2e-6));
}

TEST_CASE("mvn cdf handles saturated and degenerate inputs") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  Eigen::VectorXd all_inf =
      Eigen::VectorXd::Constant(4, std::numeric_limits<double>::infinity());
  CHECK(mvn_cdf(all_inf, id).p == 1.0);
  Eigen::VectorXd one_neg = all_inf;
  one_neg[2] = -std::numeric_limits<double>::infinity();
  CHECK(mvn_cdf(one_neg, id).p == 0.0);
}

TEST_CASE("rng produces the documented marginals") {
  Rng rng(7);
  const int n = 200000;
  // uniforms pass KS
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = rng.uniform();
  CHECK(testutil::ks_pvalue(u, [](double x) { return x; }) > 0.01);
  // normals pass KS
  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
  CHECK(testutil::ks_pvalue(z, [](double x) { return norm_cdf(x); }) > 0.01);
  // gamma(2.5, 2.0) passes KS against the incomplete-gamma oracle
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = rng.gamma(2.5, 2.0);
  CHECK(testutil::ks_pvalue(g, [](double x) {
          return testutil::gamma_cdf(x, 2.5, 0.5);
        }) > 0.01);
  // positive stable: Laplace transform at a few points matches exp(-t^alpha)
  double alpha = 0.5;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = rng.positive_stable(alpha);
  for (double t : {0.5, 1.0, 2.0}) {
    double lt = 0.0;
    for (int i = 0; i < n; ++i) lt += std::exp(-t * s[i]);
    lt /= n;
    CHECK(lt == doctest::Approx(std::exp(-std::pow(t, alpha))).epsilon(0.01));
  }
}

TEST_CASE("dirichlet moments match the analytic values") {
  Rng rng(11);
  Eigen::VectorXd alpha(3);
  alpha << 11.0, 6.0, 6.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  const int n = 100000;
  for (int i = 0; i < n; ++i) mean += rng.dirichlet(alpha);
  mean /= n;
  const double a0 = alpha.sum();
  for (int k = 0; k < 3; ++k) {
    double expect = alpha[k] / a0;
    double sd = std::sqrt(expect * (1 - expect) / (a0 + 1.0) / n);
    CHECK(std::fabs(mean[k] - expect) < 4.0 * sd);
  }
}
