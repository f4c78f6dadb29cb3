#include <doctest.h>

#include <cmath>

#include "mixcop/likelihood.hpp"
#include "mixcop/rng.hpp"
#include "mixcop/special.hpp"

#include "fixtures.hpp"
#include "testutil.hpp"

using namespace mixcop;

TEST_CASE("difference operator basics") {
  auto g1 = [](const Eigen::VectorXd& v) { return v[0] * v[0]; };
  Eigen::VectorXd a1(1), b1(1);
  a1 << 0.25;
  b1 << 0.75;
  CHECK(difference_operator(g1, a1, b1) ==
        doctest::Approx(0.75 * 0.75 - 0.25 * 0.25).epsilon(1e-15));

  auto g2 = [](const Eigen::VectorXd& v) { return std::exp(v[0] + 2.0 * v[1]); };
  Eigen::VectorXd a2(2), b2(2);
  a2 << 0.1, 0.2;
  b2 << 0.5, 0.9;
  double expect = g2(b2) - std::exp(0.5 + 0.4) - std::exp(0.1 + 1.8) + g2(a2);
  CHECK(difference_operator(g2, a2, b2) == doctest::Approx(expect).epsilon(1e-14));

  // degenerate rectangle
  CHECK(difference_operator(g1, b1, b1) == 0.0);

  // k = 0: the function itself
  auto g0 = [](const Eigen::VectorXd&) { return 42.0; };
  CHECK(difference_operator(g0, Eigen::VectorXd(), Eigen::VectorXd()) == 42.0);

  // a product CDF factorizes exactly (dyadic bounds make fp exact)
  auto prod = [](const Eigen::VectorXd& v) { return v[0] * v[1] * v[2]; };
  Eigen::VectorXd a3(3), b3(3);
  a3 << 0.25, 0.5, 0.125;
  b3 << 0.75, 1.0, 0.625;
  CHECK(difference_operator(prod, a3, b3) ==
        (0.75 - 0.25) * (1.0 - 0.5) * (0.625 - 0.125));

  CHECK_THROWS_AS(difference_operator(prod, Eigen::VectorXd::Zero(21),
                                      Eigen::VectorXd::Ones(21)),
                  std::invalid_argument);
}

TEST_CASE("running example: both likelihood cases match the printed formulas") {
  fixtures::Example1 fx;
  for (double x1 : {-0.8, 0.4, 1.3}) {
    for (double x2 : {0.0, 1.0}) {
      Eigen::VectorXd x(2);
      x << x1, x2;
      LikelihoodTerm t = log_likelihood_point(fx.cop, fx.margs, x);
      CHECK(std::exp(t.log_density) ==
            doctest::Approx(fx.hand_density(x1, x2)).epsilon(1e-12));
    }
  }
  // the jump case x1 = 0
  for (double x2 : {0.0, 1.0}) {
    Eigen::VectorXd x(2);
    x << 0.0, x2;
    LikelihoodTerm t = log_likelihood_point(fx.cop, fx.margs, x);
    CHECK(t.log_continuous_part == 0.0);  // C(x) is empty
    CHECK(std::exp(t.log_density) ==
          doctest::Approx(fx.hand_density(0.0, x2)).epsilon(1e-12));
  }
}

TEST_CASE("fully discrete models put unit mass on the support") {
  // two Bernoulli margins under all three families
  std::vector<MixedMarginal> margs;
  margs.push_back(MixedMarginal({{0.0, 0.4}, {1.0, 0.6}}, 0.0, nullptr));
  margs.push_back(MixedMarginal({{0.0, 0.7}, {1.0, 0.3}}, 0.0, nullptr));

  std::vector<std::unique_ptr<Copula>> cops;
  cops.push_back(std::make_unique<ClaytonCopula>(1.0, 2));
  cops.push_back(std::make_unique<GumbelCopula>(1.7, 2));
  Eigen::MatrixXd g(2, 2);
  g << 1.0, 0.45, 0.45, 1.0;
  cops.push_back(std::make_unique<GaussianCopula>(g));

  for (const auto& cop : cops) {
    double total = 0.0;
    for (double x1 : {0.0, 1.0})
      for (double x2 : {0.0, 1.0}) {
        Eigen::VectorXd x(2);
        x << x1, x2;
        total += std::exp(log_likelihood_point(*cop, margs, x).log_density);
      }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("trivariate fixture: all four cases match the hand assembly") {
  fixtures::Trivariate fx;
  // one x per partition case
  std::vector<Eigen::VectorXd> xs;
  Eigen::VectorXd x(3);
  x << 0.5, 1.2, 0.0;  // case 1
  xs.push_back(x);
  x << 0.5, 0.0, 1.0;  // case 2
  xs.push_back(x);
  x << 1.0, 0.7, 0.0;  // case 3 (atom of X1 at 1)
  xs.push_back(x);
  x << 0.0, 0.0, 1.0;  // case 4
  xs.push_back(x);
  for (const auto& xi : xs) {
    LikelihoodTerm t = log_likelihood_point(fx.cop, fx.margs, xi);
    CHECK(std::exp(t.log_density) ==
          doctest::Approx(fx.hand_density(xi[0], xi[1], xi[2])).epsilon(1e-10));
  }
}

TEST_CASE("dataset log likelihood") {
  fixtures::Example1 fx;
  Eigen::MatrixXd X(1, 2);
  X << 0.7, 0.0;
  CHECK(log_likelihood_dataset(fx.cop, fx.margs, X) ==
        doctest::Approx(log_likelihood_point(fx.cop, fx.margs, X.row(0))
                            .log_density));

  // independence copula with continuous margins: sum of log marginal densities
  std::vector<MixedMarginal> margs;
  margs.push_back(MixedMarginal({}, 1.0, make_normal(0.0, 1.0)));
  margs.push_back(MixedMarginal({}, 1.0, make_exponential(2.0)));
  GumbelCopula ind(1.0, 2);
  Eigen::MatrixXd Y(3, 2);
  Y << 0.3, 0.5, -1.0, 2.0, 0.0, 0.1;
  double expect = 0.0;
  for (int i = 0; i < 3; ++i)
    expect += std::log(margs[0].continuous_density(Y(i, 0))) +
              std::log(margs[1].continuous_density(Y(i, 1)));
  CHECK(log_likelihood_dataset(ind, margs, Y) ==
        doctest::Approx(expect).epsilon(1e-12));

  // worker counts do not change the bits
  fixtures::Trivariate tri;
  Rng rng(5);
  Eigen::MatrixXd Z(64, 3);
  for (int i = 0; i < Z.rows(); ++i) {
    Z(i, 0) = rng.uniform() < 0.3 ? 0.0 : rng.normal();
    Z(i, 1) = rng.uniform() < 0.3 ? 0.0 : rng.normal();
    Z(i, 2) = rng.uniform() < 0.4 ? 0.0 : 1.0;
  }
  double l1 = log_likelihood_dataset(tri.cop, tri.margs, Z, 1);
  double l4 = log_likelihood_dataset(tri.cop, tri.margs, Z, 4);
  CHECK(l1 == l4);
}

TEST_CASE("latent conditional density normalizes and matches the formula") {
  fixtures::Example1 fx;

  SUBCASE("continuous x1: printed conditional") {
    Eigen::VectorXd x(2);
    x << 0.7, 0.0;
    PartitionResult part = partition(fx.margs, x);
    double b1 = fx.F1(0.7);
    double denom = fx.C2g1(fx.F2(0.0), b1) - fx.C2g1(fx.F2m(0.0), b1);
    for (double u2 : {0.05, 0.2, 0.35}) {
      Eigen::VectorXd uD(1);
      uD << u2;
      double expect = fx.c(b1, u2) / denom;  // c_{2|1}(u2|u1) = c(u1,u2)
      CHECK(latent_conditional_density(fx.cop, part, uD) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
    // outside the rectangle the density vanishes
    Eigen::VectorXd out(1);
    out << 0.8;
    CHECK(latent_conditional_density(fx.cop, part, out) == 0.0);
  }

  SUBCASE("no jump coordinates: degenerate density 1") {
    std::vector<MixedMarginal> margs;
    margs.push_back(MixedMarginal({}, 1.0, make_normal(0, 1)));
    margs.push_back(MixedMarginal({}, 1.0, make_normal(0, 1)));
    Eigen::VectorXd x(2);
    x << 0.3, -0.7;
    CHECK(latent_conditional_density(ClaytonCopula(1.0, 2), margs, x,
                                     Eigen::VectorXd()) == 1.0);
  }

  SUBCASE("2d rectangle integrates to one") {
    Eigen::VectorXd x(2);
    x << 0.0, 0.0;  // both coordinates jump
    PartitionResult part = partition(fx.margs, x);
    const GaussLegendre& gl = gauss_legendre(80);
    double a1 = part.lower[0], b1 = part.upper[0];
    double a2 = part.lower[1], b2 = part.upper[1];
    double total = 0.0;
    for (int i = 0; i < gl.nodes.size(); ++i) {
      double u1 = a1 + 0.5 * (gl.nodes[i] + 1.0) * (b1 - a1);
      for (int j = 0; j < gl.nodes.size(); ++j) {
        double u2 = a2 + 0.5 * (gl.nodes[j] + 1.0) * (b2 - a2);
        Eigen::VectorXd uD(2);
        uD << u1, u2;
        total += 0.25 * gl.weights[i] * gl.weights[j] * (b1 - a1) * (b2 - a2) *
                 latent_conditional_density(fx.cop, part, uD);
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("rectangle mass agrees with conditional Monte Carlo") {
  // C = {1} fixed at a continuous value, D = {2,3}: sample U_{2,3} | U_1 by
  // the sequential conditional-quantile transform and compare frequencies
  fixtures::Trivariate fx;
  Eigen::VectorXd x(3);
  x << 0.5, 0.0, 0.0;
  PartitionResult part = partition(fx.margs, x);
  double mass = rectangle_mass(fx.cop, part);

  Rng rng(71);
  const int n = 200000;
  int hits = 0;
  const double b1 = part.upper[0];
  Eigen::VectorXd uB(1), uA(1);
  for (int i = 0; i < n; ++i) {
    uB << b1;
    double u2 = fx.cop.conditional_quantile(rng.uniform(), 1, uB, IndexList{0});
    Eigen::VectorXd uB2(2);
    uB2 << b1, u2;
    double u3 =
        fx.cop.conditional_quantile(rng.uniform(), 2, uB2, IndexList{0, 1});
    if (u2 >= part.lower[1] && u2 < part.upper[1] && u3 >= part.lower[2] &&
        u3 < part.upper[2])
      ++hits;
  }
  double freq = static_cast<double>(hits) / n;
  double se = std::sqrt(mass * (1.0 - mass) / n);
  CHECK(std::fabs(freq - mass) < 3.0 * se);
}

TEST_CASE("likelihood converges to the continuous formula as atoms shrink") {
  std::vector<MixedMarginal> cont;
  cont.push_back(MixedMarginal({}, 1.0, make_normal(0, 1)));
  cont.push_back(MixedMarginal({}, 1.0, make_normal(0, 1)));
  ClaytonCopula cop(1.0, 2);
  Eigen::VectorXd x(2);
  x << 0.4, -0.2;
  double base = log_likelihood_point(cop, cont, x).log_density;

  double prev_gap = 1e9;
  for (double mass : {1e-2, 1e-4}) {
    // an atom exactly at the observation point: the likelihood evaluates the
    // shrinking rectangle and must approach the continuous density
    std::vector<MixedMarginal> margs;
    margs.push_back(MixedMarginal({{0.4, mass}}, 1.0 - mass, make_normal(0, 1)));
    margs.push_back(MixedMarginal({}, 1.0, make_normal(0, 1)));
    LikelihoodTerm t = log_likelihood_point(cop, margs, x);
    // compare the rectangle mass scaled by the atom width to the density
    double gap = std::fabs(t.log_density - std::log(mass) - base);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 2e-4);
}
