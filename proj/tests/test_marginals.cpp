#include <doctest.h>

#include <cmath>

#include "mixcop/marginals.hpp"
#include "mixcop/rng.hpp"
#include "mixcop/special.hpp"

#include "testutil.hpp"

using namespace mixcop;

namespace {

// the running bivariate fixture: X1 ~ pi*delta_0 + (1-pi)*N(0,1)
MixedMarginal example1_margin1(double pi) {
  return MixedMarginal({{0.0, pi}}, 1.0 - pi, make_normal(0.0, 1.0));
}

MixedMarginal bernoulli(double gamma_zero) {
  return MixedMarginal({{0.0, gamma_zero}, {1.0, 1.0 - gamma_zero}}, 0.0,
                       nullptr);
}

}  // namespace

TEST_CASE("mixed cdf at and around an atom") {
  MixedMarginal f1 = example1_margin1(0.3);
  CHECK(f1.cdf(0.0) == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(f1.cdf_left(0.0) == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(f1.cdf(1e9) == doctest::Approx(1.0));
  CHECK(f1.cdf(-1e9) == doctest::Approx(0.0));
  // continuity points: left limit equals the cdf
  CHECK(f1.cdf_left(1.3) == f1.cdf(1.3));
  CHECK(f1.is_atom(0.0));
  CHECK(!f1.is_atom(0.5));

  MixedMarginal b = bernoulli(0.4);
  CHECK(b.cdf_left(1.0) == doctest::Approx(0.4));
  CHECK(b.cdf(1.0) == doctest::Approx(1.0));
  CHECK(b.cdf(0.0) == doctest::Approx(0.4));
}

TEST_CASE("generalized inverse maps gaps back to the atom") {
  MixedMarginal f1 = example1_margin1(0.3);
  CHECK(f1.quantile(0.5) == 0.0);           // inside (0.35, 0.65]
  CHECK(f1.quantile(f1.cdf(0.0)) == 0.0);   // gap is closed at the top
  CHECK(f1.quantile(0.36) == 0.0);
  // outside the gap: the continuous inverse
  CHECK(f1.quantile(0.35) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(f1.quantile(0.2) ==
        doctest::Approx(norm_quantile(0.2 / 0.7)).epsilon(1e-12));
  CHECK(f1.quantile(0.9) ==
        doctest::Approx(norm_quantile((0.9 - 0.3) / 0.7)).epsilon(1e-12));
  CHECK_THROWS_AS(f1.quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(f1.quantile(1.0), std::domain_error);

  // continuous-only marginal: the ordinary inverse
  MixedMarginal cont({}, 1.0, make_normal(1.0, 2.0));
  CHECK(cont.quantile(0.8) ==
        doctest::Approx(1.0 + 2.0 * norm_quantile(0.8)).epsilon(1e-13));
}

TEST_CASE("marginal validation rejects bad constructions") {
  CHECK_THROWS(MixedMarginal({{0.0, 0.5}}, 0.6, make_normal(0, 1)));
  CHECK_THROWS(MixedMarginal({{1.0, 0.2}, {0.0, 0.2}}, 0.6, make_normal(0, 1)));
  CHECK_THROWS(MixedMarginal({{0.0, 0.2}, {0.0, 0.2}}, 0.6, make_normal(0, 1)));
  CHECK_THROWS(MixedMarginal({}, 1.0, nullptr));
}

TEST_CASE("partition classifies jump and continuity coordinates") {
  // first example of the text: X2 = p*delta_0 + (1-p)*Exp(lambda)
  std::vector<MixedMarginal> margs;
  margs.push_back(MixedMarginal({}, 1.0, make_normal(0, 1)));
  margs.push_back(MixedMarginal({{0.0, 0.25}}, 0.75, make_exponential(1.0)));
  Eigen::VectorXd x(2);
  x << 1.3, 0.0;
  PartitionResult p = partition(margs, x);
  CHECK(p.continuous_idx == std::vector<int>{0});
  CHECK(p.discrete_idx == std::vector<int>{1});
  CHECK(p.lower[0] == p.upper[0]);
  CHECK(p.lower[1] < p.upper[1]);
  CHECK(p.upper[1] == doctest::Approx(0.25));
  CHECK(p.lower[1] == doctest::Approx(0.0));

  // all-continuous margins: D empty
  x << 1.3, 0.7;
  PartitionResult q = partition(margs, x);
  CHECK(q.discrete_idx.empty());

  // trivariate fixture, x = (0, 0, 1): every coordinate is a jump point
  std::vector<MixedMarginal> tri;
  tri.push_back(MixedMarginal({{0.0, 0.2}, {1.0, 0.1}}, 0.7, make_normal(0, 1)));
  tri.push_back(MixedMarginal({{0.0, 0.3}}, 0.7, make_normal(0, 1)));
  tri.push_back(bernoulli(0.4));
  Eigen::VectorXd x3(3);
  x3 << 0.0, 0.0, 1.0;
  PartitionResult r = partition(tri, x3);
  CHECK(r.continuous_idx.empty());
  CHECK(r.discrete_idx == std::vector<int>{0, 1, 2});
}

TEST_CASE("empirical fit detects atoms and keeps data PITs interior") {
  SUBCASE("tie above threshold becomes an atom with its empirical mass") {
    std::vector<double> s{0, 0, 0, 5, 7, 9, 11, 12, 14, 20};
    MixedMarginal m = fit_empirical(s, {0.0});
    REQUIRE(m.atoms().size() == 1);
    CHECK(m.atoms()[0].location == 0.0);
    CHECK(m.atoms()[0].mass == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(m.continuous_weight() == doctest::Approx(0.7).epsilon(1e-15));
    // PITs of every data value stay inside (0,1)
    for (double v : s) {
      CHECK(m.cdf(v) < 1.0);
      CHECK(m.cdf(v) > 0.0);
    }
  }
  SUBCASE("count-based value at the atom") {
    MixedMarginal m = fit_empirical({0, 0, 1.5, 2.5});
    CHECK(m.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.cdf_left(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("all-distinct sample has no atoms") {
    MixedMarginal m = fit_empirical({1, 2, 3});
    CHECK(m.atoms().empty());
    CHECK(m.quantile(0.5) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("income column with 30% zeros") {
    std::vector<double> s;
    Rng rng(3);
    for (int i = 0; i < 30; ++i) s.push_back(0.0);
    for (int i = 0; i < 70; ++i) s.push_back(500.0 + 1000.0 * rng.uniform());
    MixedMarginal m = fit_empirical(s, {0.0});
    CHECK(m.cdf(0.0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(m.cdf_left(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("empty sample is an error") {
    CHECK_THROWS(fit_empirical({}));
    CHECK_THROWS(fit_empirical({1.0}));
  }
}

TEST_CASE("cdf_left <= cdf with strict inequality exactly at atoms") {
  Rng rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    double pi = 0.1 + 0.5 * rng.uniform();
    double loc = rng.normal();
    MixedMarginal m({{loc, pi}}, 1.0 - pi, make_normal(rng.normal(), 1.0));
    for (int k = 0; k < 40; ++k) {
      double x = (k % 5 == 0) ? loc : 3.0 * rng.normal();
      CHECK(m.cdf_left(x) <= m.cdf(x));
      if (m.is_atom(x))
        CHECK(m.cdf(x) - m.cdf_left(x) == doctest::Approx(pi).epsilon(1e-12));
      else
        CHECK(m.cdf_left(x) == m.cdf(x));
    }
    // generalized-inverse consistency across the whole gap
    double a = m.cdf_left(loc), b = m.cdf(loc);
    for (int k = 0; k < 20; ++k) {
      double u = a + (b - a) * rng.uniform();
      CHECK(m.quantile(u) == loc);
    }
    CHECK(m.quantile(b) == loc);
  }
}

TEST_CASE("partition invariants hold for randomized marginals") {
  Rng rng(1234);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<MixedMarginal> margs;
    int m = 2 + static_cast<int>(rng.next_u64() % 3);
    for (int j = 0; j < m; ++j) {
      double pi = 0.2 + 0.3 * rng.uniform();
      margs.push_back(
          MixedMarginal({{0.0, pi}}, 1.0 - pi, make_normal(0.0, 1.0)));
    }
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd x(m);
      for (int j = 0; j < m; ++j)
        x[j] = (rng.uniform() < 0.4) ? 0.0 : rng.normal();
      PartitionResult p = partition(margs, x);
      CHECK(p.continuous_idx.size() + p.discrete_idx.size() ==
            static_cast<std::size_t>(m));
      for (int j : p.continuous_idx) CHECK(p.lower[j] == p.upper[j]);
      for (int j : p.discrete_idx) CHECK(p.lower[j] < p.upper[j]);
    }
  }
}

TEST_CASE("PIT of the continuous component is uniform") {
  MixedMarginal f1 = example1_margin1(0.3);
  Rng rng(5);
  const int n = 100000;
  std::vector<double> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    double x = f1.quantile(u);
    if (f1.is_atom(x)) continue;
    // remove the atom contribution: what is left is the continuous PIT
    v.push_back((f1.cdf(x) - (x >= 0.0 ? 0.3 : 0.0)) / 0.7);
  }
  CHECK(testutil::ks_pvalue(v, [](double t) { return t; }) > 0.01);
}
