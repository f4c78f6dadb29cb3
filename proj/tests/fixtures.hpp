#pragma once

// Closed-form bivariate and trivariate fixtures used across the suites.
// Every formula here is hand-assembled (theta = 1 Clayton algebra) so the
// library is checked against independently written expressions.

#include <cmath>
#include <limits>
#include <vector>

#include "mixcop/copula.hpp"
#include "mixcop/marginals.hpp"
#include "mixcop/special.hpp"

namespace fixtures {

// X1 ~ pi*delta_0 + (1-pi)N(0,1), X2 Bernoulli with P(X2=0)=gamma,
// Clayton copula with theta = 1.
struct Example1 {
  double pi = 0.3;
  double gamma = 0.4;
  std::vector<mixcop::MixedMarginal> margs;
  mixcop::ClaytonCopula cop{1.0, 2};

  Example1() {
    margs.push_back(mixcop::MixedMarginal({{0.0, pi}}, 1.0 - pi,
                                          mixcop::make_normal(0.0, 1.0)));
    margs.push_back(
        mixcop::MixedMarginal({{0.0, gamma}, {1.0, 1.0 - gamma}}, 0.0, nullptr));
  }

  static double C(double u1, double u2) {
    if (u1 <= 0.0 || u2 <= 0.0) return 0.0;
    return 1.0 / (1.0 / u1 + 1.0 / u2 - 1.0);
  }
  static double c(double u1, double u2) {
    double s = 1.0 / u1 + 1.0 / u2 - 1.0;
    return 2.0 / (u1 * u1 * u2 * u2) * std::pow(s, -3.0);
  }
  static double C2g1(double u2, double u1) {
    if (u2 <= 0.0) return 0.0;
    double s = 1.0 / u1 + 1.0 / u2 - 1.0;
    return 1.0 / (u1 * u1) * std::pow(s, -2.0);
  }
  static double Cinv(double tau, double u1) {
    double st = std::sqrt(tau);
    return st * u1 / (1.0 + st * (u1 - 1.0));
  }

  double F1(double x) const {
    return (1.0 - pi) * mixcop::norm_cdf(x) + (x >= 0.0 ? pi : 0.0);
  }
  double F1m(double x) const {
    return (1.0 - pi) * mixcop::norm_cdf(x) + (x > 0.0 ? pi : 0.0);
  }
  double f1(double x) const { return (1.0 - pi) * mixcop::norm_pdf(x); }
  double F2(double x) const {
    return (x >= 1.0 ? 1.0 : (x >= 0.0 ? gamma : 0.0));
  }
  double F2m(double x) const {
    return (x > 1.0 ? 1.0 : (x > 0.0 ? gamma : 0.0));
  }

  // density of (x1, x2) assembled from the printed formulas
  double hand_density(double x1, double x2) const {
    if (x1 != 0.0) {
      return f1(x1) *
             (C2g1(F2(x2), F1(x1)) - C2g1(F2m(x2), F1(x1)));
    }
    return C(F1(0.0), F2(x2)) - C(F1(0.0), F2m(x2)) -
           C(F1m(0.0), F2(x2)) + C(F1m(0.0), F2m(x2));
  }
};

// Trivariate fixture: X1 has atoms at 0 and 1 plus a normal part, X2 has an
// atom at 0 plus a normal part, X3 is Bernoulli; Clayton theta = 1.
struct Trivariate {
  double pi1 = 0.2, pi2 = 0.1;  // X1 atom masses at 0 and 1
  double pi = 0.3;              // X2 atom mass at 0
  double gamma = 0.4;           // P(X3 = 0)
  std::vector<mixcop::MixedMarginal> margs;
  mixcop::ClaytonCopula cop{1.0, 3};

  Trivariate() {
    margs.push_back(mixcop::MixedMarginal({{0.0, pi1}, {1.0, pi2}},
                                          1.0 - pi1 - pi2,
                                          mixcop::make_normal(0.0, 1.0)));
    margs.push_back(mixcop::MixedMarginal({{0.0, pi}}, 1.0 - pi,
                                          mixcop::make_normal(0.0, 1.0)));
    margs.push_back(
        mixcop::MixedMarginal({{0.0, gamma}, {1.0, 1.0 - gamma}}, 0.0, nullptr));
  }

  double F1(double x) const {
    return (1.0 - pi1 - pi2) * mixcop::norm_cdf(x) + (x >= 0.0 ? pi1 : 0.0) +
           (x >= 1.0 ? pi2 : 0.0);
  }
  double F1m(double x) const {
    return (1.0 - pi1 - pi2) * mixcop::norm_cdf(x) + (x > 0.0 ? pi1 : 0.0) +
           (x > 1.0 ? pi2 : 0.0);
  }
  double f1(double x) const { return (1.0 - pi1 - pi2) * mixcop::norm_pdf(x); }
  double F2(double x) const {
    return (1.0 - pi) * mixcop::norm_cdf(x) + (x >= 0.0 ? pi : 0.0);
  }
  double F2m(double x) const {
    return (1.0 - pi) * mixcop::norm_cdf(x) + (x > 0.0 ? pi : 0.0);
  }
  double f2(double x) const { return (1.0 - pi) * mixcop::norm_pdf(x); }
  double F3(double x) const {
    return (x >= 1.0 ? 1.0 : (x >= 0.0 ? gamma : 0.0));
  }
  double F3m(double x) const {
    return (x > 1.0 ? 1.0 : (x > 0.0 ? gamma : 0.0));
  }

  // theta = 1 Clayton pieces; s is 1 + sum psi(u_j) over the arguments
  static double inv_or_inf(double u) {
    return u <= 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / u;
  }
  static double C3(double u1, double u2, double u3) {
    double s = inv_or_inf(u1) + inv_or_inf(u2) + inv_or_inf(u3) - 2.0;
    return std::isinf(s) ? 0.0 : 1.0 / s;
  }
  static double c2(double u1, double u2) {
    double s = 1.0 / u1 + 1.0 / u2 - 1.0;
    return 2.0 / (u1 * u1 * u2 * u2) * std::pow(s, -3.0);
  }
  // C_{k|ij}(u3 | u1, u2): ratio of second generator-inverse derivatives
  static double C_1given2(double u3, double u1, double u2) {
    double sB = 1.0 / u1 + 1.0 / u2 - 1.0;
    double sAB = sB + inv_or_inf(u3) - 1.0;
    if (std::isinf(sAB)) return 0.0;
    return std::pow(sB / sAB, 3.0);
  }
  // C_{jk|i}(u2, u3 | u1): ratio of first derivatives
  static double C_2given1(double u2, double u3, double u1) {
    double sB = 1.0 / u1;
    double sAB = sB + inv_or_inf(u2) + inv_or_inf(u3) - 2.0;
    if (std::isinf(sAB)) return 0.0;
    return std::pow(sB / sAB, 2.0);
  }

  // hand-assembled case densities
  double hand_density(double x1, double x2, double x3) const {
    const bool j1 = (x1 == 0.0 || x1 == 1.0);  // jump coordinates
    const bool j2 = (x2 == 0.0);
    double b1 = F1(x1), a1 = F1m(x1);
    double b2 = F2(x2), a2 = F2m(x2);
    double b3 = F3(x3), a3 = F3m(x3);
    if (!j1 && !j2) {  // case 1: C = {1,2}, D = {3}
      return c2(b1, b2) * f1(x1) * f2(x2) *
             (C_1given2(b3, b1, b2) - C_1given2(a3, b1, b2));
    }
    if (!j1 && j2) {  // case 2: C = {1}, D = {2,3}
      return f1(x1) * (C_2given1(b2, b3, b1) - C_2given1(b2, a3, b1) -
                       C_2given1(a2, b3, b1) + C_2given1(a2, a3, b1));
    }
    if (j1 && !j2) {  // case 3: C = {2}, D = {1,3}
      return f2(x2) * (C_2given1(b1, b3, b2) - C_2given1(b1, a3, b2) -
                       C_2given1(a1, b3, b2) + C_2given1(a1, a3, b2));
    }
    // case 4: C empty, eight corners
    return C3(b1, b2, b3) - C3(a1, b2, b3) - C3(b1, a2, b3) - C3(b1, b2, a3) +
           C3(a1, a2, b3) + C3(a1, b2, a3) + C3(b1, a2, a3) - C3(a1, a2, a3);
  }
};

}  // namespace fixtures
