#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

#include "qplane/xprec.hpp"

using qplane::DDReal;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

Big big(DDReal x) { return Big(x.hi()) + Big(x.lo()); }

double rel_err(DDReal got, const Big& want) {
  if (want == 0) return static_cast<double>(abs(big(got)));
  return static_cast<double>(abs((big(got) - want) / want));
}

DDReal random_dd(std::mt19937_64& g, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double hi = u(g) * scale;
  return DDReal(hi, u(g) * std::abs(hi) * 0x1.0p-54);
}

}  // namespace

TEST(TwoSum, ExactForRandomPairs) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(g);
    const double b = u(g) * 1e-9;
    double s, e;
    qplane::eft::two_sum(a, b, s, e);
    EXPECT_EQ(Big(s) + Big(e), Big(a) + Big(b));
  }
}

TEST(TwoProd, ExactForRandomPairs) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(g);
    const double b = u(g);
    double p, e;
    qplane::eft::two_prod(a, b, p, e);
    EXPECT_EQ(Big(p) + Big(e), Big(a) * Big(b));
  }
}

TEST(DDReal, ArithmeticMatchesFiftyDigitReference) {
  std::mt19937_64 g(3);
  for (int i = 0; i < 500; ++i) {
    const DDReal a = random_dd(g, 100.0);
    const DDReal b = random_dd(g, 3.0);
    EXPECT_LT(rel_err(a + b, big(a) + big(b)), 0x1.0p-100) << i;
    EXPECT_LT(rel_err(a - b, big(a) - big(b)), 0x1.0p-100) << i;
    EXPECT_LT(rel_err(a * b, big(a) * big(b)), 0x1.0p-102) << i;
    EXPECT_LT(rel_err(a / b, big(a) / big(b)), 0x1.0p-100) << i;
  }
}

TEST(DDReal, OneThirdTimesThree) {
  const DDReal third = DDReal(1.0) / DDReal(3.0);
  const DDReal back = third * DDReal(3.0);
  EXPECT_LT(std::abs(static_cast<double>(back - DDReal(1.0))), 1e-31);
}

TEST(DDReal, Constants) {
  EXPECT_LT(rel_err(qplane::dd_const::pi, boost::math::constants::pi<Big>()), 0x1.0p-104);
  EXPECT_LT(rel_err(qplane::dd_const::two_pi, 2 * boost::math::constants::pi<Big>()), 0x1.0p-104);
  EXPECT_LT(rel_err(qplane::dd_const::ln2, boost::math::constants::ln_two<Big>()), 0x1.0p-104);
}

TEST(DDReal, ExpAndLog) {
  for (double x : {-30.0, -1.5, -1e-8, 0.0, 1e-12, 0.5, 1.0, 2.0, 10.0, 100.0}) {
    EXPECT_LT(rel_err(exp(DDReal(x)), boost::multiprecision::exp(Big(x))), 0x1.0p-98) << x;
  }
  for (double x : {1e-10, 0.1, 0.5, 0.999, 1.0, 1.001, 2.0, 3.0, 71.0, 1e6}) {
    EXPECT_LT(std::abs(static_cast<double>(big(log(DDReal(x))) - boost::multiprecision::log(Big(x)))),
              std::max(1.0, std::abs(std::log(x))) * 0x1.0p-100)
        << x;
  }
  // log(1 + tiny) keeps the tiny part.
  const DDReal tiny = DDReal(1.0) + DDReal(1e-20);
  EXPECT_LT(rel_err(log(tiny), boost::multiprecision::log1p(Big(1e-20))), 1e-10);
}

TEST(DDReal, NonFiniteIsDetected) {
  const DDReal big_value(1e300);
  EXPECT_FALSE((big_value * big_value).finite());
  EXPECT_TRUE(DDReal(1.0).finite());
}

TEST(DDComplex, ProductAndConjugate) {
  const qplane::DDComplex a{DDReal(1.0), DDReal(2.0)};
  const qplane::DDComplex b{DDReal(3.0), DDReal(-1.0)};
  const auto p = a * b;
  EXPECT_EQ(p.to_complex(), std::complex<double>(5.0, 5.0));
  EXPECT_EQ(qplane::conj(a).to_complex(), std::complex<double>(1.0, -2.0));
}

TEST(DDReal, Log1pKeepsRelativeAccuracy) {
  for (double t : {-0.2, -1e-3, -1e-9, 1e-30, 1e-12, 1e-6, 0.1, 0.24, 0.3, 5.0}) {
    const Big want = boost::multiprecision::log1p(Big(t));
    EXPECT_LT(rel_err(log1p(DDReal(t)), want), 0x1.0p-100) << t;
  }
}
