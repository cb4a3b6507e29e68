#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "bnlab/quadrature.hpp"

namespace {

using namespace bnlab;

// int_0^inf t^a (1+t^q)^{-m} dt = B((a+1)/q, m-(a+1)/q)/q.
double beta_oracle(double a, double q, double m) {
  const double u = (a + 1.0) / q;
  return boost::math::beta(u, m - u) / q;
}

TEST(Quadrature, PowerIntegralMatchesBetaFunction) {
  struct Case { double a, q, m; };
  for (const auto& c : {Case{4.0, 2.0, 5.0}, Case{6.0, 2.0, 6.0}, Case{2.0, 1.5, 4.0},
                        Case{9.0, 1.5, 12.0}, Case{0.0, 2.0, 1.0}}) {
    const auto est = quad::power_integral(c.a, c.q, c.m);
    EXPECT_NEAR(est.value, beta_oracle(c.a, c.q, c.m), 1e-9 * est.value)
        << "a=" << c.a << " q=" << c.q << " m=" << c.m;
  }
}

TEST(Quadrature, TailSeriesMatchesBetaRemainder) {
  const double a = 5.0, q = 2.0, m = 5.0;
  const auto f = [&](double t) { return quad::power_kernel(t, a, q, m); };
  const double head = quad::integrate(f, 0.0, 3.0).value;
  EXPECT_NEAR(head + quad::power_tail_series(a, q, m, 3.0), beta_oracle(a, q, m), 1e-12);
}

TEST(Quadrature, DivergentTailRejected) {
  EXPECT_THROW(quad::power_tail_series(3.0, 2.0, 2.0, 4.0), NonIntegrable);
  EXPECT_THROW(quad::power_integral(-1.5, 2.0, 4.0), NonIntegrable);
}

TEST(Quadrature, SphereArea) {
  EXPECT_NEAR(quad::sphere_area(2), 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(quad::sphere_area(3), 4.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(quad::sphere_area(4), 2.0 * std::numbers::pi * std::numbers::pi, 1e-13);
}

TEST(Quadrature, CompensatedSumIsOrderIndependent) {
  quad::CompensatedSum a, b;
  const double xs[] = {1e16, 1.0, -1e16, 3.0, 1e-3};
  for (double x : xs) a.add(x);
  for (int i = 4; i >= 0; --i) b.add(xs[i]);
  EXPECT_DOUBLE_EQ(a.value(), 4.001);
  EXPECT_DOUBLE_EQ(b.value(), 4.001);
}

TEST(Quadrature, GeometricBreaksAreSortedAndClipped) {
  const auto br = quad::geometric_breaks(0.0, 1.0, 0.01, {0.5, 2.0});
  EXPECT_EQ(br.front(), 0.0);
  EXPECT_EQ(br.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(br.begin(), br.end()));
  EXPECT_NE(std::find(br.begin(), br.end(), 0.5), br.end());
}

}  // namespace
