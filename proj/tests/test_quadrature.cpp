#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numbers>

#include "virial/parallel.hpp"
#include "virial/quadrature.hpp"

using namespace virial;
using namespace virial::quadrature;

TEST(GaussLegendre, ExactOnPolynomials) {
  for (int n = 1; n <= 20; ++n) {
    const auto& g = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : g.weights) wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-13);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " deg=" << deg;
    }
  }
  EXPECT_THROW(gauss_legendre(0), std::out_of_range);
  EXPECT_THROW(gauss_legendre(65), std::out_of_range);
}

TEST(Adaptive, Smooth) {
  EXPECT_NEAR(adaptive_integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12), 2.0, 1e-11);
  EXPECT_NEAR(adaptive_integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12), std::sqrt(std::numbers::pi),
              1e-11);
}

// Area of {|y1| < 1, |y2| < 1, |y1 - y2| < 1} is 3.
TEST(Nested, StepIntegrandIsExact) {
  const double anchors[] = {0.0};
  const double radii[] = {1.0};
  const double v = nested_integrate(2, -3.0, 3.0, anchors, radii, NestedRule{2, 1}, [](std::span<const double> y) {
    return (std::abs(y[0]) < 1 && std::abs(y[1]) < 1 && std::abs(y[0] - y[1]) < 1) ? 1.0 : 0.0;
  });
  EXPECT_NEAR(v, 3.0, 1e-12);
}

TEST(Nested, PiecewisePolynomial) {
  const double anchors[] = {0.0};
  const double radii[] = {1.0, 1.5};
  // int over |y| < 1.5 of (1 + y^2) with a jump at |y| = 1 to weight 2
  const double v = nested_integrate(1, -2.0, 2.0, anchors, radii, NestedRule{3, 1}, [](std::span<const double> y) {
    const double a = std::abs(y[0]);
    return a < 1 ? 1 + y[0] * y[0] : (a < 1.5 ? 2.0 : 0.0);
  });
  EXPECT_NEAR(v, 2.0 + 2.0 / 3.0 + 2.0, 1e-12);
}

TEST(MonteCarlo, SeededEstimate) {
  auto f = [](std::span<const double> y) { return y[0] * y[0] + y[1] * y[1]; };
  const auto a = monte_carlo(1, 2, -1.0, 1.0, 200000, 7, f);
  const auto b = monte_carlo(1, 2, -1.0, 1.0, 200000, 7, f);
  EXPECT_EQ(a.value, b.value);
  EXPECT_NEAR(a.value, 8.0 / 3.0, 4 * a.std_error);
  EXPECT_GT(a.std_error, 0.0);
  const auto c = monte_carlo(1, 2, -1.0, 1.0, 200000, 8, f);
  EXPECT_NE(a.value, c.value);
  EXPECT_NEAR(a.value, c.value, 3 * std::hypot(a.std_error, c.std_error));
}

TEST(Parallel, WorkerCountIndependent) {
  std::vector<double> one(1000), many(1000);
  parallel_for(1000, 1, [&](std::size_t i) { one[i] = std::sin(double(i)); });
  parallel_for(1000, 6, [&](std::size_t i) { many[i] = std::sin(double(i)); });
  EXPECT_EQ(one, many);
}

TEST(Parallel, RethrowsLowestIndex) {
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 17 || i == 80) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 17");
  }
}
