#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "virial/checks.hpp"
#include "virial/potential.hpp"

using namespace virial;

TEST(Energy, SmallConfigurations) {
  const auto sw = PairPotential::square_well(1.0, 0.5, 1.5);
  EXPECT_EQ(energy_U({}, sw), 0.0);
  EXPECT_EQ(energy_U({point1(3.0)}, sw), 0.0);
  EXPECT_EQ(energy_U(line_configuration({0.0, 0.5}), sw), kInf);
  EXPECT_DOUBLE_EQ(energy_U(line_configuration({0.0, 1.2, 2.4}), sw), -1.0);
}

TEST(Energy, LennardJonesPairSum) {
  const auto lj = PairPotential::lennard_jones(1.0, 1.0);
  auto phi = [](double r) { return 4.0 * (std::pow(r, -12) - std::pow(r, -6)); };
  const auto cfg = line_configuration({0.0, 1.1, 2.5});
  EXPECT_NEAR(energy_U(cfg, lj), phi(1.1) + phi(2.5) + phi(1.4), 1e-13);
}

TEST(Energy, InteractionDecomposition) {
  const auto sw = PairPotential::square_well(1.0, 0.7, 1.6);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-6, 6);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    Configuration a{point1(u(rng)), point1(u(rng))}, b{point1(u(rng)), point1(u(rng))};
    Configuration all = a;
    all.insert(all.end(), b.begin(), b.end());
    const double ua = energy_U(a, sw), ub = energy_U(b, sw), uall = energy_U(all, sw);
    if (!std::isfinite(uall)) continue;
    ++checked;
    EXPECT_NEAR(energy_W(a, b, sw), uall - ua - ub, 1e-12);
  }
  EXPECT_GT(checked, 20);
  EXPECT_EQ(energy_W({}, {point1(1.0)}, sw), 0.0);
  EXPECT_THROW(energy_W({point1(1.0)}, {point1(1.0)}, sw), DomainError);
}

TEST(MayerK, Examples) {
  const auto hr = PairPotential::hard_core(1.0);
  EXPECT_EQ(mayer_k(point1(0), {}, hr, 1.0), 1.0);
  EXPECT_EQ(mayer_k(point1(0), {point1(0.4)}, hr, 1.0), -1.0);
  EXPECT_EQ(mayer_k(point1(0), {point1(1.4)}, hr, 1.0), 0.0);
}

TEST(MayerK, Factorizes) {
  const auto sw = PairPotential::square_well(1.0, 0.4, 1.8);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  for (int t = 0; t < 100; ++t) {
    Configuration a{point1(u(rng)), point1(u(rng))}, b{point1(u(rng))};
    Configuration all = a;
    all.insert(all.end(), b.begin(), b.end());
    const Point x = point1(u(rng));
    EXPECT_NEAR(mayer_k(x, all, sw, 1.3), mayer_k(x, a, sw, 1.3) * mayer_k(x, b, sw, 1.3), 1e-14);
  }
}

TEST(Regularity, HardCore) {
  EXPECT_NEAR(regularity_C(PairPotential::hard_core(1.3), 1.0), 2.6, 1e-12);
  EXPECT_NEAR(regularity_C(PairPotential::hard_core(1.0, 3), 1.0), 4.0 / 3.0 * std::numbers::pi, 1e-10);
  EXPECT_NEAR(regularity_C(PairPotential::hard_core(1.0, 2), 1.0), std::numbers::pi, 1e-10);
}

TEST(Regularity, SquareWell) {
  const double a = 1.0, eps = 0.8, rw = 1.7, beta = 1.2;
  const auto sw = PairPotential::square_well(a, eps, rw);
  EXPECT_NEAR(regularity_C(sw, beta), 2 * a + 2 * (rw - a) * (std::exp(beta * eps) - 1), 1e-10);
}

// Midpoint Riemann sum of |f| on a fine radial grid.
TEST(Regularity, LennardJonesAgainstRiemann) {
  const auto lj = PairPotential::lennard_jones(1.0, 1.0);
  const double beta = 0.8;
  const double C = regularity_C(lj, beta);
  ASSERT_TRUE(std::isfinite(C));
  const int n = 4000000;
  const double R = 200.0, h = R / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * h;
    s += std::abs(std::exp(-beta * 4.0 * (std::pow(r, -12) - std::pow(r, -6))) - 1.0);
  }
  s = 2.0 * s * h;
  EXPECT_NEAR(C, s, 1e-5 * s);
}

TEST(Potential, Validation) {
  EXPECT_THROW(PairPotential::square_well(1.0, 0.5, 0.9), DomainError);
  EXPECT_THROW(PairPotential::hard_core(-1.0), DomainError);
  EXPECT_THROW(PairPotential::lennard_jones(0.0, 1.0), DomainError);
  EXPECT_THROW(PairPotential::tabulated({{1.0, kInf}, {0.5, 1.0}}), DomainError);
  EXPECT_THROW(check_beta(0.0), DomainError);
  EXPECT_THROW(check_beta(-1.0), DomainError);
}

TEST(Potential, TabulatedMatchesSquareWell) {
  const auto sw = PairPotential::square_well(1.0, 0.6, 1.5);
  const auto tab = PairPotential::tabulated({{1.0, kInf}, {1.5, -0.6}});
  for (double r : {0.2, 0.99, 1.01, 1.3, 1.49, 1.51, 3.0})
    EXPECT_EQ(sw.mayer_f(r, 1.1), tab.mayer_f(r, 1.1)) << r;
}

TEST(Stability, Probe) {
  const auto hr = stability_probe(PairPotential::hard_core(1.0), 200, 8, 3);
  EXPECT_GE(hr.min_ratio, 0.0);
  EXPECT_FALSE(hr.instability_signal);
  const auto sw = stability_probe(PairPotential::square_well(1.0, 1.0, 1.5), 200, 8, 3);
  EXPECT_FALSE(sw.instability_signal);
  EXPECT_TRUE(std::isfinite(sw.B_estimate));
  const auto bad = stability_probe(PairPotential::tabulated({{2.0, -1.0}}), 200, 10, 3);
  EXPECT_TRUE(bad.instability_signal);
}

TEST(BoltzmannExpansion, HardRodsAndSquareWell) {
  for (const auto& pot : {PairPotential::hard_core(1.0), PairPotential::square_well(1.0, 0.9, 1.6),
                          PairPotential::lennard_jones(1.0, 1.0)}) {
    const auto out = checks::boltzmann_expansion(pot, 1.0, 100, 17);
    EXPECT_TRUE(out.passed) << out.details.dump();
  }
}
