#include <gtest/gtest.h>

#include <map>
#include <random>

#include "virial/counting.hpp"
#include "virial/kernel.hpp"

using namespace virial;
using namespace virial::kernel;

namespace {

std::vector<double> random_mayer(int v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.5);
  std::vector<double> f(v * v, 0.0);
  for (int i = 0; i < v; ++i)
    for (int j = i + 1; j < v; ++j) f[i * v + j] = f[j * v + i] = u(rng);
  return f;
}

}  // namespace

TEST(Kernel, SingleRoot) {
  const auto k = kernel_by_recurrence(1, 0);
  ASSERT_EQ(k.terms.size(), 1u);
  EXPECT_EQ(k.terms[0].f_edges, 0u);
  EXPECT_EQ(k.terms[0].coefficient, Rational(1));
  EXPECT_EQ(k.rho_power(), 1);
}

TEST(Kernel, TwoRootsIsBoltzmannFactor) {
  const auto k = kernel_by_recurrence(2, 0);
  EXPECT_TRUE(k.boltzmann_prefactor);
  ASSERT_EQ(k.terms.size(), 1u);
  EXPECT_EQ(k.terms[0].f_edges, 0u);
  std::mt19937_64 rng(1);
  const auto f = random_mayer(2, rng);
  EXPECT_NEAR(evaluate(k, [&](int i, int j) { return f[i * 2 + j]; }), 1.0 + f[1], 1e-15);
}

TEST(Kernel, FirstOrderVanishes) {
  for (int n = 1; n <= 4; ++n) EXPECT_TRUE(kernel_by_recurrence(1, n).is_zero()) << n;
}

TEST(Kernel, PreCancellationOneOne) {
  const auto pre = kernel_by_recurrence(1, 1, false);
  EXPECT_EQ(pre.terms.size(), 2u);
  Rational sum = 0;
  for (const auto& m : pre.terms) sum += m.coefficient;
  EXPECT_EQ(sum, Rational(0));
  EXPECT_EQ(term_census(pre, true), 2);
}

TEST(Kernel, GraphSumEquivalence) {
  for (int m = 1; m <= 3; ++m)
    for (int n = 0; n <= 4 && m + n <= 6; ++n)
      EXPECT_TRUE(kernels_equal(kernel_by_recurrence(m, n), kernel_by_graphs(m, n))) << m << "," << n;
}

TEST(Kernel, PerturbedKernelDiffers) {
  const auto rec = kernel_by_recurrence(2, 1);
  auto bad = kernel_by_graphs(2, 1);
  ASSERT_FALSE(bad.terms.empty());
  bad.terms[0].coefficient += 1;
  EXPECT_FALSE(kernels_equal(rec, bad));
}

TEST(Kernel, ShapeMismatchThrows) {
  EXPECT_THROW(kernels_equal(kernel_by_recurrence(2, 1), kernel_by_recurrence(1, 2)), DomainError);
}

TEST(Kernel, LabelInvariance) {
  for (auto [m, n] : {std::pair{2, 1}, {2, 2}, {3, 1}, {3, 2}})
    EXPECT_TRUE(kernels_equal(kernel_by_recurrence(m, n, true, Pivot::lowest),
                              kernel_by_recurrence(m, n, true, Pivot::highest)));
}

TEST(Kernel, SurvivingMonomialsAreMembers) {
  for (int m = 1; m <= 3; ++m)
    for (int n = 0; m + n <= 6; ++n)
      for (const auto& t : kernel_by_recurrence(m, n).terms) {
        EXPECT_EQ(t.coefficient, Rational(1));
        EXPECT_TRUE(graph::is_member_D(graph::LabeledGraph{m, n, t.f_edges}));
      }
}

TEST(Kernel, CensusMatchesCountTable) {
  EXPECT_EQ(term_census(kernel_by_recurrence(1, 0, false), true), 1);
  EXPECT_EQ(term_census(kernel_by_recurrence(2, 2, false), true), counting::count_full(2, 2));
  EXPECT_THROW(term_census(kernel_by_recurrence(2, 2), true), DomainError);
}

TEST(Kernel, NormalFormIdempotentAndOrderFree) {
  std::mt19937_64 rng(4);
  auto raw = kernel_by_recurrence(2, 2, false);
  const auto once = normal_form(raw);
  EXPECT_EQ(normal_form(once).terms, once.terms);
  std::shuffle(raw.terms.begin(), raw.terms.end(), rng);
  EXPECT_EQ(normal_form(raw).terms, once.terms);
}

// Group-by oracle on (f_edges, e_pairs) after duplicating terms.
TEST(Kernel, NormalFormMergesDuplicates) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> coef(-3, 3), pick(0, 15);
  SymbolicKernel k{1, 3, {}, false, false};
  std::map<EdgeMask, Rational> expected;
  for (int t = 0; t < 60; ++t) {
    const EdgeMask e = static_cast<EdgeMask>(pick(rng)) << 1;
    const Rational c(coef(rng));
    k.terms.push_back({e, 0, c});
    expected[e] += c;
  }
  std::erase_if(expected, [](const auto& kv) { return kv.second == 0; });
  const auto nf = normal_form(k);
  ASSERT_EQ(nf.terms.size(), expected.size());
  for (const auto& t : nf.terms) EXPECT_EQ(expected.at(t.f_edges), t.coefficient);
}

TEST(Kernel, OverlapRequestThrows) {
  detail::Recurrence rec(2, true, Pivot::lowest);
  EXPECT_THROW(rec(0b011, 0b001), DomainError);
}

TEST(Kernel, SymbolicCap) {
  EXPECT_THROW(kernel_by_recurrence(4, 4), CapExceeded);
  EXPECT_THROW(kernel_by_recurrence(-1, 2), DomainError);
}

// Symbolic kernels and graph sums evaluated at random Mayer factors agree
// with a direct floating-point iteration of the recurrence.
TEST(Kernel, NumericRecurrenceAgrees) {
  std::mt19937_64 rng(12);
  for (auto [m, n] : {std::pair{1, 2}, {2, 1}, {2, 2}, {3, 1}, {2, 3}, {3, 2}, {1, 4}}) {
    const auto sym = kernel_by_recurrence(m, n);
    const auto gr = kernel_by_graphs(m, n);
    for (int t = 0; t < 10; ++t) {
      const int v = m + n;
      const auto f = random_mayer(v, rng);
      NumericRecurrence num(m, n, f);
      const double direct = num.value();
      auto fn = [&](int i, int j) { return f[i * v + j]; };
      EXPECT_NEAR(evaluate(sym, fn), direct, 1e-11 * std::max(1.0, std::abs(direct)));
      EXPECT_NEAR(evaluate(gr, fn), direct, 1e-11 * std::max(1.0, std::abs(direct)));
    }
  }
}
