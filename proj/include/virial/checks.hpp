#pragma once

// Invariant suites shared by the command line and the acceptance runner.

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "virial/config_algebra.hpp"
#include "virial/counting.hpp"
#include "virial/exact.hpp"
#include "virial/graph.hpp"
#include "virial/io.hpp"
#include "virial/kernel.hpp"
#include "virial/potential.hpp"

namespace virial::checks {

struct Outcome {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double seconds = 0.0;
  nlohmann::json details = nlohmann::json::object();

  void record(bool ok) {
    ++cases;
    if (!ok) {
      ++failures;
      passed = false;
    }
  }
};

inline nlohmann::json to_json(const Outcome& o, bool timings = false) {
  nlohmann::json j = {{"name", o.name}, {"passed", o.passed}, {"cases", o.cases}, {"failures", o.failures},
                      {"details", o.details}};
  if (timings) j["seconds"] = o.seconds;
  return j;
}

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline Rational random_rational(std::mt19937_64& rng, int num_max = 5, int den_max = 4) {
  std::uniform_int_distribution<int> num(-num_max, num_max), den(1, den_max);
  return Rational(num(rng), den(rng));
}

inline Rational random_unit_rational(std::mt19937_64& rng, int den_max = 6) {
  std::uniform_int_distribution<int> den(1, den_max);
  const int d = den(rng);
  std::uniform_int_distribution<int> num(0, d);
  return Rational(num(rng), d);
}

/// Splitting identity and multiplicativity of generating functionals on random
/// site spaces with exact rational data.
inline Outcome algebra_identities(int instances, std::uint64_t seed, int max_sites = 4) {
  using namespace algebra;
  Stopwatch clock;
  Outcome out;
  out.name = "algebra-identities";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> sites(1, max_sites), wnum(0, 4), wden(1, 3);
  std::size_t split_fail = 0, product_fail = 0, atomic_overlap = 0;
  for (int t = 0; t < instances; ++t) {
    const std::size_t n = sites(rng);
    std::vector<std::string> names;
    std::vector<Rational> weights;
    for (std::size_t i = 0; i < n; ++i) {
      names.push_back("s" + std::to_string(i));
      weights.emplace_back(wnum(rng), wden(rng));
    }
    const SiteSpace<Rational> space(names, weights);
    const Rational z = random_unit_rational(rng) * 2;
    const auto G = ConfigFunction<Rational>::tabulate(n, [&](SiteMask) { return random_rational(rng); });
    const auto H = PairConfigFunction<Rational>::tabulate(n, [&](SiteMask, SiteMask) { return random_rational(rng); });
    const bool split_ok = lp_split_sum(G, H, space, z) == lp_double_integral(G, H, space, z);

    const auto psi1 = ConfigFunction<Rational>::tabulate(n, [&](SiteMask) { return random_rational(rng); });
    const auto psi2 = ConfigFunction<Rational>::tabulate(n, [&](SiteMask) { return random_rational(rng); });
    std::vector<Rational> jv;
    for (std::size_t i = 0; i < n; ++i) jv.push_back(random_unit_rational(rng));
    const JField<Rational> j(jv);
    const Rational convolved = generating_functional(star_convolution(psi1, psi2), j, space);
    const bool product_ok = generating_product(psi1, psi2, j, space) == convolved;
    if (generating_functional(psi1, j, space) * generating_functional(psi2, j, space) != convolved) ++atomic_overlap;
    split_fail += !split_ok;
    product_fail += !product_ok;
    out.record(split_ok && product_ok);
  }
  out.details = {{"instances", instances},
                 {"seed", seed},
                 {"max_sites", max_sites},
                 {"split_failures", split_fail},
                 {"product_failures", product_fail},
                 {"plain_product_differs", atomic_overlap}};
  out.seconds = clock.seconds();
  return out;
}

/// e^{-beta W(x; gamma)} against the subset sum of K(x; xi) on random configurations.
inline Outcome boltzmann_expansion(const PairPotential& pot, double beta, int configurations, std::uint64_t seed,
                                   double tol = 1e-10) {
  Stopwatch clock;
  Outcome out;
  out.name = std::string("boltzmann-expansion/") + to_string(pot.kind());
  std::mt19937_64 rng(seed);
  const double reach = std::max(pot.cutoff(beta), 1.0);
  std::uniform_real_distribution<double> coord(-1.5 * reach, 1.5 * reach);
  std::uniform_int_distribution<int> size(0, 6);
  double worst = 0.0;
  const int d = pot.dimension();
  for (int t = 0; t < configurations; ++t) {
    Point x{0, 0, 0};
    Configuration gamma(size(rng), Point{0, 0, 0});
    for (auto& p : gamma)
      for (int k = 0; k < d; ++k) p[k] = coord(rng);
    const double lhs = std::exp(-beta * energy_W({x}, gamma, pot));
    double rhs = 0.0;
    const auto full = (algebra::SiteMask{1} << gamma.size()) - 1;
    algebra::for_each_subset(full, [&](algebra::SiteMask xi) {
      Configuration sub;
      for (std::size_t i = 0; i < gamma.size(); ++i)
        if (xi >> i & 1u) sub.push_back(gamma[i]);
      rhs += mayer_k(x, sub, pot, beta);
    });
    const double err = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
    worst = std::max(worst, err);
    out.record(err <= tol);
  }
  out.details = {{"configurations", configurations}, {"seed", seed}, {"worst_relative_error", worst}, {"tolerance", tol}};
  out.seconds = clock.seconds();
  return out;
}

inline Outcome first_order_cancellation(int n_max = 4) {
  Stopwatch clock;
  Outcome out;
  out.name = "first-order-cancellation";
  nlohmann::json rows = nlohmann::json::array();
  for (int n = 1; n <= n_max; ++n) {
    const auto k = kernel::kernel_by_recurrence(1, n);
    out.record(k.is_zero());
    rows.push_back({{"n", n}, {"zero", k.is_zero()}, {"terms", k.terms.size()}});
  }
  out.details = {{"kernels", rows}};
  out.seconds = clock.seconds();
  return out;
}

inline Outcome t11() {
  Stopwatch clock;
  Outcome out;
  out.name = "t11";
  const auto pre = kernel::kernel_by_recurrence(1, 1, false);
  const auto post = kernel::kernel_by_recurrence(1, 1);
  out.record(post.is_zero());
  out.details = {{"pre_cancellation_terms", io::to_json(pre)}, {"zero_after_cancellation", post.is_zero()}};
  out.seconds = clock.seconds();
  return out;
}

/// Recurrence kernel against the graph sum for m in [1, 3], n in [0, 4], m + n <= max_total.
inline Outcome graph_sum_equivalence(int max_total = 6) {
  Stopwatch clock;
  Outcome out;
  out.name = "graph-sum-equivalence";
  nlohmann::json rows = nlohmann::json::array();
  for (int m = 1; m <= 3; ++m)
    for (int n = 0; n <= 4 && m + n <= max_total; ++n) {
      const auto rec = kernel::kernel_by_recurrence(m, n, true, kernel::Pivot::lowest, std::max(max_total, 7));
      const auto gr = kernel::kernel_by_graphs(m, n);
      const bool eq = kernel::kernels_equal(rec, gr);
      out.record(eq);
      rows.push_back({{"m", m}, {"n", n}, {"equal", eq}, {"terms", gr.terms.size()}});
    }
  out.details = {{"cases", rows}};
  out.seconds = clock.seconds();
  return out;
}

/// Choice of the distinguished particle must not change the normal form.
inline Outcome label_invariance() {
  Stopwatch clock;
  Outcome out;
  out.name = "label-invariance";
  nlohmann::json rows = nlohmann::json::array();
  for (auto [m, n] : {std::pair{2, 1}, {2, 2}, {3, 1}}) {
    const bool eq = kernel::kernels_equal(kernel::kernel_by_recurrence(m, n, true, kernel::Pivot::lowest),
                                          kernel::kernel_by_recurrence(m, n, true, kernel::Pivot::highest));
    out.record(eq);
    rows.push_back({{"m", m}, {"n", n}, {"equal", eq}});
  }
  out.details = {{"cases", rows}};
  out.seconds = clock.seconds();
  return out;
}

/// Which membership reading of D the recurrence reproduces, per (m, n).
/// Informational: passes when the rooted reading matches everywhere.
inline Outcome reading_diagnostic(int max_total = 5) {
  Stopwatch clock;
  Outcome out;
  out.name = "reading-diagnostic";
  nlohmann::json rows = nlohmann::json::array();
  for (int m = 1; m <= 3; ++m)
    for (int n = 0; m + n <= max_total; ++n) {
      const auto rec = kernel::kernel_by_recurrence(m, n);
      const bool rooted = kernel::kernels_equal(rec, kernel::kernel_by_graphs(m, n, graph::DReading::rooted));
      const bool standard = kernel::kernels_equal(rec, kernel::kernel_by_graphs(m, n, graph::DReading::standard));
      out.record(rooted);
      rows.push_back({{"m", m},
                      {"n", n},
                      {"rooted", rooted},
                      {"standard", standard},
                      {"size_rooted", graph::enumerate_D(m, n, graph::DReading::rooted).size()},
                      {"size_standard", graph::enumerate_D(m, n, graph::DReading::standard).size()}});
    }
  out.details = {{"cases", rows}};
  out.seconds = clock.seconds();
  return out;
}

/// Linearized count against m (m+n)^{n-1}, and the pre-cancellation census
/// of the recurrence against the full count.
inline Outcome counting(int max_linear = 8, int max_census_total = 5) {
  Stopwatch clock;
  Outcome out;
  out.name = "counting";
  std::size_t linear_fail = 0, census_fail = 0, census_cases = 0;
  for (int m = 1; m <= max_linear; ++m)
    for (int n = 0; n <= max_linear; ++n) {
      const bool ok = counting::count_linear(m, n).agree();
      linear_fail += !ok;
      out.record(ok);
    }
  nlohmann::json rows = nlohmann::json::array();
  for (int m = 0; m <= max_census_total; ++m)
    for (int n = 0; m + n <= max_census_total; ++n) {
      const auto census = kernel::term_census(kernel::kernel_by_recurrence(m, n, false), true);
      const auto full = counting::count_full(m, n);
      const bool ok = census == full;
      census_fail += !ok;
      ++census_cases;
      out.record(ok);
      rows.push_back({{"m", m}, {"n", n}, {"census", to_string(census)}, {"count_full", to_string(full)}});
    }
  out.details = {{"linear_failures", linear_fail},
                 {"census_cases", census_cases},
                 {"census_failures", census_fail},
                 {"census", rows},
                 {"base_rule", counting::CountTable::base_rule()}};
  out.seconds = clock.seconds();
  return out;
}

}  // namespace virial::checks
