#pragma once

// Quadrature primitives: Gauss-Legendre rules, adaptive 1D integration,
// nested integration over R^n with panels aligned to pair-distance jumps, and
// plain Monte Carlo.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace virial::quadrature {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

inline constexpr int kMaxGaussOrder = 64;

inline GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

/// Cached rule of the given order (1..64).
inline const GaussRule& gauss_legendre(int n) {
  static const std::array<GaussRule, kMaxGaussOrder + 1> rules = [] {
    std::array<GaussRule, kMaxGaussOrder + 1> r;
    for (int k = 1; k <= kMaxGaussOrder; ++k) r[k] = make_gauss_legendre(k);
    return r;
  }();
  if (n < 1 || n > kMaxGaussOrder) throw std::out_of_range("gauss_legendre: order must be in [1, 64]");
  return rules[n];
}

template <class F>
double gauss_panel(F&& f, double a, double b, int order) {
  const auto& g = gauss_legendre(order);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < order; ++i) s += g.weights[i] * f(mid + half * g.nodes[i]);
  return half * s;
}

/// Recursive bisection comparing 8- and 16-point Gauss-Legendre estimates.
template <class F>
double adaptive_integrate(F&& f, double a, double b, double tol, int depth = 0) {
  const double coarse = gauss_panel(f, a, b, 8);
  const double fine = gauss_panel(f, a, b, 16);
  if (std::abs(fine - coarse) <= tol * std::max(1.0, std::abs(fine)) || depth >= 48) return fine;
  const double m = 0.5 * (a + b);
  return adaptive_integrate(f, a, m, tol, depth + 1) + adaptive_integrate(f, m, b, tol, depth + 1);
}

/// Sorted, de-duplicated points strictly inside (lo, hi), bracketed by lo and hi.
inline std::vector<double> panel_edges(std::vector<double> cuts, double lo, double hi, double tol = 1e-12) {
  std::vector<double> out{lo};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts)
    if (c > lo + tol && c < hi - tol && c > out.back() + tol) out.push_back(c);
  out.push_back(hi);
  return out;
}

/// All sums of at most `depth` signed radii, including 0.
inline std::vector<double> signed_shift_sums(std::span<const double> radii, int depth) {
  std::vector<double> level{0.0};
  std::vector<double> all{0.0};
  for (int k = 0; k < depth; ++k) {
    std::vector<double> next;
    for (double s : level)
      for (double r : radii) {
        next.push_back(s + r);
        next.push_back(s - r);
      }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               next.end());
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            all.end());
  return all;
}

struct NestedRule {
  int order = 4;       // Gauss-Legendre points per panel
  int subpanels = 1;   // equal subdivisions of each aligned interval
};

/// Integrates f(y_0..y_{n-1}) over [lo, hi]^n in one dimension. The
/// integrand may jump whenever a pair distance between any two of the
/// anchors and integration variables crosses one of `radii`; panels at level
/// k are split at every point where such a jump, or one of the jumps of the
/// remaining inner integral, can occur. For piecewise-polynomial integrands
/// of low degree the result is exact up to round-off.
template <class F>
double nested_integrate(int n, double lo, double hi, std::span<const double> anchors, std::span<const double> radii,
                        const NestedRule& rule, F&& f) {
  if (n == 0) {
    std::vector<double> none;
    return f(std::span<const double>(none));
  }
  std::vector<std::vector<double>> shifts(n + 1);
  for (int r = 0; r <= n; ++r) shifts[r] = signed_shift_sums(radii, r);
  const auto& g = gauss_legendre(rule.order);

  std::vector<double> y(n, 0.0);
  std::vector<double> base(anchors.begin(), anchors.end());
  base.push_back(lo);
  base.push_back(hi);

  auto level = [&](auto&& self, int k) -> double {
    std::vector<double> cuts;
    const auto& sh = shifts[n - k];
    auto add = [&](double p) {
      for (double s : sh) cuts.push_back(p + s);
    };
    for (double p : base) add(p);
    for (int i = 0; i < k; ++i) add(y[i]);
    const auto edges = panel_edges(std::move(cuts), lo, hi);
    double total = 0.0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const double width = (edges[e + 1] - edges[e]) / rule.subpanels;
      for (int s = 0; s < rule.subpanels; ++s) {
        const double a = edges[e] + s * width, b = a + width;
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        double panel = 0.0;
        for (int i = 0; i < rule.order; ++i) {
          y[k] = mid + half * g.nodes[i];
          panel += g.weights[i] * (k + 1 == n ? f(std::span<const double>(y)) : self(self, k + 1));
        }
        total += half * panel;
      }
    }
    return total;
  };
  return level(level, 0);
}

struct MonteCarloResult {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// Uniform sampling of n points in the box [lo, hi]^d; coordinates handed to
/// f as a flat span of n*d numbers.
template <class F>
MonteCarloResult monte_carlo(int n, int d, double lo, double hi, std::uint64_t samples, std::uint64_t seed, F&& f) {
  MonteCarloResult res;
  res.samples = samples;
  if (n == 0) {
    std::vector<double> none;
    res.value = f(std::span<const double>(none));
    return res;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> y(static_cast<std::size_t>(n) * d);
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t s = 1; s <= samples; ++s) {
    for (auto& c : y) c = u(rng);
    const double v = f(std::span<const double>(y));
    const double delta = v - mean;
    mean += delta / static_cast<double>(s);
    m2 += delta * (v - mean);
  }
  const double volume = std::pow(hi - lo, n * d);
  res.value = volume * mean;
  res.std_error = samples > 1 ? volume * std::sqrt(m2 / static_cast<double>(samples - 1) / samples) : 0.0;
  return res;
}

}  // namespace virial::quadrature
