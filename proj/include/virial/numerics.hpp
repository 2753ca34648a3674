#pragma once

// Integrated kernels T^(eta|n) = int T(eta | y_1..y_n) dy^n, reduced by the
// density power and the Boltzmann prefactor, evaluated graph by graph:
//
//   kernel_hat(eta, n) = sum_{G in D(eta; n)} int prod_{(u,v) in G} f(|u - v|) dy^n
//
// In d = 1 each graph integral uses nested Gauss-Legendre panels aligned to
// every possible Mayer-factor jump (exact for step potentials); in d >= 2 it
// uses plain Monte Carlo. The domain of every black vertex is truncated to
// [min eta - n R, max eta + n R] with R the interaction cutoff, which is
// exact for finite-range potentials because every black vertex of a graph in
// D lies within n bonds of a white vertex.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "virial/error.hpp"
#include "virial/graph.hpp"
#include "virial/kernel.hpp"
#include "virial/parallel.hpp"
#include "virial/potential.hpp"
#include "virial/quadrature.hpp"

namespace virial::numerics {

struct QuadratureSpec {
  enum class Mode { grid, monte_carlo };
  Mode mode = Mode::grid;
  int order = 4;                     // grid: Gauss points per panel
  int subpanels = 1;                 // grid: subdivisions of each aligned interval
  std::uint64_t samples = 100000;    // monte carlo
  double domain_half_width = 0.0;    // 0 selects n * cutoff
  std::uint64_t seed = 1;

  static QuadratureSpec for_dimension(int d) {
    QuadratureSpec q;
    if (d > 1) q.mode = Mode::monte_carlo;
    return q;
  }
};

inline const char* to_string(QuadratureSpec::Mode m) {
  return m == QuadratureSpec::Mode::grid ? "grid" : "monte-carlo";
}

struct Estimate {
  double value = 0.0;
  double error = 0.0;  // grid: |I(2s) - I(s)|; monte carlo: standard error
};

struct GraphContribution {
  graph::LabeledGraph graph;
  Estimate estimate;
};

struct KernelEstimate {
  double value = 0.0;
  double error = 0.0;
  int n = 0;
  Configuration eta;
  QuadratureSpec method;
  std::vector<GraphContribution> per_graph;
};

/// Matrix of Mayer factors between all listed points, row-major.
inline std::vector<double> mayer_matrix(std::span<const Point> pts, const PairPotential& pot, double beta) {
  const std::size_t v = pts.size();
  std::vector<double> f(v * v, 0.0);
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j) f[i * v + j] = f[j * v + i] = pot.mayer_f(distance(pts[i], pts[j]), beta);
  return f;
}

namespace detail {

inline double half_width(int n, const PairPotential& pot, double beta, const QuadratureSpec& q) {
  const double cut = pot.cutoff(beta);
  if (q.domain_half_width > 0.0) {
    if (q.domain_half_width < cut)
      throw DomainError("quadrature domain half-width " + std::to_string(q.domain_half_width) +
                        " is smaller than the interaction range " + std::to_string(cut));
    return q.domain_half_width;
  }
  return n * cut;
}

}  // namespace detail

/// Integrates F(points) over the positions of n free points appended after the
/// fixed points; F sees fixed points first. `stream` decorrelates Monte Carlo
/// seeds between independent integrals.
template <class F>
Estimate integrate_free_points(const Configuration& fixed, int n, const PairPotential& pot, double beta,
                               const QuadratureSpec& q, std::uint64_t stream, F&& integrand) {
  check_beta(beta);
  const int d = pot.dimension();
  Configuration pts = fixed;
  pts.resize(fixed.size() + n, Point{0, 0, 0});
  if (n == 0) return {integrand(std::span<const Point>(pts)), 0.0};

  const double w = detail::half_width(n, pot, beta, q);
  double lo = kInf, hi = -kInf;
  for (const auto& p : fixed)
    for (int k = 0; k < d; ++k) {
      lo = std::min(lo, p[k]);
      hi = std::max(hi, p[k]);
    }
  if (fixed.empty()) lo = hi = 0.0;
  lo -= w;
  hi += w;

  if (q.mode == QuadratureSpec::Mode::grid) {
    if (d != 1) throw DomainError("grid quadrature is only available in d = 1; use monte-carlo");
    std::vector<double> anchors;
    for (const auto& p : fixed) anchors.push_back(p[0]);
    const auto radii = pot.breakpoints();
    auto run = [&](int subpanels) {
      quadrature::NestedRule rule{q.order, subpanels};
      return quadrature::nested_integrate(n, lo, hi, anchors, radii, rule, [&](std::span<const double> y) {
        for (int i = 0; i < n; ++i) pts[fixed.size() + i][0] = y[i];
        return integrand(std::span<const Point>(pts));
      });
    };
    const double coarse = run(q.subpanels);
    const double fine = run(2 * q.subpanels);
    return {fine, std::abs(fine - coarse)};
  }

  const auto mc = quadrature::monte_carlo(n, d, lo, hi, q.samples, q.seed * 0x9E3779B97F4A7C15ull + stream,
                                          [&](std::span<const double> y) {
                                            for (int i = 0; i < n; ++i)
                                              for (int k = 0; k < d; ++k)
                                                pts[fixed.size() + i][k] = y[static_cast<std::size_t>(i) * d + k];
                                            return integrand(std::span<const Point>(pts));
                                          });
  return {mc.value, mc.std_error};
}

inline double graph_weight(const graph::LabeledGraph& g, std::span<const Point> pts, const PairPotential& pot,
                           double beta) {
  double w = 1.0;
  for (graph::EdgeMask e = g.edges; e; e &= e - 1) {
    auto [i, j] = graph::pair_from_index(std::countr_zero(e));
    w *= pot.mayer_f(distance(pts[i], pts[j]), beta);
    if (w == 0.0) break;
  }
  return w;
}

/// Cluster integral of one graph: white vertices pinned at eta, black
/// vertices integrated.
inline Estimate graph_integral(const graph::LabeledGraph& g, const Configuration& eta, const PairPotential& pot,
                               double beta, const QuadratureSpec& q, std::uint64_t stream = 0) {
  if (g.white != static_cast<int>(eta.size()))
    throw DomainError("graph_integral: graph has " + std::to_string(g.white) + " white vertices but eta has " +
                      std::to_string(eta.size()) + " points");
  return integrate_free_points(eta, g.black, pot, beta, q, stream,
                               [&](std::span<const Point> pts) { return graph_weight(g, pts, pot, beta); });
}

/// Reduced integrated kernel via the graph sum over D(eta; n).
inline KernelEstimate kernel_hat(const Configuration& eta, int n, const PairPotential& pot, double beta,
                                 const QuadratureSpec& q, int workers = 1) {
  if (n < 0) throw DomainError("kernel_hat: negative order");
  const auto family = graph::enumerate_D(static_cast<int>(eta.size()), n);
  KernelEstimate out;
  out.n = n;
  out.eta = eta;
  out.method = q;
  out.per_graph.resize(family.size());
  parallel_for(family.size(), workers, [&](std::size_t i) {
    out.per_graph[i] = {family.members[i], graph_integral(family.members[i], eta, pot, beta, q, i)};
  });
  double err2 = 0.0;
  for (const auto& c : out.per_graph) {
    out.value += c.estimate.value;
    if (q.mode == QuadratureSpec::Mode::grid)
      out.error += c.estimate.error;
    else
      err2 += c.estimate.error * c.estimate.error;
  }
  if (q.mode == QuadratureSpec::Mode::monte_carlo) out.error = std::sqrt(err2);
  return out;
}

/// Same quantity by integrating the pointwise numeric recurrence (no graph
/// enumeration, no cancellation) and dividing by e^{-beta U(eta)}.
inline Estimate kernel_hat_by_recurrence(const Configuration& eta, int n, const PairPotential& pot, double beta,
                                         const QuadratureSpec& q) {
  const double boltz = std::exp(-beta * energy_U(eta, pot));
  if (boltz == 0.0) throw DomainError("kernel_hat_by_recurrence: eta overlaps a hard core");
  const int m = static_cast<int>(eta.size());
  kernel::NumericRecurrence rec(m, n, std::vector<double>(static_cast<std::size_t>((m + n) * (m + n)), 0.0));
  auto est = integrate_free_points(eta, n, pot, beta, q, 0, [&](std::span<const Point> pts) {
    rec.reset(mayer_matrix(pts, pot, beta));
    return rec.value();
  });
  est.value /= boltz;
  est.error /= boltz;
  return est;
}

}  // namespace virial::numerics
