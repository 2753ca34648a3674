#pragma once

// Truncated density expansions of correlation functions
//
//   rho(eta) = e^{-beta U(eta)} sum_{n <= n_max} rho^{|eta| + n} / n! * kernel_hat(eta, n)
//
// and of Q(rho) = int K(x1; xi) rho(xi) lambda(dxi), a(rho) = 1 / Q.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "virial/error.hpp"
#include "virial/graph.hpp"
#include "virial/numerics.hpp"
#include "virial/parallel.hpp"
#include "virial/potential.hpp"

namespace virial::series {

struct SeriesTerm {
  int order = 0;
  double kernel_hat = 0.0;
  double kernel_hat_error = 0.0;
  double coefficient = 0.0;        // kernel_hat / n!
  double coefficient_error = 0.0;
  std::size_t graphs = 0;
};

/// Density-independent part of the expansion; evaluate at any rho.
struct CorrelationSeries {
  Configuration eta;
  double beta = 1.0;
  double boltzmann = 1.0;          // e^{-beta U(eta)}
  int n_max = 0;
  numerics::QuadratureSpec quad;
  std::vector<SeriesTerm> terms;

  int size() const { return static_cast<int>(eta.size()); }

  /// Contribution of each order at density rho.
  std::vector<double> term_values(double rho) const {
    std::vector<double> out;
    for (const auto& t : terms) out.push_back(boltzmann * std::pow(rho, size() + t.order) * t.coefficient);
    return out;
  }

  double value(double rho) const {
    if (rho < 0) throw DomainError("correlation: density must be nonnegative");
    if (boltzmann == 0.0) return 0.0;
    double s = 0.0;
    for (int n = n_max; n >= 0; --n) s = s * rho + terms[n].coefficient;
    return boltzmann * std::pow(rho, size()) * s;
  }

  /// Quadrature error only; truncation is reported by truncation_order().
  double error(double rho) const {
    double e = 0.0;
    for (const auto& t : terms) e += std::pow(rho, size() + t.order) * t.coefficient_error;
    return boltzmann * e;
  }

  int truncation_order() const { return size() + n_max + 1; }
};

inline CorrelationSeries build_correlation_series(const Configuration& eta, double beta, const PairPotential& pot,
                                                  int n_max, const numerics::QuadratureSpec& quad, int workers = 1) {
  check_beta(beta);
  if (n_max < 0) throw DomainError("correlation: n_max must be nonnegative");
  if (eta.empty()) throw DomainError("correlation: eta must contain at least one point");
  CorrelationSeries s;
  s.eta = eta;
  s.beta = beta;
  s.n_max = n_max;
  s.quad = quad;
  s.boltzmann = std::exp(-beta * energy_U(eta, pot));
  double factorial = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) factorial *= n;
    SeriesTerm t;
    t.order = n;
    if (s.boltzmann != 0.0) {
      const auto k = numerics::kernel_hat(eta, n, pot, beta, quad, workers);
      t.kernel_hat = k.value;
      t.kernel_hat_error = k.error;
      t.graphs = k.per_graph.size();
    }
    t.coefficient = t.kernel_hat / factorial;
    t.coefficient_error = t.kernel_hat_error / factorial;
    s.terms.push_back(t);
  }
  return s;
}

struct CorrelationResult {
  double value = 0.0;
  double error = 0.0;
  int truncation_order = 0;        // omitted terms are O(rho^truncation_order)
  std::vector<double> terms;
  std::vector<double> term_ratios; // |t_n / t_{n-1}| where both are nonzero
  bool trusted = true;             // heuristic: last available ratio below 1
};

inline CorrelationResult evaluate(const CorrelationSeries& s, double rho) {
  CorrelationResult r;
  r.value = s.value(rho);
  r.error = s.error(rho);
  r.truncation_order = s.truncation_order();
  r.terms = s.term_values(rho);
  for (std::size_t i = 1; i < r.terms.size(); ++i)
    if (r.terms[i - 1] != 0.0 && r.terms[i] != 0.0) r.term_ratios.push_back(std::abs(r.terms[i] / r.terms[i - 1]));
  r.trusted = r.term_ratios.empty() || r.term_ratios.back() < 1.0;
  return r;
}

inline CorrelationResult correlation(const Configuration& eta, double rho, double beta, const PairPotential& pot,
                                     int n_max, const numerics::QuadratureSpec& quad, int workers = 1) {
  return evaluate(build_correlation_series(eta, beta, pot, n_max, quad, workers), rho);
}

/// Coefficients C_j (j = 0..n_max) of
///   int K(x1; xi) e^{-beta U(eta' u xi)} [sum_n rho^n / n! kernel_hat(eta' u xi, n)] lambda_rho(dxi)
///     = sum_j rho^j C_j,
/// truncated at total order |xi| + n <= n_max.
inline std::vector<numerics::Estimate> cluster_orders(const Point& x1, const Configuration& rest, double beta,
                                                      const PairPotential& pot, int n_max,
                                                      const numerics::QuadratureSpec& quad, int workers = 1) {
  check_beta(beta);
  const int m = static_cast<int>(rest.size());
  struct Job {
    int k, n;
  };
  std::vector<Job> jobs;
  for (int j = 0; j <= n_max; ++j)
    for (int k = 0; k <= j; ++k) jobs.push_back({k, j - k});
  std::vector<numerics::Estimate> results(jobs.size());
  Configuration fixed{x1};
  fixed.insert(fixed.end(), rest.begin(), rest.end());

  parallel_for(jobs.size(), workers, [&](std::size_t idx) {
    const auto [k, n] = jobs[idx];
    const int white = m + k;
    if (white == 0) {
      results[idx] = {n == 0 ? 1.0 : 0.0, 0.0};
      return;
    }
    const auto family = graph::enumerate_D(white, n);
    if (family.size() == 0) return;
    double norm = 1.0;
    for (int i = 2; i <= k; ++i) norm *= i;
    for (int i = 2; i <= n; ++i) norm *= i;
    results[idx] = numerics::integrate_free_points(
        fixed, k + n, pot, beta, quad, 1000 + idx, [&](std::span<const Point> pts) {
          double w = 1.0;
          for (int i = 0; i < k && w != 0.0; ++i) w *= pot.mayer_f(distance(pts[0], pts[1 + m + i]), beta);
          for (int i = 0; i < white && w != 0.0; ++i)
            for (int j = i + 1; j < white && w != 0.0; ++j) w *= pot.boltzmann(distance(pts[1 + i], pts[1 + j]), beta);
          if (w == 0.0) return 0.0;
          const auto shifted = pts.subspan(1);
          double sum = 0.0;
          for (const auto& g : family.members) sum += numerics::graph_weight(g, shifted, pot, beta);
          return w * sum;
        });
    results[idx].value /= norm;
    results[idx].error /= norm;
  });

  std::vector<numerics::Estimate> out(n_max + 1);
  std::vector<double> err2(n_max + 1, 0.0);
  for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
    const int j = jobs[idx].k + jobs[idx].n;
    out[j].value += results[idx].value;
    if (quad.mode == numerics::QuadratureSpec::Mode::grid)
      out[j].error += results[idx].error;
    else
      err2[j] += results[idx].error * results[idx].error;
  }
  if (quad.mode == numerics::QuadratureSpec::Mode::monte_carlo)
    for (int j = 0; j <= n_max; ++j) out[j].error = std::sqrt(err2[j]);
  return out;
}

struct QHat {
  double q_hat = 1.0;
  double a = 1.0;
  double error = 0.0;              // quadrature error of q_hat
  std::vector<numerics::Estimate> coefficients;
  int truncation_order = 0;
};

inline double poly_value(const std::vector<numerics::Estimate>& c, double rho) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * rho + it->value;
  return s;
}

inline double poly_error(const std::vector<numerics::Estimate>& c, double rho) {
  double e = 0.0, p = 1.0;
  for (const auto& t : c) {
    e += p * t.error;
    p *= rho;
  }
  return e;
}

/// Q(rho) from the coefficients C_j with eta' empty; signals Q <= 0.
inline QHat q_hat_from(std::vector<numerics::Estimate> coefficients, double rho) {
  if (rho < 0) throw DomainError("q_hat: density must be nonnegative");
  QHat q;
  q.coefficients = std::move(coefficients);
  q.q_hat = poly_value(q.coefficients, rho);
  q.error = poly_error(q.coefficients, rho);
  q.truncation_order = static_cast<int>(q.coefficients.size());
  if (!(q.q_hat > 0))
    throw DomainError("q_hat: Q = " + std::to_string(q.q_hat) + " <= 0 at rho = " + std::to_string(rho) +
                      " (outside the trust region)");
  q.a = 1.0 / q.q_hat;
  return q;
}

inline QHat q_hat_and_a(double rho, double beta, const PairPotential& pot, int n_max,
                        const numerics::QuadratureSpec& quad, int workers = 1) {
  Point origin{0, 0, 0};
  return q_hat_from(cluster_orders(origin, {}, beta, pot, n_max, quad, workers), rho);
}

struct LimitEquationCheck {
  double lhs = 0.0;                // correlation(eta, rho)
  double rhs = 0.0;                // rho a e^{-beta W} int K rho lambda
  double difference = 0.0;
  double error = 0.0;              // combined quadrature error
  int truncation_order = 0;        // both sides agree up to O(rho^truncation_order)
};

/// Evaluates both sides of rho(eta) = rho a(rho) e^{-beta W(x1; eta')} int K(x1; xi) rho(eta' u xi) lambda(dxi)
/// with x1 = eta[0], every correlation truncated at the same total order.
inline LimitEquationCheck limit_equation_check(const Configuration& eta, double rho, double beta,
                                               const PairPotential& pot, int n_max,
                                               const numerics::QuadratureSpec& quad, int workers = 1) {
  if (eta.empty()) throw DomainError("limit equation: eta must contain at least one point");
  LimitEquationCheck c;
  const auto series = build_correlation_series(eta, beta, pot, n_max, quad, workers);
  c.lhs = series.value(rho);
  const auto q = q_hat_and_a(rho, beta, pot, n_max, quad, workers);
  const Configuration rest(eta.begin() + 1, eta.end());
  const auto orders = cluster_orders(eta[0], rest, beta, pot, n_max, quad, workers);
  double boltz = 1.0;
  for (const auto& p : rest) boltz *= pot.boltzmann(distance(eta[0], p), beta);
  const double prefactor = rho * q.a * boltz * std::pow(rho, static_cast<double>(rest.size()));
  c.rhs = prefactor * poly_value(orders, rho);
  c.difference = c.lhs - c.rhs;
  c.error = series.error(rho) + prefactor * poly_error(orders, rho) + std::abs(c.rhs) * q.error / q.q_hat;
  c.truncation_order = series.truncation_order();
  return c;
}

}  // namespace virial::series
