#pragma once

// Radial pair potentials phi(r), interaction energies and Mayer factors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "virial/error.hpp"
#include "virial/quadrature.hpp"

namespace virial {

/// Positions live in R^d, d <= 3; unused coordinates stay zero.
using Point = std::array<double, 3>;
using Configuration = std::vector<Point>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double distance(const Point& p, const Point& q) {
  const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline Point point1(double x) { return {x, 0.0, 0.0}; }

inline Configuration line_configuration(const std::vector<double>& xs) {
  Configuration c;
  for (double x : xs) c.push_back(point1(x));
  return c;
}

enum class PotentialKind { ideal, hard_core, square_well, lennard_jones, tabulated };

inline const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::ideal: return "ideal";
    case PotentialKind::hard_core: return "hard-core";
    case PotentialKind::square_well: return "square-well";
    case PotentialKind::lennard_jones: return "lennard-jones";
    case PotentialKind::tabulated: return "tabulated";
  }
  return "?";
}

/// phi(r) = value on [previous r_upper, r_upper); zero beyond the last step.
struct Step {
  double r_upper;
  double phi;
};

class PairPotential {
 public:
  static PairPotential ideal(int dimension = 1) {
    PairPotential p(PotentialKind::ideal, dimension);
    return p;
  }

  /// Hard rods (d = 1), disks or spheres of diameter `diameter`.
  static PairPotential hard_core(double diameter, int dimension = 1) {
    if (!(diameter > 0)) throw DomainError("hard_core: diameter must be positive");
    PairPotential p(PotentialKind::hard_core, dimension);
    p.steps_ = {{diameter, kInf}};
    return p;
  }

  /// Hard core `diameter`, depth `depth` (phi = -depth) out to `range`.
  static PairPotential square_well(double diameter, double depth, double range, int dimension = 1) {
    if (!(diameter > 0) || !(depth > 0) || !(range > diameter))
      throw DomainError("square_well: need diameter > 0, depth > 0, range > diameter");
    PairPotential p(PotentialKind::square_well, dimension);
    p.steps_ = {{diameter, kInf}, {range, -depth}};
    return p;
  }

  static PairPotential lennard_jones(double epsilon, double sigma, int dimension = 1) {
    if (!(epsilon > 0) || !(sigma > 0)) throw DomainError("lennard_jones: epsilon and sigma must be positive");
    PairPotential p(PotentialKind::lennard_jones, dimension);
    p.lj_epsilon_ = epsilon;
    p.lj_sigma_ = sigma;
    return p;
  }

  /// Arbitrary step function. Radii must increase; values may be +infinity.
  /// Steps without an infinite first value violate phi(0) = +infinity and are
  /// accepted only as probe inputs.
  static PairPotential tabulated(std::vector<Step> steps, int dimension = 1) {
    if (steps.empty()) throw DomainError("tabulated: at least one step required");
    double prev = 0.0;
    for (const auto& s : steps) {
      if (!(s.r_upper > prev)) throw DomainError("tabulated: step radii must increase");
      if (std::isnan(s.phi) || s.phi == -kInf) throw DomainError("tabulated: step values must be finite or +inf");
      prev = s.r_upper;
    }
    PairPotential p(PotentialKind::tabulated, dimension);
    p.steps_ = std::move(steps);
    return p;
  }

  PotentialKind kind() const { return kind_; }
  int dimension() const { return dimension_; }

  double phi(double r) const {
    if (kind_ == PotentialKind::lennard_jones) {
      if (r <= 0) return kInf;
      const double s6 = std::pow(lj_sigma_ / r, 6);
      return 4.0 * lj_epsilon_ * (s6 * s6 - s6);
    }
    for (const auto& s : steps_)
      if (r < s.r_upper) return s.phi;
    return 0.0;
  }

  /// e^{-beta phi(r)}, exactly 0 inside a hard core.
  double boltzmann(double r, double beta) const {
    const double v = phi(r);
    return v == kInf ? 0.0 : std::exp(-beta * v);
  }

  /// Mayer factor e^{-beta phi(r)} - 1, exactly -1 inside a hard core.
  double mayer_f(double r, double beta) const {
    const double v = phi(r);
    if (v == kInf) return -1.0;
    return std::expm1(-beta * v);
  }

  /// Diameter of the hard core (0 if none, sigma for Lennard-Jones).
  double core() const {
    if (kind_ == PotentialKind::lennard_jones) return lj_sigma_;
    if (!steps_.empty() && steps_.front().phi == kInf) return steps_.front().r_upper;
    return 0.0;
  }

  bool has_hard_core() const { return kind_ == PotentialKind::lennard_jones || core() > 0.0; }

  bool is_step() const { return kind_ != PotentialKind::lennard_jones; }
  const std::vector<Step>& steps() const { return steps_; }

  /// Radius beyond which phi vanishes (infinite for Lennard-Jones).
  double range() const {
    if (kind_ == PotentialKind::lennard_jones) return kInf;
    double r = 0.0;
    for (const auto& s : steps_)
      if (s.phi != 0.0) r = s.r_upper;
    return r;
  }

  /// Radii where the Mayer factor jumps.
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    if (kind_ == PotentialKind::lennard_jones) return out;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const double next = i + 1 < steps_.size() ? steps_[i + 1].phi : 0.0;
      if (next != steps_[i].phi) out.push_back(steps_[i].r_upper);
    }
    return out;
  }

  /// Radius beyond which |f| < tol; equals range() for finite-range potentials.
  double cutoff(double beta, double tol = 1e-12) const {
    if (kind_ != PotentialKind::lennard_jones) return range();
    // beyond the minimum |f| decreases monotonically
    double r = lj_sigma_ * std::pow(2.0, 1.0 / 6.0);
    while (std::abs(mayer_f(r, beta)) >= tol) r *= 1.05;
    return r;
  }

  /// Lennard-Jones parameters (zero for other kinds).
  double lj_epsilon() const { return lj_epsilon_; }
  double lj_sigma() const { return lj_sigma_; }

 private:
  PairPotential(PotentialKind kind, int dimension) : kind_(kind), dimension_(dimension) {
    if (dimension < 1 || dimension > 3) throw DomainError("potential: dimension must be 1, 2 or 3");
  }

  PotentialKind kind_;
  int dimension_;
  std::vector<Step> steps_;
  double lj_epsilon_ = 0.0;
  double lj_sigma_ = 0.0;
};

inline void check_beta(double beta) {
  if (!(beta > 0) || !std::isfinite(beta)) throw DomainError("beta must be a positive finite number");
}

/// U(gamma): sum of phi over unordered pairs; +inf on hard-core overlap.
inline double energy_U(const Configuration& cfg, const PairPotential& pot) {
  double u = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.size(); ++j) u += pot.phi(distance(cfg[i], cfg[j]));
  return u;
}

/// W(eta; gamma): sum of phi over pairs with one point in each configuration.
inline double energy_W(const Configuration& eta, const Configuration& gamma, const PairPotential& pot) {
  double w = 0.0;
  for (const auto& x : eta)
    for (const auto& y : gamma) {
      if (x == y) throw DomainError("energy_W: configurations share a point");
      w += pot.phi(distance(x, y));
    }
  return w;
}

/// K(x; xi) = prod over y in xi of f(|x - y|); 1 for empty xi.
inline double mayer_k(const Point& x, const Configuration& xi, const PairPotential& pot, double beta) {
  double k = 1.0;
  for (const auto& y : xi) k *= pot.mayer_f(distance(x, y), beta);
  return k;
}

/// Surface area of the unit sphere in R^d (2 points for d = 1).
inline double unit_sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
  }
  throw DomainError("unit_sphere_area: unsupported dimension");
}

/// C(beta) = int_{R^d} |e^{-beta phi(|x|)} - 1| dx by radial quadrature on
/// panels aligned to the potential's jumps; Lennard-Jones adds the analytic
/// r^{-6} tail beyond the cutoff.
inline double regularity_C(const PairPotential& pot, double beta, double rel_tol = 1e-10) {
  check_beta(beta);
  const int d = pot.dimension();
  auto integrand = [&](double r) { return std::abs(pot.mayer_f(r, beta)) * std::pow(r, d - 1); };

  if (pot.kind() == PotentialKind::lennard_jones && d >= 6)
    throw DomainError("regularity_C: r^-6 tail is not integrable in d >= 6");

  const double r_max = pot.cutoff(beta);
  std::vector<double> cuts{0.0};
  for (double b : pot.breakpoints())
    if (b < r_max) cuts.push_back(b);
  cuts.push_back(r_max);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += quadrature::adaptive_integrate(integrand, cuts[i], cuts[i + 1], rel_tol * 1e-2);
  if (pot.kind() == PotentialKind::lennard_jones) {
    // |f| ~ 4 beta eps sigma^6 r^-6 beyond the cutoff
    const double c6 = 4.0 * beta * pot.lj_epsilon() * std::pow(pot.lj_sigma(), 6);
    total += c6 * std::pow(r_max, d - 6) / (6.0 - d);
  }
  return unit_sphere_area(d) * total;
}

struct StabilityReport {
  std::vector<int> sizes;
  std::vector<double> min_ratio_by_size;  // min U(gamma)/|gamma| over samples of that size
  double min_ratio = 0.0;
  double B_estimate = 0.0;
  bool instability_signal = false;
  int trials = 0;
};

/// Random search for configurations with low U(gamma)/|gamma|. Flags a
/// per-particle energy that keeps falling linearly with |gamma|, the signature
/// of a catastrophic potential. A probe, not a proof of stability.
inline StabilityReport stability_probe(const PairPotential& pot, int trials, int n_max, std::uint64_t seed = 1) {
  if (trials < 1 || n_max < 2) throw DomainError("stability_probe: need trials >= 1 and n_max >= 2");
  StabilityReport rep;
  rep.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int d = pot.dimension();
  const double scale = std::max({pot.core(), std::isfinite(pot.range()) ? pot.range() : 0.0,
                                 pot.kind() == PotentialKind::lennard_jones ? 1.5 * pot.lj_sigma() : 0.0, 1e-3});

  double finite_min_phi = 0.0;
  for (const auto& s : pot.steps())
    if (std::isfinite(s.phi)) finite_min_phi = std::min(finite_min_phi, s.phi);
  if (pot.kind() == PotentialKind::lennard_jones) finite_min_phi = -pot.lj_epsilon();

  const int per_size = std::max(1, trials / (n_max - 1));
  for (int n = 2; n <= n_max; ++n) {
    double best = kInf;
    for (int t = 0; t < per_size; ++t) {
      const double side = scale * std::pow(static_cast<double>(n), 1.0 / d) * (0.25 + 1.75 * unit(rng));
      Configuration cfg(n, Point{0, 0, 0});
      for (auto& p : cfg)
        for (int k = 0; k < d; ++k) p[k] = side * unit(rng);
      best = std::min(best, energy_U(cfg, pot) / n);
    }
    rep.sizes.push_back(n);
    rep.min_ratio_by_size.push_back(best);
  }
  rep.min_ratio = *std::min_element(rep.min_ratio_by_size.begin(), rep.min_ratio_by_size.end());
  rep.B_estimate = std::max(0.0, -rep.min_ratio);

  // slope of the per-particle minimum over the upper half of the sizes
  const std::size_t lo = rep.sizes.size() / 2, hi = rep.sizes.size() - 1;
  if (hi > lo && finite_min_phi < 0.0 && std::isfinite(rep.min_ratio_by_size[lo])) {
    const double slope = (rep.min_ratio_by_size[hi] - rep.min_ratio_by_size[lo]) / (rep.sizes[hi] - rep.sizes[lo]);
    rep.instability_signal = slope < 0.1 * finite_min_phi;
  }
  return rep;
}

}  // namespace virial
