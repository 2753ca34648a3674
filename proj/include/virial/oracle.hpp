#pragma once

// Finite-N canonical ensemble in a one-dimensional box [-L, L] with hard walls
// (particle centres confined, no wall potential).
//
// For step potentials whose range does not exceed twice the hard core, only
// neighbouring particles along the line interact, so
//
//   Z_N = int_{-L < y_1 < ... < y_N < L} prod_i b(y_{i+1} - y_i) dy,   b = e^{-beta phi}
//
// is an iterated convolution of b. With a panel width h that divides every
// step radius, each iterate is a polynomial of fixed degree on every panel,
// so the convolutions are carried out exactly on panel coefficients.
// Correlation functions follow by summing over the occupations of the gaps
// between the fixed points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "virial/error.hpp"
#include "virial/potential.hpp"
#include "virial/quadrature.hpp"

namespace virial::oracle {

inline constexpr int kMaxN = 7;

struct Box {
  double half_width = 1.0;
  int dimension = 1;

  double volume() const { return 2.0 * half_width; }
  bool contains(double x, double tol = 1e-12) const { return std::abs(x) <= half_width + tol; }
};

struct CanonicalSystem {
  int N = 1;
  Box box;
  double beta = 1.0;
  PairPotential pot = PairPotential::ideal();
};

inline void validate(const CanonicalSystem& sys) {
  if (sys.N < 0) throw DomainError("oracle: N must be nonnegative");
  if (sys.N > kMaxN) throw CapExceeded("oracle: N = " + std::to_string(sys.N) + " exceeds the cap " + std::to_string(kMaxN));
  if (!(sys.box.half_width > 0)) throw DomainError("oracle: box half-width must be positive");
  if (sys.box.dimension != 1 || sys.pot.dimension() != 1) throw DomainError("oracle: only d = 1 is supported");
  check_beta(sys.beta);
  const auto& pot = sys.pot;
  if (!pot.is_step()) throw DomainError("oracle: Lennard-Jones is not supported (step potentials only)");
  if (pot.range() > 2.0 * pot.core() * (1 + 1e-12))
    throw DomainError("oracle: potential range must not exceed twice the hard core (nearest-neighbour chain)");
}

/// Closed form for hard rods of length a: (2L - (N-1) a)^N / N!.
inline double tonks_Z(int N, double L, double a) {
  if (N == 0) return 1.0;
  const double free = 2.0 * L - (N - 1) * a;
  if (free <= 0) return 0.0;
  return std::pow(free, N) / std::tgamma(N + 1.0);
}

/// Piecewise polynomial on [0, panels*h]; on panel j it is sum_k c_k u^k with
/// u = t/h - j in [0, 1]. Vanishes for t < 0.
class PanelPoly {
 public:
  PanelPoly() = default;
  PanelPoly(double h, std::size_t panels, int degree)
      : h_(h), panels_(panels), degree_(degree), c_(panels * (degree + 1), 0.0) {}

  double h() const { return h_; }
  std::size_t panels() const { return panels_; }
  int degree() const { return degree_; }
  double* panel(std::ptrdiff_t j) { return c_.data() + j * (degree_ + 1); }
  const double* panel(std::ptrdiff_t j) const { return c_.data() + j * (degree_ + 1); }

  double operator()(double t) const {
    if (t < 0) return 0.0;
    auto j = static_cast<std::ptrdiff_t>(std::floor(t / h_));
    if (j >= static_cast<std::ptrdiff_t>(panels_)) {
      if (t > panels_ * h_ * (1 + 1e-12)) throw DomainError("oracle: argument beyond tabulated range");
      j = static_cast<std::ptrdiff_t>(panels_) - 1;
    }
    const double u = t / h_ - j;
    const double* c = panel(j);
    double v = 0.0;
    for (int k = degree_; k >= 0; --k) v = v * u + c[k];
    return v;
  }

  /// G(t) = int_0^t P.
  PanelPoly integral() const {
    PanelPoly g(h_, panels_, degree_ + 1);
    double base = 0.0;
    for (std::size_t j = 0; j < panels_; ++j) {
      const double* c = panel(j);
      double* d = g.panel(j);
      d[0] = base;
      double total = 0.0;
      for (int k = 0; k <= degree_; ++k) {
        d[k + 1] = h_ * c[k] / (k + 1);
        total += d[k + 1];
      }
      base += total;
    }
    return g;
  }

 private:
  double h_ = 1.0;
  std::size_t panels_ = 0;
  int degree_ = 0;
  std::vector<double> c_;
};

/// Piecewise-constant link factor: value `weight` on [start, end) panels;
/// end < 0 means unbounded.
struct LinkPiece {
  std::ptrdiff_t start;
  std::ptrdiff_t end;
  double weight;
};

/// (P * c)(t) = int_0^t P(y) c(t - y) dy.
inline PanelPoly convolve(const PanelPoly& p, std::span<const LinkPiece> link) {
  const PanelPoly g = p.integral();
  PanelPoly out(p.h(), p.panels(), g.degree());
  const int width = g.degree() + 1;
  auto accumulate = [&](std::ptrdiff_t j, std::ptrdiff_t shift, double w) {
    const std::ptrdiff_t src = j - shift;
    if (src < 0 || w == 0.0) return;
    const double* s = g.panel(src);
    double* d = out.panel(j);
    for (int k = 0; k < width; ++k) d[k] += w * s[k];
  };
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(p.panels()); ++j)
    for (const auto& piece : link) {
      accumulate(j, piece.start, piece.weight);
      if (piece.end >= 0) accumulate(j, piece.end, -piece.weight);
    }
  return out;
}

/// Largest panel width h = r_min / q (q = 1, 2, ...) dividing every radius.
inline double commensurate_panel(std::span<const double> radii) {
  if (radii.empty()) return 0.0;
  const double rmin = *std::min_element(radii.begin(), radii.end());
  for (int q = 1; q <= 4096; ++q) {
    const double h = rmin / q;
    bool ok = true;
    for (double r : radii) {
      const double ratio = r / h;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
        ok = false;
        break;
      }
    }
    if (ok) return h;
  }
  throw DomainError("oracle: step radii are not commensurate to a usable panel width");
}

/// Gap integrals of the nearest-neighbour chain for one canonical system.
class Chain {
 public:
  explicit Chain(const CanonicalSystem& sys) : sys_(sys) {
    validate(sys);
    const double T = sys.box.volume();
    const auto radii = sys.pot.breakpoints();
    double h = commensurate_panel(radii);
    if (h == 0.0) h = T;
    h_ = h;
    const auto panels = static_cast<std::size_t>(std::ceil(T / h - 1e-9)) + 1;
    if (panels > 2'000'000) throw CapExceeded("oracle: box too large for the panel width");

    std::vector<LinkPiece> b_link;
    std::ptrdiff_t prev = 0;
    for (const auto& s : sys.pot.steps()) {
      const auto end = static_cast<std::ptrdiff_t>(std::llround(s.r_upper / h));
      b_link.push_back({prev, end, s.phi == kInf ? 0.0 : std::exp(-sys.beta * s.phi)});
      prev = end;
    }
    b_link.push_back({prev, -1, 1.0});
    const std::vector<LinkPiece> wall_link{{0, -1, 1.0}};

    PanelPoly b0(h, panels, 0), one(h, panels, 0);
    for (std::size_t j = 0; j < panels; ++j) {
      b0.panel(j)[0] = sys.pot.boltzmann((j + 0.5) * h, sys.beta);
      one.panel(j)[0] = 1.0;
    }
    const int N = sys.N;
    pp_.push_back(b0);
    wp_.push_back(one);
    for (int k = 1; k <= N; ++k) {
      pp_.push_back(convolve(pp_.back(), b_link));
      wp_.push_back(convolve(wp_.back(), b_link));
    }
    Z_ = N == 0 ? 1.0 : convolve(wp_[N - 1], wall_link)(T);
  }

  const CanonicalSystem& system() const { return sys_; }
  double Z() const { return Z_; }
  /// Width of the polynomial panels; gap integrals are smooth between multiples of it.
  double panel_width() const { return h_; }

  /// Ordered integral of k particles between two fixed particles a distance t apart.
  double interior(int k, double t) const {
    if (t < 0) return 0.0;
    return k == 0 ? sys_.pot.boltzmann(t, sys_.beta) : pp_.at(k)(t);
  }
  /// Same between a wall and a fixed particle.
  double boundary(int k, double t) const {
    if (t < 0) return 0.0;
    return k == 0 ? 1.0 : wp_.at(k)(t);
  }

  /// (1/(N-m)!) int_{Lambda^{N-m}} e^{-beta U(eta u gamma)} dgamma for a sorted eta.
  double unnormalized(std::span<const double> sorted_eta) const {
    const int m = static_cast<int>(sorted_eta.size());
    const int free = sys_.N - m;
    if (free < 0) return 0.0;
    if (m == 0) return Z_;
    const double L = sys_.box.half_width;
    std::vector<int> occ(m + 1, 0);
    double total = 0.0;
    std::function<void(int, int)> rec = [&](int gap, int left) {
      if (gap == m) {
        occ[m] = left;
        double v = boundary(occ[0], sorted_eta[0] + L);
        for (int i = 1; i < m && v != 0.0; ++i) v *= interior(occ[i], sorted_eta[i] - sorted_eta[i - 1]);
        if (v != 0.0) v *= boundary(occ[m], L - sorted_eta[m - 1]);
        total += v;
        return;
      }
      for (int k = 0; k <= left; ++k) {
        occ[gap] = k;
        rec(gap + 1, left - k);
      }
    };
    rec(0, free);
    return total;
  }

  double correlation(std::span<const double> eta) const {
    for (double x : eta)
      if (!sys_.box.contains(x)) throw DomainError("oracle: eta point " + std::to_string(x) + " lies outside the box");
    if (static_cast<int>(eta.size()) > sys_.N) return 0.0;
    std::vector<double> s(eta.begin(), eta.end());
    std::sort(s.begin(), s.end());
    if (Z_ == 0.0) throw DomainError("oracle: Z vanishes (box too small for N particles)");
    return unnormalized(s) / Z_;
  }

 private:
  CanonicalSystem sys_;
  std::vector<PanelPoly> pp_, wp_;
  double Z_ = 0.0;
  double h_ = 0.0;
};

inline double partition_function(const CanonicalSystem& sys) { return Chain(sys).Z(); }

inline std::vector<double> xs_of(const Configuration& eta) {
  std::vector<double> xs;
  for (const auto& p : eta) xs.push_back(p[0]);
  return xs;
}

inline double finite_correlation(const Configuration& eta, const CanonicalSystem& sys) {
  const auto xs = xs_of(eta);
  return Chain(sys).correlation(xs);
}

struct KsResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;       // |lhs - rhs| / |lhs| (absolute when lhs = 0)
  double a_N = 0.0;            // Z_{N-1} / Z_N
  double uniform_density = 0.0;          // N / V
  double uniform_discrepancy = 0.0;      // |lhs - N/V| / (N/V), reported for |eta| = 1
  double panel_width = 0.0;
  int gauss_order = 0;
};

/// Midpoint panels by default; order >= 2 integrates the polynomial pieces exactly.
struct KsGrid {
  double panel_width = 1.0 / 64;  // in units of the interaction range
  int gauss_order = 1;
};

/// Both sides of the finite-volume identity
///   rho_N(eta) = e^{-beta W(x1; eta')} (Z_{N-1}/Z_N) int K(x1; xi) rho_{N-1}(eta' u xi) lambda(dxi),
/// x1 = eta[0]. The left side is the exact chain value. The right side is a
/// nested Gauss-Legendre sum over xi: the panels of each xi_k are split at the
/// walls, x1, eta' and the earlier xi_j shifted by every multiple of the chain
/// panel width (which covers all interaction radii), then subdivided to width
/// <= panel_width * range. The integrand is a polynomial on every panel, so
/// the residual converges at the algebraic order of the Gauss rule.
inline KsResult check_ks_identity(const Configuration& eta, const CanonicalSystem& sys, const KsGrid& grid = {}) {
  const int m = static_cast<int>(eta.size());
  if (m < 1 || m >= sys.N) throw DomainError("check_ks_identity: need 1 <= |eta| < N");
  if (!(grid.panel_width > 0)) throw DomainError("check_ks_identity: panel width must be positive");
  const Chain big(sys);
  CanonicalSystem smaller = sys;
  smaller.N = sys.N - 1;
  const Chain small(smaller);
  const auto& pot = sys.pot;
  const double beta = sys.beta, L = sys.box.half_width;
  const auto xs = xs_of(eta);

  KsResult out;
  out.lhs = big.correlation(xs);
  out.a_N = small.Z() / big.Z();
  out.uniform_density = sys.N / sys.box.volume();
  out.uniform_discrepancy = std::abs(out.lhs - out.uniform_density) / out.uniform_density;

  const double x1 = xs[0];
  const std::vector<double> rest(xs.begin() + 1, xs.end());
  double boltz = 1.0;
  for (double z : rest) boltz *= pot.boltzmann(std::abs(x1 - z), beta);

  const double R = pot.range();
  const double lo = std::max(-L, x1 - R), hi = std::min(L, x1 + R);
  const double h = grid.panel_width * R;
  const auto& g = quadrature::gauss_legendre(grid.gauss_order);
  out.panel_width = h;
  out.gauss_order = grid.gauss_order;

  std::vector<double> pts = rest;
  std::vector<double> sorted;
  auto leaf = [&] {
    sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    return small.unnormalized(sorted);
  };
  const double lattice = small.panel_width();
  auto nodes_for_level = [&](std::vector<double>& nodes, std::vector<double>& weights) {
    std::vector<double> cuts;
    auto add_lattice = [&](double p) {
      if (R == 0.0) {
        cuts.push_back(p);
        return;
      }
      const auto j0 = static_cast<long>(std::floor((lo - p) / lattice)) - 1;
      const auto j1 = static_cast<long>(std::ceil((hi - p) / lattice)) + 1;
      for (long j = j0; j <= j1; ++j) cuts.push_back(p + j * lattice);
    };
    add_lattice(x1);
    add_lattice(-L);
    add_lattice(L);
    for (double p : pts) add_lattice(p);
    const auto edges = quadrature::panel_edges(std::move(cuts), lo, hi);
    nodes.clear();
    weights.clear();
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const int sub = std::max(1, static_cast<int>(std::ceil((edges[e + 1] - edges[e]) / h - 1e-9)));
      const double w = (edges[e + 1] - edges[e]) / sub;
      for (int s = 0; s < sub; ++s) {
        const double a = edges[e] + s * w;
        for (int i = 0; i < grid.gauss_order; ++i) {
          nodes.push_back(a + 0.5 * w * (g.nodes[i] + 1.0));
          weights.push_back(0.5 * w * g.weights[i]);
        }
      }
    }
  };

  double integral = 0.0;
  double factorial = 1.0;
  for (int k = 0; k <= sys.N - m; ++k) {
    if (k > 0) factorial *= k;
    if (k > 0 && R == 0.0) break;
    auto rec = [&](auto&& self, int depth) -> double {
      if (depth == k) return leaf();
      std::vector<double> nodes, weights;
      nodes_for_level(nodes, weights);
      double sum = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double y = nodes[i];
        const double f = pot.mayer_f(std::abs(x1 - y), beta);
        if (f == 0.0) continue;
        bool blocked = false;
        for (double p : pts)
          if (pot.boltzmann(std::abs(p - y), beta) == 0.0) {
            blocked = true;
            break;
          }
        if (blocked) continue;
        pts.push_back(y);
        sum += weights[i] * f * self(self, depth + 1);
        pts.pop_back();
      }
      return sum;
    };
    integral += rec(rec, 0) / factorial;
  }
  out.rhs = boltz * out.a_N * integral / small.Z();
  out.residual = out.lhs != 0.0 ? std::abs(out.lhs - out.rhs) / std::abs(out.lhs) : std::abs(out.rhs);
  return out;
}

struct KsRefinement {
  KsResult coarse;
  KsResult fine;
  bool halved = false;
};

inline constexpr double kRoundoffFloor = 1e-11;

/// Residual at panel width h and h/2; `halved` when the residual at least
/// halves or both sit at the round-off floor.
inline KsRefinement ks_refinement(const Configuration& eta, const CanonicalSystem& sys, const KsGrid& grid = {}) {
  KsRefinement r;
  r.coarse = check_ks_identity(eta, sys, grid);
  KsGrid finer = grid;
  finer.panel_width *= 0.5;
  r.fine = check_ks_identity(eta, sys, finer);
  r.halved = r.fine.residual <= 0.5 * r.coarse.residual ||
             (r.coarse.residual < kRoundoffFloor && r.fine.residual < kRoundoffFloor);
  return r;
}

/// Polynomial extrapolation of (x_i, y_i) to x = 0 (Neville).
inline double neville_at_zero(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.empty()) throw DomainError("neville: mismatched or empty input");
  const std::size_t n = xs.size();
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = 0; i + k < n; ++i)
      ys[i] = ((0.0 - xs[i + k]) * ys[i] + (xs[i] - 0.0) * ys[i + 1]) / (xs[i] - xs[i + k]);
  return ys[0];
}

struct Extrapolation {
  std::vector<int> N_list;
  std::vector<double> values;        // rho_N(eta) with 2L = N / rho
  double limit = 0.0;
  std::vector<double> a_ratios;      // Z_{N-1} / (rho Z_N)
  double a_limit = 0.0;              // extrapolated a(rho)
  bool monotone = true;
  double last_step = 0.0;            // |limit - extrapolation without the largest N|
};

/// rho_N(eta) in boxes 2L = N / rho, extrapolated in 1/N to 0.
inline Extrapolation extrapolate_limit(const Configuration& eta, double rho, double beta, const PairPotential& pot,
                                       std::vector<int> N_list) {
  if (!(rho > 0)) throw DomainError("extrapolate_limit: density must be positive");
  if (N_list.size() < 2) throw DomainError("extrapolate_limit: need at least two N values");
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] <= N_list[i - 1]) throw DomainError("extrapolate_limit: N_list must increase");
  Extrapolation ex;
  ex.N_list = N_list;
  const auto xs = xs_of(eta);
  std::vector<double> inv;
  for (int N : N_list) {
    if (N < static_cast<int>(eta.size())) throw DomainError("extrapolate_limit: N smaller than |eta|");
    CanonicalSystem sys{N, Box{N / (2.0 * rho)}, beta, pot};
    const Chain chain(sys);
    ex.values.push_back(chain.correlation(xs));
    CanonicalSystem one_less = sys;
    one_less.N = N - 1;
    ex.a_ratios.push_back(Chain(one_less).Z() / (rho * chain.Z()));
    inv.push_back(1.0 / N);
  }
  ex.limit = neville_at_zero(inv, ex.values);
  ex.a_limit = neville_at_zero(inv, ex.a_ratios);
  const std::vector<double> inv_short(inv.begin(), inv.end() - 1), vals_short(ex.values.begin(), ex.values.end() - 1);
  ex.last_step = std::abs(ex.limit - neville_at_zero(inv_short, vals_short));
  int sign = 0;
  for (std::size_t i = 1; i < ex.values.size(); ++i) {
    const double d = ex.values[i] - ex.values[i - 1];
    const int s = (d > 0) - (d < 0);
    if (s != 0 && sign != 0 && s != sign) ex.monotone = false;
    if (s != 0) sign = s;
  }
  return ex;
}

/// Thermodynamic-limit hard-rod pair correlation g(r) at density rho.
inline double tonks_pair_correlation(double r, double rho, double a) {
  if (!(rho * a < 1)) throw DomainError("tonks: density beyond close packing");
  const double lam = rho / (1.0 - rho * a);
  double s = 0.0, fact = 1.0;
  for (int k = 1; k * a < r; ++k) {
    if (k > 1) fact *= (k - 1);
    const double x = r - k * a;
    s += std::pow(lam, k) * std::pow(x, k - 1) / fact * std::exp(-lam * x);
  }
  return s / rho;
}

/// Thermodynamic-limit a(rho) for hard rods, the limit of Z_{N-1} / (rho Z_N).
inline double tonks_a(double rho, double a) {
  const double x = rho * a;
  return std::exp(x / (1.0 - x)) / (1.0 - x);
}

}  // namespace virial::oracle
