#pragma once

// Exact symbolic kernels T(eta|gamma) of the density expansion
//
//   rho(eta) = sum_n (1/n!) int T(eta | y_1..y_n) dy
//
// built two ways: by iterating the nonlinear recurrence
//
//   T(eta|gamma) = rho e^{-beta W(x1; eta\x1)} sum_{xi <= gamma} K(x1;xi) T(eta\x1 u xi | gamma\xi)
//                - sum_{0 != xi <= gamma} T(eta|gamma\xi) sum_{0 != zeta <= xi} K(x1;zeta) T(zeta|xi\zeta)
//
// with T(0|0) = 1, T(0|gamma) = 0, and as the sum over the rooted graph
// family D(eta;gamma). Every kernel is homogeneous of degree |eta|+|gamma| in
// rho, so the density power is carried as metadata only.
//
// A monomial is a product of Mayer factors f(u,v) = e^{-beta phi} - 1 on
// `f_edges` and Boltzmann factors e^{-beta phi} = 1 + f on `e_pairs`.
// Boltzmann factors between two root (white) vertices telescope into
// e^{-beta U(eta)} and are carried by a flag once every term has all of them.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "virial/error.hpp"
#include "virial/exact.hpp"
#include "virial/graph.hpp"

namespace virial::kernel {

using graph::EdgeMask;
using graph::VertexMask;

inline constexpr int kDefaultSymbolicCap = 7;

struct Monomial {
  EdgeMask f_edges = 0;
  EdgeMask e_pairs = 0;
  Rational coefficient{1};

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Which particle of eta plays the role of x1 in the recurrence.
enum class Pivot { lowest, highest };

struct SymbolicKernel {
  int white = 0;
  int black = 0;
  std::vector<Monomial> terms;
  /// Set when every Boltzmann factor between roots has been absorbed into an
  /// implicit e^{-beta U(eta)} prefactor.
  bool boltzmann_prefactor = false;
  bool normalized = false;

  int rho_power() const { return white + black; }
  bool is_zero() const { return terms.empty(); }
};

/// Boltzmann pairs among the roots 0..white-1.
inline EdgeMask root_pairs(int white) {
  EdgeMask m = 0;
  for (int i = 0; i < white; ++i)
    for (int j = i + 1; j < white; ++j) m |= graph::edge_bit(i, j);
  return m;
}

namespace detail {

using Terms = std::vector<Monomial>;

inline bool key_less(const Monomial& a, const Monomial& b) {
  return a.f_edges != b.f_edges ? a.f_edges < b.f_edges : a.e_pairs < b.e_pairs;
}

/// Merge equal (f_edges, e_pairs) keys and drop zero coefficients.
inline Terms merge(Terms t) {
  std::sort(t.begin(), t.end(), key_less);
  Terms out;
  for (auto& m : t) {
    if (!out.empty() && out.back().f_edges == m.f_edges && out.back().e_pairs == m.e_pairs) {
      out.back().coefficient += m.coefficient;
    } else {
      if (!out.empty() && out.back().coefficient == 0) out.pop_back();
      out.push_back(std::move(m));
    }
  }
  if (!out.empty() && out.back().coefficient == 0) out.pop_back();
  return out;
}

/// Rewrites every Boltzmann factor outside `keep` as (1 + f).
inline Terms expand_boltzmann(const Terms& in, EdgeMask keep) {
  Terms out;
  for (const auto& m : in) {
    const EdgeMask expand = m.e_pairs & ~keep;
    const EdgeMask kept = m.e_pairs & keep;
    // each subset of the expanded pairs becomes Mayer edges
    EdgeMask sub = expand;
    while (true) {
      out.push_back({m.f_edges | sub, kept, m.coefficient});
      if (sub == 0) break;
      sub = (sub - 1) & expand;
    }
  }
  return out;
}

inline Terms multiply(const Terms& a, const Terms& b) {
  Terms out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) {
      if ((x.f_edges | x.e_pairs) & (y.f_edges | y.e_pairs))
        throw std::logic_error("kernel recurrence produced a repeated vertex pair");
      out.push_back({x.f_edges | y.f_edges, x.e_pairs | y.e_pairs, x.coefficient * y.coefficient});
    }
  return out;
}

inline EdgeMask star(int center, VertexMask leaves) {
  EdgeMask m = 0;
  for (VertexMask l = leaves; l; l &= l - 1) m |= graph::edge_bit(center, std::countr_zero(l));
  return m;
}

class Recurrence {
 public:
  Recurrence(int white, bool cancel, Pivot pivot)
      : roots_(root_pairs(white)), cancel_(cancel), pivot_(pivot) {}

  const Terms& operator()(VertexMask eta, VertexMask gamma) {
    const std::uint64_t key = (std::uint64_t{eta} << 32) | gamma;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Terms value = compute(eta, gamma);
    return memo_.emplace(key, std::move(value)).first->second;
  }

 private:
  Terms compute(VertexMask eta, VertexMask gamma) {
    if (eta & gamma) throw DomainError("kernel recurrence: T(eta|gamma) requested with eta and gamma overlapping");
    if (eta == 0) return gamma == 0 ? Terms{Monomial{}} : Terms{};

    const int x1 = pivot_ == Pivot::lowest ? std::countr_zero(eta) : 31 - std::countl_zero(eta);
    const VertexMask rest = eta & ~(VertexMask{1} << x1);

    Terms prefactor{Monomial{0, star(x1, rest), Rational(1)}};
    if (cancel_) prefactor = expand_boltzmann(prefactor, roots_);

    Terms first;
    for_each_subset(gamma, [&](VertexMask xi) {
      const Terms& sub = (*this)(rest | xi, gamma & ~xi);
      for (const auto& m : sub) {
        Monomial t = m;
        if (t.f_edges & star(x1, xi)) throw std::logic_error("kernel recurrence: duplicate Mayer edge");
        t.f_edges |= star(x1, xi);
        first.push_back(std::move(t));
      }
    });
    Terms result = multiply(prefactor, first);

    for_each_subset(gamma, [&](VertexMask xi) {
      if (xi == 0) return;
      Terms inner;
      for_each_subset(xi, [&](VertexMask zeta) {
        if (zeta == 0) return;
        for (const auto& m : (*this)(zeta, xi & ~zeta)) {
          Monomial t = m;
          t.f_edges |= star(x1, zeta);
          inner.push_back(std::move(t));
        }
      });
      if (cancel_) inner = merge(std::move(inner));
      for (auto& m : multiply((*this)(eta, gamma & ~xi), inner)) {
        m.coefficient = -m.coefficient;
        result.push_back(std::move(m));
      }
    });

    if (cancel_) result = merge(std::move(result));
    return result;
  }

  template <class Fn>
  static void for_each_subset(VertexMask mask, Fn&& fn) {
    VertexMask sub = mask;
    while (true) {
      fn(sub);
      if (sub == 0) break;
      sub = (sub - 1) & mask;
    }
  }

  EdgeMask roots_;
  bool cancel_;
  Pivot pivot_;
  std::map<std::uint64_t, Terms> memo_;
};

inline void check_symbolic_cap(int white, int black, int cap) {
  if (white < 0 || black < 0) throw DomainError("kernel: negative vertex count");
  if (white + black > cap)
    throw CapExceeded("kernel: " + std::to_string(white + black) + " vertices exceeds symbolic cap " +
                      std::to_string(cap));
  if (white + black > graph::kMaxVertices) throw CapExceeded("kernel: at most 11 vertices supported");
}

}  // namespace detail

/// Expands the remaining non-root Boltzmann factors, merges equal edge sets,
/// drops zero terms, and absorbs the root Boltzmann factors into the prefactor
/// flag when every term carries all of them. Idempotent.
inline SymbolicKernel normal_form(SymbolicKernel k) {
  const EdgeMask roots = root_pairs(k.white);
  auto terms = detail::merge(detail::expand_boltzmann(k.terms, roots));
  const bool uniform = std::all_of(terms.begin(), terms.end(), [&](const Monomial& m) { return m.e_pairs == roots; });
  if (uniform && (k.boltzmann_prefactor || roots != 0 || !terms.empty())) {
    for (auto& m : terms) m.e_pairs = 0;
    k.boltzmann_prefactor = true;
  }
  k.terms = std::move(terms);
  k.normalized = true;
  return k;
}

/// T(eta|gamma) / rho^{m+n} for eta = x1..xm, gamma = y1..yn by iterating the
/// recurrence. With cancel = false no terms are merged anywhere and Boltzmann
/// factors stay opaque, so the term list is the raw forest expansion.
inline SymbolicKernel kernel_by_recurrence(int white, int black, bool cancel = true, Pivot pivot = Pivot::lowest,
                                           int cap = kDefaultSymbolicCap) {
  detail::check_symbolic_cap(white, black, cap);
  detail::Recurrence rec(white, cancel, pivot);
  const VertexMask eta = (VertexMask{1} << white) - 1;
  const VertexMask gamma = ((VertexMask{1} << (white + black)) - 1) & ~eta;
  SymbolicKernel k{white, black, rec(eta, gamma), false, false};
  if (cancel) {
    k = normal_form(std::move(k));
    if (!k.boltzmann_prefactor && !k.terms.empty())
      throw std::logic_error("kernel recurrence: root Boltzmann factors failed to telescope");
  }
  return k;
}

/// One +1 monomial per member of D(eta;gamma).
inline SymbolicKernel kernel_by_graphs(int white, int black, graph::DReading reading = graph::DReading::rooted,
                                       int cap = graph::kDefaultEnumerationCap) {
  SymbolicKernel k{white, black, {}, true, false};
  for (const auto& g : graph::enumerate_D(white, black, reading, cap).members)
    k.terms.push_back({g.edges, 0, Rational(1)});
  return normal_form(std::move(k));
}

inline bool kernels_equal(const SymbolicKernel& a, const SymbolicKernel& b) {
  if (a.white != b.white || a.black != b.black)
    throw DomainError("kernels_equal: kernels have different (m, n) shapes");
  const auto na = normal_form(a);
  const auto nb = normal_form(b);
  if (na.terms.empty() && nb.terms.empty()) return true;
  return na.boltzmann_prefactor == nb.boltzmann_prefactor && na.terms == nb.terms;
}

/// Number of monomials, counted with multiplicity and without sign. With
/// pre_cancellation set the kernel must come from the non-cancelling build.
inline Integer term_census(const SymbolicKernel& k, bool pre_cancellation) {
  if (pre_cancellation && k.normalized)
    throw DomainError("term_census: pre-cancellation census needs a kernel built with cancellation disabled");
  Integer total = 0;
  for (const auto& m : k.terms) total += boost::multiprecision::abs(boost::multiprecision::numerator(m.coefficient));
  return total;
}

/// Value of the symbolic kernel for concrete Mayer factors; f(i, j) is the
/// Mayer function between vertices i and j. Includes e^{-beta U(eta)} when the
/// prefactor flag is set.
template <class F>
double evaluate(const SymbolicKernel& k, F&& f) {
  double total = 0.0;
  for (const auto& m : k.terms) {
    double term = to_double(m.coefficient);
    for (EdgeMask e = m.f_edges; e; e &= e - 1) {
      auto [i, j] = graph::pair_from_index(std::countr_zero(e));
      term *= f(i, j);
    }
    for (EdgeMask e = m.e_pairs; e; e &= e - 1) {
      auto [i, j] = graph::pair_from_index(std::countr_zero(e));
      term *= 1.0 + f(i, j);
    }
    total += term;
  }
  if (k.boltzmann_prefactor)
    for (int i = 0; i < k.white; ++i)
      for (int j = i + 1; j < k.white; ++j) total *= 1.0 + f(i, j);
  return total;
}

/// Direct floating-point iteration of the recurrence for concrete Mayer
/// factors: returns T(eta|gamma) / rho^{m+n}, Boltzmann prefactor included.
/// Independent of the symbolic machinery.
class NumericRecurrence {
 public:
  /// f is a dense symmetric (white+black)^2 matrix of Mayer factors.
  NumericRecurrence(int white, int black, std::vector<double> f)
      : white_(white), v_(white + black), f_(std::move(f)), memo_(std::size_t{1} << (2 * v_), kUnset) {
    if (v_ > 10) throw CapExceeded("NumericRecurrence: at most 10 vertices");
    if (f_.size() != static_cast<std::size_t>(v_ * v_)) throw DomainError("NumericRecurrence: matrix size mismatch");
  }

  /// Swap in new Mayer factors for the same (m, n), reusing the memo buffer.
  void reset(const std::vector<double>& f) {
    if (f.size() != f_.size()) throw DomainError("NumericRecurrence: matrix size mismatch");
    f_ = f;
    std::fill(memo_.begin(), memo_.end(), kUnset);
  }

  double value() {
    const VertexMask eta = (VertexMask{1} << white_) - 1;
    const VertexMask all = (VertexMask{1} << v_) - 1;
    return T(eta, all & ~eta);
  }

  double T(VertexMask eta, VertexMask gamma) {
    double& slot = memo_[(std::size_t{eta} << v_) | gamma];
    if (slot != kUnset) return slot;
    slot = compute(eta, gamma);
    return slot;
  }

 private:
  static constexpr double kUnset = -1.2345678901234567e300;

  double fm(int i, int j) const { return f_[static_cast<std::size_t>(i * v_ + j)]; }

  double K(int x, VertexMask xi) const {
    double p = 1.0;
    for (VertexMask s = xi; s; s &= s - 1) p *= fm(x, std::countr_zero(s));
    return p;
  }

  double compute(VertexMask eta, VertexMask gamma) {
    if (eta == 0) return gamma == 0 ? 1.0 : 0.0;
    const int x1 = std::countr_zero(eta);
    const VertexMask rest = eta & ~(VertexMask{1} << x1);
    double boltz = 1.0;
    for (VertexMask s = rest; s; s &= s - 1) boltz *= 1.0 + fm(x1, std::countr_zero(s));
    double first = 0.0;
    VertexMask xi = gamma;
    while (true) {
      first += K(x1, xi) * T(rest | xi, gamma & ~xi);
      if (xi == 0) break;
      xi = (xi - 1) & gamma;
    }
    double second = 0.0;
    for (xi = gamma; xi; xi = (xi - 1) & gamma) {
      double inner = 0.0;
      for (VertexMask zeta = xi; zeta; zeta = (zeta - 1) & xi) inner += K(x1, zeta) * T(zeta, xi & ~zeta);
      second += T(eta, gamma & ~xi) * inner;
    }
    return boltz * first - second;
  }

  int white_;
  int v_;
  std::vector<double> f_;
  std::vector<double> memo_;
};

inline std::string vertex_label(int white, int v) {
  return v < white ? "x" + std::to_string(v + 1) : "y" + std::to_string(v - white + 1);
}

}  // namespace virial::kernel
