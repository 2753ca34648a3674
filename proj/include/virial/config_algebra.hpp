#pragma once

// Finite, weighted site spaces standing in for (R^d, sigma): Lebesgue-Poisson
// sums, the Ruelle *-product and generating functionals. Every identity of
// the configuration calculus is a finite statement here, so it can be checked
// exactly with Value = Rational.

#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "virial/error.hpp"
#include "virial/exact.hpp"

namespace virial::algebra {

/// Subset of a site space, bit i set <=> site i present. Bitmasks over the
/// ordered site list are the canonical (sorted) form of a configuration.
using SiteMask = std::uint32_t;

inline constexpr std::size_t kMaxSites = 20;

inline int cardinality(SiteMask s) { return std::popcount(s); }

/// Calls fn(sub) for every subset of `mask`, including 0 and `mask` itself.
template <class Fn>
void for_each_subset(SiteMask mask, Fn&& fn) {
  SiteMask sub = mask;
  while (true) {
    fn(sub);
    if (sub == 0) break;
    sub = (sub - 1) & mask;
  }
}

template <class Value>
class SiteSpace {
 public:
  SiteSpace(std::vector<std::string> sites, std::vector<Value> weights)
      : sites_(std::move(sites)), weights_(std::move(weights)) {
    if (sites_.size() != weights_.size())
      throw DomainError("SiteSpace: one weight per site required");
    if (sites_.size() > kMaxSites)
      throw CapExceeded("SiteSpace: at most " + std::to_string(kMaxSites) + " sites");
    std::set<std::string> seen(sites_.begin(), sites_.end());
    if (seen.size() != sites_.size()) throw DomainError("SiteSpace: site identifiers must be unique");
    for (const auto& w : weights_)
      if (w < Value(0)) throw DomainError("SiteSpace: weights must be nonnegative");
  }

  /// n sites named s0..s{n-1}, all with the given weight.
  static SiteSpace uniform(std::size_t n, Value weight = Value(1)) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("s" + std::to_string(i));
    return SiteSpace(std::move(names), std::vector<Value>(n, weight));
  }

  std::size_t size() const { return sites_.size(); }
  SiteMask full() const { return size() == 32 ? ~SiteMask{0} : (SiteMask{1} << size()) - 1; }
  const std::vector<std::string>& sites() const { return sites_; }
  const Value& weight(std::size_t i) const { return weights_.at(i); }

  /// Product of site weights over the configuration, times z^{|gamma|}.
  Value measure(SiteMask gamma, const Value& z = Value(1)) const {
    Value w(1);
    for (std::size_t i = 0; i < size(); ++i)
      if (gamma >> i & 1u) w *= z * weights_[i];
    return w;
  }

 private:
  std::vector<std::string> sites_;
  std::vector<Value> weights_;
};

/// A function on finite configurations of a site space, defined for all
/// configurations of size <= max_size.
template <class Value>
class ConfigFunction {
 public:
  ConfigFunction(std::size_t site_count, std::size_t max_size)
      : site_count_(site_count), max_size_(max_size) {
    if (site_count > kMaxSites) throw CapExceeded("ConfigFunction: too many sites");
  }

  template <class Fn>
  static ConfigFunction tabulate(std::size_t site_count, Fn&& fn) {
    ConfigFunction f(site_count, site_count);
    const SiteMask full = (SiteMask{1} << site_count) - 1;
    for_each_subset(full, [&](SiteMask s) { f.values_[s] = Value(fn(s)); });
    return f;
  }

  static ConfigFunction constant(std::size_t site_count, const Value& c) {
    return tabulate(site_count, [&](SiteMask) { return c; });
  }

  /// Identity element of the *-product: 1 on the empty configuration, else 0.
  static ConfigFunction unit(std::size_t site_count) {
    return tabulate(site_count, [](SiteMask s) { return s == 0 ? Value(1) : Value(0); });
  }

  std::size_t site_count() const { return site_count_; }
  std::size_t max_size() const { return max_size_; }

  bool defined(SiteMask s) const { return values_.count(s) != 0; }

  const Value& at(SiteMask s) const {
    auto it = values_.find(s);
    if (it == values_.end())
      throw DomainError("ConfigFunction: undefined on configuration mask " + std::to_string(s));
    return it->second;
  }

  void set(SiteMask s, Value v) {
    if (static_cast<std::size_t>(cardinality(s)) > max_size_ || (s >> site_count_) != 0)
      throw DomainError("ConfigFunction: configuration outside the declared domain");
    values_[s] = std::move(v);
  }

  const std::map<SiteMask, Value>& values() const { return values_; }

  friend bool operator==(const ConfigFunction& a, const ConfigFunction& b) {
    return a.site_count_ == b.site_count_ && a.values_ == b.values_;
  }

 private:
  std::size_t site_count_;
  std::size_t max_size_;
  std::map<SiteMask, Value> values_;
};

/// A function H(xi, gamma) of two disjoint configurations.
template <class Value>
class PairConfigFunction {
 public:
  template <class Fn>
  static PairConfigFunction tabulate(std::size_t site_count, Fn&& fn) {
    PairConfigFunction h;
    h.site_count_ = site_count;
    const SiteMask full = (SiteMask{1} << site_count) - 1;
    for_each_subset(full, [&](SiteMask xi) {
      for_each_subset(full & ~xi, [&](SiteMask gamma) { h.values_[{xi, gamma}] = Value(fn(xi, gamma)); });
    });
    return h;
  }

  const Value& at(SiteMask xi, SiteMask gamma) const {
    auto it = values_.find({xi, gamma});
    if (it == values_.end()) throw DomainError("PairConfigFunction: undefined on the given pair");
    return it->second;
  }

  std::size_t site_count() const { return site_count_; }

 private:
  std::size_t site_count_ = 0;
  std::map<std::pair<SiteMask, SiteMask>, Value> values_;
};

/// Values of j on the sites; each in [0, 1].
template <class Value>
class JField {
 public:
  explicit JField(std::vector<Value> values) : values_(std::move(values)) {
    for (const auto& v : values_)
      if (v < Value(0) || v > Value(1)) throw DomainError("JField: values must lie in [0, 1]");
  }
  static JField constant(std::size_t n, const Value& v) { return JField(std::vector<Value>(n, v)); }

  std::size_t size() const { return values_.size(); }

  /// e(j; gamma): 1 on the empty configuration, product of j over gamma otherwise.
  Value e(SiteMask gamma) const {
    Value p(1);
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (gamma >> i & 1u) p *= values_[i];
    return p;
  }

 private:
  std::vector<Value> values_;
};

/// Lebesgue-Poisson integral of F with activity z. On a discrete space the
/// 1/n! and the n-fold integral collapse into one term per subset.
template <class Value>
Value lp_integral(const ConfigFunction<Value>& F, const SiteSpace<Value>& space,
                  const Value& z = Value(1)) {
  if (F.site_count() != space.size()) throw DomainError("lp_integral: function and space disagree on site count");
  Value total(0);
  for_each_subset(space.full(), [&](SiteMask g) { total += space.measure(g, z) * F.at(g); });
  return total;
}

/// (psi1 * psi2)(gamma) = sum over xi subset of gamma of psi1(xi) psi2(gamma \ xi),
/// defined up to the smaller of the two domains.
template <class Value>
ConfigFunction<Value> star_convolution(const ConfigFunction<Value>& psi1, const ConfigFunction<Value>& psi2) {
  if (psi1.site_count() != psi2.site_count())
    throw DomainError("star_convolution: operands live on different site spaces");
  const std::size_t n = psi1.site_count();
  const std::size_t max_size = std::min(psi1.max_size(), psi2.max_size());
  ConfigFunction<Value> out(n, max_size);
  const SiteMask full = (SiteMask{1} << n) - 1;
  for_each_subset(full, [&](SiteMask g) {
    if (static_cast<std::size_t>(cardinality(g)) > max_size) return;
    Value acc(0);
    for_each_subset(g, [&](SiteMask xi) { acc += psi1.at(xi) * psi2.at(g & ~xi); });
    out.set(g, std::move(acc));
  });
  return out;
}

/// F_psi(j) = sum over gamma of sigma(gamma) e(j; gamma) psi(gamma).
template <class Value>
Value generating_functional(const ConfigFunction<Value>& psi, const JField<Value>& j,
                            const SiteSpace<Value>& space) {
  if (j.size() != space.size() || psi.site_count() != space.size())
    throw DomainError("generating_functional: j, psi and space must share the site set");
  Value total(0);
  for_each_subset(space.full(), [&](SiteMask g) { total += space.measure(g) * j.e(g) * psi.at(g); });
  return total;
}

/// Product of two generating functionals with coincident sites removed:
///   sum over disjoint (xi, eta) of sigma(xi) sigma(eta) e(j; xi) e(j; eta) psi1(xi) psi2(eta).
/// On a space without atoms the excluded pairs form a null set and this is
/// the plain product; on weighted sites the plain product also counts pairs
/// sharing a site.
template <class Value>
Value generating_product(const ConfigFunction<Value>& psi1, const ConfigFunction<Value>& psi2, const JField<Value>& j,
                         const SiteSpace<Value>& space) {
  if (j.size() != space.size() || psi1.site_count() != space.size() || psi2.site_count() != space.size())
    throw DomainError("generating_product: j, psi and space must share the site set");
  Value total(0);
  for_each_subset(space.full(), [&](SiteMask xi) {
    const Value left = space.measure(xi) * j.e(xi) * psi1.at(xi);
    for_each_subset(space.full() & ~xi, [&](SiteMask eta) { total += left * space.measure(eta) * j.e(eta) * psi2.at(eta); });
  });
  return total;
}

/// Left side of the splitting identity:
///   sum_gamma sigma(gamma) G(gamma) sum_{xi subset gamma} H(xi, gamma \ xi).
template <class Value>
Value lp_split_sum(const ConfigFunction<Value>& G, const PairConfigFunction<Value>& H,
                   const SiteSpace<Value>& space, const Value& z = Value(1)) {
  Value total(0);
  for_each_subset(space.full(), [&](SiteMask g) {
    Value inner(0);
    for_each_subset(g, [&](SiteMask xi) { inner += H.at(xi, g & ~xi); });
    total += space.measure(g, z) * G.at(g) * inner;
  });
  return total;
}

/// Right side: double Lebesgue-Poisson sum over disjoint (xi, gamma) of
/// G(xi u gamma) H(xi, gamma).
template <class Value>
Value lp_double_integral(const ConfigFunction<Value>& G, const PairConfigFunction<Value>& H,
                         const SiteSpace<Value>& space, const Value& z = Value(1)) {
  Value total(0);
  for_each_subset(space.full(), [&](SiteMask xi) {
    for_each_subset(space.full() & ~xi, [&](SiteMask g) {
      total += space.measure(xi, z) * space.measure(g, z) * G.at(xi | g) * H.at(xi, g);
    });
  });
  return total;
}

}  // namespace virial::algebra
