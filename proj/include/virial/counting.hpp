#pragma once

// Number of forest-graph terms N(m|n) generated by iterating the kernel
// recurrence before any cancellation:
//
//   N(m|n) = sum_{k=0}^{n} C(n,k) N(m+k-1 | n-k)
//          + sum_{k=1}^{n} C(n,k) N(m | n-k) sum_{l=1}^{k} C(k,l) N(l | k-l)
//
// Base cases (not fixed by the recurrence itself): N(0|0) = 1, N(m|0) = 1,
// N(0|n) = 0 for n >= 1. With the nonlinear sum dropped these reproduce
// N(m|n) = m (m+n)^{n-1}.

#include <map>
#include <string>
#include <utility>

#include "virial/error.hpp"
#include "virial/exact.hpp"

namespace virial::counting {

inline constexpr int kCountCap = 40;

inline Integer binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Integer r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

class CountTable {
 public:
  enum class Mode { full, linear };

  explicit CountTable(Mode mode = Mode::full) : mode_(mode) {}

  static constexpr const char* base_rule() { return "N(0|0)=1; N(m|0)=1 for m>=1; N(0|n)=0 for n>=1"; }
  Mode mode() const { return mode_; }

  const Integer& operator()(int m, int n) {
    if (m < 0 || n < 0) throw DomainError("CountTable: negative argument");
    if (m + n > kCountCap) throw CapExceeded("CountTable: m + n exceeds " + std::to_string(kCountCap));
    if (auto it = table_.find({m, n}); it != table_.end()) return it->second;
    Integer value;
    if (n == 0) {
      value = 1;
    } else if (m == 0) {
      value = 0;
    } else {
      for (int k = 0; k <= n; ++k) value += binomial(n, k) * (*this)(m + k - 1, n - k);
      if (mode_ == Mode::full) {
        for (int k = 1; k <= n; ++k) {
          Integer inner = 0;
          for (int l = 1; l <= k; ++l) inner += binomial(k, l) * (*this)(l, k - l);
          value += binomial(n, k) * (*this)(m, n - k) * inner;
        }
      }
    }
    return table_.emplace(std::pair{m, n}, std::move(value)).first->second;
  }

  const std::map<std::pair<int, int>, Integer>& entries() const { return table_; }

 private:
  Mode mode_;
  std::map<std::pair<int, int>, Integer> table_;
};

/// Full recurrence including the nonlinear term.
inline Integer count_full(int m, int n) {
  CountTable t(CountTable::Mode::full);
  return t(m, n);
}

struct LinearCount {
  Integer closed_form;   // m (m+n)^{n-1}
  Integer recurrence;    // recurrence without the nonlinear term
  bool agree() const { return closed_form == recurrence; }
};

inline Integer linear_closed_form(int m, int n) {
  if (m < 1 || n < 0) throw DomainError("count_linear: requires m >= 1, n >= 0");
  if (n == 0) return 1;
  return Integer(m) * boost::multiprecision::pow(Integer(m + n), static_cast<unsigned>(n - 1));
}

inline LinearCount count_linear(int m, int n) {
  CountTable t(CountTable::Mode::linear);
  return {linear_closed_form(m, n), t(m, n)};
}

}  // namespace virial::counting
