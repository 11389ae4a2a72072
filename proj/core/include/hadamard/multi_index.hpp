#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "hadamard/geometry.hpp"

namespace hadamard {

using MultiIndex = std::array<int, kMaxDim>;

/// All multi-indices of total degree <= order in `dim` variables, in graded
/// order. The ordering is independent of `order`, so the set for a lower
/// order is a prefix of the set for a higher one.
class MultiIndexSet {
 public:
  struct LeibnizTerm {
    int left;   // index of beta
    int right;  // index of alpha - beta
    double coefficient;
  };
  struct BoxTerm {
    int index;
    double coefficient;
  };

  MultiIndexSet(int dim, int order);

  /// Shared, lazily built instance.
  static std::shared_ptr<const MultiIndexSet> get(int dim, int order);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  int size() const noexcept { return static_cast<int>(alphas_.size()); }
  /// Number of indices with degree <= deg.
  int count_up_to(int deg) const;

  const MultiIndex& alpha(int i) const { return alphas_[i]; }
  int degree(int i) const { return degrees_[i]; }
  /// -1 when alpha is not in the set.
  int index(const MultiIndex& alpha) const;
  /// Index of alpha(i) + 2 e_mu, or -1 when beyond the order.
  int plus_two(int i, int mu) const { return plus2_[i * dim_ + mu]; }

  /// d^alpha (f g) = sum over terms of coefficient * d^left f * d^right g.
  const std::vector<LeibnizTerm>& leibniz(int i) const;
  /// box^k = sum of coefficient * d^(index), box = d_t^2 - sum d_i^2.
  const std::vector<BoxTerm>& box_power(int k) const;

 private:
  static std::uint64_t key(const MultiIndex& a, int dim);

  int dim_;
  int order_;
  std::vector<MultiIndex> alphas_;
  std::vector<int> degrees_;
  std::vector<int> prefix_;
  std::vector<int> plus2_;
  std::unordered_map<std::uint64_t, int> lookup_;
  std::vector<std::vector<LeibnizTerm>> leibniz_;
  std::vector<std::vector<BoxTerm>> box_;
};

using MultiIndexSetPtr = std::shared_ptr<const MultiIndexSet>;

double binomial(int n, int k);
double factorial(int n);

}  // namespace hadamard
