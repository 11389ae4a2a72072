#include "hadamard/multi_index.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace hadamard {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

namespace {

// All compositions of `deg` into `dim` nonnegative parts, lexicographically
// descending in the first coordinate.
void compositions(int dim, int deg, int pos, MultiIndex& cur,
                  std::vector<MultiIndex>& out) {
  if (pos == dim - 1) {
    cur[pos] = deg;
    out.push_back(cur);
    cur[pos] = 0;
    return;
  }
  for (int a = deg; a >= 0; --a) {
    cur[pos] = a;
    compositions(dim, deg - a, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

MultiIndexSet::MultiIndexSet(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || dim > kMaxDim || order < 0) {
    throw std::invalid_argument("MultiIndexSet: bad dimension or order");
  }
  for (int deg = 0; deg <= order; ++deg) {
    MultiIndex cur{};
    compositions(dim, deg, 0, cur, alphas_);
    prefix_.push_back(static_cast<int>(alphas_.size()));
  }
  degrees_.resize(alphas_.size());
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    int s = 0;
    for (int j = 0; j < dim; ++j) s += alphas_[i][j];
    degrees_[i] = s;
    lookup_.emplace(key(alphas_[i], dim), static_cast<int>(i));
  }
  plus2_.assign(alphas_.size() * static_cast<std::size_t>(dim), -1);
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    for (int mu = 0; mu < dim; ++mu) {
      MultiIndex a = alphas_[i];
      a[mu] += 2;
      plus2_[i * dim + mu] = index(a);
    }
  }
  leibniz_.resize(alphas_.size());
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    const MultiIndex& a = alphas_[i];
    // Enumerate beta <= alpha componentwise.
    MultiIndex b{};
    while (true) {
      MultiIndex r{};
      double c = 1.0;
      for (int j = 0; j < dim; ++j) {
        r[j] = a[j] - b[j];
        c *= binomial(a[j], b[j]);
      }
      leibniz_[i].push_back({index(b), index(r), c});
      int j = 0;
      while (j < dim && b[j] == a[j]) {
        b[j] = 0;
        ++j;
      }
      if (j == dim) break;
      ++b[j];
    }
  }
  for (int k = 0; 2 * k <= order; ++k) {
    std::vector<BoxTerm> terms;
    std::vector<MultiIndex> parts;
    MultiIndex cur{};
    compositions(dim, k, 0, cur, parts);
    for (const MultiIndex& p : parts) {
      double c = factorial(k);
      MultiIndex twice{};
      for (int j = 0; j < dim; ++j) {
        c /= factorial(p[j]);
        twice[j] = 2 * p[j];
      }
      if ((k - p[0]) % 2 != 0) c = -c;
      terms.push_back({index(twice), c});
    }
    box_.push_back(std::move(terms));
  }
}

std::uint64_t MultiIndexSet::key(const MultiIndex& a, int dim) {
  std::uint64_t k = 0;
  for (int j = 0; j < dim; ++j) k = k * 64u + static_cast<std::uint64_t>(a[j]);
  return k;
}

int MultiIndexSet::count_up_to(int deg) const {
  if (deg < 0) return 0;
  if (deg > order_) deg = order_;
  return prefix_[deg];
}

int MultiIndexSet::index(const MultiIndex& alpha) const {
  int s = 0;
  for (int j = 0; j < dim_; ++j) {
    if (alpha[j] < 0 || alpha[j] >= 64) return -1;
    s += alpha[j];
  }
  if (s > order_) return -1;
  auto it = lookup_.find(key(alpha, dim_));
  return it == lookup_.end() ? -1 : it->second;
}

const std::vector<MultiIndexSet::LeibnizTerm>& MultiIndexSet::leibniz(
    int i) const {
  return leibniz_[i];
}

const std::vector<MultiIndexSet::BoxTerm>& MultiIndexSet::box_power(
    int k) const {
  if (k < 0 || k >= static_cast<int>(box_.size())) {
    throw std::out_of_range("MultiIndexSet::box_power: order too high");
  }
  return box_[k];
}

std::shared_ptr<const MultiIndexSet> MultiIndexSet::get(int dim, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexSet>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::make_shared<MultiIndexSet>(dim, order);
  return slot;
}

}  // namespace hadamard
