#include "hadamard/jet_field.hpp"

#include <algorithm>
#include <stdexcept>

namespace hadamard {

cplx RaySampler::value(double s) {
  cplx v;
  jet(s, &v);
  return v;
}

cplx JetField::value(const Event& y) const {
  auto set = MultiIndexSet::get(dim(), 0);
  cplx v;
  jet(y, *set, 0, &v);
  return v;
}

namespace {

class PointwiseSampler final : public RaySampler {
 public:
  PointwiseSampler(const JetField& f, const Event& from, const Event& to,
                   int order)
      : f_(f), from_(from), step_(to - from), order_(order),
        set_(MultiIndexSet::get(f.dim(), order)) {}

  void jet(double s, cplx* out) override {
    f_.jet(from_ + s * step_, *set_, order_, out);
  }

 private:
  const JetField& f_;
  Event from_, step_;
  int order_;
  MultiIndexSetPtr set_;
};

}  // namespace

std::unique_ptr<RaySampler> JetField::along_ray(const Event& from,
                                                const Event& to,
                                                int order) const {
  return std::make_unique<PointwiseSampler>(*this, from, to, order);
}

void apply_box_power_to_jet(const MultiIndexSet& set, int k, int order,
                            const cplx* in, cplx* out) {
  const int d = set.dim();
  std::vector<cplx> cur(in, in + set.count_up_to(order + 2 * k));
  std::vector<cplx> next;
  for (int step = 0; step < k; ++step) {
    int ord = order + 2 * (k - step - 1);
    int n = set.count_up_to(ord);
    next.assign(static_cast<std::size_t>(n), cplx{});
    for (int i = 0; i < n; ++i) {
      cplx v = cur[static_cast<std::size_t>(set.plus_two(i, 0))];
      for (int mu = 1; mu < d; ++mu) {
        v -= cur[static_cast<std::size_t>(set.plus_two(i, mu))];
      }
      next[static_cast<std::size_t>(i)] = v;
    }
    cur.swap(next);
  }
  std::copy(cur.begin(), cur.begin() + set.count_up_to(order), out);
}

namespace {

void leibniz_product(const MultiIndexSet& set, int order, const cplx* a,
                     const cplx* b, cplx* out) {
  int n = set.count_up_to(order);
  for (int i = 0; i < n; ++i) {
    cplx acc = 0.0;
    for (const auto& t : set.leibniz(i)) {
      acc += t.coefficient * a[t.left] * b[t.right];
    }
    out[i] = acc;
  }
}

class ProductSampler final : public RaySampler {
 public:
  ProductSampler(std::unique_ptr<RaySampler> f, std::unique_ptr<RaySampler> g,
                 int dim, int order)
      : f_(std::move(f)), g_(std::move(g)), order_(order),
        set_(MultiIndexSet::get(dim, order)),
        a_(static_cast<std::size_t>(set_->size())),
        b_(static_cast<std::size_t>(set_->size())) {}

  void jet(double s, cplx* out) override {
    f_->jet(s, a_.data());
    g_->jet(s, b_.data());
    leibniz_product(*set_, order_, a_.data(), b_.data(), out);
  }

 private:
  std::unique_ptr<RaySampler> f_, g_;
  int order_;
  MultiIndexSetPtr set_;
  std::vector<cplx> a_, b_;
};

class SumSampler final : public RaySampler {
 public:
  SumSampler(std::vector<cplx> c, std::vector<std::unique_ptr<RaySampler>> s,
             int n)
      : c_(std::move(c)), s_(std::move(s)), buf_(static_cast<std::size_t>(n)),
        n_(n) {}

  void jet(double s, cplx* out) override {
    std::fill(out, out + n_, cplx{});
    for (std::size_t i = 0; i < s_.size(); ++i) {
      s_[i]->jet(s, buf_.data());
      for (int j = 0; j < n_; ++j) out[j] += c_[i] * buf_[static_cast<std::size_t>(j)];
    }
  }

 private:
  std::vector<cplx> c_;
  std::vector<std::unique_ptr<RaySampler>> s_;
  std::vector<cplx> buf_;
  int n_;
};

class BoxPowerSampler final : public RaySampler {
 public:
  BoxPowerSampler(std::unique_ptr<RaySampler> inner, int dim, int k, int order)
      : inner_(std::move(inner)), k_(k), order_(order),
        set_(MultiIndexSet::get(dim, order + 2 * k)),
        buf_(static_cast<std::size_t>(set_->size())) {}

  void jet(double s, cplx* out) override {
    inner_->jet(s, buf_.data());
    apply_box_power_to_jet(*set_, k_, order_, buf_.data(), out);
  }

 private:
  std::unique_ptr<RaySampler> inner_;
  int k_, order_;
  MultiIndexSetPtr set_;
  std::vector<cplx> buf_;
};

std::optional<Box> intersect_support(const std::optional<Box>& a,
                                     const std::optional<Box>& b) {
  if (!a) return b;
  if (!b) return a;
  Box out;
  if (intersect(*a, *b, &out)) return out;
  // Disjoint supports: a degenerate box at a's corner.
  return Box(a->lo, a->lo);
}

}  // namespace

ProductField::ProductField(JetFieldPtr f, JetFieldPtr g)
    : f_(std::move(f)), g_(std::move(g)) {
  if (f_->dim() != g_->dim()) {
    throw std::invalid_argument("ProductField: dimension mismatch");
  }
}

int ProductField::max_order() const {
  return std::min(f_->max_order(), g_->max_order());
}

void ProductField::jet(const Event& y, const MultiIndexSet& set, int order,
                       cplx* out) const {
  int n = set.count_up_to(order);
  std::vector<cplx> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
  f_->jet(y, set, order, a.data());
  g_->jet(y, set, order, b.data());
  leibniz_product(set, order, a.data(), b.data(), out);
}

cplx ProductField::value(const Event& y) const {
  return f_->value(y) * g_->value(y);
}

std::optional<Box> ProductField::support() const {
  return intersect_support(f_->support(), g_->support());
}

std::unique_ptr<RaySampler> ProductField::along_ray(const Event& from,
                                                    const Event& to,
                                                    int order) const {
  return std::make_unique<ProductSampler>(f_->along_ray(from, to, order),
                                          g_->along_ray(from, to, order), dim(),
                                          order);
}

SumField::SumField(std::vector<cplx> coeffs, std::vector<JetFieldPtr> fields)
    : coeffs_(std::move(coeffs)), fields_(std::move(fields)) {
  if (fields_.empty() || coeffs_.size() != fields_.size()) {
    throw std::invalid_argument("SumField: need matching nonempty lists");
  }
}

int SumField::max_order() const {
  int m = fields_.front()->max_order();
  for (const auto& f : fields_) m = std::min(m, f->max_order());
  return m;
}

void SumField::jet(const Event& y, const MultiIndexSet& set, int order,
                   cplx* out) const {
  int n = set.count_up_to(order);
  std::fill(out, out + n, cplx{});
  std::vector<cplx> buf(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    fields_[i]->jet(y, set, order, buf.data());
    for (int j = 0; j < n; ++j) out[j] += coeffs_[i] * buf[static_cast<std::size_t>(j)];
  }
}

std::optional<Box> SumField::support() const {
  std::optional<Box> hull;
  for (const auto& f : fields_) {
    auto s = f->support();
    if (!s) return std::nullopt;
    if (!hull) {
      hull = s;
      continue;
    }
    for (int i = 0; i < s->dim(); ++i) {
      hull->lo[i] = std::min(hull->lo[i], s->lo[i]);
      hull->hi[i] = std::max(hull->hi[i], s->hi[i]);
    }
  }
  return hull;
}

std::unique_ptr<RaySampler> SumField::along_ray(const Event& from,
                                                const Event& to,
                                                int order) const {
  std::vector<std::unique_ptr<RaySampler>> s;
  for (const auto& f : fields_) s.push_back(f->along_ray(from, to, order));
  auto set = MultiIndexSet::get(dim(), order);
  return std::make_unique<SumSampler>(coeffs_, std::move(s),
                                      set->count_up_to(order));
}

BoxPowerField::BoxPowerField(JetFieldPtr f, int k) : f_(std::move(f)), k_(k) {
  if (k < 0) throw std::invalid_argument("BoxPowerField: negative power");
}

void BoxPowerField::jet(const Event& y, const MultiIndexSet& set, int order,
                        cplx* out) const {
  auto big = MultiIndexSet::get(dim(), order + 2 * k_);
  std::vector<cplx> buf(static_cast<std::size_t>(big->size()));
  f_->jet(y, *big, order + 2 * k_, buf.data());
  std::vector<cplx> res(static_cast<std::size_t>(big->count_up_to(order)));
  apply_box_power_to_jet(*big, k_, order, buf.data(), res.data());
  // Graded ordering is shared, so the prefix maps onto `set` directly.
  std::copy(res.begin(), res.begin() + set.count_up_to(order), out);
}

std::unique_ptr<RaySampler> BoxPowerField::along_ray(const Event& from,
                                                     const Event& to,
                                                     int order) const {
  return std::make_unique<BoxPowerSampler>(
      f_->along_ray(from, to, order + 2 * k_), dim(), k_, order);
}

}  // namespace hadamard
