#include "hadamard/hadamard.hpp"

#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "hadamard/errors.hpp"
#include "hadamard/quadrature.hpp"
#include "hadamard/testfn.hpp"

namespace hadamard {

cplx TwoPointField::value(const Event& y, const Event& x) const {
  auto set = MultiIndexSet::get(dim(), 0);
  cplx v;
  jet(y, x, *set, 0, &v);
  return v;
}

void ConstantKernel::jet(const Event&, const Event&, const MultiIndexSet& set,
                         int order, cplx* out) const {
  int n = set.count_up_to(order);
  std::fill(out, out + n, cplx{});
  out[0] = c_;
}

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

// Chebyshev-Lobatto nodes on [0, 1] and the integration matrices
//   M_p[i][m] = int_0^1 sigma^p l_m(s_i sigma) d sigma
// for the Lagrange basis l_m through those nodes.
struct RayMatrices {
  int n = 0;
  int pmax = -1;
  std::vector<double> s;
  std::vector<double> bary;
  std::vector<std::vector<double>> M;  // per p, row-major n x n
};

void lagrange_row(const std::vector<double>& s, const std::vector<double>& w,
                  double x, double* out) {
  const std::size_t n = s.size();
  for (std::size_t m = 0; m < n; ++m) {
    if (x == s[m]) {
      for (std::size_t j = 0; j < n; ++j) out[j] = j == m ? 1.0 : 0.0;
      return;
    }
  }
  double den = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    out[m] = w[m] / (x - s[m]);
    den += out[m];
  }
  for (std::size_t m = 0; m < n; ++m) out[m] /= den;
}

std::shared_ptr<const RayMatrices> ray_matrices(int n, int pmax) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const RayMatrices>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (slot && slot->pmax >= pmax) return slot;
  auto rm = std::make_shared<RayMatrices>();
  rm->n = n;
  rm->pmax = std::max(pmax, slot ? slot->pmax : 0);
  rm->s.resize(static_cast<std::size_t>(n));
  rm->bary.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rm->s[static_cast<std::size_t>(i)] =
        n == 1 ? 1.0 : 0.5 * (1.0 - std::cos(kPi * i / (n - 1)));
    double w = (i % 2) ? -1.0 : 1.0;
    if (i == 0 || i == n - 1) w *= 0.5;
    rm->bary[static_cast<std::size_t>(i)] = w;
  }
  rm->s.front() = 0.0;
  rm->s.back() = 1.0;
  int P = rm->pmax;
  const GaussRule& g = gauss_legendre_unit((n + P) / 2 + 2);
  rm->M.assign(static_cast<std::size_t>(P) + 1,
               std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
  std::vector<double> row(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double si = rm->s[static_cast<std::size_t>(i)];
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      double sig = g.nodes[q];
      lagrange_row(rm->s, rm->bary, si * sig, row.data());
      double wp = g.weights[q];
      for (int p = 0; p <= P; ++p) {
        double* Mi = rm->M[static_cast<std::size_t>(p)].data() +
                     static_cast<std::size_t>(i) * n;
        for (int m = 0; m < n; ++m) Mi[m] += wp * row[static_cast<std::size_t>(m)];
        wp *= sig;
      }
    }
  }
  slot = rm;
  return slot;
}

}  // namespace

void RayTable::interpolate(int k, double s, int count, cplx* out) const {
  const int n = nodes();
  const auto& J = jets_[static_cast<std::size_t>(k)];
  if (n == 1) {
    std::copy(J.begin(), J.begin() + count, out);
    return;
  }
  s = std::clamp(s, 0.0, 1.0);
  std::vector<double> row(static_cast<std::size_t>(n));
  lagrange_row(s_, bary_, s, row.data());
  std::fill(out, out + count, cplx{});
  for (int m = 0; m < n; ++m) {
    double w = row[static_cast<std::size_t>(m)];
    if (w == 0.0) continue;
    const cplx* src = J.data() + static_cast<std::size_t>(m) * stride_;
    for (int a = 0; a < count; ++a) out[a] += w * src[a];
  }
}

void RayTable::jet(int k, double s, int ord, cplx* out) const {
  if (ord > order(k)) {
    throw UnsupportedOrderError("RayTable::jet: order beyond the tabulated jets");
  }
  interpolate(k, s, set_->count_up_to(ord), out);
}

cplx RayTable::value(int k, double s) const {
  cplx v;
  interpolate(k, s, 1, &v);
  return v;
}

HadamardFamily::HadamardFamily(OperatorSpec op, int K, FamilyOptions opts)
    : op_(std::move(op)), K_(K), opts_(opts), base_op_(op_) {
  if (K < 0) throw std::invalid_argument("HadamardFamily: K must be >= 0");
  if (!op_.model->is_flat()) {
    throw RegimeError("transport solver ships for the flat backend only");
  }
  comb_.assign(static_cast<std::size_t>(K) + 1,
               std::vector<cplx>(static_cast<std::size_t>(K) + 1, 0.0));
  for (int k = 0; k <= K; ++k) comb_[k][k] = 1.0;
  closed_ = op_.closed_form() && !opts.force_numeric;
  if (closed_) {
    cplx c = op_.z - op_.potential.constant_part();
    cplx p = 1.0;
    for (int k = 0; k <= K; ++k) {
      closed_values_.push_back(p);
      p *= c;
    }
    n_ = 1;
    return;
  }
  if (opts.nodes > 0) {
    n_ = opts.nodes;
  } else {
    calibrate();
  }
}

void HadamardFamily::base_ray(const Event& x, const Event& v, int K, int extra,
                              RayTable* t) const {
  const int d = op_.dim();
  t->K_ = K;
  t->extra_ = extra;
  t->x_ = x;
  t->v_ = v;
  t->set_ = MultiIndexSet::get(d, extra + 2 * K);
  t->stride_ = t->set_->size();
  const MultiIndexSet& set = *t->set_;
  if (closed_ || K == 0) {
    // Constant coefficients: one node suffices.
    t->s_ = {1.0};
    t->bary_ = {1.0};
    t->jets_.assign(static_cast<std::size_t>(K) + 1,
                    std::vector<cplx>(static_cast<std::size_t>(t->stride_), 0.0));
    for (int k = 0; k <= K; ++k) {
      t->jets_[k][0] = closed_ ? closed_values_[k] : cplx(1.0);
    }
    return;
  }
  const int n = n_;
  auto rm = ray_matrices(n, 2 * K + extra + 2 * K);
  t->s_ = rm->s;
  t->bary_ = rm->bary;
  t->jets_.assign(static_cast<std::size_t>(K) + 1,
                  std::vector<cplx>(static_cast<std::size_t>(n) * t->stride_, 0.0));
  for (int i = 0; i < n; ++i) t->jets_[0][static_cast<std::size_t>(i) * t->stride_] = 1.0;

  const int border = t->order(1);
  const int bcount = set.count_up_to(border);
  std::vector<double> bj(static_cast<std::size_t>(n) * bcount);
  for (int i = 0; i < n; ++i) {
    Event p = x + rm->s[static_cast<std::size_t>(i)] * v;
    base_op_.potential.jet(p, set, border, bj.data() + static_cast<std::size_t>(i) * bcount);
  }
  std::vector<cplx> F;
  std::vector<cplx> Fi(static_cast<std::size_t>(t->stride_));
  for (int k = 1; k <= K; ++k) {
    const int ord = t->order(k);
    const int cnt = set.count_up_to(ord);
    F.assign(static_cast<std::size_t>(cnt) * n, cplx{});
    const auto& prev = t->jets_[static_cast<std::size_t>(k) - 1];
    for (int i = 0; i < n; ++i) {
      apply_operator_to_jet(set, ord, bj.data() + static_cast<std::size_t>(i) * bcount,
                            base_op_.z, prev.data() + static_cast<std::size_t>(i) * t->stride_,
                            Fi.data());
      for (int a = 0; a < cnt; ++a) F[static_cast<std::size_t>(a) * n + i] = Fi[static_cast<std::size_t>(a)];
    }
    auto& cur = t->jets_[static_cast<std::size_t>(k)];
    for (int a = 0; a < cnt; ++a) {
      int p = k - 1 + set.degree(a);
      const double* M = rm->M[static_cast<std::size_t>(p)].data();
      const cplx* Fa = F.data() + static_cast<std::size_t>(a) * n;
      for (int i = 0; i < n; ++i) {
        const double* Mi = M + static_cast<std::size_t>(i) * n;
        cplx acc = 0.0;
        for (int m = 0; m < n; ++m) acc += Mi[m] * Fa[m];
        cur[static_cast<std::size_t>(i) * t->stride_ + a] = -static_cast<double>(k) * acc;
      }
    }
  }
}

RayTable HadamardFamily::ray(const Event& x, const Event& v, int K,
                             int extra) const {
  if (K > K_) throw std::invalid_argument("HadamardFamily::ray: K beyond family");
  RayTable t;
  base_ray(x, v, K, extra, &t);
  bool identity = true;
  for (int k = 0; k <= K && identity; ++k) {
    for (int j = 0; j <= k; ++j) {
      if (comb_[k][j] != (j == k ? cplx(1.0) : cplx(0.0))) identity = false;
    }
  }
  if (identity) return t;
  // Level k needs fewer orders than the lower levels it combines.
  std::vector<std::vector<cplx>> out(t.jets_.size());
  const int n = t.nodes();
  for (int k = 0; k <= K; ++k) {
    const int cnt = t.set_->count_up_to(t.order(k));
    out[k].assign(t.jets_[k].size(), cplx{});
    for (int j = 0; j <= k; ++j) {
      cplx c = comb_[k][j];
      if (c == cplx(0.0)) continue;
      for (int i = 0; i < n; ++i) {
        const cplx* src = t.jets_[j].data() + static_cast<std::size_t>(i) * t.stride_;
        cplx* dst = out[k].data() + static_cast<std::size_t>(i) * t.stride_;
        for (int a = 0; a < cnt; ++a) dst[a] += c * src[a];
      }
    }
  }
  t.jets_.swap(out);
  return t;
}

void HadamardFamily::calibrate() {
  const int d = op_.dim();
  const Box& box = op_.model->domain();
  std::vector<std::pair<Event, Event>> diagonals;
  for (int mask = 0; mask < (1 << (d - 1)); ++mask) {
    Event a = box.lo, b = box.hi;
    for (int i = 1; i < d; ++i) {
      if (mask & (1 << (i - 1))) std::swap(a[i], b[i]);
    }
    diagonals.emplace_back(a, b - a);
  }
  if (K_ == 0) {
    n_ = 2;
    return;
  }
  const int extra = 2;
  std::vector<RayTable> prev;
  for (int n = 16; n <= opts_.max_nodes; n *= 2) {
    n_ = n;
    std::vector<RayTable> cur;
    for (const auto& [x, v] : diagonals) cur.push_back(ray(x, v, K_, extra));
    if (!prev.empty()) {
      double worst = 0.0;
      for (std::size_t r = 0; r < cur.size(); ++r) {
        for (int k = 0; k <= K_; ++k) {
          int cnt = cur[r].set()->count_up_to(cur[r].order(k));
          std::vector<cplx> a(static_cast<std::size_t>(cnt)), b(static_cast<std::size_t>(cnt));
          for (double s : {0.37, 1.0}) {
            cur[r].jet(k, s, cur[r].order(k), a.data());
            prev[r].jet(k, s, prev[r].order(k), b.data());
            double scale = 1.0;
            for (int i = 0; i < cnt; ++i) scale = std::max(scale, std::abs(a[static_cast<std::size_t>(i)]));
            for (int i = 0; i < cnt; ++i) {
              worst = std::max(worst, std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) / scale);
            }
          }
        }
      }
      if (worst <= opts_.calibration_tol) return;
    }
    prev = std::move(cur);
  }
  n_ = opts_.max_nodes;
}

cplx HadamardFamily::value(int k, const Event& y, const Event& x) const {
  if (k < 0 || k > K_) throw std::invalid_argument("HadamardFamily: index out of range");
  op_.model->require_inside(y);
  op_.model->require_inside(x);
  if (closed_) return closed_values_[static_cast<std::size_t>(k)];
  RayTable t = ray(x, y - x, k, 0);
  return t.at(k, t.nodes() - 1, 0);
}

std::vector<cplx> HadamardFamily::values(const Event& y, const Event& x,
                                         int K) const {
  op_.model->require_inside(y);
  op_.model->require_inside(x);
  std::vector<cplx> out;
  if (closed_) {
    out.assign(closed_values_.begin(), closed_values_.begin() + K + 1);
    return out;
  }
  RayTable t = ray(x, y - x, K, 0);
  for (int k = 0; k <= K; ++k) out.push_back(t.at(k, t.nodes() - 1, 0));
  return out;
}

namespace {

class FamilyCoefficient final : public TwoPointField {
 public:
  FamilyCoefficient(std::shared_ptr<const HadamardFamily> f, int k)
      : f_(std::move(f)), k_(k) {}
  int dim() const override { return f_->op().dim(); }
  int max_order() const override { return kMaxTestDerivative; }
  void jet(const Event& y, const Event& x, const MultiIndexSet& set, int order,
           cplx* out) const override {
    RayTable t = f_->ray(x, y - x, k_, order);
    std::vector<cplx> buf(static_cast<std::size_t>(t.set()->count_up_to(order)));
    t.jet(k_, 1.0, order, buf.data());
    std::copy(buf.begin(), buf.begin() + set.count_up_to(order), out);
  }
  cplx value(const Event& y, const Event& x) const override {
    return f_->value(k_, y, x);
  }

 private:
  std::shared_ptr<const HadamardFamily> f_;
  int k_;
};

class TableSampler final : public RaySampler {
 public:
  TableSampler(RayTable t, int k, int order) : t_(std::move(t)), k_(k), order_(order) {}
  void jet(double s, cplx* out) override { t_.jet(k_, s, order_, out); }

 private:
  RayTable t_;
  int k_, order_;
};

class CoefficientField final : public JetField {
 public:
  CoefficientField(std::shared_ptr<const HadamardFamily> f, int k, Event x)
      : f_(std::move(f)), k_(k), x_(x) {}
  int dim() const override { return f_->op().dim(); }
  int max_order() const override { return kMaxTestDerivative; }
  void jet(const Event& y, const MultiIndexSet& set, int order,
           cplx* out) const override {
    RayTable t = f_->ray(x_, y - x_, k_, order);
    std::vector<cplx> buf(static_cast<std::size_t>(t.set()->count_up_to(order)));
    t.jet(k_, 1.0, order, buf.data());
    std::copy(buf.begin(), buf.begin() + set.count_up_to(order), out);
  }
  cplx value(const Event& y) const override { return f_->value(k_, y, x_); }
  std::unique_ptr<RaySampler> along_ray(const Event& from, const Event& to,
                                        int order) const override {
    bool from_base = true;
    for (int i = 0; i < dim(); ++i) from_base = from_base && from[i] == x_[i];
    if (!from_base) return JetField::along_ray(from, to, order);
    return std::make_unique<TableSampler>(f_->ray(x_, to - x_, k_, order), k_, order);
  }

 private:
  std::shared_ptr<const HadamardFamily> f_;
  int k_;
  Event x_;
};

}  // namespace

Evaluator HadamardFamily::coefficient(int k) const {
  if (k < 0 || k > K_) throw std::invalid_argument("HadamardFamily: index out of range");
  return std::make_shared<FamilyCoefficient>(std::make_shared<HadamardFamily>(*this), k);
}

JetFieldPtr HadamardFamily::coefficient_field(int k, const Event& x) const {
  if (k < 0 || k > K_) throw std::invalid_argument("HadamardFamily: index out of range");
  return std::make_shared<CoefficientField>(std::make_shared<HadamardFamily>(*this), k, x);
}

cplx HadamardFamily::apply_P(int k, const Event& y, const Event& x) const {
  if (closed_) {
    return (op_.potential.value(y) - op_.z) * closed_values_[static_cast<std::size_t>(k)];
  }
  return hadamard::apply_P(
      op_, [&](const Event& yy, const Event& xx) { return value(k, yy, xx); }, y, x);
}

HadamardFamily HadamardFamily::shifted(cplx dz) const {
  if (closed_) {
    return HadamardFamily(op_.shifted(dz), K_, opts_);
  }
  HadamardFamily f = *this;
  f.op_ = op_.shifted(dz);
  // S[k][j] = binom(k, j) dz^(k-j)
  std::vector<std::vector<cplx>> S(comb_.size(), std::vector<cplx>(comb_.size(), 0.0));
  for (int k = 0; k <= K_; ++k) {
    for (int j = 0; j <= k; ++j) S[k][j] = binomial(k, j) * std::pow(dz, k - j);
  }
  for (int k = 0; k <= K_; ++k) {
    for (int j = 0; j <= k; ++j) {
      cplx acc = 0.0;
      for (int l = j; l <= k; ++l) acc += S[k][l] * comb_[l][j];
      f.comb_[k][j] = acc;
    }
  }
  return f;
}

HadamardFamily hadamard_family(const OperatorSpec& op, int K, FamilyOptions opts) {
  return HadamardFamily(op, K, opts);
}

HadamardFamily shift_coefficients(const HadamardFamily& family, cplx z) {
  return family.shifted(z);
}

std::vector<cplx> heat_shift(const std::vector<cplx>& a, cplx z, int K) {
  std::vector<cplx> out(static_cast<std::size_t>(K) + 1, 0.0);
  for (int k = 0; k <= K; ++k) {
    cplx zm = 1.0;
    double fact = 1.0;
    for (int m = 0; m <= k; ++m) {
      if (m > 0) {
        zm *= z;
        fact *= m;
      }
      std::size_t idx = static_cast<std::size_t>(k - m);
      if (idx < a.size()) out[static_cast<std::size_t>(k)] += zm / fact * a[idx];
    }
  }
  return out;
}

double fd_step(const SpacetimeModel& model) {
  return 1e-3 * model.domain().max_side();
}

cplx apply_P(const OperatorSpec& op,
             const std::function<cplx(const Event&, const Event&)>& V,
             const Event& y, const Event& x) {
  const SpacetimeModel& m = *op.model;
  const int d = m.dimension();
  const double h = fd_step(m);
  m.require_inside(y);
  m.require_inside(x);
  cplx f0 = V(y, x);
  cplx box = 0.0;
  for (int mu = 0; mu < d; ++mu) {
    cplx f[4];
    const double off[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int j = 0; j < 4; ++j) {
      Event p = y;
      p[mu] += off[j] * h;
      m.require_inside(p);
      f[j] = V(p, x);
    }
    cplx d2 = (-f[0] + 16.0 * f[1] - 30.0 * f0 + 16.0 * f[2] - f[3]) / (12.0 * h * h);
    box += mu == 0 ? d2 : -d2;
  }
  return box + (op.potential.value(y) - op.z) * f0;
}

cplx apply_P(const OperatorSpec& op, const Evaluator& V, const Event& y,
             const Event& x) {
  return apply_P(
      op, [&](const Event& yy, const Event& xx) { return V->value(yy, xx); }, y, x);
}

namespace {

class TransportStep final : public TwoPointField {
 public:
  TransportStep(OperatorSpec op, int k, Evaluator prev)
      : op_(std::move(op)), k_(k), prev_(std::move(prev)) {}
  int dim() const override { return op_.dim(); }
  int max_order() const override { return prev_->max_order() - 2; }

  void jet(const Event& y, const Event& x, const MultiIndexSet& set, int order,
           cplx* out) const override {
    const int d = dim();
    auto big = MultiIndexSet::get(d, order + 2);
    const int cnt = big->count_up_to(order);
    std::vector<cplx> pj(static_cast<std::size_t>(big->size()));
    std::vector<double> bj(static_cast<std::size_t>(cnt));
    std::vector<cplx> F(static_cast<std::size_t>(cnt));
    const Event v = y - x;
    const GaussRule& g = gauss_legendre_unit(16);
    auto panel_sum = [&](int panels, std::vector<cplx>& acc) {
      acc.assign(static_cast<std::size_t>(cnt), cplx{});
      for (int p = 0; p < panels; ++p) {
        double a = static_cast<double>(p) / panels;
        double w = 1.0 / panels;
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
          double s = a + w * g.nodes[q];
          Event pt = x + s * v;
          prev_->jet(pt, x, *big, order + 2, pj.data());
          op_.potential.jet(pt, *big, order, bj.data());
          apply_operator_to_jet(*big, order, bj.data(), op_.z, pj.data(), F.data());
          for (int i = 0; i < cnt; ++i) {
            acc[static_cast<std::size_t>(i)] +=
                w * g.weights[q] * std::pow(s, k_ - 1 + big->degree(i)) * F[static_cast<std::size_t>(i)];
          }
        }
      }
    };
    std::vector<cplx> coarse, fine;
    int panels = 4;
    panel_sum(panels, coarse);
    while (true) {
      panels *= 2;
      panel_sum(panels, fine);
      double diff = 0.0, scale = 1.0;
      for (int i = 0; i < cnt; ++i) {
        diff = std::max(diff, std::abs(fine[static_cast<std::size_t>(i)] - coarse[static_cast<std::size_t>(i)]));
        scale = std::max(scale, std::abs(fine[static_cast<std::size_t>(i)]));
      }
      if (diff <= 1e-10 * scale) break;
      if (panels >= 256) {
        throw ConvergenceError("transport line integral did not stabilise",
                               -static_cast<double>(k_) * fine[0], diff);
      }
      coarse.swap(fine);
    }
    const int want = set.count_up_to(order);
    for (int i = 0; i < want; ++i) out[i] = -static_cast<double>(k_) * fine[static_cast<std::size_t>(i)];
  }

 private:
  OperatorSpec op_;
  int k_;
  Evaluator prev_;
};

}  // namespace

Evaluator solve_transport(const OperatorSpec& op, int k, Evaluator prev) {
  if (k < 0) throw std::invalid_argument("solve_transport: k must be >= 0");
  if (!op.model->is_flat()) {
    throw RegimeError("transport solver ships for the flat backend only");
  }
  if (k == 0) return std::make_shared<ConstantKernel>(op.dim(), 1.0);
  if (!prev) throw std::invalid_argument("solve_transport: missing V^(k-1)");
  return std::make_shared<TransportStep>(op, k, std::move(prev));
}

DiagonalReport diagonal_check(const OperatorSpec& op,
                              const HadamardFamily& family, int K, int samples,
                              unsigned seed) {
  if (family.max_index() < K + 1) {
    throw std::invalid_argument("diagonal_check: family must reach K + 1");
  }
  DiagonalReport rep;
  rep.residual.assign(static_cast<std::size_t>(K) + 1, 0.0);
  std::mt19937 rng(seed);
  const Box& box = op.model->domain();
  for (int s = 0; s < samples; ++s) {
    Event x(op.dim());
    for (int i = 0; i < op.dim(); ++i) {
      std::uniform_real_distribution<double> u(box.lo[i] + 0.1 * box.side(i),
                                               box.hi[i] - 0.1 * box.side(i));
      x[i] = u(rng);
    }
    rep.points.push_back(x);
    for (int k = 0; k <= K; ++k) {
      cplx r = family.apply_P(k, x, x) + family.value(k + 1, x, x);
      rep.residual[static_cast<std::size_t>(k)] =
          std::max(rep.residual[static_cast<std::size_t>(k)], std::abs(r));
    }
  }
  for (double r : rep.residual) rep.max_residual = std::max(rep.max_residual, r);
  return rep;
}

}  // namespace hadamard
