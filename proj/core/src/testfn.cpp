#include "hadamard/testfn.hpp"

#include <cmath>
#include <string>

#include "hadamard/errors.hpp"

namespace hadamard {

TestFunction::TestFunction(Event c, Event w, double amp)
    : center(c), half_widths(w), amplitude(amp) {
  if (c.dim() != w.dim()) {
    throw std::invalid_argument("TestFunction: center/width dimension mismatch");
  }
  for (int i = 0; i < w.dim(); ++i) {
    if (!(w[i] > 0.0)) {
      throw std::invalid_argument("TestFunction: half-widths must be positive");
    }
  }
}

Box TestFunction::support() const {
  return Box(center - half_widths, center + half_widths);
}

double TestFunction::operator()(const Event& y) const {
  double v = amplitude;
  for (int i = 0; i < dim(); ++i) {
    double u = (y[i] - center[i]) / half_widths[i];
    if (u <= -1.0 || u >= 1.0) return 0.0;
    v *= std::exp(-1.0 / (1.0 - u * u));
  }
  return v;
}

void bump_profile_derivatives(double u, int order, double* out) {
  for (int n = 0; n <= order; ++n) out[n] = 0.0;
  if (u <= -1.0 || u >= 1.0) return;
  double h0 = std::exp(-1.0 / (1.0 - u * u));
  if (h0 == 0.0) return;
  // Taylor coefficients of g = -1/(1-u^2) = -(1/(1-u) + 1/(1+u))/2 about u,
  // then h = exp(g) by the recurrence k h_k = sum_j j g_j h_{k-j}.
  double g[kMaxTestDerivative + 1];
  double h[kMaxTestDerivative + 1];
  double a = 1.0 / (1.0 - u), b = -1.0 / (1.0 + u);
  double pa = a, pb = -b;  // (1-u)^{-(n+1)}, (-1)^n (1+u)^{-(n+1)}
  for (int n = 0; n <= order; ++n) {
    g[n] = -0.5 * (pa + pb);
    pa *= a;
    pb *= b;
  }
  h[0] = h0;
  double fact = 1.0;
  out[0] = h0;
  for (int k = 1; k <= order; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * g[j] * h[k - j];
    h[k] = s / k;
    fact *= k;
    out[k] = fact * h[k];
  }
}

namespace {

void check_order(int order) {
  if (order > kMaxTestDerivative) {
    throw UnsupportedOrderError("test-function derivative order " +
                                std::to_string(order) + " exceeds 16");
  }
}

// Per-axis derivative tables d^n/dy_i^n of the profile, n <= order.
bool axis_tables(const TestFunction& phi, const Event& y, int order,
                 double (*tab)[kMaxTestDerivative + 1]) {
  for (int i = 0; i < phi.dim(); ++i) {
    double u = (y[i] - phi.center[i]) / phi.half_widths[i];
    if (u <= -1.0 || u >= 1.0) return false;
    bump_profile_derivatives(u, order, tab[i]);
    double inv = 1.0 / phi.half_widths[i], sc = 1.0;
    for (int n = 0; n <= order; ++n) {
      tab[i][n] *= sc;
      sc *= inv;
    }
  }
  return true;
}

}  // namespace

double eval_derivative(const TestFunction& phi, const std::vector<int>& alpha,
                       const Event& y) {
  if (static_cast<int>(alpha.size()) != phi.dim()) {
    throw std::invalid_argument("eval_derivative: multi-index length mismatch");
  }
  int total = 0;
  for (int a : alpha) {
    if (a < 0) throw std::invalid_argument("eval_derivative: negative index");
    total += a;
  }
  check_order(total);
  double v = phi.amplitude;
  for (int i = 0; i < phi.dim(); ++i) {
    double u = (y[i] - phi.center[i]) / phi.half_widths[i];
    if (u <= -1.0 || u >= 1.0) return 0.0;
    double tab[kMaxTestDerivative + 1];
    bump_profile_derivatives(u, alpha[static_cast<std::size_t>(i)], tab);
    v *= tab[alpha[static_cast<std::size_t>(i)]] /
         std::pow(phi.half_widths[i], alpha[static_cast<std::size_t>(i)]);
  }
  return v;
}

std::function<double(const Event&)> apply_box_power(
    const TestFunction& phi, int k, const SpacetimeModel& model) {
  if (k < 0) throw std::invalid_argument("apply_box_power: negative power");
  check_order(2 * k);
  if (model.dimension() != phi.dim()) {
    throw std::invalid_argument("apply_box_power: dimension mismatch");
  }
  auto set = MultiIndexSet::get(phi.dim(), 2 * k);
  return [phi, k, set](const Event& y) {
    double tab[kMaxDim][kMaxTestDerivative + 1];
    if (!axis_tables(phi, y, 2 * k, tab)) return 0.0;
    double acc = 0.0;
    for (const auto& term : set->box_power(k)) {
      const MultiIndex& a = set->alpha(term.index);
      double p = term.coefficient;
      for (int i = 0; i < phi.dim(); ++i) p *= tab[i][a[i]];
      acc += p;
    }
    return phi.amplitude * acc;
  };
}

BumpField::BumpField(TestFunction phi) : phi_(std::move(phi)) {}

void BumpField::jet(const Event& y, const MultiIndexSet& set, int order,
                    cplx* out) const {
  check_order(order);
  int n = set.count_up_to(order);
  double tab[kMaxDim][kMaxTestDerivative + 1];
  if (!axis_tables(phi_, y, order, tab)) {
    std::fill(out, out + n, cplx{});
    return;
  }
  for (int i = 0; i < n; ++i) {
    const MultiIndex& a = set.alpha(i);
    double p = phi_.amplitude;
    for (int j = 0; j < phi_.dim(); ++j) p *= tab[j][a[j]];
    out[i] = p;
  }
}

std::shared_ptr<BumpField> make_bump_field(const TestFunction& phi) {
  return std::make_shared<BumpField>(phi);
}

}  // namespace hadamard
