#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "hadamard/errors.hpp"
#include "hadamard/geometry.hpp"

namespace hadamard {

struct QuadratureSpec {
  double rel_tol = 1e-9;
  int max_depth = 24;
  /// Split integration ranges at the light cone of the singular surface.
  bool cone_aligned = true;
  /// Absolute floor; useful when the integrand may vanish identically.
  double abs_tol = 0.0;
  /// Hard cap on subintervals per one-dimensional adaptive run.
  int max_intervals = 4000;

  void validate() const;
};

/// Light cone {Gamma(., apex) = 0} across which an integrand is not smooth.
/// `nappe` = +1 or -1 restricts to J_+ or J_- and lets the integrator skip
/// the region where the integrand is known to vanish; 0 keeps both.
struct ConeSurface {
  Event apex;
  int nappe = 0;
};

namespace quad_detail {

inline double norm_of(double v) { return std::abs(v); }
inline double norm_of(const std::complex<double>& v) { return std::abs(v); }
inline double norm_of(const std::vector<std::complex<double>>& v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

template <class E, std::size_t N>
double norm_of(const std::array<E, N>& v) {
  double m = 0.0;
  for (const E& c : v) m = std::max(m, std::abs(c));
  return m;
}

inline void zero_like(double& out, const double&) { out = 0.0; }
template <class E, std::size_t N>
void zero_like(std::array<E, N>& out, const std::array<E, N>&) {
  out.fill(E{});
}
inline void zero_like(std::complex<double>& out, const std::complex<double>&) {
  out = 0.0;
}
inline void zero_like(std::vector<std::complex<double>>& out,
                      const std::vector<std::complex<double>>& like) {
  out.assign(like.size(), {0.0, 0.0});
}

inline void axpy(double& acc, double w, const double& v) { acc += w * v; }
inline void axpy(std::complex<double>& acc, double w,
                 const std::complex<double>& v) {
  acc += w * v;
}
inline void axpy(std::vector<std::complex<double>>& acc, double w,
                 const std::vector<std::complex<double>>& v) {
  if (acc.size() < v.size()) acc.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += w * v[i];
}

template <class E, std::size_t N>
void axpy(std::array<E, N>& acc, double w, const std::array<E, N>& v) {
  for (std::size_t i = 0; i < N; ++i) acc[i] += w * v[i];
}

inline std::complex<double> head(double v) { return v; }
template <class E, std::size_t N>
std::complex<double> head(const std::array<E, N>& v) {
  return v[0];
}
inline std::complex<double> head(const std::complex<double>& v) { return v; }
inline std::complex<double> head(const std::vector<std::complex<double>>& v) {
  return v.empty() ? std::complex<double>{} : v.front();
}

/// Kronrod 21-point nodes (nonnegative half) and weights, with the embedded
/// 10-point Gauss weights at the odd positions.
struct GK21 {
  double x[11];
  double wk[11];
  double wg[5];
  static const GK21& get();
};

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  double l1;
  int depth;
};

template <class T, class F>
Panel<T> gk21(const F& f, double a, double b, int depth) {
  const GK21& r = GK21::get();
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  T fc = f(c);
  T kron, gauss;
  zero_like(kron, fc);
  zero_like(gauss, fc);
  T fv[21];
  fv[0] = fc;
  axpy(kron, r.wk[0], fc);
  double resabs = r.wk[0] * norm_of(fc);
  for (int j = 1; j <= 10; ++j) {
    T lo = f(c - h * r.x[j]);
    T hi = f(c + h * r.x[j]);
    axpy(kron, r.wk[j], lo);
    axpy(kron, r.wk[j], hi);
    resabs += r.wk[j] * (norm_of(lo) + norm_of(hi));
    if (j % 2 == 1) {
      axpy(gauss, r.wg[j / 2], lo);
      axpy(gauss, r.wg[j / 2], hi);
    }
    fv[2 * j - 1] = std::move(lo);
    fv[2 * j] = std::move(hi);
  }
  // Spread of the integrand about its mean, QUADPACK style.
  T mean = kron;
  zero_like(mean, kron);
  axpy(mean, 0.5, kron);
  T d;
  zero_like(d, fc);
  axpy(d, 1.0, fv[0]);
  axpy(d, -1.0, mean);
  double resasc = r.wk[0] * norm_of(d);
  for (int j = 1; j <= 10; ++j) {
    T dl, dh;
    zero_like(dl, fc);
    zero_like(dh, fc);
    axpy(dl, 1.0, fv[2 * j - 1]);
    axpy(dl, -1.0, mean);
    axpy(dh, 1.0, fv[2 * j]);
    axpy(dh, -1.0, mean);
    resasc += r.wk[j] * (norm_of(dl) + norm_of(dh));
  }
  T diff;
  zero_like(diff, fc);
  axpy(diff, 1.0, kron);
  axpy(diff, -1.0, gauss);
  double ah = std::abs(h);
  double err = norm_of(diff) * ah;
  resabs *= ah;
  resasc *= ah;
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  Panel<T> p{a, b, T{}, err, resabs, depth};
  zero_like(p.value, fc);
  axpy(p.value, h, kron);
  return p;
}

}  // namespace quad_detail

template <class T>
struct QuadResult {
  T value;
  double error = 0.0;
  double l1 = 0.0;
  long evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (10/21) integration over [a, b] with
/// optional interior breakpoints. Converged when the summed error estimate is
/// below max(rel_tol * L1, abs_tol). Intervals deeper than max_depth are not
/// split further; if the target is still missed, ConvergenceError is thrown.
template <class T, class F>
QuadResult<T> adaptive_integrate(const F& f, double a, double b,
                                 const QuadratureSpec& spec,
                                 std::vector<double> breakpoints = {}) {
  using quad_detail::Panel;
  QuadResult<T> res;
  if (!(b > a)) {
    // Degenerate or empty range: return a zero of the right shape.
    T probe = f(a);
    quad_detail::zero_like(res.value, probe);
    res.evaluations = 1;
    return res;
  }
  std::vector<double> cuts;
  cuts.push_back(a);
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double c : breakpoints) {
    if (c > a && c < b && c - cuts.back() > 1e-14 * (b - a)) cuts.push_back(c);
  }
  if (b - cuts.back() <= 1e-14 * (b - a) && cuts.size() > 1) cuts.pop_back();
  cuts.push_back(b);

  auto cmp = [](const Panel<T>& l, const Panel<T>& r) {
    return l.error < r.error;
  };
  std::vector<Panel<T>> heap;
  double total_err = 0.0, total_l1 = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    heap.push_back(quad_detail::gk21<T>(f, cuts[i], cuts[i + 1], 0));
    res.evaluations += 21;
    total_err += heap.back().error;
    total_l1 += heap.back().l1;
  }
  std::make_heap(heap.begin(), heap.end(), cmp);
  std::vector<Panel<T>> frozen;
  int intervals = static_cast<int>(heap.size());
  auto target = [&]() { return std::max(spec.rel_tol * total_l1, spec.abs_tol); };
  while (!heap.empty() && total_err > target()) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    Panel<T> worst = std::move(heap.back());
    heap.pop_back();
    if (worst.depth >= spec.max_depth || intervals >= spec.max_intervals) {
      frozen.push_back(std::move(worst));
      continue;
    }
    double mid = 0.5 * (worst.a + worst.b);
    Panel<T> l = quad_detail::gk21<T>(f, worst.a, mid, worst.depth + 1);
    Panel<T> r = quad_detail::gk21<T>(f, mid, worst.b, worst.depth + 1);
    res.evaluations += 42;
    ++intervals;
    total_err += l.error + r.error - worst.error;
    total_l1 += l.l1 + r.l1 - worst.l1;
    heap.push_back(std::move(l));
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(std::move(r));
    std::push_heap(heap.begin(), heap.end(), cmp);
  }
  // Deterministic summation: order panels by position.
  for (auto& p : heap) frozen.push_back(std::move(p));
  std::sort(frozen.begin(), frozen.end(),
            [](const Panel<T>& l, const Panel<T>& r) { return l.a < r.a; });
  quad_detail::zero_like(res.value, frozen.front().value);
  total_err = 0.0;
  total_l1 = 0.0;
  for (const auto& p : frozen) {
    quad_detail::axpy(res.value, 1.0, p.value);
    total_err += p.error;
    total_l1 += p.l1;
  }
  res.error = total_err;
  res.l1 = total_l1;
  if (total_err > std::max(spec.rel_tol * total_l1, spec.abs_tol)) {
    throw ConvergenceError("adaptive quadrature did not reach tolerance",
                           quad_detail::head(res.value), total_err);
  }
  return res;
}

/// Real, complex or complex-vector valued field on events.
template <class T>
using EventField = std::function<T(const Event&)>;

/// Iterated adaptive integration of `field` over `region`. When a cone is
/// supplied (and spec.cone_aligned) every one-dimensional range is split where
/// it crosses the light cone, and pieces adjacent to a crossing use the
/// endpoint-clustering substitution v -> 3v^2 - 2v^3.
template <class T>
QuadResult<T> integrate_box(const EventField<T>& field, const Box& region,
                            const QuadratureSpec& spec,
                            const std::optional<ConeSurface>& cone);

QuadResult<std::complex<double>> integrate(
    const EventField<std::complex<double>>& field, const Box& region,
    const QuadratureSpec& spec,
    const std::optional<ConeSurface>& cone = std::nullopt);

QuadResult<double> integrate(const EventField<double>& field, const Box& region,
                             const QuadratureSpec& spec,
                             const std::optional<ConeSurface>& cone =
                                 std::nullopt);

/// Direction data handed to a nappe ray factory. Points on the ray are
/// apex + tau * direction, with direction = (nappe, tanh(eta) * omega) and
/// Gamma(apex + tau*direction, apex) = tau^2 * sech2.
struct NappeDirection {
  Event direction;
  double eta = 0.0;
  double sech2 = 1.0;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
};

template <class T>
using RadialIntegrand = std::function<T(double tau)>;

template <class T>
using NappeRayFactory = std::function<RadialIntegrand<T>(const NappeDirection&)>;

/// Integrates over J_nappe(apex) intersected with `region` in cone
/// coordinates y - apex = tau * (nappe, tanh(eta) * omega). The Jacobian
/// tau^(d-1) tanh^(d-2)(eta) sech^2(eta) times the sphere measure is applied
/// here; the factory supplies everything else. The factory is called once per
/// direction, so per-ray precomputation is amortized over the tau integral.
/// Supports d in [2, 4]. `eta_max` bounds the hyperbolic angle; `tau_power`
/// is the leading exponent p of the full radial integrand (tau^p near the
/// apex), used to grade rays that start at the apex. Nested levels tighten
/// the relative tolerance tenfold each.
template <class T>
QuadResult<T> integrate_nappe(const NappeRayFactory<T>& factory,
                              const Event& apex, int nappe, const Box& region,
                              const QuadratureSpec& spec, double eta_max,
                              double tau_power = 0.0);

/// Parameter range [lo, hi] of {apex + tau * dir : tau >= 0} inside box;
/// false when the ray misses.
bool ray_box_interval(const Event& apex, const Event& dir, const Box& box,
                      double* lo, double* hi);

/// Gauss-Legendre rule of n points on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre_unit(int n);

}  // namespace hadamard
