#include "hadamard/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hadamard/errors.hpp"
#include "hadamard/hadamard.hpp"
#include "hadamard/rational.hpp"
#include "hadamard/riesz.hpp"

namespace hadamard {

namespace {

double profile(double u) {
  if (!(std::abs(u) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

void require_2d(const SpacetimeModel& model, const char* what) {
  if (model.dimension() != 2) {
    throw RegimeError(std::string(what) + ": only d = 2 is supported");
  }
  if (!model.is_flat()) {
    throw RegimeError(std::string(what) + ": flat backend required");
  }
}

// Distance from s to the interval [a, b].
double gap(double s, double a, double b) {
  if (s < a) return a - s;
  if (s > b) return s - b;
  return 0.0;
}

}  // namespace

double bessel_series(BesselKind kind, double w) {
  if (!(w >= 0.0)) throw DomainError("bessel_series: argument must be >= 0");
  if (w > 30.0) throw DomainError("bessel_series: argument above 30");
  const double q = (kind == BesselKind::I0 ? 1.0 : -1.0) * w * w / 4.0;
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 1; k < 200; ++k) {
    term *= static_cast<long double>(q) / (static_cast<long double>(k) * k);
    sum += term;
    // Terms shrink once k exceeds w / 2; stop when the next ones are negligible.
    if (k > w / 2.0 && std::abs(term) <= 1e-17L * std::abs(sum)) break;
  }
  return static_cast<double>(sum);
}

cplx exact_kernel_2d(cplx z, int m, const Event& y, const Event& x, int sign) {
  if (m < 1) throw RegimeError("exact_kernel_2d: m >= 1 required");
  if (y.dim() != 2 || x.dim() != 2) {
    throw std::invalid_argument("exact_kernel_2d: events must be two-dimensional");
  }
  const double w0 = sign * (y[0] - x[0]);
  const double w1 = y[1] - x[1];
  if (w0 < std::abs(w1)) return 0.0;
  const double G = (w0 - w1) * (w0 + w1);
  cplx sum = 0.0;
  const double az = std::abs(z);
  for (int k = 0; k < 400; ++k) {
    const int n = k + m;  // order 2n
    const int p = k + m - 1;  // power of Gamma
    if (p > 0 && G == 0.0) continue;
    if (k > 0 && az == 0.0) break;
    // log of gbinom(m+k-1, k) 2^(1-2n) / ((n-1)!)^2 |z|^k Gamma^p.
    double lg = std::lgamma(m + k) - std::lgamma(k + 1.0) - std::lgamma(m) +
                (1.0 - 2.0 * n) * std::log(2.0) - 2.0 * std::lgamma(n);
    if (k > 0) lg += k * std::log(az);
    if (p > 0) lg += p * std::log(G);
    cplx phase = k > 0 ? std::pow(z / az, k) : cplx(1.0);
    cplx term = std::exp(lg) * phase;
    sum += term;
    // The term ratio is |z| Gamma / (4 (k+1)(k+m)); past its peak the tail
    // is bounded by twice the current term.
    double ratio = az * G / (4.0 * (k + 1.0) * (k + m));
    if (ratio < 0.5 && std::abs(term) <= 1e-17 * std::abs(sum)) return sum;
  }
  return sum;
}

void GridSpec::validate() const {
  if (domain.dim() != 2) throw ConfigError("grid: domain must be a 2D box");
  if (!(h > 0.0)) throw ConfigError("grid: spacing must be positive");
  if (!(lambda > 0.0) || lambda > 1.0) {
    throw ConfigError("grid: CFL violated, need 0 < dt/dx <= 1");
  }
  if (!(domain.side(0) > 0.0) || !(domain.side(1) > 0.0)) {
    throw ConfigError("grid: empty domain");
  }
  double n = domain.side(1) / h;
  if (std::abs(n - std::round(n)) > 1e-9 * n) {
    throw ConfigError("grid: spatial side is not a multiple of h");
  }
  if (nx() < 4 || nt() < 4) throw ConfigError("grid: too few cells");
}

int GridSpec::nx() const {
  return static_cast<int>(std::lround(domain.side(1) / h));
}

int GridSpec::nt() const {
  return static_cast<int>(std::ceil(domain.side(0) / dt() - 1e-9));
}

cplx FDSolution::smeared(const TestFunction& psi) const {
  const double dt = grid.dt();
  const Box s = psi.support();
  cplx sum = 0.0;
  for (int n = 0; n <= nt; ++n) {
    double tn = t(n);
    if (tn <= s.lo[0] || tn >= s.hi[0]) continue;
    double wt = (n == 0 || n == nt) ? 0.5 : 1.0;
    for (int j = 0; j <= nx; ++j) {
      double xj = x(j);
      if (xj <= s.lo[1] || xj >= s.hi[1]) continue;
      double wx = (j == 0 || j == nx) ? 0.5 : 1.0;
      sum += wt * wx * psi(Event{tn, xj}) * at(n, j);
    }
  }
  return sum * (dt * grid.h);
}

double FDSolution::causality_leak(const Box& source) const {
  double worst = 0.0;
  for (int n = 0; n <= nt; ++n) {
    double tn = t(n);
    for (int j = 0; j <= nx; ++j) {
      double d = gap(x(j), source.lo[1], source.hi[1]);
      bool inside = sign > 0 ? tn - source.lo[0] >= d : source.hi[0] - tn >= d;
      if (!inside) worst = std::max(worst, std::abs(at(n, j)));
    }
  }
  return worst;
}

namespace {

void check_support(const Box& s, const GridSpec& g, int sign) {
  const double t0 = g.domain.lo[0], t1 = g.domain.hi[0];
  const double x0 = g.domain.lo[1], x1 = g.domain.hi[1];
  const double margin = 2.0 * g.dt();
  if (s.lo[0] < t0 || s.hi[0] > t1 || s.lo[1] < x0 || s.hi[1] > x1) {
    throw DomainError("fd solve: source support leaves the grid");
  }
  if (sign > 0 ? s.lo[0] < t0 + margin : s.hi[0] > t1 - margin) {
    throw DomainError("fd solve: source touches the initial time");
  }
  double reach = sign > 0 ? t1 - s.lo[0] : s.hi[0] - t0;
  if (s.lo[1] - reach <= x0 || s.hi[1] + reach >= x1) {
    throw DomainError("fd solve: domain too small for the causal future of the source");
  }
}

// One leapfrog run with a grid source; marches backwards for sign < 0.
void leapfrog(const OperatorSpec& op, const GridSpec& g, int sign,
              const std::vector<cplx>& src, std::vector<cplx>& u) {
  const int nt = g.nt(), nx = g.nx();
  const std::size_t row = static_cast<std::size_t>(nx + 1);
  const double dt = g.dt(), h = g.h;
  const double dt2 = dt * dt, r2 = dt2 / (h * h);
  u.assign(static_cast<std::size_t>(nt + 1) * row, cplx{});
  const bool constant = op.potential.is_constant();
  const cplx q0 = op.potential.constant_part() - op.z;
  std::vector<cplx> q(row, q0);
  const int first = sign > 0 ? 1 : nt - 1;
  for (int step = 0; step < nt - 1; ++step) {
    const int n = sign > 0 ? first + step : first - step;
    const int next = n + sign, prev = n - sign;
    const double tn = g.domain.lo[0] + n * dt;
    if (!constant) {
      for (int j = 0; j <= nx; ++j) {
        q[static_cast<std::size_t>(j)] =
            op.potential.value(Event{tn, g.domain.lo[1] + j * h}) - op.z;
      }
    }
    const cplx* un = u.data() + static_cast<std::size_t>(n) * row;
    const cplx* up = u.data() + static_cast<std::size_t>(prev) * row;
    const cplx* fn = src.data() + static_cast<std::size_t>(n) * row;
    cplx* out = u.data() + static_cast<std::size_t>(next) * row;
    for (int j = 1; j < nx; ++j) {
      out[j] = 2.0 * un[j] - up[j] + r2 * (un[j + 1] - 2.0 * un[j] + un[j - 1]) +
               dt2 * (fn[j] - q[static_cast<std::size_t>(j)] * un[j]);
    }
  }
}

FDSolution make_solution(const GridSpec& g, int sign) {
  FDSolution s;
  s.grid = g;
  s.sign = sign;
  s.nt = g.nt();
  s.nx = g.nx();
  return s;
}

std::vector<cplx> sample_source(const TestFunction& f, const GridSpec& g) {
  const int nt = g.nt(), nx = g.nx();
  std::vector<cplx> src(static_cast<std::size_t>(nt + 1) * (nx + 1), cplx{});
  const Box s = f.support();
  for (int n = 0; n <= nt; ++n) {
    double t = g.domain.lo[0] + n * g.dt();
    if (t <= s.lo[0] || t >= s.hi[0]) continue;
    for (int j = 0; j <= nx; ++j) {
      double x = g.domain.lo[1] + j * g.h;
      if (x <= s.lo[1] || x >= s.hi[1]) continue;
      src[static_cast<std::size_t>(n) * (nx + 1) + j] = f(Event{t, x});
    }
  }
  return src;
}

void check_inputs(const OperatorSpec& op, const TestFunction& f,
                  const GridSpec& grid, int sign) {
  require_2d(*op.model, "fd solve");
  if (sign != 1 && sign != -1) throw std::invalid_argument("fd solve: sign must be +-1");
  if (f.dim() != 2) throw std::invalid_argument("fd solve: source must be 2D");
  grid.validate();
  check_support(f.support(), grid, sign);
}

}  // namespace

FDSolution fd_retarded_solve(const OperatorSpec& op, const TestFunction& f,
                             const GridSpec& grid, int sign) {
  return fd_power_apply(op, 1, f, grid, sign);
}

FDSolution fd_power_apply(const OperatorSpec& op, int m, const TestFunction& f,
                          const GridSpec& grid, int sign) {
  if (m < 1) throw std::invalid_argument("fd_power_apply: m >= 1 required");
  check_inputs(op, f, grid, sign);
  FDSolution s = make_solution(grid, sign);
  std::vector<cplx> src = sample_source(f, grid);
  for (int i = 0; i < m; ++i) {
    leapfrog(op, grid, sign, src, s.u);
    if (i + 1 < m) src.swap(s.u);
  }
  return s;
}

namespace {

// One-dimensional factor of a tensor bump.
struct Factor {
  double c, w;
};

// int a(s + t) b(s) ds for the profiles of two factors.
double correlation(const Factor& a, const Factor& b, double t,
                   const QuadratureSpec& q) {
  double lo = std::max(b.c - b.w, a.c - a.w - t);
  double hi = std::min(b.c + b.w, a.c + a.w - t);
  if (!(hi > lo)) return 0.0;
  // The correlation peaks near 0.2 min(w); an absolute floor well below that
  // keeps the far tails from stalling the relative test.
  QuadratureSpec qq = q;
  qq.abs_tol = 1e-4 * q.rel_tol * std::min(a.w, b.w);
  auto f = [&](double s) {
    return profile((s + t - a.c) / a.w) * profile((s - b.c) / b.w);
  };
  return adaptive_integrate<double>(f, lo, hi, qq).value;
}

}  // namespace

cplx kernel_convolution_pairing(const std::function<cplx(const Event&)>& kernel,
                                const TestFunction& psi, const TestFunction& f,
                                const QuadratureSpec& quad, int sign) {
  if (psi.dim() != 2 || f.dim() != 2) {
    throw std::invalid_argument("kernel_convolution_pairing: d = 2 only");
  }
  quad.validate();
  Factor p0{psi.center[0], psi.half_widths[0]}, p1{psi.center[1], psi.half_widths[1]};
  Factor f0{f.center[0], f.half_widths[0]}, f1{f.center[1], f.half_widths[1]};
  // Shifts w = y - x with psi(y) f(x) != 0.
  double a0 = p0.c - f0.c - p0.w - f0.w, b0 = p0.c - f0.c + p0.w + f0.w;
  double a1 = p1.c - f1.c - p1.w - f1.w, b1 = p1.c - f1.c + p1.w + f1.w;
  // Work with sigma = sign * w0 >= |w1|.
  double s_lo = sign > 0 ? a0 : -b0, s_hi = sign > 0 ? b0 : -a0;
  s_lo = std::max(s_lo, 0.0);
  if (!(s_hi > s_lo)) return 0.0;

  QuadratureSpec corr = quad;
  corr.rel_tol = std::max(0.01 * quad.rel_tol, 5e-14);
  corr.abs_tol = 0.0;
  QuadratureSpec inner = quad;
  inner.rel_tol = 0.1 * quad.rel_tol;
  double running = 0.0;
  auto outer = [&](double sigma) -> cplx {
    double lo = std::max(a1, -sigma), hi = std::min(b1, sigma);
    if (!(hi > lo)) return 0.0;
    double w0 = sign * sigma;
    double c0 = correlation(p0, f0, w0, corr);
    if (c0 == 0.0) return 0.0;
    inner.abs_tol = 1e-3 * quad.rel_tol * running;
    auto g = [&](double w1) -> cplx {
      return kernel(Event{w0, w1}) * correlation(p1, f1, w1, corr);
    };
    std::vector<double> cuts;
    if (lo < 0.0 && hi > 0.0) cuts.push_back(0.0);
    cplx v = c0 * adaptive_integrate<cplx>(g, lo, hi, inner, cuts).value;
    running = std::max(running, std::abs(v));
    return v;
  };
  std::vector<double> cuts;
  for (double c : {std::abs(a1), std::abs(b1)}) {
    if (c > s_lo && c < s_hi) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cplx v = adaptive_integrate<cplx>(outer, s_lo, s_hi, quad, cuts).value;
  return psi.amplitude * f.amplitude * v;
}

namespace {

constexpr double kEtaCap = 18.0;
constexpr double kPi = 3.14159265358979323846;

// Product integration against one bump factor: a smooth g is replaced by its
// interpolant at n Chebyshev points of [c - w, c + w], and the profile is
// integrated exactly against each Lagrange basis polynomial.
struct ProductRule {
  std::vector<double> nodes, weights;
};

ProductRule product_rule(double c, double w, int n) {
  ProductRule r;
  std::vector<double> bary(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    double th = (2.0 * a + 1.0) * kPi / (2.0 * n);
    bary[static_cast<std::size_t>(a)] = (a % 2 == 0 ? 1.0 : -1.0) * std::sin(th);
    r.nodes.push_back(c + w * std::cos(th));
  }
  QuadratureSpec q;
  q.rel_tol = 1e-13;
  for (int a = 0; a < n; ++a) {
    auto basis = [&](double u) {
      double x = c + w * u;
      double num = 0.0, den = 0.0;
      for (int b = 0; b < n; ++b) {
        double dx = x - r.nodes[static_cast<std::size_t>(b)];
        if (dx == 0.0) return b == a ? profile(u) : 0.0;
        double t = bary[static_cast<std::size_t>(b)] / dx;
        den += t;
        if (b == a) num = t;
      }
      return profile(u) * num / den;
    };
    r.weights.push_back(w * adaptive_integrate<double>(basis, -1.0, 1.0, q).value);
  }
  return r;
}

// All truncations at once: per-term pairings of V^k R(2k+2m)(., x) with phi.
class ConePairing {
 public:
  ConePairing(const OperatorSpec& op, int m, int N, int sign,
              const TestFunction& phi, const QuadratureSpec& quad)
      : op_(op), m_(m), N_(N), sign_(sign), phi_(phi), quad_(quad),
        family_(hadamard_family(op, N)) {
    for (int k = 0; k <= N; ++k) {
      double binom = to_double(gbinom(m + k - 1, k));
      weight_.push_back(binom * riesz_constant(2.0 * (k + m), 2).real());
    }
    Box cut;
    region_ok_ = intersect(op.model->domain(), phi.support(), &cut);
    region_ = cut;
    whole_ = region_ok_ && op.model->domain().contains(phi.support().lo) &&
             op.model->domain().contains(phi.support().hi);
    rule_[0] = product_rule(phi.center[0], phi.half_widths[0], kInnerNodes);
    rule_[1] = product_rule(phi.center[1], phi.half_widths[1], kInnerNodes);
  }

  std::vector<cplx> operator()(const Event& x) const {
    std::vector<cplx> zero(static_cast<std::size_t>(N_ + 1), cplx{});
    if (!region_ok_) return zero;
    if (whole_ && inside_cone(x)) return interior(x);
    // Box relative to x, with time flipped for the past cone.
    double t_lo = sign_ * (region_.lo[0] - x[0]), t_hi = sign_ * (region_.hi[0] - x[0]);
    if (t_lo > t_hi) std::swap(t_lo, t_hi);
    const double s_lo = region_.lo[1] - x[1], s_hi = region_.hi[1] - x[1];
    // Extreme ratios w1 / w0 over box and cone: corners inside the cone and
    // edge crossings of the null lines.
    double r_lo = 2.0, r_hi = -2.0;
    auto take = [&](double w0, double w1) {
      if (w0 < 0.0 || std::abs(w1) > w0 * (1.0 + 1e-14)) return;
      double r = w0 > 0.0 ? std::clamp(w1 / w0, -1.0, 1.0) : (w1 >= 0 ? 1.0 : -1.0);
      r_lo = std::min(r_lo, r);
      r_hi = std::max(r_hi, r);
    };
    for (double a : {t_lo, t_hi}) {
      for (double b : {s_lo, s_hi}) take(a, b);
      for (double sg : {-1.0, 1.0}) {
        double b = sg * a;
        if (b >= s_lo && b <= s_hi) take(a, b);
      }
    }
    for (double b : {s_lo, s_hi}) {
      double a = std::abs(b);
      if (a >= t_lo && a <= t_hi) take(a, b);
    }
    if (r_lo > r_hi) return zero;
    const double cap = std::tanh(kEtaCap);
    double e_lo = std::atanh(std::clamp(r_lo, -cap, cap));
    double e_hi = std::atanh(std::clamp(r_hi, -cap, cap));
    if (!(e_hi > e_lo)) return zero;

    auto ray = [&](double eta) -> std::vector<cplx> {
      const double c = std::cosh(eta), s = std::sinh(eta);
      double lo = 0.0, hi = std::numeric_limits<double>::infinity();
      lo = std::max(lo, t_lo / c);
      hi = std::min(hi, t_hi / c);
      if (s > 0.0) {
        lo = std::max(lo, s_lo / s);
        hi = std::min(hi, s_hi / s);
      } else if (s < 0.0) {
        lo = std::max(lo, s_hi / s);
        hi = std::min(hi, s_lo / s);
      } else if (s_lo > 0.0 || s_hi < 0.0) {
        hi = -1.0;
      }
      std::vector<cplx> out(static_cast<std::size_t>(N_ + 1), cplx{});
      if (!(hi > lo)) return out;
      Event v{sign_ * c * hi, s * hi};
      RayTable table = family_.ray(x, v, N_, 0);
      QuadratureSpec q = quad_;
      q.rel_tol = 0.1 * quad_.rel_tol;
      auto f = [&](double tau) -> std::vector<cplx> {
        std::vector<cplx> r(static_cast<std::size_t>(N_ + 1), cplx{});
        Event y{x[0] + sign_ * c * tau, x[1] + s * tau};
        double ph = phi_(y);
        if (ph == 0.0) return r;
        double G = tau * tau;
        double gp = std::pow(G, m_ - 1) * tau * ph;  // tau: cone Jacobian
        for (int k = 0; k <= N_; ++k) {
          r[static_cast<std::size_t>(k)] = weight_[static_cast<std::size_t>(k)] * gp *
                                           table.value(k, tau / hi);
          gp *= G;
        }
        return r;
      };
      return adaptive_integrate<std::vector<cplx>>(f, lo, hi, q).value;
    };
    QuadratureSpec q = quad_;
    std::vector<double> cuts;
    if (e_lo < 0.0 && e_hi > 0.0) cuts.push_back(0.0);
    return adaptive_integrate<std::vector<cplx>>(ray, e_lo, e_hi, q, cuts).value;
  }

 private:
  static constexpr int kInnerNodes = 8;

  // supp phi strictly inside J_sign(x): the integrand is smooth on the box.
  bool inside_cone(const Event& x) const {
    const Box b = phi_.support();
    for (double t : {b.lo[0], b.hi[0]}) {
      for (double s : {b.lo[1], b.hi[1]}) {
        if (!(sign_ * (t - x[0]) > std::abs(s - x[1]))) return false;
      }
    }
    return true;
  }

  std::vector<cplx> interior(const Event& x) const {
    std::vector<cplx> out(static_cast<std::size_t>(N_ + 1), cplx{});
    for (int a = 0; a < kInnerNodes; ++a) {
      for (int b = 0; b < kInnerNodes; ++b) {
        Event y{rule_[0].nodes[static_cast<std::size_t>(a)],
                rule_[1].nodes[static_cast<std::size_t>(b)]};
        double w = phi_.amplitude * rule_[0].weights[static_cast<std::size_t>(a)] *
                   rule_[1].weights[static_cast<std::size_t>(b)];
        double G = op_.model->world_function(y, x);
        std::vector<cplx> V = family_.values(y, x, N_);
        double gp = w * std::pow(G, m_ - 1);
        for (int k = 0; k <= N_; ++k) {
          out[static_cast<std::size_t>(k)] += weight_[static_cast<std::size_t>(k)] * gp *
                                              V[static_cast<std::size_t>(k)];
          gp *= G;
        }
      }
    }
    return out;
  }

  OperatorSpec op_;
  int m_, N_, sign_;
  TestFunction phi_;
  QuadratureSpec quad_;
  HadamardFamily family_;
  std::vector<double> weight_;
  Box region_;
  bool region_ok_ = false;
  bool whole_ = false;
  ProductRule rule_[2];
};

}  // namespace

std::vector<cplx> expansion_smeared(const OperatorSpec& op, int m, int N_max,
                                    const TestFunction& phi,
                                    const TestFunction& psi,
                                    const QuadratureSpec& quad, int sign,
                                    int outer_nodes) {
  require_2d(*op.model, "expansion_smeared");
  if (m < 1) throw RegimeError("expansion_smeared: m >= 1 required");
  if (N_max < 0) throw std::invalid_argument("expansion_smeared: N_max < 0");
  if (outer_nodes < 3) throw std::invalid_argument("expansion_smeared: too few nodes");
  quad.validate();
  ConePairing pair(op, m, N_max, sign, phi, quad);
  // The pairing is smooth on the scale of supp psi.
  const int n = outer_nodes;
  const ProductRule r0 = product_rule(psi.center[0], psi.half_widths[0], n);
  const ProductRule r1 = product_rule(psi.center[1], psi.half_widths[1], n);
  const std::vector<double>* xs[2] = {&r0.nodes, &r1.nodes};
  const std::vector<double>* ws[2] = {&r0.weights, &r1.weights};
  std::vector<cplx> terms(static_cast<std::size_t>(N_max + 1), cplx{});
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Event x{(*xs[0])[static_cast<std::size_t>(a)], (*xs[1])[static_cast<std::size_t>(b)]};
      double w = psi.amplitude * (*ws[0])[static_cast<std::size_t>(a)] *
                 (*ws[1])[static_cast<std::size_t>(b)];
      std::vector<cplx> t = pair(x);
      for (std::size_t k = 0; k < terms.size(); ++k) terms[k] += w * t[k];
    }
  }
  std::vector<cplx> partial(terms.size());
  cplx acc = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    acc += terms[k];
    partial[k] = acc;
  }
  return partial;
}

std::vector<CompareRow> compare_expansion_fd(const OperatorSpec& op, int m,
                                             int N_max,
                                             const std::vector<ProbePair>& probes,
                                             const GridSpec& grid,
                                             const QuadratureSpec& quad,
                                             int sign) {
  require_2d(*op.model, "compare_expansion_fd");
  std::vector<CompareRow> rows;
  for (const ProbePair& p : probes) {
    FDSolution u = fd_power_apply(op, m, p.psi, grid, sign);
    cplx fd = u.smeared(p.phi);
    std::vector<cplx> ex = expansion_smeared(op, m, N_max, p.phi, p.psi, quad, sign);
    for (int N = 0; N <= N_max; ++N) {
      cplx e = ex[static_cast<std::size_t>(N)];
      double abs_err = std::abs(fd - e);
      double rel = std::abs(fd) > 0.0 ? abs_err / std::abs(fd) : abs_err;
      rows.push_back(CompareRow{N, grid.h, p.id, fd, e, abs_err, rel});
    }
  }
  return rows;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

std::string num(cplx v) {
  if (v.imag() == 0.0) return num(v.real());
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.15e%+.15ei", v.real(), v.imag());
  return buf;
}

}  // namespace

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "N,h,probe,fd_value,expansion_value,abs_err,rel_err\n";
  for (const auto& r : rows) {
    os << r.N << ',' << num(r.h) << ',' << r.probe << ',' << num(r.fd_value)
       << ',' << num(r.expansion_value) << ',' << num(r.abs_err) << ','
       << num(r.rel_err) << '\n';
  }
  return os.str();
}

std::string compare_svg(const std::vector<CompareRow>& rows) {
  const double W = 480, H = 320, L = 60, R = 20, T = 20, B = 40;
  int n_max = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : rows) {
    n_max = std::max(n_max, r.N);
    double e = std::log10(std::max(r.abs_err, 1e-300));
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (rows.empty()) lo = hi = 0.0;
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi <= lo) hi = lo + 1.0;
  auto px = [&](int N) { return L + (W - L - R) * (n_max > 0 ? double(N) / n_max : 0.5); };
  auto py = [&](double e) { return T + (H - T - B) * (hi - e) / (hi - lo); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
     << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
     << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\""
     << H - B << "\" stroke=\"black\"/>\n";
  for (int N = 0; N <= n_max; ++N) {
    os << "<text x=\"" << px(N) << "\" y=\"" << H - B + 16
       << "\" font-size=\"11\" text-anchor=\"middle\">" << N << "</text>\n";
  }
  for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); ++e) {
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(e) + 4
       << "\" font-size=\"11\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 6
     << "\" font-size=\"12\" text-anchor=\"middle\">N</text>\n";
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::vector<std::string> ids;
  for (const auto& r : rows) {
    if (std::find(ids.begin(), ids.end(), r.probe) == ids.end()) ids.push_back(r.probe);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[i % 5] << "\" points=\"";
    for (const auto& r : rows) {
      if (r.probe != ids[i]) continue;
      os << px(r.N) << ',' << py(std::log10(std::max(r.abs_err, 1e-300))) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (i + 1)
       << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << colors[i % 5] << "\">"
       << ids[i] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace hadamard
