#include "riesz_separable.hpp"

#include <boost/math/constants/constants.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "hadamard/errors.hpp"
#include "hadamard/multi_index.hpp"
#include "hadamard/riesz.hpp"

namespace hadamard::detail {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

cplx power_of(double g, cplx beta) {
  if (g <= 0.0) return beta == cplx(0.0) ? cplx(1.0) : cplx(0.0);
  if (beta.imag() == 0.0) return std::pow(g, beta.real());
  return std::exp(beta * std::log(g));
}

// Substitution exponent for an endpoint factor (s - r)^p: with
// s = r + L u^q the integrand carries u^(q (p + 1) - 1).
int grading_for(double p) {
  if (p >= 0.0 && p == std::floor(p)) return 1;
  return std::max(2, static_cast<int>(std::ceil(4.0 / (p + 1.0))));
}

// d^n/dy^n of the axis-i profile (amplitude excluded).
double axis_derivative(const TestFunction& phi, int axis, int n, double y) {
  double w = phi.half_widths[axis];
  double u = (y - phi.center[axis]) / w;
  if (u <= -1.0 || u >= 1.0) return 0.0;
  double tab[kMaxTestDerivative + 1];
  bump_profile_derivatives(u, n, tab);
  return tab[n] / std::pow(w, n);
}

// Angular intervals of phi in [-pi, pi] where (rho cos phi, rho sin phi)
// lies inside [ax0,ax1]x[ay0,ay1].
std::vector<std::pair<double, double>> circle_arcs(double rho, double ax0,
                                                   double ax1, double ay0,
                                                   double ay1) {
  std::vector<double> crit{-kPi, kPi};
  auto add_cos = [&](double v) {
    if (std::abs(v) < rho) {
      double t = std::acos(v / rho);
      crit.push_back(t);
      crit.push_back(-t);
    }
  };
  auto add_sin = [&](double v) {
    if (std::abs(v) < rho) {
      double t = std::asin(v / rho);
      crit.push_back(t);
      crit.push_back(t >= 0.0 ? kPi - t : -kPi - t);
    }
  };
  add_cos(ax0);
  add_cos(ax1);
  add_sin(ay0);
  add_sin(ay1);
  std::sort(crit.begin(), crit.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < crit.size(); ++i) {
    double a = crit[i], b = crit[i + 1];
    if (!(b > a)) continue;
    double m = 0.5 * (a + b);
    double px = rho * std::cos(m), py = rho * std::sin(m);
    if (px > ax0 && px < ax1 && py > ay0 && py < ay1) {
      if (!out.empty() && out.back().second == a) {
        out.back().second = b;
      } else {
        out.emplace_back(a, b);
      }
    }
  }
  // Join an arc that wraps through phi = pi.
  if (out.size() > 1 && out.front().first == -kPi && out.back().second == kPi) {
    out.front().first = out.back().first - 2.0 * kPi;
    out.pop_back();
  }
  return out;
}

// int_a^b f with a = mid - half, b = mid + half through y = mid + half tanh(v).
// The map turns the flat zeros of the bump at the ends (and algebraic end
// behaviour) into double-exponential or exponential decay in v, so the
// adaptive rule only has to resolve interior features.
template <class T, class F>
T integrate_ends(const F& f, double a, double b, const QuadratureSpec& spec) {
  constexpr double kV = 13.0;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  auto g = [&](double v) {
    double th = std::tanh(v);
    double sech = 1.0 / std::cosh(v);
    T val = f(mid + half * th);
    T out;
    quad_detail::zero_like(out, val);
    quad_detail::axpy(out, half * sech * sech, val);
    return out;
  };
  return adaptive_integrate<T>(g, -kV, kV, spec, {-3.0, -1.0, 0.0, 1.0, 3.0})
      .value;
}

// Piecewise Chebyshev interpolant of a complex function on [lo, hi],
// bisecting cells until the error at off-node test points is below `tol`.
class Profile {
 public:
  static constexpr int kNodes = 14;

  template <class F>
  Profile(const F& f, double lo, double hi, const std::vector<double>& breaks,
          double tol) {
    std::vector<std::pair<double, double>> todo;
    std::vector<double> cuts{lo};
    for (double b : breaks) {
      if (b > cuts.back() && b < hi) cuts.push_back(b);
    }
    cuts.push_back(hi);
    for (std::size_t i = cuts.size() - 1; i > 0; --i) {
      todo.emplace_back(cuts[i - 1], cuts[i]);
    }
    const double min_width = 1e-9 * (hi - lo);
    while (!todo.empty()) {
      auto [a, b] = todo.back();
      todo.pop_back();
      Cell cell{a, b, {}};
      for (int j = 0; j < kNodes; ++j) cell.v[j] = f(node(cell, j));
      bool ok = true;
      if (b - a >= min_width) {
        for (double frac : {0.137, 0.5, 0.861}) {
          double r = a + frac * (b - a);
          if (std::abs(eval_cell(cell, r) - f(r)) > tol) ok = false;
        }
      }
      if (ok) {
        cells_.push_back(cell);
      } else {
        double m = 0.5 * (a + b);
        todo.emplace_back(m, b);
        todo.emplace_back(a, m);
      }
    }
  }

  cplx operator()(double r) const {
    if (r < cells_.front().a || r > cells_.back().b) return 0.0;
    auto it = std::upper_bound(
        cells_.begin(), cells_.end(), r,
        [](double v, const Cell& c) { return v < c.b; });
    if (it == cells_.end()) --it;
    return eval_cell(*it, r);
  }

 private:
  struct Cell {
    double a, b;
    std::array<cplx, kNodes> v;
  };

  static double cheb(int j) {
    return std::cos(kPi * (2.0 * j + 1.0) / (2.0 * kNodes));
  }
  static double node(const Cell& c, int j) {
    return 0.5 * (c.a + c.b) + 0.5 * (c.b - c.a) * cheb(j);
  }
  static cplx eval_cell(const Cell& c, double r) {
    double t = (2.0 * r - c.a - c.b) / (c.b - c.a);
    cplx num = 0.0;
    double den = 0.0;
    for (int j = 0; j < kNodes; ++j) {
      double diff = t - cheb(j);
      if (diff == 0.0) return c.v[j];
      // Barycentric weights for first-kind points.
      double w = ((j % 2) ? -1.0 : 1.0) * std::sin(kPi * (2.0 * j + 1.0) / (2.0 * kNodes)) / diff;
      num += w * c.v[j];
      den += w;
    }
    return num / den;
  }

  std::vector<Cell> cells_;
};

struct Term {
  double coefficient;
  std::array<int, kMaxDim> order{};
  int group = 0;  // index of the radial profile for order[0]
};

}  // namespace

cplx separable_riesz_pairing(cplx alpha, int sign, const TestFunction& phi,
                             int k, const Event& x, const Box& domain,
                             const QuadratureSpec& quad) {
  quad.validate();
  const int d = phi.dim();
  if (!(alpha.real() > d - 2)) {
    throw RegimeError("separable pairing needs Re alpha > d - 2");
  }
  cplx c = riesz_constant(alpha, d);
  if (c == cplx(0.0)) return 0.0;
  const cplx beta = (alpha - static_cast<double>(d)) / 2.0;

  // Time range in s = sign (t - x0) >= 0.
  Box supp;
  if (!intersect(phi.support(), domain, &supp)) return 0.0;
  double s_lo = sign > 0 ? supp.lo[0] - x[0] : x[0] - supp.hi[0];
  double s_hi = sign > 0 ? supp.hi[0] - x[0] : x[0] - supp.lo[0];
  s_lo = std::max(s_lo, 0.0);
  if (!(s_hi > s_lo)) return 0.0;
  const double R = s_hi;

  // Spatial ranges, trimmed to the ball |x - x_apex| < R.
  std::vector<double> a(static_cast<std::size_t>(d)), b(a);
  for (int i = 1; i < d; ++i) {
    a[i] = std::max(supp.lo[i], x[i] - R);
    b[i] = std::min(supp.hi[i], x[i] + R);
    if (!(b[i] > a[i])) return 0.0;
  }

  // Terms of box^k phi as tensor products.
  auto set = MultiIndexSet::get(d, 2 * k);
  std::vector<Term> terms;
  std::map<int, int> groups;  // time derivative order -> profile index
  for (const auto& bt : set->box_power(k)) {
    Term t;
    t.coefficient = bt.coefficient;
    const MultiIndex& mi = set->alpha(bt.index);
    for (int i = 0; i < d; ++i) t.order[static_cast<std::size_t>(i)] = mi[i];
    auto it = groups.find(mi[0]);
    if (it == groups.end()) {
      it = groups.emplace(mi[0], static_cast<int>(groups.size())).first;
    }
    t.group = it->second;
    terms.push_back(t);
  }
  std::vector<int> group_order(groups.size());
  for (auto [order, g] : groups) group_order[static_cast<std::size_t>(g)] = order;

  // Radial profiles I_n(r) = int_{max(r, s_lo)}^{s_hi} g_n(s) (s^2 - r^2)^beta ds.
  const double rb = beta.real();
  auto time_integral = [&](int n0, double r, const QuadratureSpec& spec) -> cplx {
    double lo = std::max(r, s_lo);
    if (lo >= s_hi) return 0.0;
    auto g0 = [&](double s) {
      return axis_derivative(phi, 0, n0, x[0] + sign * s);
    };
    int q = grading_for(r > 0.0 ? rb : 2.0 * rb);
    if (r >= s_lo && q > 1) {
      double L = s_hi - r;
      auto f = [&](double u) -> cplx {
        double uq1 = std::pow(u, q - 1);
        double ds = L * uq1 * u;  // s - r without cancellation
        double s = r + ds;
        double g = ds * (s + r);
        return g0(s) * power_of(g, beta) * (q * L * uq1);
      };
      return adaptive_integrate<cplx>(f, 0.0, 1.0, spec).value;
    }
    auto f = [&](double s) -> cplx {
      return g0(s) * power_of((s - r) * (s + r), beta);
    };
    return adaptive_integrate<cplx>(f, lo, s_hi, spec).value;
  };

  // Spatial part in polar coordinates about the apex, x = x_apex + r omega:
  // A_g(r) = sum_{t in g} coefficient_t int_{S} prod_i g_i(x_i) d omega.
  const int nsp = d - 1;
  const std::size_t ng = groups.size();
  const std::size_t nt = terms.size();
  int max_order = 0;
  for (const auto& t : terms) {
    for (int i = 1; i < d; ++i) {
      max_order = std::max(max_order, t.order[static_cast<std::size_t>(i)]);
    }
  }
  auto table = [&](int axis, double y, double* out) {
    double w = phi.half_widths[axis];
    double u = (y - phi.center[axis]) / w;
    bump_profile_derivatives(u, max_order, out);
    double sc = 1.0;
    for (int n = 0; n <= max_order; ++n) {
      out[n] *= sc;
      sc /= w;
    }
    return out[0] != 0.0;
  };

  QuadratureSpec ang = quad;
  ang.rel_tol = std::max(0.1 * quad.rel_tol, 5e-15);

  // Per-group sums over the terms at one spatial point, given the derivative
  // tables of the spatial axes.
  using GroupSums = std::array<double, kMaxTestDerivative / 2 + 1>;
  using Tables = double[3][kMaxTestDerivative + 1];
  auto accumulate = [&](const Tables& tab, GroupSums& out, double weight) {
    for (std::size_t t = 0; t < nt; ++t) {
      double p = terms[t].coefficient * weight;
      for (int i = 1; i < d; ++i) {
        p *= tab[i - 1][terms[t].order[static_cast<std::size_t>(i)]];
      }
      out[static_cast<std::size_t>(terms[t].group)] += p;
    }
  };

  Box sbox = supp;
  for (int i = 1; i < d; ++i) {
    sbox.lo[i] = a[i];
    sbox.hi[i] = b[i];
  }
  const double ax0 = sbox.lo[1] - x[1], ax1 = sbox.hi[1] - x[1];
  const double ay0 = nsp >= 2 ? sbox.lo[2] - x[2] : 0.0;
  const double ay1 = nsp >= 2 ? sbox.hi[2] - x[2] : 0.0;
  // Circle of radius rho in the (x1, x2) plane, integrated over the exact
  // arcs inside the support.
  auto circle = [&](double rho, const QuadratureSpec& spec) {
    GroupSums out{};
    auto f = [&](double ph) {
      GroupSums v{};
      Tables t2;
      if (table(1, x[1] + rho * std::cos(ph), t2[0]) &&
          table(2, x[2] + rho * std::sin(ph), t2[1])) {
        accumulate(t2, v, 1.0);
      }
      return v;
    };
    for (auto [lo, hi] : circle_arcs(rho, ax0, ax1, ay0, ay1)) {
      quad_detail::axpy(out, 1.0, integrate_ends<GroupSums>(f, lo, hi, spec));
    }
    return out;
  };
  // Distances from the apex axis to the (x1, x2) rectangle.
  auto axis_gap = [](double lo, double hi) {
    return (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
  };
  const double rho_min = std::hypot(axis_gap(ax0, ax1), axis_gap(ay0, ay1));
  const double rho_max = std::hypot(std::max(std::abs(ax0), std::abs(ax1)),
                                    std::max(std::abs(ay0), std::abs(ay1)));
  // Integral over the unit sphere of S^(nsp - 1) at radius r (d = 2, 3).
  auto angular = [&](double r) -> GroupSums {
    GroupSums out{};
    if (nsp == 1) {
      Tables tab;
      for (int sgn : {-1, 1}) {
        if (table(1, x[1] + sgn * r, tab[0])) accumulate(tab, out, 1.0);
      }
      return out;
    }
    return circle(r, ang);
  };

  // Radial range and breakpoints: the nearest and farthest box points, the
  // distances to the face planes, and the shell r = s_lo where the time
  // integral changes form.
  double near2 = 0.0, far2 = 0.0;
  std::vector<double> cuts;
  for (int i = 1; i < d; ++i) {
    double lo = sbox.lo[i] - x[i], hi = sbox.hi[i] - x[i];
    double n = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
    double f = std::max(std::abs(lo), std::abs(hi));
    near2 += n * n;
    far2 += f * f;
    cuts.push_back(std::abs(lo));
    cuts.push_back(std::abs(hi));
  }
  double r_lo = std::sqrt(near2);
  double r_hi = std::min(R, std::sqrt(far2));
  if (!(r_hi > r_lo)) return 0.0;
  cuts.push_back(s_lo);

  // Absolute floors for the spatial levels from the L1 norms of the
  // factors; relative targets alone stall where an inner integrand barely
  // touches the support.
  std::map<std::pair<int, int>, double> norms;
  auto axis_l1 = [&](int axis, int n) {
    auto key = std::make_pair(axis, n);
    auto it = norms.find(key);
    if (it != norms.end()) return it->second;
    double c0 = phi.center[axis], w = phi.half_widths[axis];
    auto f = [&](double y) { return std::abs(axis_derivative(phi, axis, n, y)); };
    QuadratureSpec s1;
    s1.rel_tol = 1e-6;
    double v = adaptive_integrate<double>(f, c0 - w, c0 + w, s1).value;
    norms.emplace(key, v);
    return v;
  };
  double spatial_l1 = 0.0;
  for (const auto& t : terms) {
    double p = std::abs(t.coefficient);
    for (int i = 1; i < d; ++i) p *= axis_l1(i, t.order[static_cast<std::size_t>(i)]);
    spatial_l1 += p;
  }
  const double span = r_hi - r_lo;

  auto set_floor = [&](double r) {
    double shell = std::pow(std::max(r, 1e-3 * r_hi), nsp - 1);
    ang.abs_tol = 1e-3 * quad.rel_tol * spatial_l1 / (span * shell);
  };
  QuadratureSpec time_spec = quad;
  time_spec.rel_tol = std::max(0.1 * quad.rel_tol, 5e-15);
  if (d == 4) {
    // Cylindrical coordinates about the apex: the (x1, x2) circle integral
    // C(rho) does not depend on x3, and the time integral enters through
    // tabulated profiles I_n(sqrt(rho^2 + x3^2)).
    std::map<std::pair<int, int>, int> pidx, qidx;
    std::vector<std::pair<int, int>> pkeys, qkeys;
    std::vector<std::pair<int, int>> slot(nt);
    for (std::size_t t = 0; t < nt; ++t) {
      auto pk = std::make_pair(terms[t].order[1], terms[t].order[2]);
      auto qk = std::make_pair(terms[t].order[0], terms[t].order[3]);
      if (!pidx.count(pk)) {
        pidx[pk] = static_cast<int>(pkeys.size());
        pkeys.push_back(pk);
      }
      if (!qidx.count(qk)) {
        qidx[qk] = static_cast<int>(qkeys.size());
        qkeys.push_back(qk);
      }
      slot[t] = {pidx[pk], qidx[qk]};
    }
    constexpr std::size_t kSlots = 45;
    if (pkeys.size() > kSlots || qkeys.size() > kSlots) {
      throw UnsupportedOrderError("too many derivative patterns");
    }
    using PSums = std::array<double, kSlots>;
    using QSums = std::array<cplx, kSlots>;

    // Profiles, one per time derivative order.
    QuadratureSpec prof_spec = quad;
    prof_spec.rel_tol = std::max(0.01 * quad.rel_tol, 5e-15);
    std::vector<Profile> profiles;
    for (std::size_t g = 0; g < ng; ++g) {
      int n0 = group_order[g];
      auto f = [&](double r) { return time_integral(n0, r, prof_spec); };
      double scale = 0.0;
      for (int j = 0; j <= 32; ++j) {
        scale = std::max(scale, std::abs(f(r_lo + (r_hi - r_lo) * j / 32.0)));
      }
      double w0 = phi.half_widths[0];
      std::vector<double> breaks{s_lo, s_lo + 0.1 * w0, s_lo + 0.3 * w0,
                                 s_lo + 0.6 * w0, s_hi - 0.6 * w0,
                                 s_hi - 0.3 * w0, s_hi - 0.1 * w0};
      std::sort(breaks.begin(), breaks.end());
      profiles.emplace_back(f, r_lo, r_hi, breaks,
                            std::max(1e-2 * quad.rel_tol * scale, 1e-300));
    }

    const double z_lo = sbox.lo[3] - x[3], z_hi = sbox.hi[3] - x[3];
    QuadratureSpec inner = quad;
    inner.rel_tol = std::max(0.1 * quad.rel_tol, 5e-15);
    QuadratureSpec circ = inner;
    double l12 = 0.0, l3 = 0.0;
    for (const auto& t : terms) {
      l12 = std::max(l12, axis_l1(1, t.order[1]) * axis_l1(2, t.order[2]));
      l3 = std::max(l3, axis_l1(3, t.order[3]));
    }
    const double rho_top = std::min(rho_max, R);
    if (!(rho_top > rho_min)) return 0.0;
    circ.abs_tol = 1e-3 * quad.rel_tol * l12 / (rho_top * (rho_top - rho_min));

    auto per_rho = [&](double rho) -> cplx {
      // Circle part.
      PSums C{};
      auto fc = [&](double ph) {
        PSums v{};
        double t1[kMaxTestDerivative + 1], t2[kMaxTestDerivative + 1];
        if (table(1, x[1] + rho * std::cos(ph), t1) &&
            table(2, x[2] + rho * std::sin(ph), t2)) {
          for (std::size_t p = 0; p < pkeys.size(); ++p) {
            v[p] = t1[pkeys[p].first] * t2[pkeys[p].second];
          }
        }
        return v;
      };
      for (auto [lo, hi] : circle_arcs(rho, ax0, ax1, ay0, ay1)) {
        quad_detail::axpy(C, 1.0, integrate_ends<PSums>(fc, lo, hi, circ));
      }
      // Axial part.
      double zmax = std::sqrt(std::max(0.0, R * R - rho * rho));
      double lo = std::max(z_lo, -zmax), hi = std::min(z_hi, zmax);
      if (!(hi > lo)) return 0.0;
      QSums D{};
      auto fz = [&](double z) {
        QSums v{};
        double t3[kMaxTestDerivative + 1];
        if (!table(3, x[3] + z, t3)) return v;
        double r = std::hypot(rho, z);
        cplx Ig[kMaxTestDerivative / 2 + 1];
        for (std::size_t g = 0; g < ng; ++g) Ig[g] = profiles[g](r);
        for (std::size_t q = 0; q < qkeys.size(); ++q) {
          v[q] = t3[qkeys[q].second] *
                 Ig[static_cast<std::size_t>(groups.at(qkeys[q].first))];
        }
        return v;
      };
      D = integrate_ends<QSums>(fz, lo, hi, inner);
      cplx acc = 0.0;
      for (std::size_t t = 0; t < nt; ++t) {
        acc += terms[t].coefficient * C[static_cast<std::size_t>(slot[t].first)] *
               D[static_cast<std::size_t>(slot[t].second)];
      }
      return rho * acc;
    };
    cplx v = integrate_ends<cplx>(per_rho, rho_min, rho_top, quad);
    return c * phi.amplitude * v;
  }

  auto radial = [&](double r) -> cplx {
    set_floor(r);
    GroupSums A = angular(r);
    cplx acc = 0.0;
    for (std::size_t g = 0; g < ng; ++g) {
      if (A[g] == 0.0) continue;
      acc += A[g] * time_integral(group_order[g], r, time_spec);
    }
    return acc * std::pow(r, nsp - 1);
  };
  cplx v = adaptive_integrate<cplx>(radial, r_lo, r_hi, quad, cuts).value;
  return c * phi.amplitude * v;
}

}  // namespace hadamard::detail
