#include "hadamard/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <array>
#include <map>
#include <type_traits>
#include <memory>
#include <mutex>

namespace hadamard {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) throw ConfigError("quadrature tolerance must be > 0");
  if (max_depth < 1) throw ConfigError("quadrature depth must be >= 1");
}

namespace quad_detail {

const GK21& GK21::get() {
  static const GK21 rule = [] {
    GK21 r{};
    const auto& x = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
    const auto& wk = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
    const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
    for (int i = 0; i < 11; ++i) {
      r.x[i] = x[static_cast<std::size_t>(i)];
      r.wk[i] = wk[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < 5; ++i) r.wg[i] = wg[static_cast<std::size_t>(i)];
    return r;
  }();
  return rule;
}

}  // namespace quad_detail

const GaussRule& gauss_legendre_unit(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<GaussRule>();
    std::vector<double> pos = boost::math::legendre_p_zeros<double>(n);
    std::vector<std::pair<double, double>> nw;
    for (double x : pos) {
      double dp = boost::math::legendre_p_prime(n, x);
      double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nw.emplace_back(x, w);
      if (x != 0.0) nw.emplace_back(-x, w);
    }
    std::sort(nw.begin(), nw.end());
    for (auto [x, w] : nw) {
      slot->nodes.push_back(0.5 * (x + 1.0));
      slot->weights.push_back(0.5 * w);
    }
  }
  return *slot;
}

bool ray_box_interval(const Event& apex, const Event& dir, const Box& box,
                      double* lo, double* hi) {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < apex.dim(); ++i) {
    if (dir[i] == 0.0) {
      if (apex[i] < box.lo[i] || apex[i] > box.hi[i]) return false;
      continue;
    }
    double a = (box.lo[i] - apex[i]) / dir[i];
    double b = (box.hi[i] - apex[i]) / dir[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t1 <= t0) return false;
  }
  *lo = t0;
  *hi = t1;
  return true;
}

namespace {

double level_tol(const QuadratureSpec& spec, int level) {
  return std::max(spec.rel_tol * std::pow(0.1, level), 5e-15);
}

// Distances from the apex to the faces, edges and corners of the region
// restricted to coordinates [first, d).
std::vector<double> squared_offsets(const Event& apex, const Box& region,
                                    int first) {
  std::vector<double> acc{0.0};
  for (int i = first; i < region.dim(); ++i) {
    std::vector<double> opts;
    if (apex[i] >= region.lo[i] && apex[i] <= region.hi[i]) opts.push_back(0.0);
    double a = region.lo[i] - apex[i];
    double b = region.hi[i] - apex[i];
    opts.push_back(a * a);
    opts.push_back(b * b);
    std::vector<double> next;
    next.reserve(acc.size() * opts.size());
    for (double s : acc) {
      for (double o : opts) next.push_back(s + o);
    }
    acc.swap(next);
  }
  std::sort(acc.begin(), acc.end());
  acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
  return acc;
}

template <class T>
struct BoxIntegrator {
  const EventField<T>& field;
  const Box& region;
  const QuadratureSpec& spec;
  const std::optional<ConeSurface>& cone;
  int d;
  long evals = 0;
  std::vector<std::vector<double>> offsets;  // per level, for cone cuts

  T level(int lev, Event& p) {
    if (lev == d) {
      ++evals;
      return field(p);
    }
    double lo = region.lo[lev];
    double hi = region.hi[lev];
    std::vector<double> cuts;
    bool use_cone = cone.has_value() && spec.cone_aligned;
    if (cone.has_value()) {
      const Event& x = cone->apex;
      if (lev == 0) {
        if (cone->nappe > 0) lo = std::max(lo, x[0]);
        if (cone->nappe < 0) hi = std::min(hi, x[0]);
        if (use_cone) {
          cuts.push_back(x[0]);
          for (double o : offsets[0]) {
            double r = std::sqrt(o);
            cuts.push_back(x[0] + r);
            cuts.push_back(x[0] - r);
          }
        }
      } else {
        double dt = p[0] - x[0];
        double R = dt * dt;
        for (int i = 1; i < lev; ++i) {
          double dx = p[i] - x[i];
          R -= dx * dx;
        }
        if (cone->nappe != 0) {
          if (R < 0.0 || dt * cone->nappe < 0.0) return zero_value(p);
          double s = std::sqrt(R);
          lo = std::max(lo, x[lev] - s);
          hi = std::min(hi, x[lev] + s);
        }
        if (use_cone && R >= 0.0) {
          cuts.push_back(x[lev]);
          for (double o : offsets[lev]) {
            if (o > R) break;
            double s = std::sqrt(R - o);
            cuts.push_back(x[lev] + s);
            cuts.push_back(x[lev] - s);
          }
        }
      }
    }
    if (!(hi > lo)) return zero_value(p);
    QuadratureSpec sub = spec;
    sub.rel_tol = level_tol(spec, lev);
    auto inner = [&](double v) {
      double save = p[lev];
      p[lev] = v;
      T out = level(lev + 1, p);
      p[lev] = save;
      return out;
    };
    if (!use_cone) {
      return adaptive_integrate<T>(inner, lo, hi, sub).value;
    }
    // Piecewise clustering substitution: piece k maps v in [k, k+1].
    std::vector<double> edges{lo};
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts) {
      if (c > edges.back() + 1e-13 * (hi - lo) && c < hi - 1e-13 * (hi - lo)) {
        edges.push_back(c);
      }
    }
    edges.push_back(hi);
    int pieces = static_cast<int>(edges.size()) - 1;
    auto mapped = [&](double v) {
      int k = std::min(static_cast<int>(std::floor(v)), pieces - 1);
      double u = v - k;
      double a = edges[static_cast<std::size_t>(k)];
      double w = edges[static_cast<std::size_t>(k) + 1] - a;
      double m = u * u * (3.0 - 2.0 * u);
      double dm = 6.0 * u * (1.0 - u);
      T val = inner(a + w * m);
      T out;
      quad_detail::zero_like(out, val);
      quad_detail::axpy(out, w * dm, val);
      return out;
    };
    std::vector<double> bps;
    for (int k = 1; k < pieces; ++k) bps.push_back(k);
    return adaptive_integrate<T>(mapped, 0.0, static_cast<double>(pieces), sub,
                                 bps)
        .value;
  }

  T zero_value(const Event& p) {
    // Shape probe for vector-valued fields; scalar types ignore it.
    if constexpr (std::is_same_v<T, double> ||
                  std::is_same_v<T, std::complex<double>>) {
      (void)p;
      return T{};
    } else {
      T v = field(p);
      T z;
      quad_detail::zero_like(z, v);
      return z;
    }
  }
};

}  // namespace

template <class T>
QuadResult<T> integrate_box(const EventField<T>& field, const Box& region,
                            const QuadratureSpec& spec,
                            const std::optional<ConeSurface>& cone) {
  spec.validate();
  BoxIntegrator<T> integ{field, region, spec, cone, region.dim(), 0, {}};
  if (cone.has_value()) {
    for (int lev = 0; lev < region.dim(); ++lev) {
      integ.offsets.push_back(squared_offsets(cone->apex, region, lev + 1));
    }
  }
  Event p = region.center();
  QuadResult<T> res;
  res.value = integ.level(0, p);
  res.evaluations = integ.evals;
  return res;
}

template QuadResult<double> integrate_box<double>(
    const EventField<double>&, const Box&, const QuadratureSpec&,
    const std::optional<ConeSurface>&);
template QuadResult<std::complex<double>> integrate_box<std::complex<double>>(
    const EventField<std::complex<double>>&, const Box&, const QuadratureSpec&,
    const std::optional<ConeSurface>&);

QuadResult<std::complex<double>> integrate(
    const EventField<std::complex<double>>& field, const Box& region,
    const QuadratureSpec& spec, const std::optional<ConeSurface>& cone) {
  return integrate_box<std::complex<double>>(field, region, spec, cone);
}

QuadResult<double> integrate(const EventField<double>& field, const Box& region,
                             const QuadratureSpec& spec,
                             const std::optional<ConeSurface>& cone) {
  return integrate_box<double>(field, region, spec, cone);
}

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

// Angular range [lo, hi] of the planar rectangle [ax0,ax1]x[ay0,ay1] (relative
// to the origin) as seen from the origin. Full circle when it contains it.
void planar_angle_range(double ax0, double ax1, double ay0, double ay1,
                        double* lo, double* hi) {
  if (ax0 <= 0.0 && ax1 >= 0.0 && ay0 <= 0.0 && ay1 >= 0.0) {
    *lo = 0.0;
    *hi = 2.0 * kPi;
    return;
  }
  double cx = 0.5 * (ax0 + ax1), cy = 0.5 * (ay0 + ay1);
  double ref = std::atan2(cy, cx);
  double mn = 0.0, mx = 0.0;
  const double xs[2] = {ax0, ax1}, ys[2] = {ay0, ay1};
  for (double x : xs) {
    for (double y : ys) {
      double a = std::atan2(y, x) - ref;
      while (a > kPi) a -= 2.0 * kPi;
      while (a < -kPi) a += 2.0 * kPi;
      mn = std::min(mn, a);
      mx = std::max(mx, a);
    }
  }
  *lo = ref + mn;
  *hi = ref + mx;
}

// Hyperbolic-angle window [elo, ehi] of the rays apex + t (nappe, v w), t > 0,
// that meet the region, where w holds the spatial direction (unit for d >= 3;
// the single component 1 for d = 2, where v may be negative). With
// u = t v the constraints separate: t in [t0, t1], u in [u0, u1], and v = u / t
// is extremal at the corners. False when no ray meets the region.
bool eta_window(const Event& apex, int nappe, const Box& region,
                const double* w, bool signed_speed, double eta_max,
                double* elo, double* ehi) {
  const int d = apex.dim();
  double t0 = nappe > 0 ? region.lo[0] - apex[0] : apex[0] - region.hi[0];
  double t1 = nappe > 0 ? region.hi[0] - apex[0] : apex[0] - region.lo[0];
  t0 = std::max(t0, 0.0);
  if (!(t1 > t0)) return false;
  double u0 = signed_speed ? -std::numeric_limits<double>::infinity() : 0.0;
  double u1 = std::numeric_limits<double>::infinity();
  for (int i = 1; i < d; ++i) {
    double a = region.lo[i] - apex[i];
    double b = region.hi[i] - apex[i];
    double wi = w[i - 1];
    if (wi == 0.0) {
      if (a > 0.0 || b < 0.0) return false;
      continue;
    }
    a /= wi;
    b /= wi;
    if (a > b) std::swap(a, b);
    u0 = std::max(u0, a);
    u1 = std::min(u1, b);
  }
  if (!(u1 >= u0)) return false;
  auto ratio = [](double u, double t) {
    if (t > 0.0) return u / t;
    if (u > 0.0) return std::numeric_limits<double>::infinity();
    if (u < 0.0) return -std::numeric_limits<double>::infinity();
    return 0.0;
  };
  double vlo = std::min({ratio(u0, t0), ratio(u0, t1)});
  double vhi = std::max({ratio(u1, t0), ratio(u1, t1)});
  auto to_eta = [eta_max](double v) {
    if (v >= 1.0) return eta_max;
    if (v <= -1.0) return -eta_max;
    return std::clamp(std::atanh(v), -eta_max, eta_max);
  };
  *elo = to_eta(vlo);
  *ehi = to_eta(vhi);
  if (!signed_speed) *elo = std::max(*elo, 0.0);
  return *ehi > *elo;
}

// Polar-angle range of the spatial box (axes 1..3) seen from the apex, with
// the polar axis along axis 3.
void polar_angle_range(const Event& apex, const Box& region, double* lo,
                       double* hi) {
  double x0 = region.lo[1] - apex[1], x1 = region.hi[1] - apex[1];
  double y0 = region.lo[2] - apex[2], y1 = region.hi[2] - apex[2];
  double rx_min = (x0 <= 0.0 && x1 >= 0.0) ? 0.0 : std::min(std::abs(x0), std::abs(x1));
  double ry_min = (y0 <= 0.0 && y1 >= 0.0) ? 0.0 : std::min(std::abs(y0), std::abs(y1));
  double rx_max = std::max(std::abs(x0), std::abs(x1));
  double ry_max = std::max(std::abs(y0), std::abs(y1));
  double rho_min = std::hypot(rx_min, ry_min);
  double rho_max = std::hypot(rx_max, ry_max);
  *lo = std::atan2(rho_min, region.hi[3] - apex[3]);
  *hi = std::atan2(rho_max, region.lo[3] - apex[3]);
}

// Initial angular panels of at most 1.5 radians.
std::vector<double> angle_cuts(double lo, double hi) {
  int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / 1.5)));
  std::vector<double> c;
  for (int i = 1; i < n; ++i) c.push_back(lo + (hi - lo) * i / n);
  return c;
}

}  // namespace

template <class T>
QuadResult<T> integrate_nappe(const NappeRayFactory<T>& factory,
                              const Event& apex, int nappe, const Box& region,
                              const QuadratureSpec& spec, double eta_max,
                              double tau_power) {
  spec.validate();
  const int d = apex.dim();
  if (d < 2 || d > 4) {
    throw std::invalid_argument("integrate_nappe: dimension must be 2, 3 or 4");
  }
  if (nappe != 1 && nappe != -1) {
    throw std::invalid_argument("integrate_nappe: nappe must be +1 or -1");
  }
  QuadResult<T> res;

  // Zero of the right shape for results that never touch the integrand.
  auto shaped_zero = [&]() {
    NappeDirection nd;
    nd.direction = Event(d);
    nd.direction[0] = nappe;
    T v = factory(nd)(0.0);
    T z;
    quad_detail::zero_like(z, v);
    return z;
  };

  // Quick reject: the region has no point in the closed nappe.
  {
    double thi = nappe > 0 ? region.hi[0] - apex[0] : apex[0] - region.lo[0];
    double r2 = 0.0;
    for (int i = 1; i < d; ++i) {
      double dx = std::max({region.lo[i] - apex[i], apex[i] - region.hi[i], 0.0});
      r2 += dx * dx;
    }
    if (thi < 0.0 || thi * thi < r2) {
      res.value = shaped_zero();
      return res;
    }
  }

  long evals = 0;
  auto level_spec = [&](int level) {
    QuadratureSpec s = spec;
    s.rel_tol = level_tol(spec, level);
    return s;
  };
  T zero = shaped_zero();

  auto radial = [&](const Event& dir, double eta, double sech2, double jac) {
    double lo = 0.0, hi = 0.0;
    if (!ray_box_interval(apex, dir, region, &lo, &hi)) return zero;
    NappeDirection nd{dir, eta, sech2, lo, hi};
    RadialIntegrand<T> f = factory(nd);
    auto g = [&](double tau) {
      ++evals;
      T v = f(tau);
      T out;
      quad_detail::zero_like(out, v);
      quad_detail::axpy(out, jac * std::pow(tau, d - 1), v);
      return out;
    };
    // Rays from inside the region start at the apex, where the integrand
    // behaves like tau^tau_power.
    std::vector<double> cuts;
    if (lo == 0.0 && tau_power < 2.0) {
      for (double c = hi / 4.0; c > hi * 1e-6; c /= 4.0) cuts.push_back(c);
    }
    return adaptive_integrate<T>(g, lo, hi, level_spec(d - 1), cuts).value;
  };

  // Hyperbolic angle breakpoints: the integrand varies on O(1) scales near
  // eta = 0 and decays exponentially beyond.
  auto eta_integral = [&](const double* w, bool signed_speed, double jac) {
    double elo = 0.0, ehi = 0.0;
    if (!eta_window(apex, nappe, region, w, signed_speed, eta_max, &elo,
                    &ehi)) {
      return zero;
    }
    std::vector<double> cuts;
    for (double e : {0.5, 1.5, 3.0, 6.0, 12.0, 20.0}) {
      cuts.push_back(e);
      cuts.push_back(-e);
    }
    cuts.push_back(0.0);
    auto f_eta = [&](double eta) {
      double th = std::tanh(eta);
      double ch = std::cosh(eta);
      double sech2 = 1.0 / (ch * ch);
      Event dir(d);
      dir[0] = nappe;
      for (int i = 1; i < d; ++i) dir[i] = th * w[i - 1];
      return radial(dir, eta, sech2, jac * sech2 * std::pow(std::abs(th), d - 2));
    };
    return adaptive_integrate<T>(f_eta, elo, ehi, level_spec(d - 2), cuts)
        .value;
  };

  if (d == 2) {
    const double w[1] = {1.0};
    res.value = eta_integral(w, true, 1.0);
  } else {
    double plo = 0.0, phi_hi = 2.0 * kPi;
    planar_angle_range(region.lo[1] - apex[1], region.hi[1] - apex[1],
                       region.lo[2] - apex[2], region.hi[2] - apex[2], &plo,
                       &phi_hi);
    auto phi_integral = [&](double st, double ct, double jac) {
      auto f_phi = [&](double phi) {
        const double w[3] = {st * std::cos(phi), st * std::sin(phi), ct};
        return eta_integral(w, false, jac);
      };
      return adaptive_integrate<T>(f_phi, plo, phi_hi, level_spec(d - 3),
                                   angle_cuts(plo, phi_hi));
    };
    if (d == 3) {
      auto r = phi_integral(1.0, 0.0, 1.0);
      res.value = r.value;
      res.error = r.error;
      res.l1 = r.l1;
    } else {
      double tlo = 0.0, thi = kPi;
      polar_angle_range(apex, region, &tlo, &thi);
      auto f_theta = [&](double theta) {
        double st = std::sin(theta);
        return phi_integral(st, std::cos(theta), st).value;
      };
      auto r = adaptive_integrate<T>(f_theta, tlo, thi, level_spec(0),
                                     angle_cuts(tlo, thi));
      res.value = r.value;
      res.error = r.error;
      res.l1 = r.l1;
    }
  }
  res.evaluations = evals;
  return res;
}

template QuadResult<std::complex<double>> integrate_nappe<std::complex<double>>(
    const NappeRayFactory<std::complex<double>>&, const Event&, int, const Box&,
    const QuadratureSpec&, double, double);
template QuadResult<std::vector<std::complex<double>>>
integrate_nappe<std::vector<std::complex<double>>>(
    const NappeRayFactory<std::vector<std::complex<double>>>&, const Event&,
    int, const Box&, const QuadratureSpec&, double, double);

}  // namespace hadamard
