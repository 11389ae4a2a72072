#include "hadamard/riesz.hpp"

#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "hadamard/errors.hpp"
#include "hadamard/special.hpp"
#include "riesz_separable.hpp"

namespace hadamard {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

bool is_real_integer(cplx a) {
  return a.imag() == 0.0 && a.real() == std::floor(a.real()) &&
         std::abs(a.real()) < 1e6;
}

// Gamma(n/2) for integer n >= 1 as q * sqrt(pi)^e, e in {0, 1}; for n <= 0
// odd uses the reflection values. Returns false at poles (n <= 0 even).
bool gamma_half(int n, Rational* q, int* sqrt_pi) {
  if (n % 2 == 0) {
    if (n <= 0) return false;
    BigInt f = 1;
    for (int i = 2; i < n / 2; ++i) f *= i;
    *q = Rational(f);
    *sqrt_pi = 0;
    return true;
  }
  // Half-integer argument a = n/2.
  *sqrt_pi = 1;
  if (n > 0) {
    // Gamma(k + 1/2) = (2k)! / (4^k k!) sqrt(pi), with k = (n-1)/2.
    int k = (n - 1) / 2;
    BigInt num = 1, den = 1;
    for (int i = 1; i <= 2 * k; ++i) num *= i;
    for (int i = 1; i <= k; ++i) den *= 4 * i;
    *q = Rational(num, den);
  } else {
    // Gamma(1/2 - k) = (-4)^k k! / (2k)! sqrt(pi), with k = (1-n)/2.
    int k = (1 - n) / 2;
    BigInt num = 1, den = 1;
    for (int i = 1; i <= k; ++i) num *= -4 * i;
    for (int i = 1; i <= 2 * k; ++i) den *= i;
    *q = Rational(num, den);
  }
  return true;
}

}  // namespace

double ExactRieszConstant::value() const {
  return to_double(q) * std::pow(kPi, 0.5 * pi_half_power);
}

ExactRieszConstant riesz_constant_exact(int alpha, int d) {
  ExactRieszConstant c;
  Rational q1, q2;
  int s1 = 0, s2 = 0;
  if (!gamma_half(alpha, &q1, &s1) || !gamma_half(alpha - d + 2, &q2, &s2)) {
    c.q = 0;
    return c;
  }
  Rational two_pow = 1;
  int e = 1 - alpha;
  for (int i = 0; i < std::abs(e); ++i) two_pow *= 2;
  if (e < 0) two_pow = Rational(1) / two_pow;
  c.q = two_pow / (q1 * q2);
  c.pi_half_power = (2 - d) - s1 - s2;
  return c;
}

cplx riesz_constant(cplx alpha, int d) {
  if (is_real_integer(alpha)) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, double> cache;
    int a = static_cast<int>(alpha.real());
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({a, d});
    if (it != cache.end()) return it->second;
    double v = riesz_constant_exact(a, d).value();
    cache.emplace(std::make_pair(a, d), v);
    return v;
  }
  cplx g1 = alpha / 2.0;
  cplx g2 = (alpha - static_cast<double>(d) + 2.0) / 2.0;
  if (is_gamma_pole(g1) || is_gamma_pole(g2)) return 0.0;
  if (alpha.imag() == 0.0) {
    double a = alpha.real();
    return std::pow(2.0, 1.0 - a) * std::pow(kPi, 0.5 * (2 - d)) /
           (std::tgamma(g1.real()) * std::tgamma(g2.real()));
  }
  cplx log_c = (1.0 - alpha) * std::log(2.0) + 0.5 * (2 - d) * std::log(kPi) -
               lgamma_complex(g1) - lgamma_complex(g2);
  return std::exp(log_c);
}

namespace {

void require_flat(const RieszDistribution& R) {
  if (!R.model) throw std::invalid_argument("Riesz distribution without model");
  if (!R.model->is_flat()) {
    throw RegimeError(
        "Riesz pairings below the function regime need the flat backend");
  }
  if (R.sign != 1 && R.sign != -1) {
    throw std::invalid_argument("Riesz sign must be +1 or -1");
  }
}

// Gamma^beta with Gamma >= 0 and the convention 0^beta = 0 unless beta = 0.
cplx gamma_power(double g, cplx beta) {
  if (g <= 0.0) return beta == cplx(0.0) ? cplx(1.0) : cplx(0.0);
  if (beta.imag() == 0.0) return std::pow(g, beta.real());
  return std::exp(beta * std::log(g));
}

}  // namespace

cplx riesz_eval(const RieszDistribution& R, const Event& y, const Event& x) {
  if (!R.model) throw std::invalid_argument("Riesz distribution without model");
  const int d = R.model->dimension();
  if (R.alpha.real() < d) {
    std::ostringstream os;
    os << "riesz_eval: Re alpha = " << R.alpha.real() << " < d = " << d
       << "; use riesz_pair for distributional orders";
    throw RegimeError(os.str());
  }
  R.model->require_inside(y);
  R.model->require_inside(x);
  CausalRelation rel = R.model->causal_relation(y, x);
  bool in = rel == CausalRelation::Equal ||
            (R.sign > 0 ? is_future_type(rel) : is_past_type(rel));
  if (!in) return 0.0;
  double g = std::max(0.0, R.model->world_function(y, x));
  cplx beta = (R.alpha - static_cast<double>(d)) / 2.0;
  return riesz_constant(R.alpha, d) * gamma_power(g, beta);
}

int continuation_steps(cplx alpha, int d) {
  int k = 0;
  while (alpha.real() + 2 * k < d + 2) ++k;
  return k;
}

bool is_diagonal_order(cplx alpha) {
  return alpha.imag() == 0.0 && alpha.real() <= 0.0 &&
         std::fmod(alpha.real(), 2.0) == 0.0;
}

double nappe_eta_max(double re_alpha, int d) {
  // Kernel times Jacobian decays like exp(-(re_alpha - d + 2) eta).
  double rate = re_alpha - d + 2.0;
  double e = 40.0 / std::max(rate, 1e-3);
  return std::clamp(e, 4.0, 36.0);
}

namespace {

template <class PointFn>
cplx pair_with_kernel(const RieszDistribution& R, cplx alpha_k,
                      const std::optional<Box>& support, const Event& x,
                      const QuadratureSpec& quad, const PointFn& make_ray_fn) {
  const int d = R.model->dimension();
  Box region = R.model->domain();
  if (support) {
    Box cut;
    if (!intersect(region, *support, &cut)) return 0.0;
    region = cut;
  }
  cplx c = riesz_constant(alpha_k, d);
  if (c == cplx(0.0)) return 0.0;
  cplx beta = (alpha_k - static_cast<double>(d)) / 2.0;
  NappeRayFactory<cplx> factory = [&](const NappeDirection& nd) {
    auto ray_fn = make_ray_fn(nd);
    double sech2 = nd.sech2;
    return RadialIntegrand<cplx>([=](double tau) {
      cplx k = c * gamma_power(tau * tau * sech2, beta);
      return k * ray_fn(tau);
    });
  };
  return integrate_nappe<cplx>(factory, x, R.sign, region, quad,
                               nappe_eta_max(alpha_k.real(), d),
                               alpha_k.real() - 1.0)
      .value;
}

void check_route(const RieszDistribution& R, PairingRoute route, int d) {
  if (route == PairingRoute::Direct && !(R.alpha.real() > d - 2)) {
    throw RegimeError("direct pairing needs Re alpha > d - 2");
  }
}

}  // namespace

cplx riesz_pair(const RieszDistribution& R, const JetFieldPtr& f,
                const Event& x, const QuadratureSpec& quad,
                PairingRoute route) {
  require_flat(R);
  const int d = R.model->dimension();
  R.model->require_inside(x);
  if (f->dim() != d) throw std::invalid_argument("riesz_pair: dim mismatch");
  if (is_diagonal_order(R.alpha)) {
    int j = static_cast<int>(-R.alpha.real() / 2.0);
    if (2 * j > kMaxTestDerivative) {
      throw UnsupportedOrderError("riesz_pair: box power too high");
    }
    if (j == 0) return f->value(x);
    auto set = MultiIndexSet::get(d, 2 * j);
    std::vector<cplx> jet(static_cast<std::size_t>(set->size()));
    f->jet(x, *set, 2 * j, jet.data());
    cplx out;
    apply_box_power_to_jet(*set, j, 0, jet.data(), &out);
    return out;
  }
  check_route(R, route, d);
  int k = route == PairingRoute::Continuation ? continuation_steps(R.alpha, d) : 0;
  if (2 * k > kMaxTestDerivative) {
    throw UnsupportedOrderError("riesz_pair: continuation needs too many derivatives");
  }
  JetFieldPtr g = k > 0 ? std::make_shared<BoxPowerField>(f, k) : f;
  auto make = [&](const NappeDirection& nd) {
    Event to = x + nd.tau_hi * nd.direction;
    std::shared_ptr<RaySampler> s(g->along_ray(x, to, 0).release());
    double inv = 1.0 / nd.tau_hi;
    return [s, inv](double tau) { return s->value(tau * inv); };
  };
  return pair_with_kernel(R, R.alpha + 2.0 * k, f->support(), x, quad, make);
}

cplx riesz_pair(const RieszDistribution& R, const TestFunction& phi,
                const Event& x, const QuadratureSpec& quad, PairingRoute route,
                int box_power) {
  require_flat(R);
  const int d = R.model->dimension();
  R.model->require_inside(x);
  if (phi.dim() != d) throw std::invalid_argument("riesz_pair: dim mismatch");
  if (box_power < 0) throw std::invalid_argument("riesz_pair: negative box power");
  if (is_diagonal_order(R.alpha)) {
    int j = static_cast<int>(-R.alpha.real() / 2.0);
    return apply_box_power(phi, j + box_power, *R.model)(x);
  }
  check_route(R, route, d);
  int k = route == PairingRoute::Continuation ? continuation_steps(R.alpha, d) : 0;
  if (2 * (k + box_power) > kMaxTestDerivative) {
    throw UnsupportedOrderError("riesz_pair: continuation needs too many derivatives");
  }
  return detail::separable_riesz_pairing(R.alpha + 2.0 * k, R.sign, phi,
                                         k + box_power, x, R.model->domain(),
                                         quad);
}

cplx resolvent_riesz_eval(const ResolventRiesz& RR, const Event& y,
                          const Event& x) {
  if (!RR.model) throw std::invalid_argument("resolvent Riesz without model");
  if (RR.model->dimension() != 2) {
    throw RegimeError("resolvent Riesz series is implemented for d = 2 only");
  }
  if (RR.m < 1) throw RegimeError("resolvent Riesz order 2m needs m >= 1");
  RR.model->require_inside(y);
  RR.model->require_inside(x);
  CausalRelation rel = RR.model->causal_relation(y, x);
  bool in = rel == CausalRelation::Equal ||
            (RR.sign > 0 ? is_future_type(rel) : is_past_type(rel));
  if (!in) return 0.0;
  double g = std::max(0.0, RR.model->world_function(y, x));
  RieszDistribution R{RR.sign, 0.0, RR.model};
  cplx sum = 0.0;
  double mag = 0.0;
  for (int k = 0; k < RR.max_terms; ++k) {
    R.alpha = 2.0 * (k + RR.m);
    cplx term = to_double(gbinom(RR.m + k - 1, k)) * std::pow(RR.z, k) *
                riesz_eval(R, y, x);
    sum += term;
    mag += std::abs(term);
    // term_{k+1} / term_k = z Gamma / (4 (k+1) (k+m)).
    double ratio = std::abs(RR.z) * g / (4.0 * (k + 1) * (k + RR.m));
    if (ratio < 0.5 && 2.0 * ratio * std::abs(term) <= 1e-13 * mag) {
      return sum;
    }
    if (mag == 0.0 && k > 0) return sum;
  }
  throw ConvergenceError("resolvent Riesz series did not converge", sum, mag);
}

cplx resolvent_riesz_pair(const ResolventRiesz& RR, const TestFunction& phi,
                          const Event& x, const QuadratureSpec& quad) {
  if (!RR.model) throw std::invalid_argument("resolvent Riesz without model");
  if (RR.model->dimension() != 2) {
    throw RegimeError("resolvent Riesz series is implemented for d = 2 only");
  }
  if (RR.m < 1) throw RegimeError("resolvent Riesz order 2m needs m >= 1");
  // Largest Gamma over the support, for the tail envelope.
  Box s = phi.support();
  double gmax = 0.0;
  for (double t : {s.lo[0], s.hi[0]}) {
    double dt = t - x[0];
    double dx = std::max({0.0, s.lo[1] - x[1], x[1] - s.hi[1]});
    gmax = std::max(gmax, dt * dt - dx * dx);
  }
  double l1 = std::abs(phi.amplitude);
  for (int i = 0; i < 2; ++i) l1 *= 0.4439938161680794 * phi.half_widths[i];
  RieszDistribution R{RR.sign, 0.0, RR.model};
  cplx sum = 0.0;
  double bound_sum = 0.0;
  for (int k = 0; k < RR.max_terms; ++k) {
    R.alpha = 2.0 * (k + RR.m);
    double coef = to_double(gbinom(RR.m + k - 1, k));
    cplx term = coef * std::pow(RR.z, k) * riesz_pair(R, phi, x, quad);
    sum += term;
    double bound = std::abs(coef) * std::pow(std::abs(RR.z), k) *
                   std::abs(riesz_constant(R.alpha, 2)) *
                   std::pow(gmax, k + RR.m - 1) * l1;
    bound_sum += bound;
    double ratio = std::abs(RR.z) * gmax / (4.0 * (k + 1) * (k + RR.m));
    if (ratio < 0.5 && 2.0 * ratio * bound <= 1e-13 * bound_sum) return sum;
    if (bound_sum == 0.0) return sum;
  }
  throw ConvergenceError("resolvent Riesz pairing series did not converge", sum,
                         bound_sum);
}

}  // namespace hadamard
