#include "hadamard/expansion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hadamard/errors.hpp"

namespace hadamard {

namespace {

std::shared_ptr<const HadamardFamily> family_for(
    const OperatorSpec& op, int K, std::shared_ptr<const HadamardFamily> given) {
  if (given) {
    if (given->max_index() < K) {
      throw std::invalid_argument("expansion: family has too few coefficients");
    }
    return given;
  }
  return std::make_shared<HadamardFamily>(hadamard_family(op, std::max(K, 0)));
}

JetFieldPtr folded_field(const HadamardFamily& fam, int k, const Event& x,
                         const TestFunction& phi) {
  return std::make_shared<ProductField>(fam.coefficient_field(k, x),
                                        make_bump_field(phi));
}

// Gamma(y, x) bound over the support of phi for the resolvent tail test.
double max_gamma(const Box& s, const Event& x) {
  double g = 0.0;
  for (double t : {s.lo[0], s.hi[0]}) {
    double dt = t - x[0];
    double dx = 0.0;
    for (int i = 1; i < s.dim(); ++i) {
      double e = std::max({0.0, s.lo[i] - x[i], x[i] - s.hi[i]});
      dx += e * e;
    }
    g = std::max(g, dt * dt - dx);
  }
  return g;
}

// R(z, 2m)[f] = sum_j gbinom(m+j-1, j) z^j R(2j+2m)[f] for a general field.
cplx resolvent_series_pair(int sign, cplx z, int m, const ModelPtr& model,
                           const JetFieldPtr& f, const Event& x,
                           const QuadratureSpec& quad) {
  if (model->dimension() != 2) {
    throw RegimeError("resolvent Riesz series is implemented for d = 2 only");
  }
  Box s = f->support() ? *f->support() : model->domain();
  double g = max_gamma(s, x);
  RieszDistribution R{sign, 0.0, model};
  cplx sum = 0.0;
  double mag = 0.0;
  for (int j = 0; j < 200; ++j) {
    R.alpha = 2.0 * (j + m);
    cplx term = to_double(gbinom(m + j - 1, j)) * std::pow(z, j) *
                riesz_pair(R, f, x, quad);
    sum += term;
    mag += std::abs(term);
    double ratio = std::abs(z) * g / (4.0 * (j + 1) * (j + m));
    if (z == cplx(0.0)) return sum;
    if (ratio < 0.5 && 2.0 * ratio * std::abs(term) <= 1e-13 * mag) return sum;
  }
  throw ConvergenceError("resolvent Riesz series did not converge", sum, mag);
}

void require_flat(const OperatorSpec& op, const char* what) {
  if (!op.model || !op.model->is_flat()) {
    throw RegimeError(std::string(what) + " needs the flat backend");
  }
}

}  // namespace

cplx TruncatedExpansion::numeric_coefficient(const ExpansionTerm& t) const {
  return to_double(t.coefficient) * std::pow(z, t.z_power);
}

TruncatedExpansion power_expansion(const OperatorSpec& op, int m, int N, int sign,
                                   std::shared_ptr<const HadamardFamily> family) {
  if (N < 0) throw std::invalid_argument("power_expansion: N < 0");
  TruncatedExpansion T;
  T.op = op;
  T.sign = sign;
  T.m = m;
  T.N = N;
  for (int k = 0; k <= N; ++k) {
    Rational c = gbinom(m + k - 1, k);
    if (c == 0) continue;
    ExpansionTerm t;
    t.coefficient = c;
    t.k = k;
    t.order = 2 * k + 2 * m;
    T.terms.push_back(t);
  }
  int K = 0;
  for (const auto& t : T.terms) K = std::max(K, t.k);
  T.family = family_for(op, K, std::move(family));
  return T;
}

RemainderTerm remainder_term(const OperatorSpec& op, int m, int N, int sign,
                             std::shared_ptr<const HadamardFamily> family) {
  if (N < 0) throw std::invalid_argument("remainder_term: N < 0");
  RemainderTerm E;
  E.coefficient = gbinom(N + m, N);
  E.N = N;
  E.order = 2 * N + 2 * m + 2;
  E.op = op;
  E.sign = sign;
  E.family = family_for(op, N, std::move(family));
  return E;
}

TruncatedExpansion double_expansion(const OperatorSpec& op, cplx z, int N_k,
                                    int N_m, int sign,
                                    std::shared_ptr<const HadamardFamily> family) {
  if (N_k < 0 || N_m < 0) throw std::invalid_argument("double_expansion: negative truncation");
  TruncatedExpansion T;
  T.op = op;
  T.sign = sign;
  T.m = 1;
  T.N = N_k;
  T.z = z;
  for (int k = 0; k <= N_k; ++k) {
    for (int j = 0; j <= N_m; ++j) {
      ExpansionTerm t;
      t.coefficient = gbinom(k + j, k);
      t.z_power = j;
      t.k = k;
      t.j = j;
      t.order = 2 * k + 2 * j + 2;
      T.terms.push_back(t);
    }
  }
  T.family = family_for(op, N_k, std::move(family));
  return T;
}

TruncatedExpansion resolvent_expansion(const OperatorSpec& op, cplx z, int m,
                                       int N, int sign,
                                       std::shared_ptr<const HadamardFamily> family) {
  if (m < 1) throw std::invalid_argument("resolvent_expansion: m >= 1 required");
  if (N < 0) throw std::invalid_argument("resolvent_expansion: N < 0");
  TruncatedExpansion T;
  T.op = op;
  T.sign = sign;
  T.m = m;
  T.N = N;
  T.z = z;
  for (int k = 0; k <= N; ++k) {
    ExpansionTerm t;
    t.coefficient = gbinom(k + m - 1, k);
    t.k = k;
    t.kind = RieszKind::Resolvent;
    t.order = 2 * k + 2 * m;
    T.terms.push_back(t);
  }
  T.family = family_for(op, N, std::move(family));
  return T;
}

cplx expansion_eval(const TruncatedExpansion& T, const Event& y, const Event& x) {
  const ModelPtr& model = T.op.model;
  cplx sum = 0.0;
  for (const auto& t : T.terms) {
    cplx c = T.numeric_coefficient(t);
    if (c == cplx(0.0)) continue;
    cplx V = T.family->value(t.k, y, x);
    if (V == cplx(0.0)) continue;
    cplx R;
    if (t.kind == RieszKind::Standard) {
      R = riesz_eval(RieszDistribution{T.sign, static_cast<double>(t.order), model}, y, x);
    } else {
      ResolventRiesz RR{T.sign, T.z, t.order / 2, model};
      R = resolvent_riesz_eval(RR, y, x);
    }
    sum += c * V * R;
  }
  return sum;
}

std::vector<cplx> pair_terms(const TruncatedExpansion& T, const TestFunction& phi,
                             const Event& x, const QuadratureSpec& quad) {
  const ModelPtr& model = T.op.model;
  const HadamardFamily& fam = *T.family;
  std::vector<cplx> out;
  out.reserve(T.terms.size());
  for (const auto& t : T.terms) {
    cplx c = T.numeric_coefficient(t);
    if (c == cplx(0.0)) {
      out.push_back(0.0);
      continue;
    }
    cplx v;
    if (fam.closed_form()) {
      // Constant V^k: keep the plain bump and use the product-structure path.
      cplx Vk = fam.closed_values()[static_cast<std::size_t>(t.k)];
      if (Vk == cplx(0.0)) {
        out.push_back(0.0);
        continue;
      }
      if (t.kind == RieszKind::Standard) {
        RieszDistribution R{T.sign, static_cast<double>(t.order), model};
        v = Vk * riesz_pair(R, phi, x, quad);
      } else {
        ResolventRiesz RR{T.sign, T.z, t.order / 2, model};
        v = Vk * resolvent_riesz_pair(RR, phi, x, quad);
      }
    } else {
      JetFieldPtr f = folded_field(fam, t.k, x, phi);
      if (t.kind == RieszKind::Standard) {
        RieszDistribution R{T.sign, static_cast<double>(t.order), model};
        v = riesz_pair(R, f, x, quad);
      } else {
        v = resolvent_series_pair(T.sign, T.z, t.order / 2, model, f, x, quad);
      }
    }
    out.push_back(c * v);
  }
  return out;
}

cplx expansion_pair(const TruncatedExpansion& T, const TestFunction& phi,
                    const Event& x, const QuadratureSpec& quad) {
  cplx sum = 0.0;
  for (cplx v : pair_terms(T, phi, x, quad)) sum += v;
  return sum;
}

cplx remainder_pair(const RemainderTerm& E, const TestFunction& phi,
                    const Event& x, const QuadratureSpec& quad) {
  cplx c = to_double(E.coefficient);
  if (c == cplx(0.0)) return 0.0;
  RieszDistribution R{E.sign, static_cast<double>(E.order), E.op.model};
  if (E.closed_form()) {
    cplx PV = (E.op.potential.constant_part() - E.op.z) *
              E.family->closed_values()[static_cast<std::size_t>(E.N)];
    if (PV == cplx(0.0)) return 0.0;
    return c * PV * riesz_pair(R, phi, x, quad);
  }
  auto PV = std::make_shared<OperatorAppliedField>(
      E.op, E.family->coefficient_field(E.N, x));
  auto f = std::make_shared<ProductField>(PV, make_bump_field(phi));
  return c * riesz_pair(R, f, x, quad);
}

std::vector<TermRow> term_table(const TruncatedExpansion& T) {
  std::vector<TermRow> rows;
  for (const auto& t : T.terms) {
    rows.push_back(TermRow{t.k, t.j, to_string(t.coefficient), t.z_power, t.order,
                           t.kind == RieszKind::Standard ? "standard" : "resolvent"});
  }
  return rows;
}

std::string format_terms(const TruncatedExpansion& T) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : T.terms) {
    if (!first) os << ", ";
    first = false;
    os << to_string(t.coefficient);
    if (t.z_power == 1) os << "·z";
    if (t.z_power > 1) os << "·z^" << t.z_power;
    os << "·V" << t.k << "·R(";
    if (t.kind == RieszKind::Resolvent) os << "z,";
    os << t.order << ")";
  }
  return os.str();
}

LedgerReport ledger_identity_check(const OperatorSpec& op, int m, int N,
                                   const std::vector<TestFunction>& probes,
                                   const Event& x, const QuadratureSpec& quad,
                                   int sign) {
  require_flat(op, "ledger_identity_check");
  if (m < 0) throw std::invalid_argument("ledger_identity_check: m >= 0 required");
  if (N < 0) throw std::invalid_argument("ledger_identity_check: N < 0");
  auto fam = std::make_shared<HadamardFamily>(hadamard_family(op, N));
  const ModelPtr& model = op.model;
  TruncatedExpansion rhs_terms = power_expansion(op, m, N, sign, fam);
  RemainderTerm E = remainder_term(op, m, N, sign, fam);

  LedgerReport rep;
  for (const TestFunction& phi : probes) {
    cplx lhs = 0.0;
    for (int k = 0; k <= N; ++k) {
      cplx c = to_double(gbinom(m + k, k));
      RieszDistribution R{sign, 2.0 * (k + m + 1), model};
      if (fam->closed_form()) {
        cplx Vk = fam->closed_values()[static_cast<std::size_t>(k)];
        if (Vk == cplx(0.0)) continue;
        // P phi = box phi + (b - z) phi with constant b.
        cplx shift = op.potential.constant_part() - op.z;
        cplx v = riesz_pair(R, phi, x, quad, PairingRoute::Continuation, 1);
        if (shift != cplx(0.0)) v += shift * riesz_pair(R, phi, x, quad);
        lhs += c * Vk * v;
      } else {
        auto Pphi = std::make_shared<OperatorAppliedField>(op, make_bump_field(phi));
        auto f = std::make_shared<ProductField>(fam->coefficient_field(k, x), Pphi);
        lhs += c * riesz_pair(R, f, x, quad);
      }
    }
    cplx rhs = expansion_pair(rhs_terms, phi, x, quad) + remainder_pair(E, phi, x, quad);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    double r = std::abs(lhs - rhs);
    rep.residual.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return rep;
}

RemainderProbe remainder_probe(
    const std::function<cplx(const TestFunction&)>& exact,
    const std::function<TruncatedExpansion(int)>& expansion,
    const TestFunction& phi, const Event& x, const std::vector<int>& truncations,
    const std::vector<double>& scales, const QuadratureSpec& quad) {
  RemainderProbe P;
  P.scales = scales;
  P.truncations = truncations;
  std::vector<TestFunction> shrunk;
  std::vector<cplx> reference;
  for (double s : scales) {
    TestFunction ps = phi;
    for (int i = 0; i < phi.dim(); ++i) {
      ps.center[i] = x[i] + s * (phi.center[i] - x[i]);
      ps.half_widths[i] = s * phi.half_widths[i];
    }
    shrunk.push_back(ps);
    reference.push_back(exact(ps));
  }
  for (int n : truncations) {
    TruncatedExpansion T = expansion(n);
    std::vector<double> row;
    for (std::size_t i = 0; i < shrunk.size(); ++i) {
      row.push_back(std::abs(reference[i] - expansion_pair(T, shrunk[i], x, quad)));
    }
    P.errors.push_back(std::move(row));
  }
  return P;
}

}  // namespace hadamard
