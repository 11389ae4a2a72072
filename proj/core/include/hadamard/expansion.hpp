#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hadamard/geometry.hpp"
#include "hadamard/hadamard.hpp"
#include "hadamard/potential.hpp"
#include "hadamard/quadrature.hpp"
#include "hadamard/rational.hpp"
#include "hadamard/riesz.hpp"
#include "hadamard/testfn.hpp"

namespace hadamard {

enum class RieszKind {
  Standard,   // R(order)
  Resolvent,  // R(z, order) of box - z
};

/// coefficient * z^z_power * V^k * R(order) (or R(z, order)).
struct ExpansionTerm {
  Rational coefficient;
  int z_power = 0;
  int k = 0;
  /// Second summation index of the double expansion; 0 elsewhere.
  int j = 0;
  RieszKind kind = RieszKind::Standard;
  int order = 0;
};

struct TruncatedExpansion {
  OperatorSpec op;
  int sign = +1;
  int m = 1;
  int N = 0;
  /// Spectral parameter of z-powers and resolvent Riesz distributions.
  cplx z = 0.0;
  std::vector<ExpansionTerm> terms;
  /// Hadamard coefficients V^0 .. V^K of op.
  std::shared_ptr<const HadamardFamily> family;

  cplx numeric_coefficient(const ExpansionTerm& t) const;
};

/// Terms gbinom(m+k-1, k) V^k R(2k+2m), k = 0..N; zero coefficients (k+m > 0
/// for m < 0, k >= 1 for m = 0) are dropped.
TruncatedExpansion power_expansion(const OperatorSpec& op, int m, int N,
                                   int sign = +1,
                                   std::shared_ptr<const HadamardFamily> family = nullptr);

/// The remainder gbinom(N+m, N) (P V^N) R(2N+2m+2) as a single term; the
/// field is P applied to V^N rather than V^N itself.
struct RemainderTerm {
  Rational coefficient;
  int N = 0;
  int order = 0;
  OperatorSpec op;
  int sign = +1;
  std::shared_ptr<const HadamardFamily> family;
  /// Closed-form operators: P V^N is the constant -(z - b)^(N+1).
  bool closed_form() const { return family->closed_form(); }
};
RemainderTerm remainder_term(const OperatorSpec& op, int m, int N, int sign = +1,
                             std::shared_ptr<const HadamardFamily> family = nullptr);

/// Terms binom(k+j, k) z^j V^k R(2k+2j+2) for k <= N_k, j <= N_m with V^k
/// of op itself (no shift).
TruncatedExpansion double_expansion(const OperatorSpec& op, cplx z, int N_k,
                                    int N_m, int sign = +1,
                                    std::shared_ptr<const HadamardFamily> family = nullptr);

/// Terms gbinom(k+m-1, k) V^k R(z, 2k+2m), k = 0..N, m >= 1.
TruncatedExpansion resolvent_expansion(const OperatorSpec& op, cplx z, int m,
                                       int N, int sign = +1,
                                       std::shared_ptr<const HadamardFamily> family = nullptr);

/// Pointwise sum of the terms at (y, x). Every order must be in the function
/// regime (order >= d); resolvent terms need d = 2.
cplx expansion_eval(const TruncatedExpansion& T, const Event& y, const Event& x);

/// Pairing with phi(., x). V^k is folded into the test function; terms of
/// order <= 0 are evaluated exactly on the diagonal.
cplx expansion_pair(const TruncatedExpansion& T, const TestFunction& phi,
                    const Event& x, const QuadratureSpec& quad);

/// Per-term pairings in term order.
std::vector<cplx> pair_terms(const TruncatedExpansion& T, const TestFunction& phi,
                             const Event& x, const QuadratureSpec& quad);

cplx remainder_pair(const RemainderTerm& E, const TestFunction& phi,
                    const Event& x, const QuadratureSpec& quad);

/// "c·Vk·R(o)" pieces joined by ", "; coefficients as p/q, z-powers and
/// resolvent orders spelled out.
std::string format_terms(const TruncatedExpansion& T);

struct TermRow {
  int k, j;
  std::string coefficient;  // p/q
  int z_power;
  int order;
  std::string kind;  // "standard" | "resolvent"
};
std::vector<TermRow> term_table(const TruncatedExpansion& T);

struct LedgerReport {
  std::vector<cplx> lhs, rhs;
  std::vector<double> residual;
  double max_residual = 0.0;
};

/// Pairs both sides of
///   P sum_k binom(m+k, k) V^k R(2k+2m+2)
///     = sum_k binom(k+m-1, k) V^k R(2k+2m) + E_N,   k = 0..N,
/// against phi(., x) for each probe, with P moved onto the test function on
/// the left. Flat backend only; m >= 0.
LedgerReport ledger_identity_check(const OperatorSpec& op, int m, int N,
                                   const std::vector<TestFunction>& probes,
                                   const Event& x, const QuadratureSpec& quad,
                                   int sign = +1);

/// |exact - partial sum| for probes shrunk towards the base point: a decay
/// table, not a pass/fail certificate.
struct RemainderProbe {
  std::vector<double> scales;
  std::vector<int> truncations;
  /// errors[n][s] for truncations[n] and scales[s].
  std::vector<std::vector<double>> errors;
};

/// `exact` pairs the target kernel with a test function; `expansion` builds
/// the truncated expansion for a given N. The probe at scale s is `phi`
/// with its offset from x and its half-widths multiplied by s.
RemainderProbe remainder_probe(
    const std::function<cplx(const TestFunction&)>& exact,
    const std::function<TruncatedExpansion(int)>& expansion,
    const TestFunction& phi, const Event& x, const std::vector<int>& truncations,
    const std::vector<double>& scales, const QuadratureSpec& quad);

}  // namespace hadamard
