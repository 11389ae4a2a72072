#pragma once

#include <complex>
#include <optional>

#include "hadamard/geometry.hpp"
#include "hadamard/jet_field.hpp"
#include "hadamard/quadrature.hpp"
#include "hadamard/rational.hpp"
#include "hadamard/testfn.hpp"

namespace hadamard {

/// c_alpha = 2^(1-alpha) pi^((2-d)/2) / (Gamma(alpha/2) Gamma((alpha-d+2)/2)),
/// exactly zero at the gamma poles. Integer orders go through the exact path.
cplx riesz_constant(cplx alpha, int d);

/// Exact form q * pi^(pi_half_power / 2) for integer alpha.
struct ExactRieszConstant {
  Rational q;
  int pi_half_power = 0;
  double value() const;
};
ExactRieszConstant riesz_constant_exact(int alpha, int d);

struct RieszDistribution {
  int sign = +1;  // +1: supported in J_+(x), -1: in J_-(x)
  cplx alpha;
  ModelPtr model;
};

/// c_alpha Gamma(y,x)^((alpha-d)/2) on J_sign(x), 0 elsewhere.
/// Throws RegimeError when Re alpha < d.
cplx riesz_eval(const RieszDistribution& R, const Event& y, const Event& x);

enum class PairingRoute {
  /// Move box^k onto the test function with the smallest k such that
  /// Re alpha + 2k >= d + 2 (the default).
  Continuation,
  /// Integrate c_alpha Gamma^((alpha-d)/2) f directly in cone coordinates;
  /// valid for Re alpha > d - 2.
  Direct,
};

/// Number of box applications the continuation route uses for alpha.
int continuation_steps(cplx alpha, int d);

/// True when alpha = 0, -2, -4, ... exactly (the pairing is diagonal).
bool is_diagonal_order(cplx alpha);

/// R(alpha)[f(., x)] for a smooth compactly supported field.
cplx riesz_pair(const RieszDistribution& R, const JetFieldPtr& f,
                const Event& x, const QuadratureSpec& quad,
                PairingRoute route = PairingRoute::Continuation);

/// R(alpha)[box^box_power phi] for a tensor bump. Exploits the product
/// structure of the bump and the radial symmetry of the kernel instead of
/// cone coordinates, so it is cheap in every dimension and independent of the
/// JetField route.
cplx riesz_pair(const RieszDistribution& R, const TestFunction& phi,
                const Event& x, const QuadratureSpec& quad,
                PairingRoute route = PairingRoute::Continuation,
                int box_power = 0);

/// Hyperbolic-angle cutoff for a kernel sech^(2 beta + 2) decay.
double nappe_eta_max(double re_alpha, int d);

struct ResolventRiesz {
  int sign = +1;
  cplx z;
  int m = 1;  // order 2m
  ModelPtr model;
  int max_terms = 400;
};

/// Series sum_k gbinom(m+k-1, k) z^k R(2k+2m)(y, x) with tail control.
/// Only for d = 2.
cplx resolvent_riesz_eval(const ResolventRiesz& RR, const Event& y,
                          const Event& x);

/// Term-by-term pairing of the same series.
cplx resolvent_riesz_pair(const ResolventRiesz& RR, const TestFunction& phi,
                          const Event& x, const QuadratureSpec& quad);

}  // namespace hadamard
