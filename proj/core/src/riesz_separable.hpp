#pragma once

#include "hadamard/geometry.hpp"
#include "hadamard/jet_field.hpp"
#include "hadamard/quadrature.hpp"
#include "hadamard/testfn.hpp"

namespace hadamard::detail {

/// c_alpha * int_{J_sign(x) cap domain} Gamma(y, x)^((alpha - d)/2)
/// (box^k phi)(y) dy for a tensor bump on the flat backend, Re alpha > d - 2.
///
/// box^k phi is a finite sum of tensor products of one-dimensional profile
/// derivatives and the kernel depends on (t, |x|) only, so the time integral
/// collapses into a radial function I(r). The spatial integral runs in polar
/// coordinates about the apex (d = 2, 3) or cylindrical ones with I
/// tabulated by piecewise Chebyshev interpolation (d = 4).
cplx separable_riesz_pairing(cplx alpha, int sign, const TestFunction& phi,
                             int k, const Event& x, const Box& domain,
                             const QuadratureSpec& quad);

}  // namespace hadamard::detail
