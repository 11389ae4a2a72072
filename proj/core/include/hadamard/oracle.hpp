#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hadamard/expansion.hpp"
#include "hadamard/geometry.hpp"
#include "hadamard/potential.hpp"
#include "hadamard/quadrature.hpp"
#include "hadamard/testfn.hpp"

namespace hadamard {

enum class BesselKind { I0, J0 };

/// sum_k (+-w^2/4)^k / (k!)^2 until the tail is below 1e-15 of the sum.
/// Throws DomainError for w < 0 or w > 30.
double bessel_series(BesselKind kind, double w);

/// Exact d = 2 kernel of the m-th power of the Green's operator of box - z:
///   sum_k gbinom(m+k-1, k) z^k c_(2k+2m) Gamma^(k+m-1)   on J_sign(x),
/// zero elsewhere. The constants c_(2n) = 2^(1-2n) / ((n-1)!)^2 are computed
/// here, not taken from the Riesz module. m >= 1.
cplx exact_kernel_2d(cplx z, int m, const Event& y, const Event& x, int sign = +1);

/// Uniform (t, x) grid for the 1+1 dimensional leapfrog scheme.
struct GridSpec {
  Box domain;
  double h = 1.0 / 64.0;
  /// dt / dx.
  double lambda = 0.5;

  /// Throws ConfigError for h <= 0, lambda outside (0, 1] or a bad box.
  void validate() const;
  int nx() const;  // number of spatial intervals
  int nt() const;  // number of time steps
  double dt() const { return lambda * h; }
};

/// Grid values u[n][j] at t = t0 + n dt, x = x0 + j h.
struct FDSolution {
  GridSpec grid;
  int sign = +1;
  int nt = 0, nx = 0;
  std::vector<cplx> u;

  cplx at(int n, int j) const {
    return u[static_cast<std::size_t>(n) * static_cast<std::size_t>(nx + 1) +
             static_cast<std::size_t>(j)];
  }
  double t(int n) const { return grid.domain.lo[0] + n * grid.dt(); }
  double x(int j) const { return grid.domain.lo[1] + j * grid.h; }

  /// Grid quadrature of psi * u (the smeared value <psi, u>).
  cplx smeared(const TestFunction& psi) const;
  /// max |u| over grid points outside J_sign(source): zero for an exactly
  /// causal scheme, small but nonzero for lambda < 1.
  double causality_leak(const Box& source) const;
};

/// u = G^sign f for box + b - z on a d = 2 model: leapfrog for
///   u_tt = u_xx - (b - z) u + f
/// with zero data before the source (after it for sign = -1, by marching
/// backwards in time). Dirichlet walls. Throws ConfigError on a CFL violation
/// and DomainError when J_sign(supp f) reaches the spatial walls within the
/// time window or supp f touches the initial time.
FDSolution fd_retarded_solve(const OperatorSpec& op, const TestFunction& f,
                             const GridSpec& grid, int sign = +1);

/// G^(sign m) f by m successive solves, each using the previous grid
/// solution as its source. m >= 1.
FDSolution fd_power_apply(const OperatorSpec& op, int m, const TestFunction& f,
                          const GridSpec& grid, int sign = +1);

/// <psi, K * f> = int psi(y) K(y - x) f(x) dy dx for a translation-invariant
/// kernel supported in J_sign(0), with d = 2 tensor bumps psi and f. Uses the
/// product structure: the cross-correlation of the bumps factorizes, leaving
/// a two-dimensional integral over the cone.
cplx kernel_convolution_pairing(const std::function<cplx(const Event&)>& kernel,
                                const TestFunction& psi, const TestFunction& f,
                                const QuadratureSpec& quad, int sign = +1);

/// Probe pair for compare_expansion_fd: the FD side is <phi, G^m psi>.
struct ProbePair {
  std::string id;
  TestFunction phi;
  TestFunction psi;
};

struct CompareRow {
  int N;
  double h;
  std::string probe;
  cplx fd_value;
  cplx expansion_value;
  double abs_err;
  double rel_err;
};

/// int psi(x) <sum_(k<=N) gbinom(m+k-1, k) V^k R(2k+2m)(., x), phi> dx for
/// N = 0..N_max at once, with an outer_nodes^2 product rule over supp psi.
/// d = 2, m >= 1.
std::vector<cplx> expansion_smeared(const OperatorSpec& op, int m, int N_max,
                                    const TestFunction& phi,
                                    const TestFunction& psi,
                                    const QuadratureSpec& quad, int sign = +1,
                                    int outer_nodes = 6);

/// Per-N comparison of the truncated expansion against the FD kernel of
/// G^(sign m), one row per (probe, N) in probe-major order.
std::vector<CompareRow> compare_expansion_fd(const OperatorSpec& op, int m,
                                             int N_max,
                                             const std::vector<ProbePair>& probes,
                                             const GridSpec& grid,
                                             const QuadratureSpec& quad,
                                             int sign = +1);

/// CSV with the header N,h,probe,fd_value,expansion_value,abs_err,rel_err;
/// complex values are written as re when the imaginary part vanishes and as
/// re+imi otherwise.
std::string compare_csv(const std::vector<CompareRow>& rows);

/// Log-scale plot of abs_err against N, one polyline per probe.
std::string compare_svg(const std::vector<CompareRow>& rows);

}  // namespace hadamard
