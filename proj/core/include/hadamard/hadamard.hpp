#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "hadamard/geometry.hpp"
#include "hadamard/jet_field.hpp"
#include "hadamard/multi_index.hpp"
#include "hadamard/potential.hpp"

namespace hadamard {

/// A two-point kernel (y, x) -> V(y, x) with derivatives in y.
class TwoPointField {
 public:
  virtual ~TwoPointField() = default;
  virtual int dim() const = 0;
  virtual int max_order() const = 0;
  virtual void jet(const Event& y, const Event& x, const MultiIndexSet& set,
                   int order, cplx* out) const = 0;
  virtual cplx value(const Event& y, const Event& x) const;
};

using Evaluator = std::shared_ptr<const TwoPointField>;

/// Constant kernel c (all derivatives zero).
class ConstantKernel final : public TwoPointField {
 public:
  ConstantKernel(int dim, cplx c) : dim_(dim), c_(c) {}
  int dim() const override { return dim_; }
  int max_order() const override { return 64; }
  void jet(const Event& y, const Event& x, const MultiIndexSet& set, int order,
           cplx* out) const override;
  cplx value(const Event&, const Event&) const override { return c_; }

 private:
  int dim_;
  cplx c_;
};

/// One transport step by adaptive composite Gauss-Legendre quadrature along
/// the segment from x to y:
///   d^a V^k(y, x) = -k int_0^1 s^(k-1+|a|) (d^a P V^(k-1))(x + s (y - x)) ds.
/// `prev` must supply jets two orders higher than requested. For k = 0 the
/// result is the constant 1 (flat backend). Throws ConvergenceError when the
/// line integral does not stabilise to 1e-10.
Evaluator solve_transport(const OperatorSpec& op, int k, Evaluator prev);

/// Jets of V^0 .. V^K along a ray x + s v, s in [0, 1], tabulated at
/// Chebyshev-Lobatto nodes. Level k carries derivatives up to
/// extra + 2 (K - k).
class RayTable {
 public:
  int levels() const { return K_; }
  int nodes() const { return static_cast<int>(s_.size()); }
  int order(int k) const { return extra_ + 2 * (K_ - k); }
  const Event& base() const { return x_; }
  const Event& step() const { return v_; }
  const MultiIndexSetPtr& set() const { return set_; }

  /// Jet of V^k of degree <= ord (ord <= order(k)) at parameter s.
  void jet(int k, double s, int ord, cplx* out) const;
  cplx value(int k, double s) const;
  /// Raw node data: derivative `a` of V^k at node i.
  cplx at(int k, int i, int a) const { return jets_[k][i * stride_ + a]; }
  double node(int i) const { return s_[static_cast<std::size_t>(i)]; }

 private:
  friend class HadamardFamily;
  void interpolate(int k, double s, int count, cplx* out) const;

  int K_ = 0;
  int extra_ = 0;
  int stride_ = 0;
  Event x_, v_;
  MultiIndexSetPtr set_;
  std::vector<double> s_;
  std::vector<double> bary_;
  std::vector<std::vector<cplx>> jets_;
};

struct FamilyOptions {
  /// Solve transport numerically even for constant potentials.
  bool force_numeric = false;
  /// Fixed node count along rays; 0 calibrates at construction.
  int nodes = 0;
  /// Calibration tolerance and node cap.
  double calibration_tol = 1e-12;
  int max_nodes = 256;
};

/// Hadamard coefficients V^0 .. V^K of P - z. Closed form for constant
/// potentials, otherwise the ray solver; optionally a lower-triangular
/// combination of a base family (what shift_coefficients produces).
class HadamardFamily {
 public:
  HadamardFamily(OperatorSpec op, int K, FamilyOptions opts = {});

  const OperatorSpec& op() const { return op_; }
  int max_index() const { return K_; }
  bool closed_form() const { return closed_; }
  int nodes() const { return n_; }
  /// Closed-form values c_k with V^k = c_k (only when closed_form()).
  const std::vector<cplx>& closed_values() const { return closed_values_; }
  /// Combination matrix over the base family (identity unless shifted).
  const std::vector<std::vector<cplx>>& combination() const { return comb_; }

  cplx value(int k, const Event& y, const Event& x) const;
  std::vector<cplx> values(const Event& y, const Event& x, int K) const;

  /// Ray table for levels 0..K (K <= max_index) with `extra` derivative
  /// orders at the top level, from x to x + v.
  RayTable ray(const Event& x, const Event& v, int K, int extra) const;

  /// V^k as a two-point evaluator.
  Evaluator coefficient(int k) const;
  /// y -> V^k(y, x) for fixed base point x.
  JetFieldPtr coefficient_field(int k, const Event& x) const;

  /// ((box + b - z) V^k(., x))(y): exact for closed forms, fourth-order
  /// central differences otherwise.
  cplx apply_P(int k, const Event& y, const Event& x) const;

  /// Family for P - z - dz by the binomial shift formula.
  HadamardFamily shifted(cplx dz) const;

 private:
  HadamardFamily() = default;
  void base_ray(const Event& x, const Event& v, int K, int extra,
                RayTable* t) const;
  void calibrate();

  OperatorSpec op_;
  int K_ = 0;
  bool closed_ = false;
  int n_ = 0;
  FamilyOptions opts_;
  std::vector<cplx> closed_values_;
  std::vector<std::vector<cplx>> comb_;
  OperatorSpec base_op_;
};

HadamardFamily hadamard_family(const OperatorSpec& op, int K,
                               FamilyOptions opts = {});

/// V^k(z) = sum_m binom(k, m) z^m V^(k-m): the family of P - z.
HadamardFamily shift_coefficients(const HadamardFamily& family, cplx z);

/// a_k(z) = sum_m z^m / m! a_(k-m), k = 0..K.
std::vector<cplx> heat_shift(const std::vector<cplx>& a, cplx z, int K);

/// ((box + b - z) V(., x))(y) with V from an evaluator: fourth-order
/// central differences with step 1e-3 times the largest box side.
cplx apply_P(const OperatorSpec& op, const Evaluator& V, const Event& y,
             const Event& x);
cplx apply_P(const OperatorSpec& op,
             const std::function<cplx(const Event&, const Event&)>& V,
             const Event& y, const Event& x);

/// Finite-difference step used by apply_P for a model.
double fd_step(const SpacetimeModel& model);

struct DiagonalReport {
  std::vector<double> residual;  // per k = 0..K
  double max_residual = 0.0;
  std::vector<Event> points;
};

/// max over sample diagonal points of |P V^k (x, x) + V^(k+1)(x, x)|.
DiagonalReport diagonal_check(const OperatorSpec& op,
                              const HadamardFamily& family, int K,
                              int samples = 12, unsigned seed = 7);

}  // namespace hadamard
