#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hadamard/geometry.hpp"
#include "hadamard/jet_field.hpp"
#include "hadamard/multi_index.hpp"

namespace hadamard {

inline constexpr int kMaxTestDerivative = 16;

/// Tensor-product bump: amplitude * prod_i exp(-1 / (1 - u_i^2)) with
/// u_i = (y_i - center_i) / half_width_i, zero outside the open box.
struct TestFunction {
  Event center;
  Event half_widths;
  double amplitude = 1.0;

  TestFunction() = default;
  TestFunction(Event c, Event w, double amp = 1.0);

  int dim() const { return center.dim(); }
  Box support() const;
  double operator()(const Event& y) const;
};

/// Derivatives 0..order of the one-dimensional profile exp(-1/(1-u^2)) with
/// respect to u, written to out[0..order]. Zero outside (-1, 1).
void bump_profile_derivatives(double u, int order, double* out);

/// Exact partial derivative d^alpha phi(y). Throws UnsupportedOrderError
/// when |alpha| > 16.
double eval_derivative(const TestFunction& phi, const std::vector<int>& alpha,
                       const Event& y);

/// y -> (box^k phi)(y). Requires 2k <= 16.
std::function<double(const Event&)> apply_box_power(const TestFunction& phi,
                                                    int k,
                                                    const SpacetimeModel& model);

/// The bump as a JetField (derivatives up to order 16).
class BumpField final : public JetField {
 public:
  explicit BumpField(TestFunction phi);
  int dim() const override { return phi_.dim(); }
  int max_order() const override { return kMaxTestDerivative; }
  void jet(const Event& y, const MultiIndexSet& set, int order,
           cplx* out) const override;
  cplx value(const Event& y) const override { return phi_(y); }
  std::optional<Box> support() const override { return phi_.support(); }

  const TestFunction& function() const { return phi_; }

 private:
  TestFunction phi_;
};

std::shared_ptr<BumpField> make_bump_field(const TestFunction& phi);

}  // namespace hadamard
