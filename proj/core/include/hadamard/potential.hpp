#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hadamard/geometry.hpp"
#include "hadamard/jet_field.hpp"
#include "hadamard/multi_index.hpp"

namespace hadamard {

/// Real potential b(y): a constant plus Gaussian bumps plus monomials, each
/// with exact derivatives of every order.
class Potential {
 public:
  struct Bump {
    Event center;
    double width = 1.0;   // b = height * exp(-|y - center|^2 / width^2)
    double height = 0.0;
  };
  struct Monomial {
    double coefficient = 0.0;
    MultiIndex powers{};
  };

  Potential() = default;
  explicit Potential(int dim) : dim_(dim) {}

  static Potential constant(int dim, double c);
  static Potential bump(const Event& center, double width, double height);

  /// Parses "0", "1.5", "bump(c0,...,c_{d-1},width,height)" (the center may
  /// be bracketed), and polynomial strings in t, x1, ..., x5 such as
  /// "0.5 + 0.1*t^2 - 0.2*x1*t". Terms may be combined with + and -.
  static Potential parse(const std::string& expr, int dim);

  Potential& add_constant(double c);
  Potential& add_bump(const Bump& b);
  Potential& add_monomial(const Monomial& m);
  Potential operator+(const Potential& o) const;

  int dim() const { return dim_; }
  bool is_constant() const { return bumps_.empty() && monomials_.empty(); }
  double constant_part() const { return constant_; }
  const std::vector<Bump>& bumps() const { return bumps_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }

  double value(const Event& y) const;
  /// Real jet of b at y into out[0 .. set.count_up_to(order)).
  void jet(const Event& y, const MultiIndexSet& set, int order,
           double* out) const;
  std::string describe() const;

 private:
  int dim_ = 0;
  double constant_ = 0.0;
  std::vector<Bump> bumps_;
  std::vector<Monomial> monomials_;
};

/// Scalar operator P - z = box + b - z on a model.
struct OperatorSpec {
  ModelPtr model;
  Potential potential;
  cplx z = 0.0;

  OperatorSpec() = default;
  OperatorSpec(ModelPtr m, Potential b, cplx shift = 0.0);

  int dim() const { return model->dimension(); }
  /// Constant potential: V^k = (z - b)^k in closed form.
  bool closed_form() const { return potential.is_constant(); }
  OperatorSpec shifted(cplx dz) const;
};

/// b as a JetField.
class PotentialField final : public JetField {
 public:
  explicit PotentialField(Potential b) : b_(std::move(b)) {}
  int dim() const override { return b_.dim(); }
  int max_order() const override { return 64; }
  void jet(const Event& y, const MultiIndexSet& set, int order,
           cplx* out) const override;

 private:
  Potential b_;
};

/// (P - z) f = box f + (b - z) f, i.e. the formal transpose of P - z applied
/// to a test field.
class OperatorAppliedField final : public JetField {
 public:
  OperatorAppliedField(OperatorSpec op, JetFieldPtr f);
  int dim() const override { return f_->dim(); }
  int max_order() const override { return f_->max_order() - 2; }
  void jet(const Event& y, const MultiIndexSet& set, int order,
           cplx* out) const override;
  std::optional<Box> support() const override { return f_->support(); }
  std::unique_ptr<RaySampler> along_ray(const Event& from, const Event& to,
                                        int order) const override;

 private:
  OperatorSpec op_;
  JetFieldPtr f_;
};

/// Jet of (box + b - z) applied to a jet `in` of order `order + 2`; `bjet`
/// is the real jet of b of order `order`.
void apply_operator_to_jet(const MultiIndexSet& set, int order,
                           const double* bjet, cplx z, const cplx* in,
                           cplx* out);

}  // namespace hadamard
