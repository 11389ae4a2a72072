#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "hadamard/geometry.hpp"
#include "hadamard/multi_index.hpp"

namespace hadamard {

using cplx = std::complex<double>;

/// Evaluates jets of a field at points apex + s * (to - from) for s in [0, 1].
class RaySampler {
 public:
  virtual ~RaySampler() = default;
  /// Writes the first set.count_up_to(order) partial derivatives at s.
  virtual void jet(double s, cplx* out) = 0;
  virtual cplx value(double s);
};

/// Smooth scalar field with partial derivatives of every order it advertises,
/// indexed by the graded multi-index ordering of MultiIndexSet.
class JetField {
 public:
  virtual ~JetField() = default;

  virtual int dim() const = 0;
  virtual int max_order() const = 0;
  /// Writes derivatives of degree <= order into out[0 .. count_up_to(order)).
  /// `set` must have order >= `order`.
  virtual void jet(const Event& y, const MultiIndexSet& set, int order,
                   cplx* out) const = 0;
  virtual cplx value(const Event& y) const;
  /// Closed box outside of which the field vanishes identically.
  virtual std::optional<Box> support() const { return std::nullopt; }
  /// Sampler along the segment from `from` to `to`. The default samples
  /// pointwise; fields with per-ray precomputation override it.
  virtual std::unique_ptr<RaySampler> along_ray(const Event& from,
                                                const Event& to,
                                                int order) const;
};

using JetFieldPtr = std::shared_ptr<const JetField>;

/// Product f * g via the Leibniz rule.
class ProductField final : public JetField {
 public:
  ProductField(JetFieldPtr f, JetFieldPtr g);
  int dim() const override { return f_->dim(); }
  int max_order() const override;
  void jet(const Event& y, const MultiIndexSet& set, int order,
           cplx* out) const override;
  cplx value(const Event& y) const override;
  std::optional<Box> support() const override;
  std::unique_ptr<RaySampler> along_ray(const Event& from, const Event& to,
                                        int order) const override;

 private:
  JetFieldPtr f_, g_;
};

/// Linear combination sum_i c_i f_i.
class SumField final : public JetField {
 public:
  SumField(std::vector<cplx> coeffs, std::vector<JetFieldPtr> fields);
  int dim() const override { return fields_.front()->dim(); }
  int max_order() const override;
  void jet(const Event& y, const MultiIndexSet& set, int order,
           cplx* out) const override;
  std::optional<Box> support() const override;
  std::unique_ptr<RaySampler> along_ray(const Event& from, const Event& to,
                                        int order) const override;

 private:
  std::vector<cplx> coeffs_;
  std::vector<JetFieldPtr> fields_;
};

/// box^k f with box = d_t^2 - sum_i d_i^2.
class BoxPowerField final : public JetField {
 public:
  BoxPowerField(JetFieldPtr f, int k);
  int dim() const override { return f_->dim(); }
  int max_order() const override { return f_->max_order() - 2 * k_; }
  void jet(const Event& y, const MultiIndexSet& set, int order,
           cplx* out) const override;
  std::optional<Box> support() const override { return f_->support(); }
  std::unique_ptr<RaySampler> along_ray(const Event& from, const Event& to,
                                        int order) const override;

 private:
  JetFieldPtr f_;
  int k_;
};

/// Applies sum_alpha c_alpha d^alpha to a jet of order `order + 2k`,
/// producing the jet of box^k f of order `order`.
void apply_box_power_to_jet(const MultiIndexSet& set, int k, int order,
                            const cplx* in, cplx* out);

}  // namespace hadamard
