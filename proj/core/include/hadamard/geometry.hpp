#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

namespace hadamard {

inline constexpr int kMaxDim = 6;

/// Fixed-capacity coordinate vector (t, x1, ..., x_{d-1}). Used both for
/// events and for tangent vectors; the flat backend does not distinguish them.
class Event {
 public:
  Event() = default;
  explicit Event(int dim);
  Event(std::initializer_list<double> coords);
  explicit Event(const std::vector<double>& coords);

  int dim() const noexcept { return dim_; }
  double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const noexcept {
    return c_[static_cast<std::size_t>(i)];
  }
  const double* data() const noexcept { return c_.data(); }
  std::vector<double> to_vector() const;

  Event& operator+=(const Event& o);
  Event& operator-=(const Event& o);
  Event& operator*=(double s);

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

using Tangent = Event;

Event operator+(Event a, const Event& b);
Event operator-(Event a, const Event& b);
Event operator*(double s, Event a);

/// Minkowski inner product with signature (-,+,...,+).
double minkowski_dot(const Event& u, const Event& v);

/// Axis-aligned coordinate box [lo_i, hi_i].
struct Box {
  Event lo;
  Event hi;

  Box() = default;
  Box(Event lo_, Event hi_);
  static Box from_intervals(const std::vector<std::array<double, 2>>& iv);

  int dim() const noexcept { return lo.dim(); }
  bool contains(const Event& p, double slack = 0.0) const;
  double side(int i) const { return hi[i] - lo[i]; }
  double max_side() const;
  double volume() const;
  Event center() const;
};

/// Intersection of two boxes; empty when any side is negative.
bool intersect(const Box& a, const Box& b, Box* out);

enum class CausalRelation {
  StrictFuture,
  StrictPast,
  LightlikeFuture,
  LightlikePast,
  Spacelike,
  Equal,
};

const char* to_string(CausalRelation r);
bool is_future_type(CausalRelation r);
bool is_past_type(CausalRelation r);

/// A GE model domain. Only the flat backend ships; the interface is what the
/// transport and Riesz code consume.
class SpacetimeModel {
 public:
  virtual ~SpacetimeModel() = default;

  virtual int dimension() const = 0;
  virtual const Box& domain() const = 0;
  virtual bool is_flat() const = 0;
  virtual std::string name() const = 0;

  virtual double world_function(const Event& y, const Event& x) const = 0;
  virtual Tangent grad_world_function(const Event& y, const Event& x) const = 0;
  virtual double box_world_function(const Event& y, const Event& x) const = 0;
  virtual Event exp_map(const Event& x, const Tangent& v) const = 0;
  virtual Tangent log_map(const Event& y, const Event& x) const = 0;
  virtual CausalRelation causal_relation(const Event& y,
                                         const Event& x) const = 0;
  /// Metric pairing g_x(u, v) of tangent vectors at x.
  virtual double metric(const Event& x, const Tangent& u,
                        const Tangent& v) const = 0;

  /// Throws DomainError if p is outside the domain box (with a relative
  /// slack of a few ulps of the box size).
  void require_inside(const Event& p) const;
};

class MinkowskiModel final : public SpacetimeModel {
 public:
  MinkowskiModel(int dim, Box domain);
  /// Cube [-half, half]^d.
  static std::shared_ptr<MinkowskiModel> cube(int dim, double half);

  int dimension() const override { return dim_; }
  const Box& domain() const override { return box_; }
  bool is_flat() const override { return true; }
  std::string name() const override { return "minkowski"; }

  double world_function(const Event& y, const Event& x) const override;
  Tangent grad_world_function(const Event& y, const Event& x) const override;
  double box_world_function(const Event& y, const Event& x) const override;
  Event exp_map(const Event& x, const Tangent& v) const override;
  Tangent log_map(const Event& y, const Event& x) const override;
  CausalRelation causal_relation(const Event& y,
                                 const Event& x) const override;
  double metric(const Event& x, const Tangent& u,
                const Tangent& v) const override;

 private:
  int dim_;
  Box box_;
};

using ModelPtr = std::shared_ptr<const SpacetimeModel>;

// Free-function façade with domain checking.
double world_function(const SpacetimeModel& m, const Event& y, const Event& x);
Tangent grad_world_function(const SpacetimeModel& m, const Event& y,
                            const Event& x);
double box_world_function(const SpacetimeModel& m, const Event& y,
                          const Event& x);
Tangent log_map(const SpacetimeModel& m, const Event& y, const Event& x);
Event exp_map(const SpacetimeModel& m, const Event& x, const Tangent& v);
CausalRelation causal_relation(const SpacetimeModel& m, const Event& y,
                               const Event& x);

namespace flat {

/// Unchecked flat-space world function (t_y-t_x)^2 - |y_s - x_s|^2.
inline double gamma(const double* y, const double* x, int d) {
  double dt = y[0] - x[0];
  double g = dt * dt;
  for (int i = 1; i < d; ++i) {
    double dx = y[i] - x[i];
    g -= dx * dx;
  }
  return g;
}

/// y in the closed cone J_sign(x), sign = +1 (future) or -1 (past).
inline bool in_cone(const double* y, const double* x, int d, int sign) {
  double dt = (y[0] - x[0]) * sign;
  if (dt < 0.0) return false;
  double r2 = 0.0;
  for (int i = 1; i < d; ++i) {
    double dx = y[i] - x[i];
    r2 += dx * dx;
  }
  return dt * dt >= r2;
}

}  // namespace flat

}  // namespace hadamard
