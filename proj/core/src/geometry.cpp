#include "hadamard/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hadamard/errors.hpp"

namespace hadamard {

Event::Event(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("Event: dimension out of range");
  }
}

Event::Event(std::initializer_list<double> coords)
    : Event(std::vector<double>(coords)) {}

Event::Event(const std::vector<double>& coords)
    : Event(static_cast<int>(coords.size())) {
  std::copy(coords.begin(), coords.end(), c_.begin());
}

std::vector<double> Event::to_vector() const {
  return std::vector<double>(c_.begin(), c_.begin() + dim_);
}

Event& Event::operator+=(const Event& o) {
  for (int i = 0; i < dim_; ++i) (*this)[i] += o[i];
  return *this;
}

Event& Event::operator-=(const Event& o) {
  for (int i = 0; i < dim_; ++i) (*this)[i] -= o[i];
  return *this;
}

Event& Event::operator*=(double s) {
  for (int i = 0; i < dim_; ++i) (*this)[i] *= s;
  return *this;
}

Event operator+(Event a, const Event& b) { return a += b; }
Event operator-(Event a, const Event& b) { return a -= b; }
Event operator*(double s, Event a) { return a *= s; }

double minkowski_dot(const Event& u, const Event& v) {
  double s = -u[0] * v[0];
  for (int i = 1; i < u.dim(); ++i) s += u[i] * v[i];
  return s;
}

Box::Box(Event lo_, Event hi_) : lo(lo_), hi(hi_) {
  if (lo.dim() != hi.dim()) throw std::invalid_argument("Box: dim mismatch");
  for (int i = 0; i < lo.dim(); ++i) {
    if (!(hi[i] >= lo[i])) throw std::invalid_argument("Box: lo > hi");
  }
}

Box Box::from_intervals(const std::vector<std::array<double, 2>>& iv) {
  Event lo(static_cast<int>(iv.size()));
  Event hi(static_cast<int>(iv.size()));
  for (std::size_t i = 0; i < iv.size(); ++i) {
    lo[static_cast<int>(i)] = iv[i][0];
    hi[static_cast<int>(i)] = iv[i][1];
  }
  return Box(lo, hi);
}

bool Box::contains(const Event& p, double slack) const {
  if (p.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
  }
  return true;
}

double Box::max_side() const {
  double m = 0.0;
  for (int i = 0; i < dim(); ++i) m = std::max(m, side(i));
  return m;
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= side(i);
  return v;
}

Event Box::center() const { return 0.5 * (lo + hi); }

bool intersect(const Box& a, const Box& b, Box* out) {
  Event lo(a.dim()), hi(a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    lo[i] = std::max(a.lo[i], b.lo[i]);
    hi[i] = std::min(a.hi[i], b.hi[i]);
    if (hi[i] <= lo[i]) return false;
  }
  if (out) *out = Box(lo, hi);
  return true;
}

const char* to_string(CausalRelation r) {
  switch (r) {
    case CausalRelation::StrictFuture: return "strict-future";
    case CausalRelation::StrictPast: return "strict-past";
    case CausalRelation::LightlikeFuture: return "lightlike-future";
    case CausalRelation::LightlikePast: return "lightlike-past";
    case CausalRelation::Spacelike: return "spacelike";
    case CausalRelation::Equal: return "equal";
  }
  return "?";
}

bool is_future_type(CausalRelation r) {
  return r == CausalRelation::StrictFuture ||
         r == CausalRelation::LightlikeFuture;
}

bool is_past_type(CausalRelation r) {
  return r == CausalRelation::StrictPast || r == CausalRelation::LightlikePast;
}

void SpacetimeModel::require_inside(const Event& p) const {
  const Box& b = domain();
  if (p.dim() != dimension()) {
    throw DomainError("event has wrong dimension");
  }
  double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                 std::max(1.0, b.max_side());
  if (!b.contains(p, slack)) {
    std::ostringstream os;
    os << "event (";
    for (int i = 0; i < p.dim(); ++i) os << (i ? "," : "") << p[i];
    os << ") outside the domain box";
    throw DomainError(os.str());
  }
}

MinkowskiModel::MinkowskiModel(int dim, Box domain)
    : dim_(dim), box_(std::move(domain)) {
  if (dim < 2 || dim > kMaxDim) {
    throw std::invalid_argument("MinkowskiModel: dimension must be in [2, 6]");
  }
  if (box_.dim() != dim) {
    throw std::invalid_argument("MinkowskiModel: box dimension mismatch");
  }
}

std::shared_ptr<MinkowskiModel> MinkowskiModel::cube(int dim, double half) {
  Event lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo[i] = -half;
    hi[i] = half;
  }
  return std::make_shared<MinkowskiModel>(dim, Box(lo, hi));
}

double MinkowskiModel::world_function(const Event& y, const Event& x) const {
  return flat::gamma(y.data(), x.data(), dim_);
}

Tangent MinkowskiModel::grad_world_function(const Event& y,
                                            const Event& x) const {
  return -2.0 * (y - x);
}

double MinkowskiModel::box_world_function(const Event&, const Event&) const {
  return 2.0 * dim_;
}

Event MinkowskiModel::exp_map(const Event& x, const Tangent& v) const {
  return x + v;
}

Tangent MinkowskiModel::log_map(const Event& y, const Event& x) const {
  return y - x;
}

CausalRelation MinkowskiModel::causal_relation(const Event& y,
                                               const Event& x) const {
  double dt = y[0] - x[0];
  double scale = dt * dt;
  double r2 = 0.0;
  for (int i = 1; i < dim_; ++i) {
    double dx = y[i] - x[i];
    r2 += dx * dx;
  }
  scale += r2;
  if (scale == 0.0) return CausalRelation::Equal;
  double g = dt * dt - r2;
  double tol = 16.0 * std::numeric_limits<double>::epsilon() * scale;
  if (g < -tol) return CausalRelation::Spacelike;
  bool future = dt > 0.0;
  if (g <= tol) {
    return future ? CausalRelation::LightlikeFuture
                  : CausalRelation::LightlikePast;
  }
  return future ? CausalRelation::StrictFuture : CausalRelation::StrictPast;
}

double MinkowskiModel::metric(const Event&, const Tangent& u,
                              const Tangent& v) const {
  return minkowski_dot(u, v);
}

double world_function(const SpacetimeModel& m, const Event& y,
                      const Event& x) {
  m.require_inside(y);
  m.require_inside(x);
  return m.world_function(y, x);
}

Tangent grad_world_function(const SpacetimeModel& m, const Event& y,
                            const Event& x) {
  m.require_inside(y);
  m.require_inside(x);
  return m.grad_world_function(y, x);
}

double box_world_function(const SpacetimeModel& m, const Event& y,
                          const Event& x) {
  m.require_inside(y);
  m.require_inside(x);
  return m.box_world_function(y, x);
}

Tangent log_map(const SpacetimeModel& m, const Event& y, const Event& x) {
  m.require_inside(y);
  m.require_inside(x);
  return m.log_map(y, x);
}

Event exp_map(const SpacetimeModel& m, const Event& x, const Tangent& v) {
  m.require_inside(x);
  Event y = m.exp_map(x, v);
  m.require_inside(y);
  return y;
}

CausalRelation causal_relation(const SpacetimeModel& m, const Event& y,
                               const Event& x) {
  m.require_inside(y);
  m.require_inside(x);
  return m.causal_relation(y, x);
}

}  // namespace hadamard
