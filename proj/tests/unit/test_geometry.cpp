#include <random>

#include "doctest.h"
#include "hadamard/errors.hpp"
#include "hadamard/geometry.hpp"

using namespace hadamard;

namespace {

Event random_event(std::mt19937& rng, int d, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  Event e(d);
  for (int i = 0; i < d; ++i) e[i] = u(rng);
  return e;
}

}  // namespace

TEST_CASE("world function by hand") {
  auto m = MinkowskiModel::cube(4, 3.0);
  Event y{2.0, 1.0, 0.5, -0.5}, x{0.5, 0.0, 0.0, 0.0};
  CHECK(m->world_function(y, x) == doctest::Approx(1.5 * 1.5 - 1.0 - 0.25 - 0.25));
  CHECK(m->world_function(x, x) == 0.0);
  CHECK(minkowski_dot(Event{1.0, 0.0}, Event{1.0, 0.0}) == -1.0);
}

TEST_CASE("world function identities hold at random point pairs") {
  std::mt19937 rng(11);
  for (int d = 2; d <= kMaxDim; ++d) {
    auto m = MinkowskiModel::cube(d, 2.0);
    for (int s = 0; s < 50; ++s) {
      Event y = random_event(rng, d, 2.0), x = random_event(rng, d, 2.0);
      double G = m->world_function(y, x);
      Tangent g = m->grad_world_function(y, x);
      // Sign convention (-,+,...): g(grad Gamma, grad Gamma) = -4 Gamma.
      CHECK(m->metric(x, g, g) == doctest::Approx(-4.0 * G).epsilon(1e-12).scale(1.0));
      CHECK(m->box_world_function(y, x) == 2.0 * d);
      CHECK(m->world_function(y, x) == doctest::Approx(m->world_function(x, y)));
      Event back = m->exp_map(x, m->log_map(y, x));
      for (int i = 0; i < d; ++i) CHECK(back[i] == doctest::Approx(y[i]));
    }
  }
}

TEST_CASE("gradient matches central differences") {
  auto m = MinkowskiModel::cube(3, 2.0);
  Event y{0.7, 0.2, -0.4}, x{-0.1, 0.3, 0.1};
  Tangent g = m->grad_world_function(y, x);
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Event p = y, q = y;
    p[i] += h;
    q[i] -= h;
    double di = (m->world_function(p, x) - m->world_function(q, x)) / (2 * h);
    // Raise the index with diag(-1, 1, 1).
    double raised = i == 0 ? -di : di;
    CHECK(g[i] == doctest::Approx(raised).epsilon(1e-8));
  }
}

TEST_CASE("causal relations") {
  auto m = MinkowskiModel::cube(2, 3.0);
  Event o{0.0, 0.0};
  CHECK(m->causal_relation(Event{1.0, 0.5}, o) == CausalRelation::StrictFuture);
  CHECK(m->causal_relation(Event{-1.0, 0.5}, o) == CausalRelation::StrictPast);
  CHECK(m->causal_relation(Event{1.0, 1.0}, o) == CausalRelation::LightlikeFuture);
  CHECK(m->causal_relation(Event{-1.0, -1.0}, o) == CausalRelation::LightlikePast);
  CHECK(m->causal_relation(Event{0.5, 1.0}, o) == CausalRelation::Spacelike);
  CHECK(m->causal_relation(o, o) == CausalRelation::Equal);
  CHECK(is_future_type(CausalRelation::LightlikeFuture));
  CHECK_FALSE(is_past_type(CausalRelation::Spacelike));
}

TEST_CASE("cone membership agrees with the causal relation") {
  std::mt19937 rng(3);
  auto m = MinkowskiModel::cube(3, 2.0);
  for (int s = 0; s < 200; ++s) {
    Event y = random_event(rng, 3, 2.0), x = random_event(rng, 3, 2.0);
    CausalRelation r = m->causal_relation(y, x);
    if (r == CausalRelation::StrictFuture) CHECK(flat::in_cone(y.data(), x.data(), 3, +1));
    if (r == CausalRelation::StrictPast) CHECK(flat::in_cone(y.data(), x.data(), 3, -1));
    if (r == CausalRelation::Spacelike) {
      CHECK_FALSE(flat::in_cone(y.data(), x.data(), 3, +1));
      CHECK_FALSE(flat::in_cone(y.data(), x.data(), 3, -1));
    }
  }
}

TEST_CASE("points outside the domain are rejected") {
  auto m = MinkowskiModel::cube(2, 1.0);
  CHECK_THROWS_AS(world_function(*m, Event{2.0, 0.0}, Event{0.0, 0.0}), DomainError);
  CHECK_NOTHROW(world_function(*m, Event{1.0, 0.0}, Event{0.0, 0.0}));
}

TEST_CASE("box helpers") {
  Box b(Event{0.0, -1.0}, Event{2.0, 1.0});
  CHECK(b.volume() == 4.0);
  CHECK(b.contains(Event{1.0, 0.0}));
  CHECK_FALSE(b.contains(Event{3.0, 0.0}));
  Box c(Event{1.0, 0.5}, Event{3.0, 2.0}), out;
  REQUIRE(intersect(b, c, &out));
  CHECK(out.volume() == doctest::Approx(0.5));
  Box far(Event{5.0, 5.0}, Event{6.0, 6.0});
  CHECK_FALSE(intersect(b, far, &out));
}
