#include "doctest.h"

#include <cmath>
#include <numbers>

#include "conebill/elliptic_cone.hpp"
#include "conebill/rng.hpp"

using namespace conebill;
using doctest::Approx;

namespace {

const EllipticCone kCone(2.0, 1.0);

Vec3 gaussian(CounterRng& rng) { return Vec3(rng.normal(), rng.normal(), rng.normal()); }

}  // namespace

TEST_CASE("construction rejects degenerate axes") {
  CHECK_THROWS_AS(EllipticCone(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(EllipticCone(1.0, 2.0), DomainError);
  CHECK_THROWS_AS(EllipticCone(1.0, 0.0), DomainError);
}

TEST_CASE("integrals of simple lines") {
  const Line3 l{Vec3(1, 0, 1), Direction3::unit(Vec3(0, 1, 0))};
  CHECK(integral_I1(l) == 2.0);
  CHECK(integral_I2(kCone, l) == 3.0);
  const Line3 through_o{Vec3::Zero(), Direction3::normalize(Vec3(1, 2, 3))};
  CHECK(integral_I2(kCone, through_o) == 0.0);
  CHECK(integral_I1_raw(Vec3(1, 0, 1), Vec3(0, 1, 0)) == 2.0);
  CHECK(integral_I2_raw(kCone, Vec3(1, 0, 1), Vec3(0, 1, 0)) == 3.0);
}

TEST_CASE("h identity") {
  CHECK(std::abs(h_identity_residual(kCone, Vec2(1, 0), Direction3::unit(Vec3(0, 1, 0)))) < 1e-12);
  CHECK(std::abs(h_identity_residual(kCone, Vec2(1, 1), Direction3::unit(Vec3(1, 0, 0)))) < 1e-12);
  CounterRng rng(5, 0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec2 u(rng.uniform(-3, 3), rng.uniform(-3, 3));
    worst = std::max(worst, std::abs(h_identity_residual(kCone, u, Direction3::normalize(gaussian(rng)))));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("Poisson bracket of the two integrals vanishes") {
  CHECK(std::abs(poisson_bracket_residual(kCone, Vec3(1, 2, 3), Vec3(0.1, 0.2, 0.3))) < 1e-7);
  CHECK(poisson_bracket_residual(kCone, Vec3::Zero(), Vec3(0.1, 0.2, 0.3)) == 0.0);
  CounterRng rng(6, 0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 x(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    worst = std::max(worst, std::abs(poisson_bracket_residual(kCone, x, gaussian(rng))));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("quadric intersections") {
  const auto h1 = next_intersection(kCone, Line3{Vec3(0, 0, 1), Direction3::unit(Vec3(1, 0, 0))});
  REQUIRE(!h1.escaped);
  CHECK((h1.point - Vec3(2, 0, 1)).norm() < 1e-14);
  const auto h2 = next_intersection(kCone, Line3{Vec3(0, 0, 1), Direction3::unit(Vec3(0, 1, 0))});
  REQUIRE(!h2.escaped);
  CHECK((h2.point - Vec3(0, 1, 1)).norm() < 1e-14);

  // Along the axis the line never meets the surface.
  CHECK(next_intersection(kCone, Line3{Vec3(0, 0, 1), Direction3::unit(Vec3(0, 0, 1))}).escaped);

  CounterRng rng(8, 0);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const double z = rng.uniform(0.5, 2.0);
    const Vec3 base(rng.uniform(-0.6, 0.6) * z, rng.uniform(-0.3, 0.3) * z, z);
    const auto h = next_intersection(kCone, Line3{base, Direction3::normalize(gaussian(rng))});
    if (h.escaped) continue;
    ++hits;
    CHECK(std::abs(kCone.quadric(h.point)) <= 1e-11 * h.point.squaredNorm());
  }
  CHECK(hits > 1000);
}

TEST_CASE("integrals are conserved and the count respects the bound") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto s = sample_seed(kCone, 42, i);
    const auto log = run_complete(kCone, s.point, s.outgoing, 100000);
    CHECK(log.termination == Termination::Escaped);
    CHECK(log.max_I1_drift() < 1e-9);
    CHECK(log.max_I2_drift(kCone) < 1e-9);
    const auto c = log.integrals.front();
    if (c.I2 > 0.0) {
      CHECK(static_cast<long>(log.reflections()) <= reflection_bound(kCone, c.I1, c.I2));
      const double lo = min_vertex_angle(kCone, c.I1, c.I2);
      for (double th : log.theta) CHECK(th > lo);
    }
    CHECK(log.theta_sum() < std::numbers::pi);
  }
}

TEST_CASE("seeds are reproducible") {
  const auto a = sample_seed(kCone, 9, 17);
  const auto b = sample_seed(kCone, 9, 17);
  CHECK(a.point == b.point);
  CHECK(a.outgoing.vec() == b.outgoing.vec());
  CHECK(std::abs(kCone.quadric(a.point)) < 1e-12 * a.point.squaredNorm());
}

TEST_CASE("planar trajectory stays planar") {
  const Line3 l0{Vec3(0.3, 0, 1), Direction3::normalize(Vec3(1, 0, 0.2))};
  const auto log = run(kCone, l0, 100);
  REQUIRE(log.reflections() >= 1);
  for (const auto& l : log.lines) {
    const auto m = angular_momenta(l);
    CHECK(m(0, 1) == 0.0);
    CHECK(m(1, 2) == 0.0);
  }
}

TEST_CASE("vertex-angle bound") {
  const double ang = min_vertex_angle(kCone, 1.0, 1.0);
  // arcsin(4/10), evaluated with mpmath.
  CHECK(ang == Approx(0.41151684606748802).epsilon(1e-15));
  CHECK(reflection_bound(kCone, 1.0, 1.0) == 8);
  CHECK(min_vertex_angle(kCone, 1.0, 1e-12) < 1e-5);
  CHECK(reflection_bound(kCone, 1.0, 1e-12) > 100000);
  CHECK_THROWS_AS(min_vertex_angle(kCone, 1.0, 0.0), DomainError);
}

TEST_CASE("chord angles match the closed forms") {
  int chords = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto s = sample_seed(kCone, 77, i);
    const auto log = run_complete(kCone, s.point, s.outgoing, 100000);
    const auto c = log.integrals.front();
    if (!(c.I2 > 0.0)) continue;
    for (std::size_t k = 0; k + 1 < log.vertices.size(); ++k) {
      const Line3& chord = log.lines[k + 1];
      const double m12 = angular_momenta(chord)(0, 1);
      const double s2 = std::pow(std::sin(log.theta[k]), 2);
      CHECK(std::abs(chord_angle_sin_sq(kCone, c.I1, c.I2, m12) - s2) < 1e-9);
      CHECK(m12 * m12 <= m12_sq_upper(kCone, c.I1, c.I2) * (1 + 1e-12));
      const double gap = kCone.elliptic_angle(log.vertices[k + 1]) - kCone.elliptic_angle(log.vertices[k]);
      CHECK(std::abs(cos_angle_gap(c.I2, m12) - std::cos(gap)) < 1e-9);
      ++chords;
    }
  }
  CHECK(chords > 100);
}

TEST_CASE("caustics") {
  int segments = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto s = sample_seed(kCone, 101, i);
    const auto log = run_complete(kCone, s.point, s.outgoing, 100000);
    const auto c = log.integrals.front();
    for (const auto& l : log.lines) {
      CHECK(std::abs(std::sqrt(line_distance_sq(l)) - std::sqrt(c.I1)) < 1e-9);
      if (c.I2 > 0.0 && std::abs(kCone.b * kCone.b - c.I2 / c.I1) > 1e-6) {
        CHECK(std::abs(caustic_tangency_residual(kCone, l, c.I1, c.I2)) < 1e-8);
        ++segments;
      }
    }
  }
  CHECK(segments > 100);

  // A line with other integrals crosses the caustic cone transversally.
  const Line3 l{Vec3(0.5, 0.2, 1), Direction3::normalize(Vec3(0.1, 1, 0.3))};
  CHECK(caustic_tangency_residual(kCone, l, 2.0, 1.0) > 0.1);
}
