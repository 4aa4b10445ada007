#include "doctest.h"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "conebill/core_geometry.hpp"
#include "conebill/general_cone.hpp"
#include "conebill/rng.hpp"

using namespace conebill;
using doctest::Approx;

namespace {

Vec3 random_vec(CounterRng& rng, double scale = 1.0) {
  return Vec3(rng.normal(), rng.normal(), rng.normal()) * scale;
}

Line3 random_line(CounterRng& rng) {
  return Line3{random_vec(rng, 3.0), Direction3::normalize(random_vec(rng))};
}

// Squared distance to O by ternary search on t ↦ ‖x + t v‖².
double distance_sq_by_search(const Line3& line) {
  double lo = -100.0, hi = 100.0;
  for (int i = 0; i < 300; ++i) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (line.at(m1).squaredNorm() < line.at(m2).squaredNorm())
      hi = m2;
    else
      lo = m1;
  }
  return line.at(0.5 * (lo + hi)).squaredNorm();
}

std::shared_ptr<const PolarSection> unit_circle() { return std::make_shared<UnitCircleSection>(); }

}  // namespace

TEST_CASE("angular momenta of simple lines") {
  const Line3 l{Vec3(1, 0, 1), Direction3::unit(Vec3(0, 1, 0))};
  const auto m = angular_momenta(l);
  // (m23, m13, m12) = (-1, 0, 1) in 1-based indices.
  CHECK(m(1, 2) == -1.0);
  CHECK(m(0, 2) == 0.0);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(2, 1) == 1.0);
  CHECK(line_distance_sq(l) == 2.0);

  const Line3 slid{Vec3(1, 5, 1), l.dir};
  const auto ms = angular_momenta(slid);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ms.values()[i] == m.values()[i]);

  const Line3 through_o{Vec3::Zero(), Direction3::normalize(Vec3(0.3, -2, 1))};
  CHECK(angular_momenta(through_o).sum_of_squares() == 0.0);
  CHECK(line_distance_sq_projection(through_o) == 0.0);
}

TEST_CASE("distance formulas agree with each other and with direct minimization") {
  CounterRng rng(7, 0);
  for (int i = 0; i < 2000; ++i) {
    const Line3 l = random_line(rng);
    const double a = line_distance_sq(l);
    const double b = line_distance_sq_projection(l);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, b));
    CHECK(std::abs(a - distance_sq_by_search(l)) <= 1e-9 * std::max(1.0, b));
  }
}

TEST_CASE("momenta in higher dimension") {
  LineX l{VecX::Zero(5), Direction<Eigen::Dynamic>::normalize(VecX::Ones(5))};
  l.base << 1, 2, 3, 4, 5;
  CHECK(line_distance_sq(l) == Approx(line_distance_sq_projection(l)).epsilon(1e-14));
  CHECK(angular_momenta(l).values().size() == 10);
}

TEST_CASE("reflection law") {
  const auto v = Direction3::normalize(Vec3(1, 0, -1));
  const auto n = Direction3::unit(Vec3(0, 0, 1));
  const Vec3 r = reflect_direction(v, n).vec();
  CHECK((r - Vec3(1, 0, 1) / std::numbers::sqrt2).norm() < 1e-15);
  CHECK((reflect_direction(-n, n).vec() - n.vec()).norm() == 0.0);

  CHECK_THROWS_AS(reflect_direction(Direction3::unit(Vec3(1, 0, 0)), n), GrazingError);
  CHECK_THROWS_AS(Direction3::unit(Vec3(1, 1, 0)), ContractViolation);

  CounterRng rng(11, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto vi = Direction3::normalize(random_vec(rng));
    const auto ni = Direction3::normalize(random_vec(rng));
    const auto out = reflect_direction(vi, ni);
    Vec3 t = random_vec(rng);
    t -= t.dot(ni.vec()) * ni.vec();
    CHECK(std::abs(out.vec().dot(t) - vi.vec().dot(t)) < 1e-14 * std::max(1.0, t.norm()));
    CHECK(out.vec().dot(ni.vec()) == Approx(-vi.vec().dot(ni.vec())).epsilon(1e-13));
  }
}

TEST_CASE("angles near 0 and pi") {
  using boost::multiprecision::cpp_bin_float_50;
  CHECK(angle_between(Vec3(1, 0, 0), Vec3(0, 1, 0)) == Approx(std::numbers::pi / 2).epsilon(1e-16));
  CHECK(angle_between(Vec3(1, 2, 3), Vec3(1, 2, 3)) == 0.0);

  // Reference: acos of the 50-digit dot product; exact for this configuration.
  const double eps = 1e-9;
  const cpp_bin_float_50 c = cos(cpp_bin_float_50(eps));
  const cpp_bin_float_50 s = sin(cpp_bin_float_50(eps));
  const double ref = static_cast<double>(atan2(s, c));
  const double got = angle_between(Vec3(1, 0, 0), Vec3(std::cos(eps), std::sin(eps), 0));
  CHECK(std::abs(got - ref) < 1e-15);
  CHECK(std::abs(got - 1e-9) < 1e-15);

  const double near_pi = angle_between(Vec3(1, 0, 0), Vec3(-std::cos(eps), std::sin(eps), 0));
  CHECK(std::abs(near_pi - (std::numbers::pi - eps)) < 1e-15);
}

TEST_CASE("wedge reflection counts") {
  CHECK(wedge_reflection_count(std::numbers::pi / 4) == 4);
  CHECK(wedge_reflection_count(std::numbers::pi / 3) == 3);
  CHECK(wedge_reflection_count(1.0) == 4);

  // θ = 1: unfolding gives 3 or 4 reflections for every line.
  int seen3 = 0, seen4 = 0;
  for (int i = 1; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) {
      const double psi = 1.0 * i / 40.0;
      const double dir = 2.0 * std::numbers::pi * (j + 0.37) / 40.0;
      const Vec2 start(std::cos(psi), std::sin(psi));
      const int u = wedge_unfolded_reflections(1.0, start, dir);
      CHECK((u == 3 || u == 4));
      CHECK(u == wedge_direct_reflections(1.0, start, dir));
      seen3 += u == 3;
      seen4 += u == 4;
    }
  }
  CHECK(seen3 > 0);
  CHECK(seen4 > 0);

  CHECK_THROWS_AS(wedge_reflection_count(0.0), DomainError);
  CHECK_THROWS_AS(wedge_unfolded_reflections(1.0, Vec2(1, -0.1), 0.3), ContractViolation);
}

TEST_CASE("alpha/theta residuals of a planar wedge trajectory") {
  // Wedge of opening 1 in the x1x2-plane embedded in R^3: leave (1, 0) towards the
  // side at angle 1, bounce back onto the x1-axis and bounce again.
  const double th = 1.0;
  const Vec3 p0(1.0, 0.0, 0.0);
  const Vec3 p1 = 0.8 * Vec3(std::cos(th), std::sin(th), 0.0);
  const auto d01 = Direction3::normalize(p1 - p0);
  const Vec3 side(std::cos(th), std::sin(th), 0.0);
  const Vec3 r = 2.0 * d01.vec().dot(side) * side - d01.vec();
  const auto d12 = Direction3::normalize(r);
  const Vec3 p2 = p1 - (p1.y() / d12.vec().y()) * d12.vec();
  REQUIRE(p2.x() > 0.0);
  const auto d2 = Direction3::normalize(Vec3(d12.vec().x(), -d12.vec().y(), 0.0));
  std::vector<ReflectionRecord<3>> recs{make_record<3>(p1, d01, d12), make_record<3>(p2, d12, d2)};
  const auto rep = alpha_theta_residuals<3>(recs);
  CHECK(rep.max_recurrence() < 1e-12);
  CHECK(rep.max_sine_law() < 1e-12);
}

TEST_CASE("circular cone intersections and steps") {
  const GeneralCone cone(unit_circle());
  const Line3 l{Vec3(0, 0, 1), Direction3::unit(Vec3(1, 0, 0))};
  const ConeHit hit = cone_next_intersection(cone, l);
  REQUIRE(!hit.escaped);
  CHECK((hit.point - Vec3(1, 0, 1)).norm() < 1e-12);

  const Line3 ruling{Vec3(0, 0, 1), Direction3::normalize(Vec3(1, 0, 1))};
  CHECK(cone_next_intersection(cone, ruling).escaped);

  // Chord in the x1x3-plane: the reflected direction mirrors the incoming one.
  const Line3 chord{Vec3(-0.5, 0, 1), Direction3::unit(Vec3(1, 0, 0))};
  const ConeStep st = cone_step(cone, chord);
  REQUIRE(st.outgoing);
  CHECK((st.outgoing->dir.vec() - Vec3(0, 0, 1)).norm() < 1e-12);

  CounterRng rng(3, 0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 base(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 1.0);
    Line3 line{base, Direction3::normalize(random_vec(rng))};
    const double d0 = line_distance_sq(line);
    for (int s = 0; s < 5; ++s) {
      const ConeStep step = cone_step(cone, line);
      if (!step.outgoing) break;
      line = *step.outgoing;
      CHECK(std::abs(line_distance_sq(line) - d0) <= 1e-10 * d0);
    }
  }
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-17);
  s.add(-1.0);
  CHECK(s.value() == Approx(1e-14).epsilon(1e-12));
}
