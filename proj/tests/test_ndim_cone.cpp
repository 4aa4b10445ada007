#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "conebill/curve_builder.hpp"
#include "conebill/ndim_cone.hpp"
#include "conebill/rng.hpp"

using namespace conebill;

namespace {

std::shared_ptr<const BuiltCurve> lift_curve() {
  static const auto c = [] {
    CurveBuildOptions o;
    o.min_k1 = lift_min_k1();
    return BuiltCurve::build(SpiralParams::make(0.0), o);
  }();
  return c;
}

VecX point(std::initializer_list<double> v) {
  VecX x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

long window_index(double xi) {
  long k = static_cast<long>(std::floor(1.0 / (xi * xi)));
  while (xi < spiral_xi(k + 1)) ++k;
  while (k > 1 && xi > spiral_xi(k)) --k;
  return k;
}

}  // namespace

TEST_CASE("lift geometry on simple points") {
  const LiftedSection l4(lift_curve(), 4);
  CHECK(l4.F1(point({0.0, 0.0})) == 1.0);
  for (double x2 : {-0.6, -0.1, 0.05, 0.2, 0.7}) CHECK(l4.F1(point({x2, 0.0})) == l4.profile(x2).f);

  const LiftedSection l5(lift_curve(), 5);
  CHECK(std::abs(l5.F1(point({0.0, 0.3, 0.4})) - 0.86602540378443865) < 1e-15);

  CHECK_THROWS_AS(l4.F1(point({0.9, 0.9})), DomainError);
  CHECK_THROWS_AS(l4.F1(point({0.1, 0.1, 0.1})), ContractViolation);
  CHECK_THROWS_AS(LiftedSection(lift_curve(), 11), ContractViolation);
}

TEST_CASE("graph profile inverts the polar form") {
  const LiftedSection l(lift_curve(), 4);
  for (double xi = -1.4; xi < 1.4; xi += 0.013) {
    const GraphProfile p = l.profile_at_angle(xi);
    const GraphProfile q = l.profile(p.x2);
    CHECK(std::abs(q.f - p.f) < 1e-14);
    CHECK(q.gap >= 0.0);
  }
  CHECK(l.profile(1e-13).gap > 0.0);
}

TEST_CASE("circular region matches the sphere") {
  const LiftedSection l(lift_curve(), 5);
  CHECK(std::abs(l.scalar_margin(-0.5) + 1.0) < 1e-14);
  CHECK(std::abs(l.scalar_margin(0.6) + 1.0) < 1e-14);

  const VecX x = point({-0.4, 0.2, -0.3});
  const double F = std::sqrt(1.0 - x.squaredNorm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l.hessian_F1(x));
  const auto ev = es.eigenvalues();
  CHECK(std::abs(ev[0] + 1.0 / (F * F * F)) < 1e-12);
  CHECK(std::abs(ev[1] + 1.0 / F) < 1e-12);
  CHECK(std::abs(ev[2] + 1.0 / F) < 1e-12);

  CounterRng rng(4, 0);
  for (int i = 0; i < 100; ++i) {
    const VecX w = point({rng.normal(), rng.normal(), rng.normal()});
    CHECK(std::abs(l.completed_quadratic_form(x, w) - w.dot(l.hessian_F1(x) * w)) < 1e-12 * w.squaredNorm() / (F * F * F));
  }
}

TEST_CASE("Hessian agrees with finite differences of the gradient away from the windows") {
  const auto c = lift_curve();
  const double xi1 = spiral_xi(c->k1());
  for (int n : {4, 5}) {
    const LiftedSection l(c, n);
    CounterRng rng(12, static_cast<std::uint64_t>(n));
    double worst = 0.0;
    int tested = 0;
    for (int i = 0; i < 1000; ++i) {
      VecX x(n - 2);
      x[0] = i % 2 ? rng.uniform(-0.9, 0.9) : std::exp(rng.uniform(std::log(1e-7), std::log(1e-4)));
      for (int j = 1; j < n - 2; ++j) x[j] = rng.uniform(-0.3, 0.3);
      if (x.squaredNorm() > 0.95) continue;
      if (x[0] > 1e-4 && std::asin(x[0]) < xi1 + 1e-4) continue;
      ++tested;
      const Eigen::MatrixXd H = l.hessian_F1(x);
      CHECK(H == H.transpose());
      const double err = (H - l.hessian_F1_fd(x, 1e-5)).cwiseAbs().maxCoeff() / std::max(1.0, H.cwiseAbs().maxCoeff());
      worst = std::max(worst, err);
    }
    CHECK(tested > 600);
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("graph profile second derivative inside the windows") {
  // The gradient in x has O(1) entries, so its difference quotients lose ~1e-16/h and
  // cannot resolve windows this narrow; difference f' itself, with Richardson
  // extrapolation and steps shrinking from δ_k/1000 as the bump terms fade (~1/k).
  const LiftedSection l(lift_curve(), 4);
  const double xi1 = spiral_xi(lift_curve()->k1());
  CounterRng rng(13, 0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double x2 = std::exp(rng.uniform(std::log(1e-4), std::log(std::sin(xi1))));
    const long k = window_index(std::asin(x2));
    const double h = spiral_delta(k) / std::max(10.0, 1000.0 * std::pow(std::min(1.0, 100.0 / k), 0.25));
    auto dq = [&](double s) { return (l.profile(x2 + s).d1 - l.profile(x2 - s).d1) / (2 * s); };
    worst = std::max(worst, std::abs((4.0 * dq(h / 2) - dq(h)) / 3.0 - l.profile(x2).d2));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("negative definiteness") {
  for (int n : {4, 5}) {
    const LiftedSection l(lift_curve(), n);
    const NegdefReport r = negdef_check(l);
    CHECK(r.passed);
    CHECK(r.grid_size >= 10000);
    CHECK(r.max_eigenvalue < -0.1);
    CHECK(r.failures.empty());
    CHECK(r.oracle_disagreements == 0);
    CHECK(r.max_scalar_margin_window < r.window_bound);
    CHECK(r.window_bound < 0.0);
    CHECK(r.window_bounds_ok);
  }
}

TEST_CASE("embedded trajectory reflects off the lifted hypersurface") {
  const auto c = lift_curve();
  const Spiral s(SpiralParams::make(0.0), c->k1() + 1100);
  for (int n : {3, 4, 6}) {
    const LiftedSection l(c, n);
    const EmbeddedReport r = embedded_reflection_check(s, l, c->k1() + 1, 1000);
    CHECK(r.count == 1000);
    CHECK(r.max_perpendicular == 0.0);
    CHECK(r.max_residual() < 1e-10);
  }
  const VecX e = embed(Vec3(1, 2, 3), 5);
  CHECK(e == point({1, 2, 0, 0, 3}));
}
