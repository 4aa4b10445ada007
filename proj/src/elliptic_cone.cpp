#include "conebill/elliptic_cone.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "conebill/rng.hpp"

namespace conebill {

EllipticCone::EllipticCone(double a_, double b_) : a(a_), b(b_) {
  if (!(std::isfinite(a) && std::isfinite(b) && a > b && b > 0.0))
    throw DomainError("elliptic cone needs a > b > 0");
}

double EllipticCone::quadric(const Vec3& x) const { return bilinear(x, x); }

double EllipticCone::bilinear(const Vec3& x, const Vec3& y) const {
  return x[0] * y[0] / (a * a) + x[1] * y[1] / (b * b) - x[2] * y[2];
}

Direction3 EllipticCone::outward_normal(const Vec3& x) const {
  return Direction3::normalize(Vec3(x[0] / (a * a), x[1] / (b * b), -x[2]));
}

Vec3 EllipticCone::surface_point(double xi, double t) const {
  return t * Vec3(a * std::cos(xi), b * std::sin(xi), 1.0);
}

double EllipticCone::elliptic_angle(const Vec3& x) const { return std::atan2(x[1] / b, x[0] / a); }

double integral_I1(const Line3& line) { return line_distance_sq(line); }

double integral_I2(const EllipticCone& cone, const Line3& line) {
  const AngularMomenta m = angular_momenta(line);
  const double m12 = m(0, 1), m13 = m(0, 2), m23 = m(1, 2);
  return cone.a * cone.a * m23 * m23 + cone.b * cone.b * m13 * m13 - m12 * m12;
}

IntegralPair integrals(const EllipticCone& cone, const Line3& line) {
  return {integral_I1(line), integral_I2(cone, line)};
}

double integral_I1_raw(const Vec3& x, const Vec3& v) {
  const double m12 = x[0] * v[1] - x[1] * v[0];
  const double m13 = x[0] * v[2] - x[2] * v[0];
  const double m23 = x[1] * v[2] - x[2] * v[1];
  return m12 * m12 + m13 * m13 + m23 * m23;
}

double integral_I2_raw(const EllipticCone& cone, const Vec3& x, const Vec3& v) {
  const double m12 = x[0] * v[1] - x[1] * v[0];
  const double m13 = x[0] * v[2] - x[2] * v[0];
  const double m23 = x[1] * v[2] - x[2] * v[1];
  return cone.a * cone.a * m23 * m23 + cone.b * cone.b * m13 * m13 - m12 * m12;
}

double h_identity_residual(const EllipticCone& cone, const Vec2& u, const Direction3& dir) {
  const double u1 = u[0], u2 = u[1];
  const double nu = std::hypot(u1, u2);
  if (nu == 0.0) throw ContractViolation("h identity needs u != 0");
  const double a = cone.a, b = cone.b;
  const double a2 = a * a, b2 = b * b;
  const Vec3& v = dir.vec();

  const Vec3 x(a * u1, b * u2, nu);
  const double s1 = a * v[0] + u1 * v[2] / nu;
  const double s2 = b * v[1] + u2 * v[2] / nu;

  const double h11 = -b2 * u1 * u1 - (1.0 + b2) * u2 * u2;
  const double h22 = -(a2 + 1.0) * u1 * u1 - a2 * u2 * u2;
  const double h12 = 2.0 * u1 * u2;
  const double h0 = b2 * (a2 + 1.0) * u1 * u1 + a2 * (b2 + 1.0) * u2 * u2;

  const double lhs = integral_I2_raw(cone, x, v);
  const double rhs = h11 * s1 * s1 + h22 * s2 * s2 + h12 * s1 * s2 + h0;
  return lhs - rhs;
}

double poisson_bracket_residual(const EllipticCone& cone, const Vec3& x, const Vec3& v, double h) {
  using State = std::array<double, 6>;
  auto eval = [&](const State& z, bool second) {
    const Vec3 xx(z[0], z[1], z[2]);
    const Vec3 vv(z[3], z[4], z[5]);
    return second ? integral_I2_raw(cone, xx, vv) : integral_I1_raw(xx, vv);
  };
  const State z0{x[0], x[1], x[2], v[0], v[1], v[2]};
  auto central = [&](int i, bool second, double step) {
    State zp = z0, zm = z0;
    zp[i] += step;
    zm[i] -= step;
    return (eval(zp, second) - eval(zm, second)) / (2.0 * step);
  };
  auto grad = [&](int i, bool second) {
    return (4.0 * central(i, second, 0.5 * h) - central(i, second, h)) / 3.0;
  };
  double bracket = 0.0;
  for (int i = 0; i < 3; ++i)
    bracket += grad(i, false) * grad(i + 3, true) - grad(i + 3, false) * grad(i, true);
  return bracket;
}

QuadricHit next_intersection(const EllipticCone& cone, const Line3& line, const Tolerances& tol,
                             bool base_on_surface) {
  const Vec3& p = line.base;
  const Vec3& v = line.dir.vec();
  const double scale = p.norm();
  const double t_min = tol.quadric_t_min * scale;

  // Solve from the point of the line nearest O; t = τ - s.
  const double s = p.dot(v);
  const Vec3 x0 = p - s * v;
  const double A = cone.quadric(v);
  const double B = 2.0 * cone.bilinear(x0, v);
  const double C = cone.quadric(x0);

  QuadricHit hit;
  double roots[2];
  int n_roots = 0;
  if (std::abs(A) < tol.quadric_linear) {
    if (B != 0.0) roots[n_roots++] = -C / B;
  } else {
    double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) {
      if (disc > -tol.discriminant_clamp * (B * B + 4.0 * std::abs(A * C))) {
        disc = 0.0;
        hit.tangency_warning = true;
      } else {
        return hit;
      }
    }
    const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    if (q != 0.0) {
      roots[n_roots++] = q / A;
      roots[n_roots++] = C / q;
    } else {
      roots[n_roots++] = 0.0;
    }
  }

  if (base_on_surface && n_roots > 0) {
    // The root nearest the base is the base itself.
    if (n_roots == 2 && std::abs(roots[0] - s) < std::abs(roots[1] - s)) std::swap(roots[0], roots[1]);
    n_roots = n_roots == 2 ? 1 : 0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_roots; ++i) {
    const double t = roots[i] - s;
    if (!(t > t_min) || !std::isfinite(t)) continue;
    if ((x0 + roots[i] * v)[2] <= 0.0) continue;
    if (t < best) {
      best = t;
      hit.point = x0 + roots[i] * v;
    }
  }
  if (!std::isfinite(best)) return hit;

  hit.escaped = false;
  hit.t = best;
  hit.apex = hit.point.norm() < tol.apex_radius * std::max(1.0, scale);
  return hit;
}

double TrajectoryLog::theta_sum() const {
  CompensatedSum s;
  for (double t : theta) s.add(t);
  return s.value();
}

double TrajectoryLog::max_I1_drift() const {
  if (integrals.empty()) return 0.0;
  const double ref = integrals.front().I1;
  double m = 0.0;
  for (const auto& ip : integrals) m = std::max(m, std::abs(ip.I1 - ref));
  return ref > 0.0 ? m / ref : m;
}

double TrajectoryLog::max_I2_drift(const EllipticCone& cone) const {
  if (integrals.empty()) return 0.0;
  const double ref = integrals.front().I2;
  const double norm = cone.a * cone.a * integrals.front().I1;
  double m = 0.0;
  for (const auto& ip : integrals) m = std::max(m, std::abs(ip.I2 - ref));
  return norm > 0.0 ? m / norm : m;
}

TrajectoryLog run(const EllipticCone& cone, const Line3& line0, int max_steps, const Tolerances& tol,
                  bool base_on_surface) {
  TrajectoryLog log;
  log.lines.push_back(line0);
  log.integrals.push_back(integrals(cone, line0));
  for (int step = 0; step < max_steps; ++step) {
    const Line3& cur = log.lines.back();
    const QuadricHit hit = next_intersection(cone, cur, tol, step > 0 || base_on_surface);
    log.tangency_warning = log.tangency_warning || hit.tangency_warning;
    if (hit.escaped) {
      log.termination = Termination::Escaped;
      return log;
    }
    if (hit.apex) {
      log.termination = Termination::ApexFlag;
      return log;
    }
    // The cone normal is orthogonal to the generator; enforcing that keeps I₁ exact under reflection.
    const Vec3 g = hit.point / hit.point.norm();
    const Vec3 n = cone.outward_normal(hit.point).vec();
    const Direction3 out = reflect_direction(cur.dir, Direction3::normalize(n - n.dot(g) * g), tol);
    if (!log.vertices.empty()) log.theta.push_back(angle_between(log.vertices.back(), hit.point));
    log.vertices.push_back(hit.point);
    log.alpha.push_back(angle_between(out.vec(), hit.point));
    log.lines.push_back(Line3{hit.point, out});
    log.integrals.push_back(integrals(cone, log.lines.back()));
  }
  log.termination = Termination::MaxSteps;
  return log;
}

TrajectoryLog run_complete(const EllipticCone& cone, const Vec3& surface_point, const Direction3& outgoing,
                           int max_steps, const Tolerances& tol) {
  const Direction3 n = cone.outward_normal(surface_point);
  if (outgoing.vec().dot(n.vec()) >= 0.0) throw ContractViolation("outgoing direction must point into the cone");
  const Direction3 incoming = reflect_direction(outgoing, n, tol);

  // Backwards along the incoming line until the trajectory leaves the cone.
  const TrajectoryLog back = run(cone, Line3{surface_point, -incoming}, max_steps, tol, true);
  if (back.termination != Termination::Escaped) {
    TrajectoryLog fwd = run(cone, Line3{surface_point, outgoing}, max_steps, tol, true);
    fwd.termination = back.termination == Termination::ApexFlag ? Termination::ApexFlag : Termination::MaxSteps;
    return fwd;
  }
  const Line3& exit_line = back.lines.back();
  const Vec3 entry = exit_line.base + exit_line.base.norm() * exit_line.dir.vec();
  return run(cone, Line3{entry, -exit_line.dir}, max_steps, tol);
}

TrajectorySeed sample_seed(const EllipticCone& cone, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, index);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double t = rng.uniform(0.5, 2.0);
  const Vec3 p = cone.surface_point(phi, t);
  const Vec3 n = cone.outward_normal(p).vec();
  for (;;) {
    Vec3 g(rng.normal(), rng.normal(), rng.normal());
    const double gn = g.norm();
    if (gn == 0.0) continue;
    g /= gn;
    const double c = g.dot(n);
    if (std::abs(c) < 1e-6) continue;
    if (c > 0.0) g -= 2.0 * c * n;
    return {p, Direction3::normalize(g)};
  }
}

double min_vertex_angle(const EllipticCone& cone, double c1, double c2, const Tolerances& tol) {
  if (!(c1 > 0.0 && c2 > 0.0)) throw DomainError("vertex-angle bound needs c1 > 0 and c2 > 0");
  const double a = cone.a, b = cone.b;
  double s = 2.0 * a * b * std::sqrt(c1 * c2) / (a * a * (b * b + 1.0) * c1 + (b * b + 1.0) * c2);
  if (s > 1.0) {
    if (s > 1.0 + tol.arcsin_clamp) throw DomainError("arcsin argument exceeds 1");
    s = 1.0;
  }
  return std::asin(s);
}

long reflection_bound(const EllipticCone& cone, double c1, double c2, const Tolerances& tol) {
  const double ang = min_vertex_angle(cone, c1, c2, tol);
  const double n = std::ceil(std::numbers::pi / ang);
  if (!(n < 9.0e18)) throw DomainError("reflection bound is not representable");
  return static_cast<long>(n);
}

double chord_angle_sin_sq(const EllipticCone& cone, double I1, double I2, double m12) {
  const double a2 = cone.a * cone.a, b2 = cone.b * cone.b;
  const double num = 4.0 * a2 * b2 * I1 * I2;
  const double f = (1.0 + a2) * (1.0 + b2) * m12 * m12 - (a2 * b2 * I1 - I2);
  return num / (num + f * f);
}

double m12_sq_upper(const EllipticCone& cone, double I1, double I2) {
  const double a2 = cone.a * cone.a;
  return (a2 * I1 - I2) / (a2 + 1.0);
}

double cos_angle_gap(double I2, double m12) { return 2.0 * m12 * m12 / (m12 * m12 + I2) - 1.0; }

double caustic_tangency_residual(const EllipticCone& cone, const Line3& line, double c1, double c2) {
  if (!(c1 > 0.0)) throw DomainError("caustic needs c1 > 0");
  const double lambda = -c2 / c1;
  const double da = cone.a * cone.a + lambda;
  const double db = cone.b * cone.b + lambda;
  const double dz = 1.0 - lambda;
  if (da <= 0.0 || dz <= 0.0 || std::abs(db) < 1e-12) throw DomainError("degenerate caustic parameter");
  const Vec3 d(-1.0 / da, -1.0 / db, 1.0 / dz);
  // B² - 4AC = -4 Σ d_i d_j m_ij², scaled by the sum of the magnitudes of its terms.
  const AngularMomenta m = angular_momenta(line);
  const double disc = -4.0 * (d[0] * d[1] * m(0, 1) * m(0, 1) + d[0] * d[2] * m(0, 2) * m(0, 2) +
                              d[1] * d[2] * m(1, 2) * m(1, 2));
  const double scale = 4.0 * (std::abs(d[0] * d[1]) * m(0, 1) * m(0, 1) + std::abs(d[0] * d[2]) * m(0, 2) * m(0, 2) +
                             std::abs(d[1] * d[2]) * m(1, 2) * m(1, 2));
  if (scale == 0.0) return 0.0;
  return disc / scale;
}

}  // namespace conebill
