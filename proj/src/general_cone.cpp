#include "conebill/general_cone.hpp"

#include <cmath>
#include <limits>

namespace conebill {

GeneralCone::GeneralCone(std::shared_ptr<const PolarSection> section) : section_(std::move(section)) {
  if (!section_) throw ContractViolation("GeneralCone needs a section");
}

double GeneralCone::level(const Vec3& x) const {
  const double r = std::hypot(x[0], x[1]);
  if (r == 0.0) return -x[2];
  const PolarSample s = section_->sample(std::atan2(x[1], x[0]));
  // (r - x³) - x³·(ρ - 1) keeps the sub-ulp part of ρ.
  return (r - x[2]) - x[2] * s.dev;
}

bool GeneralCone::contains_direction(const Vec3& v) const {
  if (v[2] <= 0.0) return false;
  return level(v) <= 0.0;
}

Direction3 GeneralCone::surface_normal(const Vec3& x) const {
  const double xi = std::atan2(x[1], x[0]);
  const PolarSample s = section_->sample(xi);
  const double c = std::cos(xi);
  const double sn = std::sin(xi);
  const double rho = s.rho();
  const Vec3 e1 = x;
  const Vec3 e2(s.d1 * c - rho * sn, s.d1 * sn + rho * c, 0.0);
  Vec3 n = e2.cross(e1);
  if (n[0] * c + n[1] * sn < 0.0) n = -n;
  return Direction3::normalize(n);
}

ConeHit cone_next_intersection(const GeneralCone& cone, const Line3& line, const Tolerances& tol) {
  const Vec3& p = line.base;
  const Vec3& v = line.dir.vec();
  const double scale = std::max(p.norm(), std::numeric_limits<double>::min());
  if (cone.level(p) > 1e-9 * scale) throw ContractViolation("line base lies outside the cone");

  ConeHit hit;
  if (cone.contains_direction(v)) return hit;

  const double t_min = tol.cone_t_min * scale;
  double step = tol.scan_step * scale;
  double lo = t_min;
  double hi = t_min;
  bool bracketed = false;
  for (int i = 0; i < 4000; ++i) {
    if (i >= tol.scan_uniform_steps) step *= 2.0;
    hi = lo + step;
    if (!std::isfinite(hi)) break;
    if (cone.level(line.at(hi)) > 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed) return hit;

  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cone.level(line.at(mid)) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  const double g_lo = std::abs(cone.level(line.at(lo)));
  const double g_hi = std::abs(cone.level(line.at(hi)));
  hit.t = g_lo <= g_hi ? lo : hi;
  hit.point = line.at(hit.t);
  hit.escaped = false;
  hit.tangency_warning = hit.t < t_min + tol.tangency_bracket * scale;
  hit.apex = hit.point.norm() < tol.apex_radius * std::max(1.0, scale);
  return hit;
}

ConeStep cone_step(const GeneralCone& cone, const Line3& line, const Tolerances& tol) {
  ConeStep out;
  out.hit = cone_next_intersection(cone, line, tol);
  if (out.hit.escaped || out.hit.apex) return out;
  const Direction3 n = cone.surface_normal(out.hit.point);
  out.outgoing = Line3{out.hit.point, reflect_direction(line.dir, n, tol)};
  return out;
}

}  // namespace conebill
