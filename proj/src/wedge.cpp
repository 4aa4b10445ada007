#include <cmath>
#include <limits>
#include <numbers>

#include "conebill/core_geometry.hpp"

namespace conebill {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

void check_wedge_start(double theta, const Vec2& start) {
  if (!(theta > 0.0 && theta < std::numbers::pi)) throw DomainError("wedge angle must lie in (0, pi)");
  const double psi = std::atan2(start[1], start[0]);
  if (!(psi > 0.0 && psi < theta)) throw ContractViolation("start point is not strictly inside the wedge");
}

int reflect_until_escape(double theta, Vec2 p, Vec2 v, int max_steps) {
  const Vec2 sides[2] = {Vec2(1.0, 0.0), Vec2(std::cos(theta), std::sin(theta))};
  int count = 0;
  int last = -1;
  for (; count < max_steps; ++count) {
    double best_t = std::numeric_limits<double>::infinity();
    int best = -1;
    for (int i = 0; i < 2; ++i) {
      if (i == last) continue;
      const double denom = cross2(sides[i], v);
      if (denom == 0.0) continue;
      const double t = -cross2(sides[i], p) / denom;
      if (!(t > 0.0)) continue;
      if ((p + t * v).dot(sides[i]) <= 0.0) continue;
      if (t < best_t) {
        best_t = t;
        best = i;
      }
    }
    if (best < 0) return count;
    p = sides[best].dot(p + best_t * v) * sides[best];
    v = 2.0 * v.dot(sides[best]) * sides[best] - v;
    last = best;
  }
  throw ToleranceError("wedge reflection count exceeded max_steps");
}

}  // namespace

int wedge_unfolded_reflections(double theta, const Vec2& start, double direction_angle) {
  check_wedge_start(theta, start);
  const Vec2 u(std::cos(direction_angle), std::sin(direction_angle));
  const double m = cross2(start, u);
  if (m == 0.0) throw DomainError("line passes through the wedge apex");
  const double psi = std::atan2(start[1], start[0]);
  const double gamma = angle_between(start, u);
  const double lo = m > 0.0 ? psi - (std::numbers::pi - gamma) : psi - gamma;
  const double hi = lo + std::numbers::pi;
  return static_cast<int>(std::ceil(hi / theta) - std::floor(lo / theta)) - 1;
}

int wedge_direct_reflections(double theta, const Vec2& start, double direction_angle, int max_steps) {
  check_wedge_start(theta, start);
  const Vec2 u(std::cos(direction_angle), std::sin(direction_angle));
  return reflect_until_escape(theta, start, u, max_steps) + reflect_until_escape(theta, start, -u, max_steps);
}

}  // namespace conebill
