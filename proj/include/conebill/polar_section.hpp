#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace conebill {

/// ρ(ξ) and its first two derivatives. The radius is carried as a deviation
/// from 1 so that perturbations far below double resolution of ρ survive.
struct PolarSample {
  double dev = 0.0;  // ρ - 1
  double d1 = 0.0;   // ρ'
  double d2 = 0.0;   // ρ''

  double rho() const { return 1.0 + dev; }
};

/// A closed star-shaped curve r = ρ(ξ) in the plane xⁿ = 1.
class PolarSection {
 public:
  virtual ~PolarSection() = default;

  /// Any real ξ; implementations reduce it to (-π, π].
  virtual PolarSample sample(double xi) const = 0;

  double rho(double xi) const { return sample(xi).rho(); }
};

class UnitCircleSection final : public PolarSection {
 public:
  PolarSample sample(double) const override { return {}; }
};

/// (ρ² + 2ρ'² - ρρ'') / (ρ² + ρ'²)^{3/2}.
inline double polar_curvature(const PolarSample& s) {
  const double r = s.rho();
  const double q = r * r + s.d1 * s.d1;
  return (r * r + 2.0 * s.d1 * s.d1 - r * s.d2) / (q * std::sqrt(q));
}

inline double curvature(const PolarSection& section, double xi) {
  return polar_curvature(section.sample(xi));
}

/// Unit inward normal of the counterclockwise curve at angle ξ.
inline Eigen::Vector2d inward_normal(const PolarSection& section, double xi) {
  const PolarSample s = section.sample(xi);
  const double c = std::cos(xi), sn = std::sin(xi);
  const Eigen::Vector2d tangent(s.d1 * c - s.rho() * sn, s.d1 * sn + s.rho() * c);
  return Eigen::Vector2d(-tangent[1], tangent[0]).normalized();
}

/// Reduces an angle to (-π, π].
inline double wrap_angle(double xi) {
  constexpr double kPi = 3.14159265358979323846;
  if (xi > -kPi && xi <= kPi) return xi;
  double r = std::remainder(xi, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

}  // namespace conebill
