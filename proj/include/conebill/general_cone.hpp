#pragma once

#include <memory>
#include <optional>

#include "conebill/core_geometry.hpp"
#include "conebill/polar_section.hpp"

namespace conebill {

/// K = {t p : p ∈ γ, t > 0} in ℝ³, γ given in polar form on the plane x³ = 1.
class GeneralCone {
 public:
  explicit GeneralCone(std::shared_ptr<const PolarSection> section);

  const PolarSection& section() const { return *section_; }

  /// ‖(x¹, x²)‖ - x³ ρ(atan2(x², x¹)); negative strictly inside.
  double level(const Vec3& x) const;

  /// True if v points into the closed cone, i.e. the ray never leaves through the side.
  bool contains_direction(const Vec3& v) const;

  /// Unit normal at a surface point, pointing out of the cone.
  Direction3 surface_normal(const Vec3& x) const;

 private:
  std::shared_ptr<const PolarSection> section_;
};

struct ConeHit {
  bool escaped = true;
  bool apex = false;              // hit point within apex_radius of O
  bool tangency_warning = false;  // root found right next to t_min
  double t = 0.0;
  Vec3 point = Vec3::Zero();
};

/// Smallest t > t_min with base + t·dir on the cone: coarse scan to bracket a
/// sign change of the level function, then bisection to machine resolution.
ConeHit cone_next_intersection(const GeneralCone& cone, const Line3& line,
                               const Tolerances& tol = kDefaultTolerances);

struct ConeStep {
  ConeHit hit;
  std::optional<Line3> outgoing;  // empty on escape or apex
};

ConeStep cone_step(const GeneralCone& cone, const Line3& line,
                   const Tolerances& tol = kDefaultTolerances);

}  // namespace conebill
