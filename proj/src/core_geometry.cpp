#include "conebill/core_geometry.hpp"

#include <cmath>
#include <numbers>

namespace conebill {

int wedge_reflection_count(double theta) {
  if (!(theta > 0.0 && theta < std::numbers::pi)) throw DomainError("wedge angle must lie in (0, pi)");
  return static_cast<int>(std::ceil(std::numbers::pi / theta));
}

template AngularMomenta angular_momenta<3>(const OrientedLine<3>&);
template AngularMomenta angular_momenta<Eigen::Dynamic>(const OrientedLine<Eigen::Dynamic>&);
template AlphaThetaReport alpha_theta_residuals<3>(std::span<const ReflectionRecord<3>>);

}  // namespace conebill
