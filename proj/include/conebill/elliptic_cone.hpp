#pragma once

// Billiard inside the elliptic cone (x³)² = (x¹/a)² + (x²/b)², a > b > 0.
// Besides I₁ = dist(l, O)² it conserves I₂ = a²m₂₃² + b²m₁₃² - m₁₂²,
// which bounds the number of reflections of every trajectory with I₂ > 0.

#include <cstdint>
#include <vector>

#include "conebill/core_geometry.hpp"

namespace conebill {

struct EllipticCone {
  double a;
  double b;

  EllipticCone(double a_, double b_);

  double quadric(const Vec3& x) const;                     // Q(x)
  double bilinear(const Vec3& x, const Vec3& y) const;     // Q(x, y)
  Direction3 outward_normal(const Vec3& x) const;          // ∇Q / ‖∇Q‖
  Vec3 surface_point(double xi, double t) const;           // t(a cos ξ, b sin ξ, 1)
  double elliptic_angle(const Vec3& x) const;              // ξ with x ∝ (a cos ξ, b sin ξ, 1)
};

struct IntegralPair {
  double I1 = 0.0;
  double I2 = 0.0;
};

double integral_I1(const Line3& line);
double integral_I2(const EllipticCone& cone, const Line3& line);
IntegralPair integrals(const EllipticCone& cone, const Line3& line);

/// Polynomial versions on unnormalized (x, v), used by the Poisson bracket.
double integral_I1_raw(const Vec3& x, const Vec3& v);
double integral_I2_raw(const EllipticCone& cone, const Vec3& x, const Vec3& v);

/// a²m₂₃² + b²m₁₃² - m₁₂² - (h₁₁s₁² + h₂₂s₂² + h₁₂s₁s₂ + h₀) at x = r(u).
double h_identity_residual(const EllipticCone& cone, const Vec2& u, const Direction3& v);

/// {I₁, I₂}(x, v) by central differences (step h, one Richardson extrapolation).
double poisson_bracket_residual(const EllipticCone& cone, const Vec3& x, const Vec3& v,
                                double h = 1e-5);

struct QuadricHit {
  bool escaped = true;
  bool apex = false;
  bool tangency_warning = false;
  double t = 0.0;
  Vec3 point = Vec3::Zero();
};

/// Nearest forward hit. With base_on_surface the root at the base is
/// factored out, so a reflection never re-hits its own vertex.
QuadricHit next_intersection(const EllipticCone& cone, const Line3& line,
                             const Tolerances& tol = kDefaultTolerances, bool base_on_surface = false);

enum class Termination { Escaped, MaxSteps, ApexFlag };

struct TrajectoryLog {
  std::vector<Vec3> vertices;
  std::vector<Line3> lines;               // lines[0] is the initial line, lines[k+1] leaves vertices[k]
  std::vector<IntegralPair> integrals;    // one per line
  std::vector<double> alpha;              // angle(outgoing direction, vertex) per vertex
  std::vector<double> theta;              // angle between consecutive vertices
  Termination termination = Termination::MaxSteps;
  bool tangency_warning = false;

  std::size_t reflections() const { return vertices.size(); }
  double theta_sum() const;
  /// max |I - I(line 0)| over the log, I₁ relative to I₁, I₂ relative to a²I₁.
  double max_I1_drift() const;
  double max_I2_drift(const EllipticCone& cone) const;
};

TrajectoryLog run(const EllipticCone& cone, const Line3& line0, int max_steps,
                  const Tolerances& tol = kDefaultTolerances, bool base_on_surface = false);

/// The complete trajectory whose reflection at `surface_point` sends it along
/// `outgoing`: traces backwards to the entering segment, then runs forwards,
/// so every reflection of the trajectory appears in the log.
TrajectoryLog run_complete(const EllipticCone& cone, const Vec3& surface_point,
                           const Direction3& outgoing, int max_steps,
                           const Tolerances& tol = kDefaultTolerances);

/// Random surface point t(a cos φ, b sin φ, 1), t ∈ [0.5, 2], and a uniformly
/// distributed direction pointing into the cone there.
struct TrajectorySeed {
  Vec3 point;
  Direction3 outgoing;
};
TrajectorySeed sample_seed(const EllipticCone& cone, std::uint64_t seed, std::uint64_t index);

/// arcsin(2ab√(c₁c₂) / (a²(b²+1)c₁ + (b²+1)c₂)).
double min_vertex_angle(const EllipticCone& cone, double c1, double c2,
                        const Tolerances& tol = kDefaultTolerances);

/// ⌈π / min_vertex_angle⌉.
long reflection_bound(const EllipticCone& cone, double c1, double c2,
                      const Tolerances& tol = kDefaultTolerances);

/// sin²∠p₁Op₂ for a chord with integrals (I₁, I₂) and momentum m₁₂.
double chord_angle_sin_sq(const EllipticCone& cone, double I1, double I2, double m12);

/// Upper end (a²I₁ - I₂)/(a² + 1) of the admissible range of m₁₂².
double m12_sq_upper(const EllipticCone& cone, double I1, double I2);

/// cos(ξ₂ - ξ₁) = 2m₁₂²/(m₁₂² + I₂) - 1.
double cos_angle_gap(double I2, double m12);

/// Discriminant of the line substituted into the caustic cone
/// (x³)²/(1-λ) = (x¹)²/(a²+λ) + (x²)²/(b²+λ), λ = -c₂/c₁, relative to the size of
/// its terms: 0 for tangent lines, of order 1 for transversal ones.
double caustic_tangency_residual(const EllipticCone& cone, const Line3& line, double c1, double c2);

}  // namespace conebill
