#pragma once

// Lift of the planar section to ℝⁿ: x¹ = t F₁(x², …, x^{n-1}) with
// F₁ = √(f₁(x²)² - (x³)² - … - (x^{n-1})²), where x¹ = f₁(x²) is the graph
// form of the section over ξ ∈ (-π/2, π/2), and the unit sphere for x¹ < 0.

#include <algorithm>
#include <limits>
#include <memory>
#include <vector>

#include "conebill/core_geometry.hpp"
#include "conebill/polar_section.hpp"
#include "conebill/spiral_trajectory.hpp"

namespace conebill {

struct GraphProfile {
  double x2 = 0.0;
  double xi = 0.0;
  double f = 0.0;    // f₁(x²)
  double d1 = 0.0;   // f₁'
  double d2 = 0.0;   // f₁''
  double gap = 0.0;  // 1 - f₁, without cancellation
};

class LiftedSection {
 public:
  LiftedSection(std::shared_ptr<const PolarSection> section, int n);

  int n() const { return n_; }
  const PolarSection& section() const { return *section_; }

  /// f₁ and derivatives at the point of angle ξ ∈ (-π/2, π/2).
  GraphProfile profile_at_angle(double xi) const;
  /// f₁ and derivatives at x² ∈ (-1, 1); the angle is recovered by bisection.
  GraphProfile profile(double x2) const;

  /// F₁ at (x², …, x^{n-1}); DomainError outside D or for a negative radicand.
  double F1(const VecX& x) const;
  VecX gradient_F1(const VecX& x) const;
  Eigen::MatrixXd hessian_F1(const VecX& x) const;
  /// Central differences of the analytic gradient.
  Eigen::MatrixXd hessian_F1_fd(const VecX& x, double h = 1e-5) const;

  /// wᵀ Hess(F₁) w written as a sum of squares: s w₂²/F - (f f' w₂ - Σ xʲwʲ)²/F³ - Σ (wʲ)²/F.
  double completed_quadratic_form(const VecX& x, const VecX& w) const;

  /// f₁f₁'' + f₁'² at x².
  double scalar_margin(double x2) const;

 private:
  void check_point(const VecX& x) const;

  std::shared_ptr<const PolarSection> section_;
  int n_;
};

/// Smallest k1 for which the section is the unit circle wherever x² ≥ 1/3.
long lift_min_k1();

struct NegdefOptions {
  long target_points = 10000;
  double boundary_margin = 1e-3;
  int scalar_samples = 20000;
};

struct NegdefFailure {
  std::vector<double> point;
  double max_eigenvalue;
};

struct NegdefReport {
  int n = 0;
  long grid_size = 0;
  double max_eigenvalue = -std::numeric_limits<double>::infinity();
  double margin = 0.0;                 // -max_eigenvalue
  double max_scalar_margin = -std::numeric_limits<double>::infinity();   // sup of f₁f₁'' + f₁'² on (-1, 1)
  double max_scalar_margin_window = -std::numeric_limits<double>::infinity();  // same on (0, 1/3)
  double window_bound = 0.0;           // (1/8)(1 - √2/3) - √2/3
  double min_d1_window = 0.0;          // inf f₁' on (0, 1/3)
  double max_d1_window = 0.0;
  double min_f_window = 0.0;
  double max_f_window = 0.0;
  double min_gap_window = 0.0;         // inf (1 - f₁) on (0, 1/3)
  bool window_bounds_ok = false;
  std::vector<NegdefFailure> failures;
  long oracle_disagreements = 0;       // completed square negative but eigen-solve not
  bool passed = false;
};

/// Largest Hessian eigenvalue over a grid of D^{n-2} plus the scalar checks.
/// Throws ConvexityFailure (after filling the report) if any eigenvalue is ≥ 0.
NegdefReport negdef_check(const LiftedSection& section, const NegdefOptions& options = {},
                          bool throw_on_failure = true);

struct EmbeddedReport {
  int n = 0;
  long k_lo = 0;
  long count = 0;
  double max_perpendicular = 0.0;  // |<ṽ_k, ẽ_j>|, j ≥ 3
  double max_e1 = 0.0;             // |<ṽ_k - ṽ_{k+1}, ẽ₁>|
  double max_e2 = 0.0;             // |<ṽ_k - ṽ_{k+1}, ẽ₂>|

  double max_residual() const { return std::max({max_perpendicular, max_e1, max_e2}); }
};

/// Embeds l_k, k_lo ≤ k < k_lo + count, into ℝⁿ and checks the tangential
/// equalities at each p̃_{k+1} against the lifted hypersurface.
EmbeddedReport embedded_reflection_check(const Spiral& spiral, const LiftedSection& section, long k_lo,
                                         long count);

/// (y¹, y², y³) ↦ (y¹, y², 0, …, 0, y³).
VecX embed(const Vec3& y, int n);

}  // namespace conebill
