#pragma once

// A C² strictly convex closed curve through q_k = (cos ξ_k, sin ξ_k) with
// prescribed inward normals w_k: unit circles through each q_k, blended on
// [ξ_{k+1}, ξ_k] by a C∞ plateau function, and the unit circle elsewhere.

#include <memory>
#include <vector>

#include "conebill/general_cone.hpp"
#include "conebill/polar_section.hpp"
#include "conebill/spiral_trajectory.hpp"

namespace conebill {

struct BumpValue {
  double a = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// 1 on [0, 1/3], 0 on [2/3, 1], logistic in 1/x - 1/(1-x) in between.
BumpValue bump(double t);

/// max(sup|a'|, sup|a''|, 1), sampled.
double bump_constant();

/// r = g(ξ, σ): the unit circle through (1, 0) whose inward normal there is
/// -(1, 0) rotated by σ. Returned as g - 1 with ∂g/∂ξ, ∂²g/∂ξ².
/// Domain [-π/3, π/3] × [-π/4, π/4]; DomainError outside.
PolarSample circle_polar(double xi, double sigma);

struct CurveBuildOptions {
  double kappa_threshold = 0.5;
  long min_k1 = 1;                 // k1 is never chosen below this
  long scan_k_max = 20000;         // windows examined when choosing k1
  int samples_per_window = 64;
};

class BuiltCurve final : public PolarSection {
 public:
  static std::shared_ptr<const BuiltCurve> build(const SpiralParams& params,
                                                 const CurveBuildOptions& options = {});

  /// ρ on the window [ξ_{k+1}, ξ_k] blended from the arcs k and k+1; for
  /// ξ outside (0, ξ_{k1}] the unit circle.
  PolarSample sample(double xi) const override;

  /// ρ_k(ξ) = g(ξ - ξ_k, σ_k), with ρ_k ≡ 1 for k ≤ k1.
  PolarSample arc(long k, double xi) const;

  /// The blend of arcs k and k+1 evaluated at any ξ (τ clamped to [0, 1]).
  PolarSample window(long k, double xi) const;

  long k1() const { return k1_; }
  double sigma(long k) const;
  const SpiralParams& params() const { return params_; }
  const CurveBuildOptions& options() const { return options_; }

  /// Minimum sampled curvature over the windows examined during the build.
  double min_sampled_kappa() const { return min_kappa_; }

  /// Minimum curvature over `samples` interior points and the endpoints of window k.
  double window_min_kappa(long k, int samples) const;

 private:
  BuiltCurve(const SpiralParams& params, const CurveBuildOptions& options);

  SpiralParams params_;
  CurveBuildOptions options_;
  long k1_ = 1;
  double min_kappa_ = 1.0;
  std::vector<double> sigma_;  // σ_k for 2 ≤ k < sigma_.size()
};

struct CurvatureSurvey {
  long samples = 0;
  double min_kappa = 0.0;
  double argmin_xi = 0.0;
  // Largest one-sided jumps of ρ, ρ', ρ'' at the junctions ξ_k, k1 ≤ k ≤ k_hi,
  // and at ξ = 0 against the unit circle.
  double junction_rho = 0.0;
  double junction_d1 = 0.0;
  double junction_d2 = 0.0;
};

/// κ at per_window interior points of every window k1 ≤ k < k_hi plus its ends,
/// at `uniform` points around the circle and at `log_points` log-spaced points
/// in (1e-12, ξ_{k_hi}).
CurvatureSurvey curvature_survey(const BuiltCurve& curve, long k_hi = 2000, int per_window = 64,
                                 int uniform = 20000, int log_points = 2000);

struct C2CheckOptions {
  long k_lo = 100;
  long k_hi = 100000;
  int k_points = 31;
  int samples_per_window = 64;
  double slope_tol = 0.15;
  bool throw_on_failure = true;
};

struct DecayFit {
  double slope = 0.0;
  double expected = 0.0;
  double constant = 0.0;   // max over k of sup·k^{-expected}
  bool ok = false;
};

struct C2Report {
  DecayFit dev;   // sup|ρ - 1|
  DecayFit d1;    // sup|ρ'|
  DecayFit d2;    // sup|ρ''|
  double rho_prime_at_zero = 0.0;   // one-sided quotient (ρ(h) - 1)/h at the smallest h
  double rho_second_at_zero = 0.0;  // (ρ'(h) - 0)/h at the smallest h
  std::vector<long> ks;
  bool passed = false;
};

C2Report c2_check_at_zero(const BuiltCurve& curve, const C2CheckOptions& options = {});

/// Number of k in [k_lo, k_hi] where ρ - 1 changes sign across q_k
/// (tested at ξ_k ± δ_k/10).
long sign_change_census(const BuiltCurve& curve, long k_lo, long k_hi);

struct ReplayReport {
  long k_start = 0;
  long steps = 0;
  double max_vertex_error = 0.0;   // relative to ‖p_k‖
  double max_distance_sq_error = 0.0;
  double cumulative_length = 0.0;
  double closed_partial_length = 0.0;  // √2 (tan A_{k_start+K} - tan A_{k_start})
  double remaining_length = 0.0;       // closed form beyond the last vertex
  bool remaining_infinite = false;
  bool length_increasing = true;
  std::vector<double> partial_lengths;
};

/// Runs the general-cone simulator over the built curve from l_{k'} and
/// compares every vertex with the closed-form p_k. Throws ReplayFailure at
/// the first vertex whose relative error exceeds tol.
ReplayReport replay(std::shared_ptr<const BuiltCurve> curve, long steps, long k_start = 0,
                    double tol = 1e-7);

}  // namespace conebill
