#pragma once

// The vertex sequence p_k = t_k (cos ξ_k, sin ξ_k, 1), ξ_k = k^{-1/2},
// t_k = 1/cos(a - S_k), S_k = Σ_{i≥k} θ_i, whose polygonal line has every
// chord at distance √2 from O and reflects off the cone over a suitable curve.

#include <vector>

#include "conebill/core_geometry.hpp"

namespace conebill {

double spiral_xi(long k);
/// ξ_k - ξ_{k+1} in rationalized form.
double spiral_delta(long k);
/// 2 arcsin(sin(δ_k/2)/√2).
double spiral_theta(long k);
/// arccos((cos δ_k + 1)/2), the second closed form of θ_k.
double spiral_theta_arccos(long k);
/// θ_k - δ_k/√2 without cancellation.
double spiral_theta_excess(long k);

/// S_k to absolute accuracy tol: ξ_k/√2 plus the summed excesses, the far
/// tail replaced by its leading-order integral estimate.
/// Throws ToleranceError if tol needs more than 10⁹ explicit terms.
double theta_tail(long k, double tol = 1e-17);

/// Smallest k with a - S_k > -π/2.
long spiral_k0(double a);

/// Immutable table of S_k for k in [k_lo, k_hi], built by backward recursion.
class TailTable {
 public:
  TailTable(long k_lo, long k_hi, double tol = 1e-17);

  long k_lo() const { return k_lo_; }
  long k_hi() const { return k_hi_; }
  double S(long k) const;

 private:
  long k_lo_;
  long k_hi_;
  std::vector<double> excess_tail_;  // S_k - ξ_k/√2
};

struct SpiralParams {
  double a = 0.0;
  double tail_tol = 1e-17;
  long k0 = 1;

  static SpiralParams make(double a, double tail_tol = 1e-17);
};

struct TotalLength {
  bool infinite = false;
  double value = 0.0;
};

class Spiral {
 public:
  /// Vertices p_k for k0(a) ≤ k ≤ k_max + 1 become available.
  Spiral(const SpiralParams& params, long k_max);

  const SpiralParams& params() const { return params_; }
  double a() const { return params_.a; }
  long k0() const { return params_.k0; }
  long k_max() const { return k_max_; }

  double S(long k) const;
  double A(long k) const;  // a - S_k
  double t(long k) const;
  Vec3 vertex(long k) const;
  /// p_{k+1} - p_k assembled without subtracting nearby vertices.
  Vec3 chord(long k) const;
  Direction3 direction(long k) const;
  Line3 line(long k) const;

  /// (sin θ_k/√2)‖p_k‖‖p_{k+1}‖.
  double chord_length(long k) const;
  /// √2 (tan A_{k+1} - tan A_k).
  double chord_length_telescoped(long k) const;
  /// √2 (tan A_{K+1} - tan A_{k0}) in sine form.
  double partial_length_closed(long K) const;
  /// Σ_{k0}^{K} chord_length(k), compensated.
  double partial_length_sum(long K) const;
  /// Closed form of the remaining length after K chords; infinite for a = π/2.
  TotalLength remaining_length(long K) const;

  /// sin(a - S_k), the closed form of cos α_k.
  double cos_alpha_closed(long k) const;

  /// dist(l_k, O) - √2.
  double verify_distance(long k) const;

  struct EqualAngles {
    double alpha;  // angle(v_k, p_k)
    double beta;   // angle(v_{k-1}, p_k)
  };
  EqualAngles verify_equal_angles(long k) const;

  ReflectionRecord<3> record(long k) const;

 private:
  void check_index(long k, long hi) const;

  SpiralParams params_;
  long k_max_;
  TailTable tails_;
};

/// √2 sin S_{k0} / (cos(a - S_{k0}) cos a); flagged infinite at a = π/2.
TotalLength total_length(const SpiralParams& params);

struct NormalFrame {
  Vec2 q;        // (cos ξ_k, sin ξ_k)
  Vec2 w;        // required inward normal of the curve at q_k
  double sigma;  // oriented angle from z_k = -q_k to w_k

  /// w_k rotated clockwise by π/2.
  Vec2 tangent() const { return Vec2(w[1], -w[0]); }
};

/// g_k and f_k of the decomposition (N¹, N²) ∝ g_k z_k + f_k z̃_k.
struct NormalCoefficients {
  double g;
  double f;
};
NormalCoefficients normal_coefficients(long k);

/// σ_k = atan2(f_k, g_k) for k ≥ 2; beyond 10⁶ the three-term expansion
/// (3/16 + (35/256)/k² + (3/512)/k³) k^{-5/2} is used.
double spiral_sigma(long k);
NormalFrame normal_frame(long k);

/// Direction of the x¹x²-projection of v_k - v_{k-1}.
Vec2 normal_by_projection(const Spiral& spiral, long k);

}  // namespace conebill
