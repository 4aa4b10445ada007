#pragma once

namespace conebill {

// Numerical thresholds shared by the simulators. Defaults are the values the
// verification suites are calibrated against.
struct Tolerances {
  double unit_norm = 1e-12;          // |‖v‖ - 1| accepted for a Direction
  double grazing = 1e-12;            // |<v,n>| below this is a grazing hit
  double cone_root = 1e-13;          // |G| target for the general-cone root
  double tangency_bracket = 1e-10;   // relative chord length flagged as tangency
  double cone_t_min = 1e-9;          // general cone: t_min = cone_t_min * ‖base‖
  double scan_step = 1e-2;           // coarse scan step relative to ‖base‖
  int scan_uniform_steps = 200;      // uniform steps before the step starts doubling
  double quadric_t_min = 1e-12;      // elliptic cone: t_min = quadric_t_min * ‖base‖
  double quadric_linear = 1e-14;     // |A| below this falls back to the linear solve
  double discriminant_clamp = 1e-14; // discriminant in (-clamp, 0] is clamped to 0
  double apex_radius = 1e-9;         // hit points this close to O raise the apex flag
  double arcsin_clamp = 1e-12;       // arcsin arguments within this of 1 are clamped
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace conebill
