#pragma once

#include <string>

#include "conebill/curve_builder.hpp"

namespace conebill::cli {

/// Two panels: γ against the unit circle with q_k markers, and ρ - 1 over
/// [0, ξ_{k1}] with the crossings at q_k.
std::string curve_svg(const BuiltCurve& curve, int markers = 40);

}  // namespace conebill::cli
