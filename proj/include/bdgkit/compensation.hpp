#pragma once

#include <utility>

#include "bdgkit/prob_space.hpp"
#include "bdgkit/report.hpp"

namespace bdgkit {

struct CompensatorPair {
    Process raw;
    Process compensated;     // predictable, Ṽ
    Process martingale_part; // raw - compensated
};

/// Dual predictable projection on a finite space:
///   Ṽ_0 = V_0,  Ṽ_n = Ṽ_{n-1} + E[ΔV_n | F_{n-1}].
/// V_0 is F_0-measurable and goes wholly into Ṽ_0, so the martingale part
/// starts at zero.
CompensatorPair compensator(const FilteredSpace& space, const Process& v);

/// Split a scalar process into the running sums of its positive and negative
/// increments: V = V⁺ + V⁻ with ΔV⁺ = max(ΔV, 0), ΔV⁻ = min(ΔV, 0).
std::pair<Process, Process> jordan_split(const Process& v);

/// ‖Ṽ_T‖_{L_p} <= p ‖V_T‖_{L_p} for an increasing scalar V with V_0 >= 0, p >= 1.
InequalityReport check_compensator_lp(const FilteredSpace& space, const Process& v, double p);

/// E Σ‖ΔX̃_n‖ <= E Σ‖ΔX_n‖ for any adapted vector process.
InequalityReport check_compensator_l1_hilbert(const FilteredSpace& space, const Process& x);

} // namespace bdgkit
