#pragma once

#include <span>
#include <vector>

#include "bdgkit/prob_space.hpp"
#include "bdgkit/report.hpp"

namespace bdgkit {

// =============================================================================
// Stein operator
// =============================================================================

/// (E_{n_k} f_k)_k, computed exactly. Throws DomainError for n_k outside 0..T
/// and StructuralError for mismatched sizes.
std::vector<RandomVector> stein_apply(const FilteredSpace& space, std::span<const RandomVector> f,
                                      std::span<const int> n_indices);

/// C_p = (p')^{1-p/2} for 1 < p <= 2 and C_p = C_{p'} for p > 2.
double stein_constant(double p);

/// ‖(E_{n_k} f_k)‖_{L_p(ℓ_2)} against ‖f‖_{L_p(ℓ_2)} with the constant above.
InequalityReport stein_report(const FilteredSpace& space, std::span<const RandomVector> f,
                              std::span<const int> n_indices, double p);

/// The same operator on L_p(ℓ_p), constant 1 (conditional Jensen).
InequalityReport stein_lp_contraction_report(const FilteredSpace& space, std::span<const RandomVector> f,
                                             std::span<const int> n_indices, double p);

// =============================================================================
// Mixed norms
// =============================================================================

struct MixedNormSpec {
    double p = 2.0;
    double q = 2.0; // may be +inf
    std::size_t inner_dim = 1;
};

void validate(const MixedNormSpec& spec);

/// (E (Σ_k ‖f_k‖^q)^{p/q})^{1/p}, with sup_k for q = ∞.
double mixed_norm(const FilteredSpace& space, std::span<const RandomVector> f, const MixedNormSpec& spec);

} // namespace bdgkit
