#pragma once

#include <span>
#include <string>
#include <vector>

#include "bdgkit/prob_space.hpp"
#include "bdgkit/report.hpp"

namespace bdgkit {

inline constexpr double kDefaultConstantCap = 64.0;

// =============================================================================
// Norms
// =============================================================================

/// (Σ_ω P(ω)|X(ω)|^p)^{1/p}; a quasi-norm for p < 1.
double lp_norm(const FilteredSpace& space, std::span<const double> per_atom, double p);
/// Same for a vector variable, using the Euclidean norm of each value.
double lp_norm(const FilteredSpace& space, const RandomVector& x, double p);

double conjugate_exponent(double p);

// =============================================================================
// BDG sides
// =============================================================================

enum class BdgSide { upper, lower };

/// upper: ‖M*_T‖_p against ‖[M,M]_T^{1/2}‖_p; lower: the reverse. Exact engine,
/// p >= 1. At p = 2 the constants 2 (Doob + isometry) and 1 (isometry) are
/// tracked; elsewhere the report is judged against `cap`.
InequalityReport bdg_report(const FilteredSpace& space, const Process& m, double p, BdgSide side,
                            double cap = kDefaultConstantCap);

/// Constant obtained by chaining Doob with the pathwise Taylor bound for
/// p >= 2: ‖M*‖_p <= (p')^{p/2} (p(p-1)/2)^{1/2} ‖[M,M]^{1/2}‖_p.
double ito_upper_constant(double p);
InequalityReport bdg_upper_ito_report(const FilteredSpace& space, const Process& m, double p);

/// ‖M*_T‖_p <= p/(p-1) ‖M_T‖_p.
InequalityReport doob_report(const FilteredSpace& space, const Process& m, double p);

/// |E‖M_T‖² - E[M,M]_T| <= tol · E[M,M]_T.
InequalityReport isometry_report(const FilteredSpace& space, const Process& m, double tol = 1e-10);

// =============================================================================
// Conditional bounds with a jump-dominating process
// =============================================================================

enum class ConditionalBound { clb1, cub1, clb2minus, cub2minus, clb2plus };

const char* to_string(ConditionalBound which);
ConditionalBound conditional_bound_from_string(const std::string& name);
/// Constant read off the replayed proof for the given bound and exponent.
double conditional_bound_constant(ConditionalBound which, double p);

/// D_n = max(D_{n-1}, max over the F_n-block of ω of ‖ΔM_{n+1}‖), D_T = D_{T-1}.
/// Increasing, adapted, and ‖ΔM_n‖ <= D_{n-1} by construction.
Process dominating_process(const FilteredSpace& space, const Process& m);

/// Throws ValidationError naming the first (n, atom) with ‖ΔM_n‖ > D_{n-1},
/// or if D is not increasing.
void validate_dominance(const FilteredSpace& space, const Process& m, const Process& d, double tol = 1e-10);

/// lhs/rhs per bound (ε = 0):
///   clb1      ‖[M,M]^{1/2}‖_1 vs ‖M* + D‖_1                      C = 2
///   cub1      ‖M*‖_1 vs ‖[M,M]^{1/2} + D‖_1                      C = 4√2
///   clb2minus ‖[M,M]^{1/2}‖_p vs ‖M* + D‖_p, 1 < p < 2           C = 2/p
///   cub2minus ‖M*‖_p vs ‖[M,M]^{1/2} + D‖_p, 1 < p < 2           C = 4√(2/p)
///   clb2plus  ‖[M,M]^{1/2}‖_p vs ‖M*‖_p + 2^{-(p/2+2)}‖D‖_p, p > 2, C = 2^{p/2+2}
InequalityReport conditional_bound_report(const FilteredSpace& space, const Process& m, const Process& d, double p,
                                          ConditionalBound which);

// =============================================================================
// Duality and interpolation lemmas
// =============================================================================

struct DualityChain {
    std::vector<InequalityReport> links;
    InequalityReport conclusion;
};

/// Replays "lower bound in L_p for all martingales gives the upper bound in
/// L_{p'}" on one martingale: ξ ∝ ‖M_T‖^{p'-1} M_T/‖M_T‖ with ‖ξ‖_p = 1,
/// N_n = E_n ξ, then Doob, the duality pairing, E(M_T,ξ) = E[M,N]_T,
/// Kunita-Watanabe and Hölder, each as its own link. The conclusion uses the
/// measured hypothesis constant ‖[N,N]^{1/2}‖_p / ‖ξ‖_p.
DualityChain duality_lower_to_upper_check(const FilteredSpace& space, const Process& m, double p,
                                          double cap = kDefaultConstantCap);

struct InterpolationResult {
    double constant_p1 = 0.0;
    double constant_p2 = 0.0;
    double theta = 0.0;
    std::vector<InequalityReport> members;
    InequalityReport summary;
};

/// Measures C_{p_i} = max ‖[M,M]^{1/2}‖_{p_i} / ‖M_T‖_{p_i} over the
/// ensemble and checks each member at p against C_{p1}^{1-θ} C_{p2}^θ,
/// 1/p = (1-θ)/p1 + θ/p2.
InterpolationResult interpolation_lower_check(std::span<const GeneratedMartingale> ensemble, double p1, double p2,
                                              double p);

// =============================================================================
// Proof-chain replays on a single martingale
// =============================================================================

/// Davis-decomposition route for real martingales. Every link is an
/// InequalityReport; the last two rows are the assembled lower and upper
/// bounds with the constant obtained by chaining the links' constants.
std::vector<InequalityReport> replay_real_chain(const FilteredSpace& space, const Process& m, double p,
                                                double cap = kDefaultConstantCap);

/// Hilbert-space route: compensator L_1 bound at p = 1, Stein's projection
/// bound on the compensator jumps for p > 1.
std::vector<InequalityReport> replay_hilbert_chain(const FilteredSpace& space, const Process& m, double p,
                                                   double cap = kDefaultConstantCap);

/// Pathwise A(ω) <= B(ω) as a report: lhs = max A/B over atoms (A must vanish
/// where B does), rhs = 1, tracked constant 1.
InequalityReport pathwise_report(std::string name, double p, std::span<const double> a, std::span<const double> b,
                                 double tolerance = 1e-12);

} // namespace bdgkit
