#pragma once

#include <span>
#include <string>

#include "bdgkit/prob_space.hpp"

namespace bdgkit {

/// Named nonnegative (or real) path functional, values[time][atom].
struct PathFunctional {
    std::string name;
    Process values; // dim 1

    double operator()(std::size_t n, std::size_t atom) const { return values(n, atom); }
    double terminal(std::size_t atom) const { return values(values.steps() - 1, atom); }
    /// Terminal values as a per-atom array.
    std::vector<double> terminal_values() const;
};

// =============================================================================
// Integrals
// =============================================================================

/// Predictable version of an adapted integrand: value at step n is H_{n-1},
/// with H_0 kept at n = 0.
Process left_shift(const Process& h);

/// (H·M)_n = Σ_{k=1..n} H_k ΔM_k for a scalar predictable H.
///
/// Operator-valued integrands are not supported: H must have dim 1.
Process stoch_integral(const Process& h, const Process& m);

// =============================================================================
// Path functionals
// =============================================================================

/// [M,N]_n = Σ_{k<=n} (ΔM_k, ΔN_k), including the k = 0 term (ΔX_0 = X_0).
PathFunctional covariation(const Process& m, const Process& n);
PathFunctional quadratic_variation(const Process& m);

/// Running sup of ‖M‖.
PathFunctional maximal(const Process& m);
/// Running sup of ‖ΔM‖ (S in the Davis decomposition).
PathFunctional jump_maximal(const Process& m);
/// Running sum of ‖ΔX‖.
PathFunctional total_variation(const Process& x);

/// Σ_k |(ΔM_k, ΔN_k)| - the pathwise quantity bounded by Kunita-Watanabe.
PathFunctional absolute_covariation(const Process& m, const Process& n);

// =============================================================================
// Finite-variation calculus identities
// =============================================================================

/// max_{n,ω} |(U_n,V_n) - Σ_{k<=n} (U_{k-1},ΔV_k) - Σ_{k<=n} (V_k,ΔU_k)|, U_{-1} := 0,
/// each residual divided by max(1, sup_{k<=n}‖U_k‖ · sup_{k<=n}‖V_k‖) so that
/// large values are judged by relative round-off.
double check_ibp(const Process& u, const Process& v);

/// max_{n,ω} |[H·M,H·M]_n - Σ_{1<=k<=n} H_k² ‖ΔM_k‖²| for scalar predictable H,
/// divided by max(1, the sum).
double check_integral_qv(const Process& h, const Process& m);

/// max_{n,ω} |[M^τ,M^τ]_n - [M,M]_{n∧τ}|; zero in exact arithmetic, and the
/// sums are formed in the same order so the residual is exactly 0.
double check_stopped_qv(const FilteredSpace& space, const Process& m, const StoppingTime& tau);

struct FvRuleResiduals {
    double square_rule = 0.0;     // Δ(U²) = (U_- + U) ΔU
    double sqrt_rule = 0.0;       // Δ(U^½) = ΔU / (U_-^½ + U^½)
    double reciprocal_rule = 0.0; // Δ(-1/U) = ΔU / (U U_-)
};

/// Residuals of the three increment rules for a positive scalar U, n >= 1.
/// The square rule is divided by max(1, U_n² + U_{n-1}²).
FvRuleResiduals check_fv_rules(const Process& u);

struct FvLemmaResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0; // regularisation allowance added to rhs, q < 1 only
    bool ok = true;
};

inline constexpr double kFvRegularization = 1e-8;

/// Discrete Riemann-Stieltjes sums for an increasing path with v[0] = 0:
///   q > 1:     Σ V_{k-1} Δ(V^{q-1})_k  <=  (q-1)/q · V_T^q
///   0 < q < 1: Σ V_{k-1} Δ(-V^{q-1})_k <=  (1-q)/q · V_T^q + slack
/// For q < 1 the path is shifted by eps_reg so that V^{q-1} stays finite;
/// the shift costs at most slack = (1-q)/q · eps_reg^q on the right.
FvLemmaResult fv_lemma_path(std::span<const double> v, double q, double eps_reg = kFvRegularization);

/// fv_lemma_path on every atom; the returned sides belong to the atom with the
/// largest lhs - rhs.
FvLemmaResult fv_lemma_bounds(const Process& v, double q, double eps_reg = kFvRegularization);

struct ItoRemainderResult {
    double remainder = 0.0;       // worst-atom remainder
    double bound = 0.0;           // its bound on the same atom
    double max_excess = 0.0;      // max over atoms of remainder - bound
    double martingale_mean = 0.0; // E of the first-order (martingale) part at T
    bool ok = true;
};

/// Pathwise second-order Taylor remainder of ‖M‖^p,
///   R_T = Σ_n (‖M_n‖^p - ‖M_{n-1}‖^p - p‖M_{n-1}‖^{p-2}(M_{n-1}, ΔM_n)),
/// against (p(p-1)/2) (M*_T)^{p-2} [M,M]_T. Requires p >= 2.
ItoRemainderResult check_ito_remainder(const FilteredSpace& space, const Process& m, double p);

} // namespace bdgkit
