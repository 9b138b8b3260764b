#pragma once

#include "bdgkit/calculus.hpp"
#include "bdgkit/prob_space.hpp"
#include "bdgkit/report.hpp"

namespace bdgkit {

/// M = L + K with K = K1 - K2, where K1 collects the jumps of M that are at
/// least twice the previous running max jump S_{n-1} (S_{-1} := 0, ties go to
/// K1) and K2 is the compensator of K1.
struct DavisDecomposition {
    Process L;
    Process K;
    Process K1;
    Process K2;
    PathFunctional S;
};

DavisDecomposition davis_decompose(const FilteredSpace& space, const Process& m, double martingale_tol = 1e-9);

/// Measured certificates for the three Davis properties plus the bound on the
/// compensator jumps ‖ΔK2_n‖ <= 2 S_{n-1}.
struct DavisCertificate {
    double sum_residual = 0.0;      // max ‖M - L - K‖
    double jump_excess = 0.0;       // max (‖ΔL_n‖ - 4 S_{n-1})
    double jump_ratio = 0.0;        // max ‖ΔL_n‖ / S_{n-1} over S_{n-1} > 0
    double variation_excess = 0.0;  // max (Σ‖ΔK1‖ - 2 S_T)
    double compensator_excess = 0.0; // max (‖ΔK2_n‖ - 2 S_{n-1})
    bool l_martingale = false;
    bool k_martingale = false;

    bool sum_ok() const { return sum_residual <= 1e-12 * scale; }
    bool jump_ok() const { return jump_excess <= 1e-10; }
    bool variation_ok() const { return variation_excess <= 1e-12 * scale; }
    bool compensator_ok() const { return compensator_excess <= 1e-10; }
    bool ok() const {
        return sum_ok() && jump_ok() && variation_ok() && compensator_ok() && l_martingale && k_martingale;
    }

    double scale = 1.0; // max(1, max |M|) for the relative checks
};

DavisCertificate certify(const FilteredSpace& space, const Process& m, const DavisDecomposition& dec);

/// At every n with ‖ΔM_n‖ >= 2 S_{n-1}: ‖ΔM_n‖ <= 2 (S_n - S_{n-1}).
bool check_jump_doubling(const Process& m);

/// ‖Σ|ΔK_n|‖_{L_p} <= 4(p+1) ‖S_T‖_{L_p} for scalar M, p >= 1, and
/// ‖Σ‖ΔK_n‖‖_{L_1} <= 4 ‖S_T‖_{L_1} for vector M. Vector M with p > 1 is
/// unsupported.
InequalityReport check_dK_bound(const FilteredSpace& space, const Process& m, double p);

} // namespace bdgkit
