#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bdgkit/report.hpp"
#include "bdgkit/rng.hpp"

namespace bdgkit {

// =============================================================================
// Ensembles
// =============================================================================

enum class PathFamily { brownian, compensated_poisson, stable_truncated };

const char* to_string(PathFamily family);
PathFamily path_family_from_string(const std::string& name);

struct FamilySpec {
    PathFamily kind = PathFamily::brownian;
    double rate = 1.0;  // compensated_poisson
    double alpha = 1.5; // stable_truncated
    double cap = 10.0;  // stable_truncated, on the unscaled jump
};

struct EnsembleSpec {
    FamilySpec family;
    std::size_t n_paths = 1000;
    std::size_t n_steps = 1000;
    std::size_t dim = 1;
    std::uint64_t seed = 0;

    double dt() const { return 1.0 / static_cast<double>(n_steps); }
};

void validate(const EnsembleSpec& spec);

inline constexpr std::size_t kDefaultSampleCap = std::size_t{1} << 26;

/// Paths on [0, 1], X_0 = 0, stored [path][step][coord] with n_steps + 1
/// points per path.
struct PathEnsemble {
    EnsembleSpec spec;
    std::vector<double> paths;

    std::span<const double> point(std::size_t path, std::size_t step) const {
        return {paths.data() + (path * (spec.n_steps + 1) + step) * spec.dim, spec.dim};
    }
};

/// Increments of path `index`, n_steps * dim values, drawn from the substream
/// substream_seed(seed, index). Same numbers as simulate() stores.
void generate_increments(const EnsembleSpec& spec, std::size_t index, std::span<double> out);

/// Throws CapacityError if n_paths * (n_steps + 1) * dim exceeds `cap`.
PathEnsemble simulate(const EnsembleSpec& spec, std::size_t cap = kDefaultSampleCap);

// =============================================================================
// Estimates
// =============================================================================

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

McEstimate estimate(std::span<const double> samples);

// =============================================================================
// Per-path summaries
// =============================================================================

enum class AuxConstruction { ub2c, lbp_gt2, lb2c };

const char* to_string(AuxConstruction which);
AuxConstruction aux_construction_from_string(const std::string& name);

inline constexpr double kDefaultAuxEpsilon = 1e-6;

struct AuxRequest {
    AuxConstruction which = AuxConstruction::ub2c;
    double p = 1.0;
    double eps = kDefaultAuxEpsilon;
    // lb2c only: use max(eps, sqrt(dt)). Below the step scale the predictable
    // integrand (ε + M*_{k-1})^{p/2-1} blows up on the first steps and the
    // pathwise bound fails on almost every path.
    bool floor_eps = true;
};

/// Regularisation actually used for a path with n_steps steps on [0, 1].
double effective_eps(const AuxRequest& request, std::size_t n_steps);

/// Two sides of the pathwise inequality lhs <= rhs of a construction, plus,
/// for lbp_gt2, the relative error of [N,N]_T against (ε+[M,M]_T)^{p/2} - ε^{p/2}.
struct AuxOutcome {
    double lhs = 0.0;
    double rhs = 0.0;
    double relative_error = 0.0;
};

struct PathSummary {
    double sup_norm = 0.0;    // M*_T
    double qv = 0.0;          // [M,M]_T
    double terminal_sq = 0.0; // ‖M_T‖²
    std::vector<double> terminal;
    std::vector<AuxOutcome> aux;
};

/// One pass over a path given by its increments.
PathSummary summarize_increments(std::span<const double> increments, std::size_t dim,
                                 std::span<const AuxRequest> aux);

/// Summaries of every path, computed on `threads` workers (0 = hardware) and
/// returned in path order.
std::vector<PathSummary> summarize(const EnsembleSpec& spec, std::span<const AuxRequest> aux,
                                   unsigned threads = 0);
std::vector<PathSummary> summarize(const PathEnsemble& ens, std::span<const AuxRequest> aux);

// =============================================================================
// Reports
// =============================================================================

/// Report whose sides are Monte Carlo estimates. pass: lhs <= C·rhs +
/// 3·sqrt(se_lhs² + C²·se_rhs²).
struct McReport {
    InequalityReport report;
    McEstimate lhs;
    McEstimate rhs;
};

double mc_upper_constant(double p);
double mc_lower_constant(double p);

/// upper ‖M*_T‖_p vs ‖[M,M]_T^{1/2}‖_p and lower (swapped), norms estimated
/// from the moments with delta-method standard errors. p < 1 needs brownian.
std::vector<McReport> bdg_mc_report(const EnsembleSpec& spec, std::span<const PathSummary> paths, double p);
std::vector<McReport> bdg_mc_report(const PathEnsemble& ens, double p);

/// E[M,M]_T <= E(M*_T)² <= 4 E[M,M]_T on paired differences, within 3 SE.
std::vector<McReport> l2_bracket_report(std::span<const PathSummary> paths);

/// |E‖M_T‖² - E[M,M]_T| within 3 SE.
McReport mc_isometry_report(std::span<const PathSummary> paths);

/// E|[M,M]_T / d - 1| against `limit` (brownian only).
McReport qv_convergence_report(const EnsembleSpec& spec, std::span<const PathSummary> paths, double limit = 0.05);

/// max_i |mean of coordinate i of M_T| / (5 SE) <= 1.
McReport terminal_mean_report(std::span<const PathSummary> paths);

/// Fraction of paths on which the construction's pathwise inequality holds,
/// judged against `min_fraction`. lbp_gt2 also requires the [N,N] relative
/// error to stay below `equality_slack`.
struct AuxReport {
    InequalityReport report; // lhs = failing fraction, rhs = 1 - min_fraction
    double pass_fraction = 0.0;
    double max_excess = 0.0; // max over paths of lhs/rhs - 1
    double mean_relative_error = 0.0;
    double eps = 0.0; // effective regularisation
};

inline constexpr double kAuxMinFraction = 0.99;
inline constexpr double kAuxEqualitySlack = 0.05;

void validate(const AuxRequest& request);

AuxReport auxiliary_construction_report(std::span<const PathSummary> paths, std::size_t aux_index,
                                        const AuxRequest& request, double min_fraction = kAuxMinFraction,
                                        double equality_slack = kAuxEqualitySlack);
AuxReport auxiliary_construction_check(const PathEnsemble& ens, const AuxRequest& request);

/// The same construction for each ε in `eps_values`, without the √dt floor.
std::vector<AuxReport> aux_eps_sweep(const EnsembleSpec& spec, AuxRequest request, std::span<const double> eps_values,
                                     unsigned threads = 0);

} // namespace bdgkit
