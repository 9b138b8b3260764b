#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bdgkit/errors.hpp"
#include "bdgkit/inequalities.hpp"
#include "bdgkit/montecarlo.hpp"

using namespace bdgkit;

namespace {

EnsembleSpec ensemble(PathFamily kind, std::size_t paths, std::size_t steps, std::size_t dim = 1,
                      std::uint64_t seed = 1) {
    EnsembleSpec e;
    e.family.kind = kind;
    e.n_paths = paths;
    e.n_steps = steps;
    e.dim = dim;
    e.seed = seed;
    return e;
}

// Sample mean and variance of all increments of an ensemble.
std::pair<double, double> increment_moments(const EnsembleSpec& spec, std::size_t* count) {
    std::vector<double> inc(spec.n_steps * spec.dim);
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < spec.n_paths; ++i) {
        generate_increments(spec, i, inc);
        for (double x : inc) {
            sum += x;
            sum_sq += x * x;
            ++n;
        }
    }
    *count = n;
    const double mean = sum / static_cast<double>(n);
    return {mean, sum_sq / static_cast<double>(n) - mean * mean};
}

} // namespace

// =============================================================================
// Ensembles
// =============================================================================

TEST(Ensemble, Validation) {
    EXPECT_THROW(validate(ensemble(PathFamily::brownian, 0, 10)), ValidationError);
    EXPECT_THROW(validate(ensemble(PathFamily::brownian, 10, 0)), ValidationError);
    auto poisson = ensemble(PathFamily::compensated_poisson, 10, 10);
    poisson.family.rate = 0.0;
    EXPECT_THROW(validate(poisson), ValidationError);
    auto stable = ensemble(PathFamily::stable_truncated, 10, 10);
    stable.family.alpha = 2.5;
    EXPECT_THROW(validate(stable), ValidationError);
    for (auto f : {PathFamily::brownian, PathFamily::compensated_poisson, PathFamily::stable_truncated}) {
        EXPECT_EQ(path_family_from_string(to_string(f)), f);
    }
    EXPECT_THROW(path_family_from_string("levy"), ValidationError);
}

TEST(Ensemble, DeterministicAndConsistent) {
    const auto spec = ensemble(PathFamily::compensated_poisson, 20, 50, 2, 42);
    const PathEnsemble a = simulate(spec);
    const PathEnsemble b = simulate(spec);
    EXPECT_EQ(a.paths, b.paths);
    auto other = spec;
    other.seed = 43;
    EXPECT_NE(simulate(other).paths, a.paths);

    std::vector<double> inc(spec.n_steps * spec.dim);
    generate_increments(spec, 7, inc);
    for (std::size_t k = 1; k <= spec.n_steps; ++k) {
        for (std::size_t c = 0; c < spec.dim; ++c) {
            EXPECT_NEAR(a.point(7, k)[c] - a.point(7, k - 1)[c], inc[(k - 1) * spec.dim + c], 1e-12);
        }
    }
    EXPECT_EQ(a.point(3, 0)[0], 0.0);
    std::vector<double> wrong(3);
    EXPECT_THROW(generate_increments(spec, 0, wrong), StructuralError);
}

TEST(Ensemble, CapacityLimit) {
    const auto spec = ensemble(PathFamily::brownian, 100, 100);
    EXPECT_THROW(simulate(spec, 1000), CapacityError);
    EXPECT_NO_THROW(simulate(spec, 100 * 101));
}

TEST(Ensemble, BrownianIncrementMoments) {
    const auto spec = ensemble(PathFamily::brownian, 4000, 4, 1, 3);
    std::size_t n = 0;
    const auto [mean, var] = increment_moments(spec, &n);
    const double dt = 0.25;
    EXPECT_LT(std::abs(mean), 5.0 * std::sqrt(dt / static_cast<double>(n)));
    // Var of the sample variance of N(0, dt) is about 2 dt² / n.
    EXPECT_LT(std::abs(var - dt), 5.0 * dt * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST(Ensemble, PoissonIncrementMoments) {
    auto spec = ensemble(PathFamily::compensated_poisson, 4000, 5, 1, 4);
    spec.family.rate = 5.0;
    std::size_t n = 0;
    const auto [mean, var] = increment_moments(spec, &n);
    const double lambda_dt = 5.0 * 0.2;
    EXPECT_LT(std::abs(mean), 5.0 * std::sqrt(lambda_dt / static_cast<double>(n)));
    // Fourth central moment of a Poisson(μ) is μ + 3μ².
    const double se_var = std::sqrt((lambda_dt + 3.0 * lambda_dt * lambda_dt - lambda_dt * lambda_dt) /
                                    static_cast<double>(n));
    EXPECT_LT(std::abs(var - lambda_dt), 5.0 * se_var);
}

TEST(Ensemble, StableIncrementsAreCentred) {
    const auto spec = ensemble(PathFamily::stable_truncated, 2000, 10, 1, 5);
    std::size_t n = 0;
    const auto [mean, var] = increment_moments(spec, &n);
    EXPECT_GT(var, 0.0);
    EXPECT_LT(std::abs(mean), 5.0 * std::sqrt(var / static_cast<double>(n)));
}

// =============================================================================
// Summaries and estimates
// =============================================================================

TEST(Summary, HandComputedPaths) {
    const std::vector<double> scalar = {1.0, -2.0};
    const PathSummary s = summarize_increments(scalar, 1, {});
    EXPECT_EQ(s.sup_norm, 1.0);
    EXPECT_EQ(s.qv, 5.0);
    EXPECT_EQ(s.terminal_sq, 1.0);
    EXPECT_EQ(s.terminal[0], -1.0);

    const std::vector<double> planar = {3.0, 4.0, -3.0, -4.0};
    const PathSummary v = summarize_increments(planar, 2, {});
    EXPECT_EQ(v.sup_norm, 5.0);
    EXPECT_EQ(v.qv, 50.0);
    EXPECT_EQ(v.terminal_sq, 0.0);
    EXPECT_THROW(summarize_increments(planar, 3, {}), StructuralError);
}

TEST(Summary, ThreadCountDoesNotMatter) {
    const auto spec = ensemble(PathFamily::brownian, 50, 200, 2, 9);
    const std::vector<AuxRequest> aux = {{AuxConstruction::ub2c, 1.0}};
    const auto one = summarize(spec, aux, 1);
    const auto three = summarize(spec, aux, 3);
    ASSERT_EQ(one.size(), three.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].sup_norm, three[i].sup_norm);
        EXPECT_EQ(one[i].qv, three[i].qv);
        EXPECT_EQ(one[i].aux[0].rhs, three[i].aux[0].rhs);
    }
    const auto from_paths = summarize(simulate(spec), aux);
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_NEAR(from_paths[i].qv, one[i].qv, 1e-10);
    }
}

TEST(Summary, Estimate) {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const McEstimate e = estimate(x);
    EXPECT_DOUBLE_EQ(e.value, 2.0);
    EXPECT_DOUBLE_EQ(e.std_error, 1.0 / std::sqrt(3.0));
    EXPECT_EQ(e.n, 3u);
}

// =============================================================================
// Reports
// =============================================================================

TEST(McReports, Constants) {
    EXPECT_DOUBLE_EQ(mc_upper_constant(0.5), 8.0);
    EXPECT_DOUBLE_EQ(mc_lower_constant(0.5), 4.0);
    EXPECT_DOUBLE_EQ(mc_upper_constant(1.0), 4.0 * std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(mc_lower_constant(1.0), 2.0);
    EXPECT_DOUBLE_EQ(mc_lower_constant(2.0), 1.0);
    EXPECT_DOUBLE_EQ(mc_lower_constant(4.0), std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(mc_upper_constant(4.0), ito_upper_constant(4.0));
    EXPECT_THROW(mc_upper_constant(0.0), DomainError);
}

TEST(McReports, BrownianBracketsPass) {
    const auto spec = ensemble(PathFamily::brownian, 2000, 500, 1, 11);
    const auto paths = summarize(spec, {});
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
        for (const auto& r : bdg_mc_report(spec, paths, p)) {
            EXPECT_TRUE(r.report.pass) << r.report.name << " p=" << p;
            EXPECT_GT(r.lhs.std_error, 0.0);
        }
    }
    for (const auto& r : l2_bracket_report(paths)) {
        EXPECT_TRUE(r.report.pass) << r.report.name;
    }
    EXPECT_TRUE(mc_isometry_report(paths).report.pass);
    EXPECT_TRUE(terminal_mean_report(paths).report.pass);
}

TEST(McReports, QuadraticVariationConvergence) {
    // Q = Σ(ΔW)² is close to N(1, 2/n), so E|Q - 1| ≈ sqrt(4 / (π n)):
    // 0.0505 at n = 500, 0.0252 at n = 2000.
    const auto spec = ensemble(PathFamily::brownian, 2000, 2000, 1, 16);
    const auto paths = summarize(spec, {});
    const McReport r = qv_convergence_report(spec, paths);
    EXPECT_TRUE(r.report.pass);
    EXPECT_NEAR(r.lhs.value, std::sqrt(4.0 / (std::numbers::pi * 2000.0)), 5.0 * r.lhs.std_error);
}

TEST(McReports, JumpFamiliesNeedPAtLeastOne) {
    auto spec = ensemble(PathFamily::compensated_poisson, 200, 100, 1, 12);
    spec.family.rate = 5.0;
    const auto paths = summarize(spec, {});
    EXPECT_THROW(bdg_mc_report(spec, paths, 0.5), DomainError);
    for (const auto& r : bdg_mc_report(spec, paths, 1.0)) {
        EXPECT_TRUE(r.report.pass) << r.report.name;
    }
    EXPECT_THROW(qv_convergence_report(spec, paths), DomainError);
}

// =============================================================================
// Auxiliary constructions
// =============================================================================

TEST(Aux, EffectiveEpsilon) {
    AuxRequest lb{AuxConstruction::lb2c, 1.0, 1e-6};
    EXPECT_DOUBLE_EQ(effective_eps(lb, 10000), 0.01);
    lb.floor_eps = false;
    EXPECT_DOUBLE_EQ(effective_eps(lb, 10000), 1e-6);
    const AuxRequest ub{AuxConstruction::ub2c, 1.0, 1e-6};
    EXPECT_DOUBLE_EQ(effective_eps(ub, 10000), 1e-6);
}

TEST(Aux, RequestValidation) {
    EXPECT_THROW(validate(AuxRequest{AuxConstruction::ub2c, 2.5}), DomainError);
    EXPECT_THROW(validate(AuxRequest{AuxConstruction::lb2c, 2.0}), DomainError);
    EXPECT_THROW(validate(AuxRequest{AuxConstruction::lbp_gt2, 2.0}), DomainError);
    EXPECT_THROW(validate(AuxRequest{AuxConstruction::ub2c, 1.0, 0.0}), DomainError);
    EXPECT_EQ(aux_construction_from_string("lbp_gt2"), AuxConstruction::lbp_gt2);
    EXPECT_THROW(aux_construction_from_string("ub3"), ValidationError);
}

TEST(Aux, QuadraticCaseIsTheMartingaleItself) {
    // p = 2: H ≡ 1, N = M, and the bound reads M* <= 2 M*.
    const auto spec = ensemble(PathFamily::brownian, 300, 400, 1, 13);
    const std::vector<AuxRequest> aux = {{AuxConstruction::ub2c, 2.0}};
    const auto paths = summarize(spec, aux);
    for (const auto& s : paths) {
        EXPECT_NEAR(s.aux[0].rhs, 2.0 * s.sup_norm, 1e-12 * (1.0 + s.sup_norm));
    }
    const AuxReport r = auxiliary_construction_report(paths, 0, aux[0]);
    EXPECT_TRUE(r.report.pass);
    EXPECT_EQ(r.pass_fraction, 1.0);
}

TEST(Aux, ConstructionsPassOnBrownianPaths) {
    const auto spec = ensemble(PathFamily::brownian, 500, 2000, 1, 14);
    const std::vector<AuxRequest> aux = {{AuxConstruction::ub2c, 1.0},
                                         {AuxConstruction::ub2c, 0.5},
                                         {AuxConstruction::lb2c, 1.0},
                                         {AuxConstruction::lbp_gt2, 4.0}};
    const auto paths = summarize(spec, aux);
    for (std::size_t a = 0; a < aux.size(); ++a) {
        const AuxReport r = auxiliary_construction_report(paths, a, aux[a]);
        EXPECT_TRUE(r.report.pass) << to_string(aux[a].which) << " p=" << aux[a].p;
        EXPECT_GE(r.pass_fraction, 0.99);
    }
    // The summation-by-parts bounds hold on every path.
    EXPECT_EQ(auxiliary_construction_report(paths, 0, aux[0]).pass_fraction, 1.0);
    EXPECT_EQ(auxiliary_construction_report(paths, 3, aux[3]).pass_fraction, 1.0);
    EXPECT_LT(auxiliary_construction_report(paths, 3, aux[3]).mean_relative_error, 0.05);
    EXPECT_THROW(auxiliary_construction_report(paths, 9, aux[0]), StructuralError);
}

TEST(Aux, SweepUsesRawEpsilon) {
    const auto spec = ensemble(PathFamily::brownian, 100, 400, 1, 15);
    const std::vector<double> eps = {1e-6, 1e-2, 1e-1};
    const auto sweep = aux_eps_sweep(spec, {AuxConstruction::lb2c, 1.0}, eps);
    ASSERT_EQ(sweep.size(), 3u);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        EXPECT_DOUBLE_EQ(sweep[i].eps, eps[i]);
    }
    // A larger regularisation only helps this bound.
    EXPECT_LE(sweep[0].pass_fraction, sweep[2].pass_fraction);
}
