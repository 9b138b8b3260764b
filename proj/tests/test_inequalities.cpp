#include <gtest/gtest.h>

#include <cmath>

#include "bdgkit/errors.hpp"
#include "bdgkit/inequalities.hpp"
#include "test_support.hpp"

using namespace bdgkit;
using namespace bdgkit::testing;

namespace {

std::vector<GeneratedMartingale> small_ensemble(std::size_t count, std::uint64_t seed) {
    std::vector<GeneratedMartingale> out;
    for (std::size_t i = 0; i < count; ++i) {
        const JumpLaw law = kAllLaws[i % kAllLaws.size()];
        out.push_back(generate_martingale(spec(2 + static_cast<int>(i % 2), 4, 1 + i % 3, law, seed + i, i % 2 == 0)));
    }
    return out;
}

} // namespace

// =============================================================================
// Norms
// =============================================================================

TEST(LpNorm, TwoAtomExample) {
    const FilteredSpace s = uniform_tree(2, 1);
    const std::vector<double> x = {0.0, 2.0};
    EXPECT_DOUBLE_EQ(lp_norm(s, x, 2.0), std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(lp_norm(s, x, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(lp_norm(s, x, 0.5), 0.5);
    EXPECT_THROW(lp_norm(s, x, 0.0), DomainError);
    EXPECT_THROW(lp_norm(s, x, -1.0), DomainError);
    EXPECT_THROW(lp_norm(s, std::vector<double>{1.0}, 2.0), StructuralError);

    const RandomVector v{2, {3.0, 4.0, 0.0, 0.0}};
    EXPECT_DOUBLE_EQ(lp_norm(s, v, 1.0), 2.5);
}

TEST(LpNorm, LargeValuesDoNotOverflow) {
    const FilteredSpace s = uniform_tree(2, 1);
    const std::vector<double> x = {1e200, 1e200};
    EXPECT_DOUBLE_EQ(lp_norm(s, x, 4.0), 1e200);
}

TEST(LpNorm, ConjugateExponent) {
    EXPECT_DOUBLE_EQ(conjugate_exponent(1.5), 3.0);
    EXPECT_DOUBLE_EQ(conjugate_exponent(3.0), 1.5);
    EXPECT_DOUBLE_EQ(conjugate_exponent(2.0), 2.0);
    EXPECT_THROW(conjugate_exponent(1.0), DomainError);
}

// =============================================================================
// BDG sides
// =============================================================================

TEST(Bdg, OneStepWalkIsTight) {
    const FilteredSpace s = uniform_tree(2, 1);
    const Process m = random_walk(1);
    for (double p : {1.0, 2.0, 3.0}) {
        const InequalityReport up = bdg_report(s, m, p, BdgSide::upper);
        const InequalityReport low = bdg_report(s, m, p, BdgSide::lower);
        EXPECT_DOUBLE_EQ(up.lhs, 1.0);
        EXPECT_DOUBLE_EQ(up.rhs, 1.0);
        EXPECT_TRUE(up.pass);
        EXPECT_TRUE(low.pass);
    }
    EXPECT_EQ(bdg_report(s, m, 2.0, BdgSide::upper).constant(), 2.0);
    EXPECT_EQ(bdg_report(s, m, 2.0, BdgSide::lower).constant(), 1.0);
    EXPECT_EQ(bdg_report(s, m, 3.0, BdgSide::upper, 17.0).constant(), 17.0);
    EXPECT_THROW(bdg_report(s, m, 0.5, BdgSide::upper), DomainError);
}

TEST(Bdg, ZeroMartingaleIsDegenerate) {
    const FilteredSpace s = uniform_tree(3, 2);
    const Process zero = Process::zeros_for(s, 2, Measurability::adapted);
    for (BdgSide side : {BdgSide::upper, BdgSide::lower}) {
        const InequalityReport r = bdg_report(s, zero, 1.5, side);
        EXPECT_TRUE(r.degenerate);
        EXPECT_TRUE(r.pass);
    }
}

TEST(Bdg, ConstantsByHand) {
    EXPECT_DOUBLE_EQ(ito_upper_constant(2.0), 2.0);
    EXPECT_DOUBLE_EQ(ito_upper_constant(4.0), (16.0 / 9.0) * std::sqrt(6.0));
    EXPECT_THROW(ito_upper_constant(1.5), DomainError);
}

TEST(Bdg, GeneratedMartingalesPass) {
    const auto ensemble = small_ensemble(24, 300);
    for (const auto& g : ensemble) {
        for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
            EXPECT_TRUE(bdg_report(g.space, g.martingale, p, BdgSide::upper).pass);
            EXPECT_TRUE(bdg_report(g.space, g.martingale, p, BdgSide::lower).pass);
            if (p > 1.0) {
                EXPECT_TRUE(doob_report(g.space, g.martingale, p).pass);
            }
            if (p >= 2.0) {
                EXPECT_TRUE(bdg_upper_ito_report(g.space, g.martingale, p).pass);
            }
        }
        const InequalityReport iso = isometry_report(g.space, g.martingale);
        EXPECT_TRUE(iso.pass);
        EXPECT_LE(iso.lhs, 1e-10 * iso.rhs);
    }
}

// =============================================================================
// Conditional bounds
// =============================================================================

TEST(ConditionalBounds, Constants) {
    EXPECT_DOUBLE_EQ(conditional_bound_constant(ConditionalBound::clb1, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(conditional_bound_constant(ConditionalBound::cub1, 1.0), 4.0 * std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(conditional_bound_constant(ConditionalBound::clb2minus, 1.5), 4.0 / 3.0);
    EXPECT_DOUBLE_EQ(conditional_bound_constant(ConditionalBound::cub2minus, 1.25), 4.0 * std::sqrt(1.6));
    EXPECT_DOUBLE_EQ(conditional_bound_constant(ConditionalBound::clb2plus, 4.0), 16.0);
    EXPECT_THROW(conditional_bound_constant(ConditionalBound::clb1, 1.5), DomainError);
    EXPECT_THROW(conditional_bound_constant(ConditionalBound::clb2minus, 2.0), DomainError);
    EXPECT_THROW(conditional_bound_constant(ConditionalBound::cub2minus, 1.0), DomainError);
    EXPECT_THROW(conditional_bound_constant(ConditionalBound::clb2plus, 2.0), DomainError);
    for (auto b : {ConditionalBound::clb1, ConditionalBound::cub1, ConditionalBound::clb2minus,
                   ConditionalBound::cub2minus, ConditionalBound::clb2plus}) {
        EXPECT_EQ(conditional_bound_from_string(to_string(b)), b);
    }
    EXPECT_THROW(conditional_bound_from_string("clb3"), ValidationError);
}

TEST(ConditionalBounds, DominatingProcessByHand) {
    const FilteredSpace s = uniform_tree(2, 2);
    const Process m = scalar_process({{0, 0, 0, 0}, {1, 1, -1, -1}, {4, -2, -0.5, -1.5}});
    const Process d = dominating_process(s, m);
    // D_0 = max |ΔM_1| = 1; D_1 = max(1, 3) on the first block, max(1, 0.5) on the second.
    const double expected[3][4] = {{1, 1, 1, 1}, {3, 3, 1, 1}, {3, 3, 1, 1}};
    for (std::size_t n = 0; n < 3; ++n) {
        for (std::size_t a = 0; a < 4; ++a) {
            EXPECT_DOUBLE_EQ(d(n, a), expected[n][a]);
        }
    }
    EXPECT_NO_THROW(validate_dominance(s, m, d));
}

TEST(ConditionalBounds, DominanceViolationNamesTheStep) {
    const FilteredSpace s = uniform_tree(2, 2);
    const Process m = random_walk(2);
    Process d = Process::zeros_for(s, 1, Measurability::adapted);
    try {
        validate_dominance(s, m, d);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("n=1"), std::string::npos) << e.what();
    }
    // Decreasing D.
    Process dec = scalar_process({{2, 2, 2, 2}, {1, 1, 1, 1}, {1, 1, 1, 1}});
    EXPECT_THROW(validate_dominance(s, m, dec), ValidationError);
}

TEST(ConditionalBounds, PassOnGeneratedMartingales) {
    const auto ensemble = small_ensemble(24, 500);
    for (const auto& g : ensemble) {
        const Process d = dominating_process(g.space, g.martingale);
        EXPECT_TRUE(conditional_bound_report(g.space, g.martingale, d, 1.0, ConditionalBound::clb1).pass);
        EXPECT_TRUE(conditional_bound_report(g.space, g.martingale, d, 1.0, ConditionalBound::cub1).pass);
        for (double p : {1.25, 1.5, 1.9}) {
            const auto lo = conditional_bound_report(g.space, g.martingale, d, p, ConditionalBound::clb2minus);
            const auto up = conditional_bound_report(g.space, g.martingale, d, p, ConditionalBound::cub2minus);
            EXPECT_TRUE(lo.pass) << p;
            EXPECT_TRUE(up.pass) << p;
            EXPECT_DOUBLE_EQ(lo.constant(), 2.0 / p);
        }
        for (double p : {3.0, 4.0}) {
            EXPECT_TRUE(conditional_bound_report(g.space, g.martingale, d, p, ConditionalBound::clb2plus).pass);
        }
    }
}

// =============================================================================
// Duality and interpolation
// =============================================================================

TEST(Duality, OneStepWalkFlip) {
    // M_T = ±1: ξ = M_T, N = M, every link is an equality.
    const FilteredSpace s = uniform_tree(2, 1);
    const DualityChain chain = duality_lower_to_upper_check(s, random_walk(1), 2.0);
    for (const auto& link : chain.links) {
        EXPECT_TRUE(link.pass) << link.name;
    }
    EXPECT_TRUE(chain.conclusion.pass);
    EXPECT_EQ(chain.conclusion.name, "duality-upper");
    EXPECT_NEAR(chain.conclusion.lhs, 1.0, 1e-12);
    EXPECT_NEAR(chain.conclusion.rhs, 1.0, 1e-12);
}

TEST(Duality, LinksPassOnGeneratedMartingales) {
    const auto ensemble = small_ensemble(16, 700);
    for (const auto& g : ensemble) {
        for (double p : {1.25, 1.5, 3.0, 4.0}) {
            const DualityChain chain = duality_lower_to_upper_check(g.space, g.martingale, p);
            EXPECT_EQ(chain.links.size(), 6u);
            for (const auto& link : chain.links) {
                EXPECT_TRUE(link.pass) << link.name << " p=" << p;
            }
            EXPECT_TRUE(chain.conclusion.pass);
            EXPECT_DOUBLE_EQ(chain.conclusion.p, conjugate_exponent(p));
        }
    }
    EXPECT_THROW(duality_lower_to_upper_check(ensemble[0].space, ensemble[0].martingale, 1.0), DomainError);
}

TEST(Interpolation, ThetaAndEndpoint) {
    const auto ensemble = small_ensemble(30, 900);
    const InterpolationResult at_p1 = interpolation_lower_check(ensemble, 2.0, 4.0, 2.0);
    EXPECT_DOUBLE_EQ(at_p1.theta, 0.0);
    // At θ = 0 the bound is C_{p1} itself, the ensemble maximum.
    EXPECT_TRUE(at_p1.summary.pass);
    for (const auto& m : at_p1.members) {
        EXPECT_TRUE(m.pass);
    }
    const InterpolationResult mid = interpolation_lower_check(ensemble, 2.0, 4.0, 3.0);
    EXPECT_NEAR(mid.theta, 2.0 / 3.0, 1e-15);
    EXPECT_EQ(mid.members.size(), ensemble.size());
    EXPECT_THROW(interpolation_lower_check(ensemble, 2.0, 4.0, 5.0), DomainError);
}

// =============================================================================
// Chain replays and pathwise reports
// =============================================================================

TEST(Chains, EveryLinkPasses) {
    const auto ensemble = small_ensemble(12, 1100);
    for (const auto& g : ensemble) {
        for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
            if (g.martingale.dim() == 1) {
                const auto real = replay_real_chain(g.space, g.martingale, p);
                ASSERT_GE(real.size(), 2u);
                EXPECT_EQ(real[real.size() - 2].name, "chain-assembled-lower");
                EXPECT_EQ(real.back().name, "chain-assembled-upper");
                for (const auto& r : real) {
                    EXPECT_TRUE(r.pass) << r.name << " p=" << p;
                }
            } else {
                EXPECT_THROW(replay_real_chain(g.space, g.martingale, p), StructuralError);
            }
            for (const auto& r : replay_hilbert_chain(g.space, g.martingale, p)) {
                EXPECT_TRUE(r.pass) << r.name << " p=" << p;
            }
        }
    }
}

TEST(Pathwise, Reports) {
    const std::vector<double> a = {1.0, 2.0, 0.0};
    const std::vector<double> b = {2.0, 2.0, 0.0};
    const InequalityReport ok = pathwise_report("ok", 1.0, a, b);
    EXPECT_TRUE(ok.pass);
    EXPECT_DOUBLE_EQ(ok.lhs, 1.0);
    EXPECT_DOUBLE_EQ(ok.constant(), 1.0);

    EXPECT_FALSE(pathwise_report("over", 1.0, std::vector<double>{3.0}, std::vector<double>{2.0}).pass);
    EXPECT_FALSE(pathwise_report("zero", 1.0, std::vector<double>{1.0}, std::vector<double>{0.0}).pass);
    EXPECT_THROW(pathwise_report("size", 1.0, a, std::vector<double>{1.0}), StructuralError);
}
