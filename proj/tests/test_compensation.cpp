#include <gtest/gtest.h>

#include "bdgkit/calculus.hpp"
#include "bdgkit/compensation.hpp"
#include "bdgkit/errors.hpp"
#include "test_support.hpp"

using namespace bdgkit;
using namespace bdgkit::testing;

namespace {

// Increasing process V_n = [M,M]_n of a generated martingale.
Process bracket_of(const GeneratedMartingale& g) {
    Process v = quadratic_variation(g.martingale).values;
    v.set_kind(Measurability::adapted);
    return v;
}

} // namespace

// =============================================================================
// Compensator
// =============================================================================

TEST(Compensator, HandComputedTwoStepTree) {
    const FilteredSpace s = uniform_tree(2, 2);
    const Process v = scalar_process({{0, 0, 0, 0}, {1, 1, 3, 3}, {1, 2, 5, 3}});
    const CompensatorPair c = compensator(s, v);
    // Ṽ_1 = E ΔV_1 = 2; Ṽ_2 adds 0.5 on the first half and 1 on the second.
    const double expected[3][4] = {{0, 0, 0, 0}, {2, 2, 2, 2}, {2.5, 2.5, 3, 3}};
    for (std::size_t n = 0; n < 3; ++n) {
        for (std::size_t a = 0; a < 4; ++a) {
            EXPECT_DOUBLE_EQ(c.compensated(n, a), expected[n][a]) << n << ',' << a;
            EXPECT_DOUBLE_EQ(c.martingale_part(n, a), v(n, a) - expected[n][a]);
        }
    }
    EXPECT_TRUE(is_measurable(s, c.compensated, Measurability::predictable));
    EXPECT_TRUE(is_martingale(s, c.martingale_part));
}

TEST(Compensator, DeterministicProcessIsItsOwnCompensator) {
    const FilteredSpace s = uniform_tree(3, 2);
    Process v = Process::zeros_for(s, 1, Measurability::adapted);
    for (std::size_t n = 0; n < 3; ++n) {
        for (std::size_t a = 0; a < 9; ++a) {
            v(n, a) = 0.5 * static_cast<double>(n * n);
        }
    }
    const CompensatorPair c = compensator(s, v);
    for (std::size_t i = 0; i < v.data().size(); ++i) {
        EXPECT_DOUBLE_EQ(c.compensated.data()[i], v.data()[i]);
    }
}

TEST(Compensator, MeansAgreeOnGeneratedProcesses) {
    std::uint64_t seed = 40;
    for (JumpLaw law : kAllLaws) {
        const auto g = generate_martingale(spec(3, 4, 2, law, seed++, true));
        const Process v = bracket_of(g);
        const CompensatorPair c = compensator(g.space, v);
        const int T = g.space.horizon();
        const double ev = expectation(g.space, v, static_cast<std::size_t>(T))[0];
        const double ec = expectation(g.space, c.compensated, static_cast<std::size_t>(T))[0];
        EXPECT_NEAR(ev, ec, 1e-10 * std::max(1.0, ev));
        EXPECT_TRUE(is_measurable(g.space, c.compensated, Measurability::predictable));
        EXPECT_TRUE(is_martingale(g.space, c.martingale_part, 1e-10));
    }
}

TEST(Compensator, VectorProcessesCompensateCoordinatewise) {
    const auto g = generate_martingale(spec(2, 3, 3, JumpLaw::centered_uniform, 9, true));
    // A martingale is its own martingale part: Ṽ stays at V_0 = 0.
    const CompensatorPair c = compensator(g.space, g.martingale);
    for (double x : c.compensated.data()) {
        EXPECT_NEAR(x, 0.0, 1e-12);
    }
}

// =============================================================================
// Jordan split
// =============================================================================

TEST(JordanSplit, SumsBackAndIsMonotone) {
    const Process walk = random_walk(4);
    const auto [up, down] = jordan_split(walk);
    for (std::size_t n = 0; n < walk.steps(); ++n) {
        for (std::size_t a = 0; a < walk.atoms(); ++a) {
            EXPECT_DOUBLE_EQ(up(n, a) + down(n, a), walk(n, a));
            if (n > 0) {
                EXPECT_GE(up(n, a), up(n - 1, a));
                EXPECT_LE(down(n, a), down(n - 1, a));
            }
        }
    }
    // Atom 0 only goes up.
    EXPECT_EQ(up(4, 0), 4.0);
    EXPECT_EQ(down(4, 0), 0.0);
    const auto g = generate_martingale(spec(2, 2, 2, JumpLaw::rademacher, 1));
    EXPECT_THROW(jordan_split(g.martingale), StructuralError);
}

// =============================================================================
// Norm bounds
// =============================================================================

TEST(CompensatorBounds, LpRatioAtMostP) {
    std::uint64_t seed = 60;
    for (JumpLaw law : kAllLaws) {
        const auto g = generate_martingale(spec(2, 6, 1, law, seed++, true));
        const Process v = bracket_of(g);
        for (double p : {1.0, 1.5, 2.0, 4.0}) {
            const InequalityReport r = check_compensator_lp(g.space, v, p);
            EXPECT_TRUE(r.pass) << to_string(law) << " p=" << p;
            ASSERT_TRUE(r.tracked_constant.has_value());
            EXPECT_EQ(*r.tracked_constant, p);
            if (p == 1.0) {
                // E Ṽ_T = E V_T.
                EXPECT_NEAR(r.lhs, r.rhs, 1e-12 * std::max(1.0, r.rhs));
            }
        }
    }
}

TEST(CompensatorBounds, LpRejectsBadInput) {
    const FilteredSpace s = uniform_tree(2, 2);
    const Process walk = random_walk(2);
    EXPECT_THROW(check_compensator_lp(s, walk, 2.0), DomainError);
    const Process v = scalar_process({{0, 0, 0, 0}, {1, 1, 3, 3}, {1, 2, 5, 3}});
    EXPECT_THROW(check_compensator_lp(s, v, 0.5), DomainError);
}

TEST(CompensatorBounds, HilbertL1Variation) {
    std::uint64_t seed = 80;
    for (std::size_t d : {2u, 3u, 8u}) {
        const auto g = generate_martingale(spec(2, 5, d, JumpLaw::heavy_tail_truncated, seed++, true));
        // Adapted but far from a martingale: add a drift along the first axis.
        Process x = g.martingale;
        for (std::size_t n = 0; n < x.steps(); ++n) {
            for (std::size_t a = 0; a < x.atoms(); ++a) {
                x.at(n, a)[0] += 0.3 * static_cast<double>(n) * std::abs(x.at(n, a)[d - 1]);
            }
        }
        const InequalityReport r = check_compensator_l1_hilbert(g.space, x);
        EXPECT_TRUE(r.pass) << d;
        EXPECT_LE(r.lhs, r.rhs * (1.0 + 1e-12));
    }
}
