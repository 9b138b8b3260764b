#include <gtest/gtest.h>

#include <cmath>

#include "bdgkit/errors.hpp"
#include "bdgkit/prob_space.hpp"
#include "test_support.hpp"

using namespace bdgkit;
using namespace bdgkit::testing;

// =============================================================================
// Filtered space
// =============================================================================

TEST(FilteredSpace, TreeBlocksFollowLeadingDigits) {
    const FilteredSpace s = FilteredSpace::tree(3, 2, std::vector<double>(9, 1.0 / 9.0));
    EXPECT_EQ(s.atoms(), 9u);
    EXPECT_EQ(s.block_count(0), 1u);
    EXPECT_EQ(s.block_count(1), 3u);
    EXPECT_EQ(s.block_count(2), 9u);
    for (std::size_t a = 0; a < 9; ++a) {
        EXPECT_EQ(s.block_of(1, a), a / 3);
    }
    EXPECT_NEAR(s.block_prob(1, 2), 1.0 / 3.0, 1e-15);
    EXPECT_TRUE(s.separates_atoms());
}

TEST(FilteredSpace, ZeroProbabilityAtomsAreDropped) {
    std::vector<Partition> parts(2);
    parts[0].blocks = {{0, 1, 2}};
    parts[1].blocks = {{0}, {1}, {2}};
    const FilteredSpace s({0.5, 0.0, 0.5}, 1, parts);
    EXPECT_EQ(s.atoms(), 2u);
    EXPECT_EQ(s.block_count(1), 2u);
}

TEST(FilteredSpace, RejectsBadInput) {
    std::vector<Partition> parts(2);
    parts[0].blocks = {{0, 1}};
    parts[1].blocks = {{0}, {1}};
    EXPECT_THROW(FilteredSpace({0.7, 0.7}, 1, parts), ValidationError);
    EXPECT_THROW(FilteredSpace({-0.5, 1.5}, 1, parts), ValidationError);
    EXPECT_THROW(FilteredSpace({0.5, 0.5}, 2, parts), StructuralError);

    std::vector<Partition> coarse_late(2);
    coarse_late[0].blocks = {{0}, {1}};
    coarse_late[1].blocks = {{0}, {1}};
    EXPECT_THROW(FilteredSpace({0.5, 0.5}, 1, coarse_late), ValidationError);

    std::vector<Partition> not_refining(3);
    not_refining[0].blocks = {{0, 1, 2, 3}};
    not_refining[1].blocks = {{0, 1}, {2, 3}};
    not_refining[2].blocks = {{0, 2}, {1, 3}};
    EXPECT_THROW(FilteredSpace({0.25, 0.25, 0.25, 0.25}, 2, not_refining), ValidationError);

    EXPECT_THROW(FilteredSpace::tree(1, 2, {1.0}), ValidationError);
    EXPECT_THROW(FilteredSpace::tree(2, 2, {0.5, 0.5}), StructuralError);
}

// =============================================================================
// Conditional expectation
// =============================================================================

TEST(CondExpect, HandComputedTwoStepTree) {
    const FilteredSpace s = FilteredSpace::tree(2, 2, {0.1, 0.3, 0.2, 0.4});
    RandomVector x{1, {1.0, 2.0, 3.0, 4.0}};
    const RandomVector e1 = cond_expect(s, x, 1);
    EXPECT_NEAR(e1.values[0], (0.1 * 1 + 0.3 * 2) / 0.4, 1e-15);
    EXPECT_NEAR(e1.values[1], (0.1 * 1 + 0.3 * 2) / 0.4, 1e-15);
    EXPECT_NEAR(e1.values[2], (0.2 * 3 + 0.4 * 4) / 0.6, 1e-15);
    const RandomVector e0 = cond_expect(s, x, 0);
    for (double v : e0.values) {
        EXPECT_NEAR(v, 0.1 + 0.6 + 0.6 + 1.6, 1e-15);
    }
    const RandomVector e2 = cond_expect(s, x, 2);
    for (std::size_t a = 0; a < 4; ++a) {
        EXPECT_NEAR(e2.values[a], x.values[a], 1e-15);
    }
    EXPECT_THROW(cond_expect(s, x, 3), DomainError);
}

TEST(CondExpect, TowerPropertyOnGeneratedSpace) {
    const auto g = generate_martingale(spec(3, 4, 2, JumpLaw::centered_uniform, 11, true));
    RandomVector x = slice(g.martingale, 4);
    for (double& v : x.values) {
        v = v * v * v + 1.0;
    }
    const RandomVector direct = cond_expect(g.space, x, 1);
    const RandomVector nested = cond_expect(g.space, cond_expect(g.space, x, 3), 1);
    for (std::size_t i = 0; i < direct.values.size(); ++i) {
        EXPECT_NEAR(direct.values[i], nested.values[i], 1e-12);
    }
}

TEST(Expectation, WeightsByAtomProbability) {
    const FilteredSpace s = FilteredSpace::tree(2, 1, {0.25, 0.75});
    const std::vector<double> v = {4.0, 8.0};
    EXPECT_DOUBLE_EQ(expectation(s, v), 7.0);
    EXPECT_THROW(expectation(s, std::vector<double>{1.0}), StructuralError);
}

// =============================================================================
// Measurability and martingales
// =============================================================================

TEST(Measurability, DetectsLookAhead) {
    const FilteredSpace s = uniform_tree(2, 2);
    const Process walk = random_walk(2);
    EXPECT_TRUE(is_measurable(s, walk, Measurability::adapted));
    EXPECT_FALSE(is_measurable(s, walk, Measurability::predictable));

    // X_1 = M_2 peeks one step ahead.
    Process peek = walk;
    for (std::size_t a = 0; a < 4; ++a) {
        peek(1, a) = walk(2, a);
    }
    EXPECT_GT(measurability_defect(s, peek, Measurability::adapted), 0.5);
}

TEST(Martingale, RandomWalkAndDriftedWalk) {
    const FilteredSpace s = uniform_tree(2, 3);
    const Process walk = random_walk(3);
    EXPECT_TRUE(is_martingale(s, walk));
    Process drift = walk;
    for (std::size_t n = 1; n < 4; ++n) {
        for (std::size_t a = 0; a < 8; ++a) {
            drift(n, a) += 0.01 * static_cast<double>(n);
        }
    }
    EXPECT_FALSE(is_martingale(s, drift));
}

TEST(Martingale, ShapeMismatchThrows) {
    const FilteredSpace s = uniform_tree(2, 3);
    EXPECT_THROW(check_shape(s, random_walk(2)), StructuralError);
    EXPECT_THROW(add(random_walk(2), random_walk(3)), StructuralError);
}

// =============================================================================
// Generator
// =============================================================================

TEST(Generator, EveryLawGivesAMartingale) {
    std::uint64_t seed = 1;
    for (JumpLaw law : kAllLaws) {
        for (int b : {2, 3}) {
            for (std::size_t d : {1u, 3u}) {
                for (bool random_probs : {false, true}) {
                    const auto g = generate_martingale(spec(b, 4, d, law, seed++, random_probs));
                    EXPECT_EQ(g.martingale.dim(), d);
                    EXPECT_TRUE(is_martingale(g.space, g.martingale)) << to_string(law);
                    const std::vector<double> m0 = expectation(g.space, g.martingale, 0);
                    for (double v : m0) {
                        EXPECT_EQ(v, 0.0);
                    }
                }
            }
        }
    }
}

TEST(Generator, RademacherEvenBranchingIsBalanced) {
    const auto g = generate_martingale(spec(2, 5, 1, JumpLaw::rademacher, 3));
    const Process dm = increments(g.martingale);
    for (std::size_t n = 1; n < dm.steps(); ++n) {
        for (std::size_t a = 0; a < dm.atoms(); ++a) {
            EXPECT_EQ(std::abs(dm(n, a)), 1.0);
        }
    }
}

TEST(Generator, SameSeedSameMartingale) {
    const auto s = spec(3, 4, 2, JumpLaw::heavy_tail_truncated, 99, true);
    const auto a = generate_martingale(s);
    const auto b = generate_martingale(s);
    ASSERT_EQ(a.martingale.data().size(), b.martingale.data().size());
    EXPECT_TRUE(std::equal(a.martingale.data().begin(), a.martingale.data().end(), b.martingale.data().begin()));
    auto other = s;
    other.seed = 100;
    const auto c = generate_martingale(other);
    EXPECT_FALSE(std::equal(a.martingale.data().begin(), a.martingale.data().end(), c.martingale.data().begin()));
}

TEST(Generator, RejectsBadSpecsAndLargeTrees) {
    EXPECT_THROW(generate_martingale(spec(1, 3, 1, JumpLaw::rademacher, 0)), ValidationError);
    EXPECT_THROW(generate_martingale(spec(2, 0, 1, JumpLaw::rademacher, 0)), ValidationError);
    EXPECT_THROW(generate_martingale(spec(2, 3, 0, JumpLaw::rademacher, 0)), ValidationError);
    EXPECT_THROW(generate_martingale(spec(3, 30, 1, JumpLaw::rademacher, 0)), CapacityError);
    EXPECT_THROW(generate_martingale(spec(2, 6, 1, JumpLaw::rademacher, 0), 32), CapacityError);
    EXPECT_THROW(jump_law_from_string("cauchy"), ValidationError);
    EXPECT_EQ(jump_law_from_string("poisson_compensated"), JumpLaw::poisson_compensated);
}

// =============================================================================
// Stopping times
// =============================================================================

TEST(StoppingTime, HittingTimeOfRandomWalk) {
    const FilteredSpace s = uniform_tree(2, 3);
    const Process walk = random_walk(3);
    const StoppingTime tau = StoppingTime::hitting_time(s, walk, 2.0);
    // Paths ++x and --x hit |M| = 2 at n = 2, the rest never do.
    const std::vector<int> expected = {2, 2, 3, 3, 3, 3, 2, 2};
    for (std::size_t a = 0; a < 8; ++a) {
        EXPECT_EQ(tau[a], expected[a]) << a;
    }
    const Process stopped = stop_process(s, walk, tau);
    EXPECT_EQ(stopped(3, 0), 2.0);
    EXPECT_EQ(stopped(3, 1), 2.0);
    EXPECT_EQ(stopped(3, 2), walk(3, 2));
    EXPECT_TRUE(is_martingale(s, stopped));
}

TEST(StoppingTime, RejectsTimesThatPeekAhead) {
    const FilteredSpace s = uniform_tree(2, 2);
    // Stops at 1 only on atom 0: not decidable at time 1.
    EXPECT_THROW(validate_stopping_time(s, std::vector<int>{1, 2, 2, 2}), ValidationError);
    EXPECT_THROW(validate_stopping_time(s, std::vector<int>{0, 0, 3, 0}), ValidationError);
    EXPECT_NO_THROW(validate_stopping_time(s, std::vector<int>{1, 1, 2, 2}));
    EXPECT_THROW(StoppingTime(s, {1, 1, 2}), StructuralError);
}
