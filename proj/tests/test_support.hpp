#pragma once

#include <initializer_list>
#include <vector>

#include "bdgkit/prob_space.hpp"

namespace bdgkit::testing {

// Scalar process from rows[time][atom].
inline Process scalar_process(std::initializer_list<std::initializer_list<double>> rows,
                              Measurability kind = Measurability::adapted) {
    const std::size_t steps = rows.size();
    const std::size_t atoms = rows.begin()->size();
    Process x(steps, atoms, 1, kind);
    std::size_t n = 0;
    for (const auto& row : rows) {
        std::size_t a = 0;
        for (double v : row) {
            x(n, a++) = v;
        }
        ++n;
    }
    return x;
}

inline FilteredSpace uniform_tree(int branching, int horizon) {
    std::size_t atoms = 1;
    for (int i = 0; i < horizon; ++i) {
        atoms *= static_cast<std::size_t>(branching);
    }
    return FilteredSpace::tree(branching, horizon, std::vector<double>(atoms, 1.0 / static_cast<double>(atoms)));
}

// Simple random walk with ±1 steps on the uniform binary tree of depth T.
inline Process random_walk(int horizon) {
    const std::size_t atoms = std::size_t{1} << horizon;
    Process m(static_cast<std::size_t>(horizon) + 1, atoms, 1, Measurability::adapted);
    for (std::size_t a = 0; a < atoms; ++a) {
        double level = 0.0;
        for (int n = 1; n <= horizon; ++n) {
            const bool up = ((a >> (horizon - n)) & 1U) == 0;
            level += up ? 1.0 : -1.0;
            m(static_cast<std::size_t>(n), a) = level;
        }
    }
    return m;
}

inline MartingaleSpec spec(int b, int t, std::size_t d, JumpLaw law, std::uint64_t seed, bool random_probs = false) {
    MartingaleSpec s;
    s.branching = b;
    s.horizon = t;
    s.dim = d;
    s.jump_law = law;
    s.seed = seed;
    s.random_child_probs = random_probs;
    return s;
}

inline const std::vector<JumpLaw> kAllLaws = {JumpLaw::rademacher, JumpLaw::centered_uniform,
                                              JumpLaw::heavy_tail_truncated, JumpLaw::poisson_compensated};

} // namespace bdgkit::testing
