#include "bdgkit/compensation.hpp"

#include <algorithm>
#include <cmath>

#include "bdgkit/calculus.hpp"
#include "bdgkit/errors.hpp"
#include "bdgkit/inequalities.hpp"

namespace bdgkit {

CompensatorPair compensator(const FilteredSpace& space, const Process& v) {
    check_shape(space, v);
    const std::size_t dim = v.dim();
    Process comp = Process::zeros_like(v, Measurability::predictable);
    for (std::size_t a = 0; a < v.atoms(); ++a) {
        const auto src = v.at(0, a);
        auto dst = comp.at(0, a);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    for (int n = 1; n <= space.horizon(); ++n) {
        const auto t = static_cast<std::size_t>(n);
        const std::size_t blocks = space.block_count(n - 1);
        std::vector<double> drift(blocks * dim, 0.0);
        for (std::size_t a = 0; a < v.atoms(); ++a) {
            const std::size_t b = space.block_of(n - 1, a);
            const auto now = v.at(t, a);
            const auto before = v.at(t - 1, a);
            for (std::size_t i = 0; i < dim; ++i) {
                drift[b * dim + i] += space.prob(a) * (now[i] - before[i]);
            }
        }
        for (std::size_t b = 0; b < blocks; ++b) {
            for (std::size_t i = 0; i < dim; ++i) {
                drift[b * dim + i] /= space.block_prob(n - 1, b);
            }
        }
        for (std::size_t a = 0; a < v.atoms(); ++a) {
            const std::size_t b = space.block_of(n - 1, a);
            const auto before = comp.at(t - 1, a);
            auto dst = comp.at(t, a);
            for (std::size_t i = 0; i < dim; ++i) {
                dst[i] = before[i] + drift[b * dim + i];
            }
        }
    }
    Process mart = subtract(v, comp);
    mart.set_kind(v.kind() == Measurability::adapted ? Measurability::adapted : Measurability::raw);
    return {v, std::move(comp), std::move(mart)};
}

std::pair<Process, Process> jordan_split(const Process& v) {
    if (v.dim() != 1) {
        throw StructuralError("jordan_split requires a scalar process");
    }
    Process up = Process::zeros_like(v, v.kind());
    Process down = Process::zeros_like(v, v.kind());
    for (std::size_t a = 0; a < v.atoms(); ++a) {
        double acc_up = 0.0;
        double acc_down = 0.0;
        for (std::size_t n = 0; n < v.steps(); ++n) {
            const double d = n == 0 ? v(0, a) : v(n, a) - v(n - 1, a);
            if (d > 0.0) {
                acc_up += d;
            } else {
                acc_down += d;
            }
            up(n, a) = acc_up;
            down(n, a) = acc_down;
        }
    }
    return {std::move(up), std::move(down)};
}

InequalityReport check_compensator_lp(const FilteredSpace& space, const Process& v, double p) {
    if (!(p >= 1.0)) {
        throw DomainError("check_compensator_lp: p must be >= 1");
    }
    if (v.dim() != 1) {
        throw StructuralError("check_compensator_lp requires a scalar process");
    }
    check_shape(space, v);
    for (std::size_t a = 0; a < v.atoms(); ++a) {
        if (v(0, a) < 0.0) {
            throw DomainError("check_compensator_lp: V_0 must be nonnegative");
        }
        for (std::size_t n = 1; n < v.steps(); ++n) {
            if (v(n, a) < v(n - 1, a)) {
                throw DomainError("check_compensator_lp: V must be increasing");
            }
        }
    }
    const CompensatorPair pair = compensator(space, v);
    std::vector<double> comp_t(v.atoms());
    std::vector<double> raw_t(v.atoms());
    const std::size_t last = v.steps() - 1;
    for (std::size_t a = 0; a < v.atoms(); ++a) {
        comp_t[a] = pair.compensated(last, a);
        raw_t[a] = v(last, a);
    }
    return make_report("compensator-lp", "", p, lp_norm(space, comp_t, p), lp_norm(space, raw_t, p), p);
}

InequalityReport check_compensator_l1_hilbert(const FilteredSpace& space, const Process& x) {
    check_shape(space, x);
    const CompensatorPair pair = compensator(space, x);
    const auto comp_var = total_variation(pair.compensated).terminal_values();
    const auto raw_var = total_variation(x).terminal_values();
    return make_report("compensator-l1-hilbert", "", 1.0, expectation(space, comp_var),
                       expectation(space, raw_var), 1.0);
}

} // namespace bdgkit
