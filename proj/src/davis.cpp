#include "bdgkit/davis.hpp"

#include <algorithm>
#include <cmath>

#include "bdgkit/compensation.hpp"
#include "bdgkit/errors.hpp"
#include "bdgkit/inequalities.hpp"

namespace bdgkit {

namespace {

double increment_norm(const Process& x, std::size_t n, std::size_t atom) {
    const auto cur = x.at(n, atom);
    double s = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        const double d = n == 0 ? cur[i] : cur[i] - x.at(n - 1, atom)[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

DavisDecomposition davis_decompose(const FilteredSpace& space, const Process& m, double martingale_tol) {
    check_shape(space, m);
    if (!is_martingale(space, m, martingale_tol)) {
        throw ValidationError("davis_decompose: input is not a martingale started at 0");
    }
    PathFunctional s = jump_maximal(m);
    Process k1 = Process::zeros_like(m, Measurability::adapted);
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        for (std::size_t n = 1; n < m.steps(); ++n) {
            const double s_before = s(n - 1, a);
            const auto cur = m.at(n, a);
            const auto prev = m.at(n - 1, a);
            const auto acc = k1.at(n - 1, a);
            auto dst = k1.at(n, a);
            const bool big = increment_norm(m, n, a) >= 2.0 * s_before;
            for (std::size_t i = 0; i < m.dim(); ++i) {
                dst[i] = acc[i] + (big ? cur[i] - prev[i] : 0.0);
            }
        }
    }
    CompensatorPair pair = compensator(space, k1);
    Process k = std::move(pair.martingale_part);
    k.set_kind(Measurability::adapted);
    Process l = subtract(m, k);
    l.set_kind(Measurability::adapted);
    return {std::move(l), std::move(k), std::move(k1), std::move(pair.compensated), std::move(s)};
}

DavisCertificate certify(const FilteredSpace& space, const Process& m, const DavisDecomposition& dec) {
    DavisCertificate c;
    c.scale = std::max(1.0, m.max_abs());
    c.jump_excess = -INFINITY;
    c.variation_excess = -INFINITY;
    c.compensator_excess = -INFINITY;
    const PathFunctional var_k1 = total_variation(dec.K1);
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        for (std::size_t n = 0; n < m.steps(); ++n) {
            const auto mv = m.at(n, a);
            const auto lv = dec.L.at(n, a);
            const auto kv = dec.K.at(n, a);
            double r = 0.0;
            for (std::size_t i = 0; i < m.dim(); ++i) {
                r += (mv[i] - lv[i] - kv[i]) * (mv[i] - lv[i] - kv[i]);
            }
            c.sum_residual = std::max(c.sum_residual, std::sqrt(r));
            if (n >= 1) {
                const double s_before = dec.S(n - 1, a);
                const double dl = increment_norm(dec.L, n, a);
                const double dk2 = increment_norm(dec.K2, n, a);
                c.jump_excess = std::max(c.jump_excess, dl - 4.0 * s_before);
                c.compensator_excess = std::max(c.compensator_excess, dk2 - 2.0 * s_before);
                if (s_before > 0.0) {
                    c.jump_ratio = std::max(c.jump_ratio, dl / s_before);
                }
            }
        }
        c.variation_excess = std::max(c.variation_excess, var_k1.terminal(a) - 2.0 * dec.S.terminal(a));
    }
    c.l_martingale = is_martingale(space, dec.L, 1e-9);
    c.k_martingale = is_martingale(space, dec.K, 1e-9);
    return c;
}

bool check_jump_doubling(const Process& m) {
    const PathFunctional s = jump_maximal(m);
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        for (std::size_t n = 1; n < m.steps(); ++n) {
            const double jump = increment_norm(m, n, a);
            const double s_before = s(n - 1, a);
            if (jump >= 2.0 * s_before) {
                const double room = 2.0 * (s(n, a) - s_before);
                if (jump > room + 1e-12 * std::max(1.0, jump)) {
                    return false;
                }
            }
        }
    }
    return true;
}

InequalityReport check_dK_bound(const FilteredSpace& space, const Process& m, double p) {
    if (!(p >= 1.0)) {
        throw DomainError("check_dK_bound: p must be >= 1");
    }
    if (m.dim() > 1 && p > 1.0) {
        throw UnsupportedError("check_dK_bound: vector martingales are only supported for p = 1");
    }
    const DavisDecomposition dec = davis_decompose(space, m);
    const auto var_k = total_variation(dec.K).terminal_values();
    const auto s_t = dec.S.terminal_values();
    const double constant = m.dim() == 1 ? 4.0 * (p + 1.0) : 4.0;
    return make_report(m.dim() == 1 ? "davis-dK-scalar" : "davis-dK-vector", "", p, lp_norm(space, var_k, p),
                       lp_norm(space, s_t, p), constant);
}

} // namespace bdgkit
