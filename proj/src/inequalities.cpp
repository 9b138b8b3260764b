#include "bdgkit/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdgkit/calculus.hpp"
#include "bdgkit/compensation.hpp"
#include "bdgkit/davis.hpp"
#include "bdgkit/errors.hpp"
#include "bdgkit/stein.hpp"

namespace bdgkit {

namespace {

std::vector<double> sqrt_terminal(const PathFunctional& f) {
    std::vector<double> out = f.terminal_values();
    for (double& x : out) {
        x = std::sqrt(std::max(0.0, x));
    }
    return out;
}

std::vector<double> terminal_norms(const Process& m) {
    std::vector<double> out(m.atoms());
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        out[a] = m.norm_at(m.steps() - 1, a);
    }
    return out;
}

std::vector<double> combine(std::span<const double> x, double a, std::span<const double> y, double b) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = a * x[i] + b * y[i];
    }
    return out;
}

std::vector<double> product(std::span<const double> x, std::span<const double> y) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] * y[i];
    }
    return out;
}

void require_p_at_least_one(double p, const char* what) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw DomainError(std::string(what) + ": p must be a finite value >= 1");
    }
}

// Increment norm of a (possibly vector) process at step n.
double jump(const Process& x, std::size_t n, std::size_t atom) {
    const auto cur = x.at(n, atom);
    double s = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        const double d = n == 0 ? cur[i] : cur[i] - x.at(n - 1, atom)[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

// =============================================================================
// Norms
// =============================================================================

double lp_norm(const FilteredSpace& space, std::span<const double> per_atom, double p) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw DomainError("lp_norm: p must lie in (0, inf)");
    }
    if (per_atom.size() != space.atoms()) {
        throw StructuralError("lp_norm: size mismatch");
    }
    // Scale by the max to keep large p away from overflow.
    double peak = 0.0;
    for (double x : per_atom) {
        peak = std::max(peak, std::abs(x));
    }
    if (peak == 0.0) {
        return 0.0;
    }
    double s = 0.0;
    for (std::size_t a = 0; a < per_atom.size(); ++a) {
        s += space.prob(a) * std::pow(std::abs(per_atom[a]) / peak, p);
    }
    return peak * std::pow(s, 1.0 / p);
}

double lp_norm(const FilteredSpace& space, const RandomVector& x, double p) {
    if (x.values.size() != space.atoms() * x.dim) {
        throw StructuralError("lp_norm: random vector does not match the space");
    }
    std::vector<double> norms(space.atoms());
    for (std::size_t a = 0; a < norms.size(); ++a) {
        norms[a] = x.norm_at(a);
    }
    return lp_norm(space, norms, p);
}

double conjugate_exponent(double p) {
    if (!(p > 1.0)) {
        throw DomainError("conjugate_exponent: p must exceed 1");
    }
    return std::isinf(p) ? 1.0 : p / (p - 1.0);
}

// =============================================================================
// BDG sides
// =============================================================================

InequalityReport bdg_report(const FilteredSpace& space, const Process& m, double p, BdgSide side, double cap) {
    require_p_at_least_one(p, "bdg_report");
    check_shape(space, m);
    const auto star = maximal(m).terminal_values();
    const auto root_qv = sqrt_terminal(quadratic_variation(m));
    const double star_norm = lp_norm(space, star, p);
    const double qv_norm = lp_norm(space, root_qv, p);
    std::optional<double> tracked;
    if (p == 2.0) {
        tracked = side == BdgSide::upper ? 2.0 : 1.0;
    }
    if (side == BdgSide::upper) {
        return make_report("bdg-upper", "", p, star_norm, qv_norm, tracked, cap);
    }
    return make_report("bdg-lower", "", p, qv_norm, star_norm, tracked, cap);
}

double ito_upper_constant(double p) {
    if (!(p >= 2.0)) {
        throw DomainError("ito_upper_constant: p must be >= 2");
    }
    return std::pow(conjugate_exponent(p), p / 2.0) * std::sqrt(p * (p - 1.0) / 2.0);
}

InequalityReport bdg_upper_ito_report(const FilteredSpace& space, const Process& m, double p) {
    const double c = ito_upper_constant(p);
    check_shape(space, m);
    return make_report("bdg-upper-ito", "", p, lp_norm(space, maximal(m).terminal_values(), p),
                       lp_norm(space, sqrt_terminal(quadratic_variation(m)), p), c);
}

InequalityReport doob_report(const FilteredSpace& space, const Process& m, double p) {
    check_shape(space, m);
    const double c = conjugate_exponent(p);
    return make_report("doob", "", p, lp_norm(space, maximal(m).terminal_values(), p),
                       lp_norm(space, terminal_norms(m), p), c);
}

InequalityReport isometry_report(const FilteredSpace& space, const Process& m, double tol) {
    check_shape(space, m);
    const auto norms = terminal_norms(m);
    const auto qv = quadratic_variation(m).terminal_values();
    double second_moment = 0.0;
    for (std::size_t a = 0; a < norms.size(); ++a) {
        second_moment += space.prob(a) * norms[a] * norms[a];
    }
    const double expected_qv = expectation(space, qv);
    return make_report("isometry", "", 2.0, std::abs(second_moment - expected_qv), expected_qv, tol);
}

// =============================================================================
// Conditional bounds
// =============================================================================

const char* to_string(ConditionalBound which) {
    switch (which) {
    case ConditionalBound::clb1:
        return "clb1";
    case ConditionalBound::cub1:
        return "cub1";
    case ConditionalBound::clb2minus:
        return "clb2minus";
    case ConditionalBound::cub2minus:
        return "cub2minus";
    case ConditionalBound::clb2plus:
        return "clb2plus";
    }
    return "?";
}

ConditionalBound conditional_bound_from_string(const std::string& name) {
    for (auto b : {ConditionalBound::clb1, ConditionalBound::cub1, ConditionalBound::clb2minus,
                   ConditionalBound::cub2minus, ConditionalBound::clb2plus}) {
        if (name == to_string(b)) {
            return b;
        }
    }
    throw ValidationError("unknown conditional bound: " + name);
}

double conditional_bound_constant(ConditionalBound which, double p) {
    switch (which) {
    case ConditionalBound::clb1:
        if (p != 1.0) {
            throw DomainError("clb1 is stated for p = 1");
        }
        // The displayed chain loses the factor 2 from E[M,M]^{1/2} <= ... ;
        // redoing it gives 2, which also matches 2/p at p = 1.
        return 2.0;
    case ConditionalBound::cub1:
        if (p != 1.0) {
            throw DomainError("cub1 is stated for p = 1");
        }
        return 4.0 * std::sqrt(2.0);
    case ConditionalBound::clb2minus:
        if (!(p > 1.0 && p < 2.0)) {
            throw DomainError("clb2minus needs 1 < p < 2");
        }
        return 2.0 / p;
    case ConditionalBound::cub2minus:
        if (!(p > 1.0 && p < 2.0)) {
            throw DomainError("cub2minus needs 1 < p < 2");
        }
        return 4.0 * std::sqrt(2.0 / p);
    case ConditionalBound::clb2plus:
        if (!(p > 2.0) || !std::isfinite(p)) {
            throw DomainError("clb2plus needs p > 2");
        }
        return std::pow(2.0, p / 2.0 + 2.0);
    }
    throw DomainError("unknown conditional bound");
}

Process dominating_process(const FilteredSpace& space, const Process& m) {
    check_shape(space, m);
    const std::size_t steps = m.steps();
    Process d = Process::zeros_for(space, 1, Measurability::adapted);
    std::vector<double> block_max;
    for (std::size_t n = 0; n < steps; ++n) {
        const int t = static_cast<int>(n);
        if (n + 1 < steps) {
            block_max.assign(space.block_count(t), 0.0);
            for (std::size_t a = 0; a < m.atoms(); ++a) {
                auto& slot = block_max[space.block_of(t, a)];
                slot = std::max(slot, jump(m, n + 1, a));
            }
        }
        for (std::size_t a = 0; a < m.atoms(); ++a) {
            const double before = n == 0 ? 0.0 : d(n - 1, a);
            d(n, a) = n + 1 < steps ? std::max(before, block_max[space.block_of(t, a)]) : before;
        }
    }
    return d;
}

void validate_dominance(const FilteredSpace& space, const Process& m, const Process& d, double tol) {
    check_shape(space, m);
    check_shape(space, d);
    if (d.dim() != 1) {
        throw StructuralError("dominating process must be scalar");
    }
    if (!is_measurable(space, d, Measurability::adapted, tol)) {
        throw ValidationError("dominating process is not adapted");
    }
    for (std::size_t n = 1; n < m.steps(); ++n) {
        for (std::size_t a = 0; a < m.atoms(); ++a) {
            const double before = d(n - 1, a);
            const double slack = tol * std::max(1.0, std::abs(before));
            if (d(n, a) < before - slack) {
                std::ostringstream msg;
                msg << "dominating process decreases at (n=" << n << ", atom=" << a << ")";
                throw ValidationError(msg.str());
            }
            if (jump(m, n, a) > before + slack) {
                std::ostringstream msg;
                msg << "dominance violated at (n=" << n << ", atom=" << a << "): |dM| = " << jump(m, n, a)
                    << " > D_prev = " << before;
                throw ValidationError(msg.str());
            }
        }
    }
}

InequalityReport conditional_bound_report(const FilteredSpace& space, const Process& m, const Process& d, double p,
                                          ConditionalBound which) {
    const double c = conditional_bound_constant(which, p);
    validate_dominance(space, m, d);
    const auto star = maximal(m).terminal_values();
    const auto root_qv = sqrt_terminal(quadratic_variation(m));
    std::vector<double> d_t(m.atoms());
    for (std::size_t a = 0; a < d_t.size(); ++a) {
        d_t[a] = d(d.steps() - 1, a);
    }
    double lhs = 0.0;
    double rhs = 0.0;
    switch (which) {
    case ConditionalBound::clb1:
    case ConditionalBound::clb2minus:
        lhs = lp_norm(space, root_qv, p);
        rhs = lp_norm(space, combine(star, 1.0, d_t, 1.0), p);
        break;
    case ConditionalBound::cub1:
    case ConditionalBound::cub2minus:
        lhs = lp_norm(space, star, p);
        rhs = lp_norm(space, combine(root_qv, 1.0, d_t, 1.0), p);
        break;
    case ConditionalBound::clb2plus:
        // C‖M*‖ + ‖D‖ written as C·(‖M*‖ + ‖D‖/C).
        lhs = lp_norm(space, root_qv, p);
        rhs = lp_norm(space, star, p) + lp_norm(space, d_t, p) / c;
        break;
    }
    InequalityReport r = make_report(to_string(which), "", p, lhs, rhs, c);
    // Dominance is checked up to 1e-10, so allow the same order here.
    r.tolerance = 1e-9;
    r.finalize();
    return r;
}

// =============================================================================
// Duality lemma
// =============================================================================

DualityChain duality_lower_to_upper_check(const FilteredSpace& space, const Process& m, double p, double cap) {
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw DomainError("duality check: p must lie in (1, inf)");
    }
    check_shape(space, m);
    const double r = conjugate_exponent(p);
    const std::size_t dim = m.dim();
    const std::size_t last = m.steps() - 1;
    const auto norms = terminal_norms(m);

    // ξ ∝ ‖M_T‖^{r-1} M_T/‖M_T‖, normalised in L_p.
    RandomVector xi{dim, std::vector<double>(m.atoms() * dim, 0.0)};
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        if (norms[a] > 0.0) {
            const double w = std::pow(norms[a], r - 2.0);
            const auto v = m.at(last, a);
            for (std::size_t i = 0; i < dim; ++i) {
                xi.at(a)[i] = w * v[i];
            }
        }
    }
    const double xi_norm = lp_norm(space, xi, p);
    if (xi_norm > 0.0) {
        for (double& x : xi.values) {
            x /= xi_norm;
        }
    }
    Process nproc = Process::zeros_like(m, Measurability::adapted);
    for (std::size_t n = 0; n < m.steps(); ++n) {
        const RandomVector slice_n = cond_expect(space, xi, static_cast<int>(n));
        std::copy(slice_n.values.begin(), slice_n.values.end(),
                  nproc.data().begin() + static_cast<std::ptrdiff_t>(n * m.atoms() * dim));
    }

    std::vector<double> pairing_per_atom(m.atoms());
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        const auto v = m.at(last, a);
        const auto x = xi.at(a);
        double s = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            s += v[i] * x[i];
        }
        pairing_per_atom[a] = s;
    }
    const double pairing = expectation(space, pairing_per_atom);
    const double mt_norm = lp_norm(space, norms, r);
    const double cov = expectation(space, covariation(m, nproc).terminal_values());
    const auto abs_cov = absolute_covariation(m, nproc).terminal_values();
    const auto qm = sqrt_terminal(quadratic_variation(m));
    const auto qn = sqrt_terminal(quadratic_variation(nproc));
    const double kw_rhs = expectation(space, product(qm, qn));
    const double qm_r = lp_norm(space, qm, r);
    const double qn_p = lp_norm(space, qn, p);
    const double xi_p = lp_norm(space, xi, p);
    const double hypothesis = xi_p > 0.0 ? qn_p / xi_p : 0.0;

    DualityChain chain;
    InequalityReport doob = doob_report(space, m, r);
    doob.name = "duality-doob";
    chain.links.push_back(doob);
    chain.links.push_back(make_report("duality-pairing", "", p, std::abs(pairing - mt_norm), mt_norm, 1e-9));
    chain.links.push_back(make_report("duality-covariation", "", p, std::abs(pairing - cov),
                                      std::max(std::abs(pairing), std::abs(cov)), 1e-9));
    chain.links.push_back(
        make_report("duality-kunita-watanabe", "", p, expectation(space, abs_cov), kw_rhs, 1.0));
    chain.links.push_back(make_report("duality-holder", "", p, kw_rhs, qm_r * qn_p, 1.0));
    chain.links.push_back(make_report("duality-hypothesis", "", p, qn_p, xi_p, std::nullopt, cap));
    chain.conclusion = make_report("duality-upper", "", r, lp_norm(space, maximal(m).terminal_values(), r), qm_r,
                                   p * hypothesis);
    return chain;
}

// =============================================================================
// Interpolation lemma
// =============================================================================

InterpolationResult interpolation_lower_check(std::span<const GeneratedMartingale> ensemble, double p1, double p2,
                                              double p) {
    if (!(p1 > 1.0 && p1 <= p && p <= p2 && p1 < p2 && std::isfinite(p2))) {
        throw DomainError("interpolation check: need 1 < p1 <= p <= p2 < inf with p1 < p2");
    }
    InterpolationResult out;
    out.theta = (1.0 / p1 - 1.0 / p) / (1.0 / p1 - 1.0 / p2);
    struct Sides {
        std::vector<double> qv;
        std::vector<double> terminal;
    };
    std::vector<Sides> sides;
    sides.reserve(ensemble.size());
    for (const auto& g : ensemble) {
        sides.push_back({sqrt_terminal(quadratic_variation(g.martingale)), terminal_norms(g.martingale)});
    }
    auto measured = [&](double q) {
        double c = 0.0;
        for (std::size_t i = 0; i < ensemble.size(); ++i) {
            const double den = lp_norm(ensemble[i].space, sides[i].terminal, q);
            if (den > 0.0) {
                c = std::max(c, lp_norm(ensemble[i].space, sides[i].qv, q) / den);
            }
        }
        return c;
    };
    out.constant_p1 = measured(p1);
    out.constant_p2 = measured(p2);
    const double c = std::pow(out.constant_p1, 1.0 - out.theta) * std::pow(out.constant_p2, out.theta);
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        out.members.push_back(make_report("interpolation-lower", "", p, lp_norm(ensemble[i].space, sides[i].qv, p),
                                          lp_norm(ensemble[i].space, sides[i].terminal, p), c));
    }
    out.summary = aggregate(out.members, "");
    return out;
}

// =============================================================================
// Proof-chain replays
// =============================================================================

InequalityReport pathwise_report(std::string name, double p, std::span<const double> a, std::span<const double> b,
                                 double tolerance) {
    if (a.size() != b.size()) {
        throw StructuralError("pathwise_report: size mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (b[i] > 0.0) {
            worst = std::max(worst, a[i] / b[i]);
        } else if (a[i] > tolerance) {
            worst = INFINITY;
        }
    }
    InequalityReport r;
    r.name = std::move(name);
    r.p = p;
    r.lhs = worst;
    r.rhs = 1.0;
    r.tracked_constant = 1.0;
    r.tolerance = tolerance;
    r.finalize();
    return r;
}

namespace {

// Pathwise quantities shared by both replays.
struct ChainData {
    DavisDecomposition dec;
    std::vector<double> m_star, l_star, k_star;
    std::vector<double> q_m, q_l, q_k;
    std::vector<double> s_t, var_k;
    Process d; // 4S, dominates the jumps of L
};

ChainData chain_data(const FilteredSpace& space, const Process& m) {
    ChainData c{davis_decompose(space, m), {}, {}, {}, {}, {}, {}, {}, {}, {}};
    c.m_star = maximal(m).terminal_values();
    c.l_star = maximal(c.dec.L).terminal_values();
    c.k_star = maximal(c.dec.K).terminal_values();
    c.q_m = sqrt_terminal(quadratic_variation(m));
    c.q_l = sqrt_terminal(quadratic_variation(c.dec.L));
    c.q_k = sqrt_terminal(quadratic_variation(c.dec.K));
    c.s_t = c.dec.S.terminal_values();
    c.var_k = total_variation(c.dec.K).terminal_values();
    c.d = scale(c.dec.S.values, 4.0);
    c.d.set_kind(Measurability::adapted);
    return c;
}

void common_pathwise_links(std::vector<InequalityReport>& out, const ChainData& c, double p) {
    out.push_back(pathwise_report("chain-qv-triangle", p, c.q_m, combine(c.q_l, 1.0, c.q_k, 1.0)));
    out.push_back(pathwise_report("chain-jump-le-qv", p, c.s_t, c.q_m));
    out.push_back(pathwise_report("chain-jump-le-2max", p, c.s_t, combine(c.m_star, 2.0, c.m_star, 0.0)));
    out.push_back(pathwise_report("chain-lmax-triangle", p, c.l_star, combine(c.m_star, 1.0, c.k_star, 1.0)));
    out.push_back(pathwise_report("chain-mmax-triangle", p, c.m_star, combine(c.l_star, 1.0, c.k_star, 1.0)));
    out.push_back(pathwise_report("chain-kmax-le-var", p, c.k_star, c.var_k));
}

// Lower and upper conditional bounds for L against D = 4S, or the p = 2
// substitutes. Returns the constants used.
std::pair<double, double> conditional_links(std::vector<InequalityReport>& out, const FilteredSpace& space,
                                            const ChainData& c, double p) {
    double lower = 0.0;
    double upper = 0.0;
    if (p == 1.0) {
        out.push_back(conditional_bound_report(space, c.dec.L, c.d, p, ConditionalBound::clb1));
        out.push_back(conditional_bound_report(space, c.dec.L, c.d, p, ConditionalBound::cub1));
        lower = out[out.size() - 2].constant();
        upper = out.back().constant();
    } else if (p < 2.0) {
        out.push_back(conditional_bound_report(space, c.dec.L, c.d, p, ConditionalBound::clb2minus));
        out.push_back(conditional_bound_report(space, c.dec.L, c.d, p, ConditionalBound::cub2minus));
        lower = out[out.size() - 2].constant();
        upper = out.back().constant();
    } else if (p == 2.0) {
        InequalityReport r = make_report("chain-lower-l2", "", p, lp_norm(space, c.q_l, 2.0),
                                         lp_norm(space, c.l_star, 2.0), 1.0);
        out.push_back(r);
        lower = 1.0;
    } else {
        out.push_back(conditional_bound_report(space, c.dec.L, c.d, p, ConditionalBound::clb2plus));
        lower = out.back().constant();
    }
    return {lower, upper};
}

} // namespace

std::vector<InequalityReport> replay_real_chain(const FilteredSpace& space, const Process& m, double p, double cap) {
    require_p_at_least_one(p, "replay_real_chain");
    check_shape(space, m);
    if (m.dim() != 1) {
        throw StructuralError("replay_real_chain: scalar martingale required");
    }
    const ChainData c = chain_data(space, m);
    std::vector<InequalityReport> out;
    common_pathwise_links(out, c, p);
    out.push_back(pathwise_report("chain-kqv-le-var", p, c.q_k, c.var_k));
    out.push_back(check_dK_bound(space, m, p));
    const double a = out.back().constant();
    const auto [lower_c, upper_c] = conditional_links(out, space, c, p);

    // Constants obtained by composing the links above (Minkowski in L_p).
    double lower = 0.0;
    if (p < 2.0) {
        lower = lower_c * (9.0 + 2.0 * a) + 2.0 * a;
    } else if (p == 2.0) {
        lower = 1.0 + 4.0 * a;
    } else {
        lower = lower_c * (1.0 + 2.0 * a) + 8.0 + 2.0 * a;
    }
    double upper = 0.0;
    if (p < 2.0) {
        upper = upper_c * (5.0 + a) + a;
    } else {
        out.push_back(bdg_upper_ito_report(space, m, p));
        upper = out.back().constant();
    }
    const double q_norm = lp_norm(space, c.q_m, p);
    const double star_norm = lp_norm(space, c.m_star, p);
    out.push_back(make_report("chain-assembled-lower", "", p, q_norm, star_norm, lower, cap));
    out.push_back(make_report("chain-assembled-upper", "", p, star_norm, q_norm, upper, cap));
    return out;
}

std::vector<InequalityReport> replay_hilbert_chain(const FilteredSpace& space, const Process& m, double p,
                                                   double cap) {
    require_p_at_least_one(p, "replay_hilbert_chain");
    check_shape(space, m);
    const ChainData c = chain_data(space, m);
    std::vector<InequalityReport> out;
    common_pathwise_links(out, c, p);
    const auto var_k1 = total_variation(c.dec.K1).terminal_values();
    out.push_back(pathwise_report("chain-k1var-le-2jump", p, var_k1, combine(c.s_t, 2.0, c.s_t, 0.0)));

    const double q_norm = lp_norm(space, c.q_m, p);
    const double star_norm = lp_norm(space, c.m_star, p);

    if (p == 1.0) {
        out.push_back(pathwise_report("chain-kqv-le-var", p, c.q_k, c.var_k));
        InequalityReport comp = check_compensator_l1_hilbert(space, c.dec.K1);
        comp.name = "chain-compensator-l1";
        out.push_back(comp);
        out.push_back(make_report("chain-dK-l1", "", p, lp_norm(space, c.var_k, 1.0), lp_norm(space, c.s_t, 1.0),
                                  4.0));
        const double a = 4.0;
        const auto [lower_c, upper_c] = conditional_links(out, space, c, p);
        out.push_back(
            make_report("chain-assembled-lower", "", p, q_norm, star_norm, lower_c * (9.0 + 2.0 * a) + 2.0 * a, cap));
        out.push_back(
            make_report("chain-assembled-upper", "", p, star_norm, q_norm, upper_c * (5.0 + a) + a, cap));
        return out;
    }

    // Stein's bound on the compensator jumps: ΔK2_k = E_{k-1} ΔK1_k.
    std::vector<RandomVector> f;
    std::vector<int> idx;
    const Process dk1 = increments(c.dec.K1);
    for (std::size_t k = 0; k < m.steps(); ++k) {
        f.push_back(slice(dk1, k));
        idx.push_back(k == 0 ? 0 : static_cast<int>(k) - 1);
    }
    InequalityReport stein = stein_report(space, f, idx, p);
    stein.name = "chain-stein";
    out.push_back(stein);
    const double cs = stein.constant();
    const auto q_k1 = sqrt_terminal(quadratic_variation(c.dec.K1));
    const auto q_k2 = sqrt_terminal(quadratic_variation(c.dec.K2));
    out.push_back(pathwise_report("chain-k2qv-is-stein", p, q_k2,
                                  [&] {
                                      // ‖(Tf)‖_{ℓ2} per atom; equal to [K2,K2]^{1/2}.
                                      const auto tf = stein_apply(space, f, idx);
                                      std::vector<double> v(space.atoms(), 0.0);
                                      for (const auto& t : tf) {
                                          for (std::size_t a = 0; a < v.size(); ++a) {
                                              v[a] += t.norm_at(a) * t.norm_at(a);
                                          }
                                      }
                                      for (double& x : v) {
                                          x = std::sqrt(x);
                                      }
                                      return v;
                                  }(),
                                  1e-9));
    out.push_back(pathwise_report("chain-kqv-triangle", p, c.q_k, combine(q_k1, 1.0, q_k2, 1.0)));
    out.push_back(pathwise_report("chain-k1qv-le-var", p, q_k1, var_k1));

    InequalityReport k_upper = bdg_report(space, c.dec.K, p, BdgSide::upper, cap);
    k_upper.name = "chain-K-upper";
    out.push_back(k_upper);
    const double ck = k_upper.degenerate ? 0.0 : k_upper.ratio;

    const auto [lower_c, upper_c] = conditional_links(out, space, c, p);
    const double b = 4.0 * (1.0 + cs);
    double lower = 0.0;
    if (p < 2.0) {
        lower = lower_c * (9.0 + ck * b) + b;
    } else if (p == 2.0) {
        lower = 1.0 + ck * b + b;
    } else {
        lower = lower_c * (1.0 + ck * b) + 8.0 + b;
    }
    double upper = 0.0;
    if (p < 2.0) {
        const double bp = 2.0 * (1.0 + cs);
        upper = upper_c * (5.0 + bp) + ck * bp;
        DualityChain dual = duality_lower_to_upper_check(space, m, conjugate_exponent(p), cap);
        for (auto& link : dual.links) {
            out.push_back(link);
        }
        out.push_back(dual.conclusion);
    } else {
        out.push_back(bdg_upper_ito_report(space, m, p));
        upper = out.back().constant();
    }
    out.push_back(make_report("chain-assembled-lower", "", p, q_norm, star_norm, lower, cap));
    out.push_back(make_report("chain-assembled-upper", "", p, star_norm, q_norm, upper, cap));
    return out;
}

} // namespace bdgkit
