#include "bdgkit/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "bdgkit/errors.hpp"

namespace bdgkit {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double dot_increment(const Process& x, std::size_t n, std::size_t atom, const Process& y) {
    // (ΔX_n, ΔY_n) without materialising increments.
    const auto xn = x.at(n, atom);
    const auto yn = y.at(n, atom);
    double s = 0.0;
    if (n == 0) {
        return dot(xn, yn);
    }
    const auto xp = x.at(n - 1, atom);
    const auto yp = y.at(n - 1, atom);
    for (std::size_t i = 0; i < xn.size(); ++i) {
        s += (xn[i] - xp[i]) * (yn[i] - yp[i]);
    }
    return s;
}

double increment_norm(const Process& x, std::size_t n, std::size_t atom) {
    return std::sqrt(std::max(0.0, dot_increment(x, n, atom, x)));
}

PathFunctional make_functional(std::string name, const Process& like) {
    return {std::move(name), Process(like.steps(), like.atoms(), 1, like.kind())};
}

void require_scalar(const Process& x, const char* what) {
    if (x.dim() != 1) {
        throw StructuralError(std::string(what) + " requires a scalar process");
    }
}

} // namespace

std::vector<double> PathFunctional::terminal_values() const {
    std::vector<double> out(values.atoms());
    for (std::size_t a = 0; a < out.size(); ++a) {
        out[a] = terminal(a);
    }
    return out;
}

// =============================================================================
// Integrals
// =============================================================================

Process left_shift(const Process& h) {
    Process out = Process::zeros_like(h, Measurability::predictable);
    const std::size_t slab = h.atoms() * h.dim();
    const auto src = h.data();
    auto dst = out.data();
    std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(slab), dst.begin());
    for (std::size_t i = slab; i < src.size(); ++i) {
        dst[i] = src[i - slab];
    }
    return out;
}

Process stoch_integral(const Process& h, const Process& m) {
    if (h.dim() != 1) {
        throw StructuralError("stoch_integral: integrand must be scalar");
    }
    if (h.steps() != m.steps() || h.atoms() != m.atoms()) {
        throw StructuralError("stoch_integral: integrand and integrator differ in shape");
    }
    if (h.kind() == Measurability::adapted) {
        throw ValidationError("stoch_integral: integrand must be predictable; apply left_shift first");
    }
    Process out = Process::zeros_like(m, Measurability::adapted);
    for (std::size_t n = 1; n < m.steps(); ++n) {
        for (std::size_t a = 0; a < m.atoms(); ++a) {
            const double weight = h(n, a);
            const auto now = m.at(n, a);
            const auto before = m.at(n - 1, a);
            const auto acc = out.at(n - 1, a);
            auto dst = out.at(n, a);
            for (std::size_t i = 0; i < m.dim(); ++i) {
                dst[i] = acc[i] + weight * (now[i] - before[i]);
            }
        }
    }
    return out;
}

// =============================================================================
// Path functionals
// =============================================================================

PathFunctional covariation(const Process& m, const Process& n) {
    check_same_shape(m, n);
    PathFunctional out = make_functional("[M,N]", m);
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        double acc = 0.0;
        for (std::size_t t = 0; t < m.steps(); ++t) {
            acc += dot_increment(m, t, a, n);
            out.values(t, a) = acc;
        }
    }
    return out;
}

PathFunctional quadratic_variation(const Process& m) {
    PathFunctional out = make_functional("[M,M]", m);
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        double acc = 0.0;
        for (std::size_t t = 0; t < m.steps(); ++t) {
            acc += std::max(0.0, dot_increment(m, t, a, m));
            out.values(t, a) = acc;
        }
    }
    return out;
}

PathFunctional absolute_covariation(const Process& m, const Process& n) {
    check_same_shape(m, n);
    PathFunctional out = make_functional("int|d[M,N]|", m);
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        double acc = 0.0;
        for (std::size_t t = 0; t < m.steps(); ++t) {
            acc += std::abs(dot_increment(m, t, a, n));
            out.values(t, a) = acc;
        }
    }
    return out;
}

PathFunctional maximal(const Process& m) {
    PathFunctional out = make_functional("M*", m);
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        double acc = 0.0;
        for (std::size_t t = 0; t < m.steps(); ++t) {
            acc = std::max(acc, m.norm_at(t, a));
            out.values(t, a) = acc;
        }
    }
    return out;
}

PathFunctional jump_maximal(const Process& m) {
    PathFunctional out = make_functional("S", m);
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        double acc = 0.0;
        for (std::size_t t = 0; t < m.steps(); ++t) {
            acc = std::max(acc, increment_norm(m, t, a));
            out.values(t, a) = acc;
        }
    }
    return out;
}

PathFunctional total_variation(const Process& x) {
    PathFunctional out = make_functional("int|dX|", x);
    for (std::size_t a = 0; a < x.atoms(); ++a) {
        double acc = 0.0;
        for (std::size_t t = 0; t < x.steps(); ++t) {
            acc += increment_norm(x, t, a);
            out.values(t, a) = acc;
        }
    }
    return out;
}

// =============================================================================
// Finite-variation identities
// =============================================================================

double check_ibp(const Process& u, const Process& v) {
    check_same_shape(u, v);
    const std::size_t dim = u.dim();
    double worst = 0.0;
    for (std::size_t a = 0; a < u.atoms(); ++a) {
        double left_sum = 0.0;  // Σ (U_{k-1}, ΔV_k)
        double right_sum = 0.0; // Σ (V_k, ΔU_k)
        double u_peak = 0.0;
        double v_peak = 0.0;
        for (std::size_t n = 0; n < u.steps(); ++n) {
            const auto un = u.at(n, a);
            const auto vn = v.at(n, a);
            for (std::size_t i = 0; i < dim; ++i) {
                const double u_prev = n == 0 ? 0.0 : u.at(n - 1, a)[i];
                const double v_prev = n == 0 ? 0.0 : v.at(n - 1, a)[i];
                left_sum += u_prev * (vn[i] - v_prev);
                right_sum += vn[i] * (un[i] - u_prev);
            }
            u_peak = std::max(u_peak, std::sqrt(dot(un, un)));
            v_peak = std::max(v_peak, std::sqrt(dot(vn, vn)));
            const double residual = std::abs(dot(un, vn) - left_sum - right_sum);
            worst = std::max(worst, residual / std::max(1.0, u_peak * v_peak));
        }
    }
    return worst;
}

double check_integral_qv(const Process& h, const Process& m) {
    const Process integral = stoch_integral(h, m);
    const PathFunctional qv = quadratic_variation(integral);
    double worst = 0.0;
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        double acc = 0.0;
        for (std::size_t n = 1; n < m.steps(); ++n) {
            acc += h(n, a) * h(n, a) * std::max(0.0, dot_increment(m, n, a, m));
            worst = std::max(worst, std::abs(qv(n, a) - acc) / std::max(1.0, acc));
        }
    }
    return worst;
}

double check_stopped_qv(const FilteredSpace& space, const Process& m, const StoppingTime& tau) {
    check_shape(space, m);
    const PathFunctional stopped = quadratic_variation(stop_process(space, m, tau));
    const PathFunctional qv = quadratic_variation(m);
    double worst = 0.0;
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        const auto t = static_cast<std::size_t>(tau[a]);
        for (std::size_t n = 0; n < m.steps(); ++n) {
            worst = std::max(worst, std::abs(stopped(n, a) - qv(std::min(n, t), a)));
        }
    }
    return worst;
}

FvRuleResiduals check_fv_rules(const Process& u) {
    require_scalar(u, "check_fv_rules");
    for (double x : u.data()) {
        if (!(x > 0.0)) {
            throw DomainError("check_fv_rules: U must be strictly positive");
        }
    }
    FvRuleResiduals r;
    for (std::size_t a = 0; a < u.atoms(); ++a) {
        for (std::size_t n = 1; n < u.steps(); ++n) {
            const double prev = u(n - 1, a);
            const double cur = u(n, a);
            const double du = cur - prev;
            r.square_rule = std::max(r.square_rule, std::abs((cur * cur - prev * prev) - (prev + cur) * du) /
                                                        std::max(1.0, cur * cur + prev * prev));
            r.sqrt_rule = std::max(
                r.sqrt_rule, std::abs((std::sqrt(cur) - std::sqrt(prev)) - du / (std::sqrt(prev) + std::sqrt(cur))));
            r.reciprocal_rule =
                std::max(r.reciprocal_rule, std::abs((1.0 / prev - 1.0 / cur) - du / (cur * prev)));
        }
    }
    return r;
}

FvLemmaResult fv_lemma_path(std::span<const double> v, double q, double eps_reg) {
    if (!(q > 0.0) || q == 1.0 || !std::isfinite(q)) {
        throw DomainError("fv lemma: q must lie in (0,1) or (1,inf)");
    }
    if (v.empty() || v[0] != 0.0) {
        throw DomainError("fv lemma: path must start at 0");
    }
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] < v[k - 1]) {
            throw DomainError("fv lemma: path must be increasing");
        }
    }
    FvLemmaResult r;
    const double terminal = v.back();
    if (q > 1.0) {
        for (std::size_t k = 1; k < v.size(); ++k) {
            r.lhs += v[k - 1] * (std::pow(v[k], q - 1.0) - std::pow(v[k - 1], q - 1.0));
        }
        r.rhs = (q - 1.0) / q * std::pow(terminal, q);
    } else {
        for (std::size_t k = 1; k < v.size(); ++k) {
            const double prev = v[k - 1] + eps_reg;
            const double cur = v[k] + eps_reg;
            r.lhs += prev * (std::pow(prev, q - 1.0) - std::pow(cur, q - 1.0));
        }
        r.rhs = (1.0 - q) / q * std::pow(terminal, q);
        r.slack = (1.0 - q) / q * std::pow(eps_reg, q);
    }
    // Round-off allowance only; the inequality is exact term by term.
    r.ok = r.lhs <= r.rhs + r.slack + 1e-12 * std::max(1.0, r.rhs);
    return r;
}

FvLemmaResult fv_lemma_bounds(const Process& v, double q, double eps_reg) {
    require_scalar(v, "fv_lemma_bounds");
    FvLemmaResult worst;
    double worst_gap = -INFINITY;
    std::vector<double> path(v.steps());
    for (std::size_t a = 0; a < v.atoms(); ++a) {
        for (std::size_t n = 0; n < v.steps(); ++n) {
            path[n] = v(n, a);
        }
        const FvLemmaResult r = fv_lemma_path(path, q, eps_reg);
        if (r.lhs - r.rhs > worst_gap) {
            worst_gap = r.lhs - r.rhs;
            const bool all_ok = worst.ok && r.ok;
            worst = r;
            worst.ok = all_ok;
        } else {
            worst.ok = worst.ok && r.ok;
        }
    }
    return worst;
}

ItoRemainderResult check_ito_remainder(const FilteredSpace& space, const Process& m, double p) {
    if (!(p >= 2.0)) {
        throw DomainError("check_ito_remainder: p must be >= 2");
    }
    check_shape(space, m);
    const PathFunctional qv = quadratic_variation(m);
    const PathFunctional star = maximal(m);
    ItoRemainderResult r;
    r.max_excess = -INFINITY;
    std::vector<double> first_order(m.atoms(), 0.0);
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        double remainder = 0.0;
        double mart = 0.0;
        for (std::size_t n = 1; n < m.steps(); ++n) {
            const double prev_norm = m.norm_at(n - 1, a);
            const double cur_norm = m.norm_at(n, a);
            const auto prev = m.at(n - 1, a);
            const auto cur = m.at(n, a);
            double inner = 0.0;
            for (std::size_t i = 0; i < m.dim(); ++i) {
                inner += prev[i] * (cur[i] - prev[i]);
            }
            const double linear = p * std::pow(prev_norm, p - 2.0) * inner;
            mart += linear;
            remainder += std::pow(cur_norm, p) - std::pow(prev_norm, p) - linear;
        }
        first_order[a] = mart;
        const double bound = 0.5 * p * (p - 1.0) * std::pow(star.terminal(a), p - 2.0) * qv.terminal(a);
        const double excess = remainder - bound;
        if (excess > r.max_excess) {
            r.max_excess = excess;
            r.remainder = remainder;
            r.bound = bound;
        }
        if (excess > 1e-10 * std::max(1.0, bound)) {
            r.ok = false;
        }
    }
    r.martingale_mean = expectation(space, first_order);
    return r;
}

} // namespace bdgkit
