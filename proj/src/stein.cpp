#include "bdgkit/stein.hpp"

#include <algorithm>
#include <cmath>

#include "bdgkit/errors.hpp"
#include "bdgkit/inequalities.hpp"

namespace bdgkit {

namespace {

void check_inputs(const FilteredSpace& space, std::span<const RandomVector> f, std::span<const int> n_indices) {
    if (f.size() != n_indices.size()) {
        throw StructuralError("stein: f and n_indices differ in length");
    }
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k].values.size() != space.atoms() * f[k].dim) {
            throw StructuralError("stein: f_k does not match the space");
        }
        if (k > 0 && f[k].dim != f[0].dim) {
            throw StructuralError("stein: f_k must share one dimension");
        }
        if (n_indices[k] < 0 || n_indices[k] > space.horizon()) {
            throw DomainError("stein: time index out of range");
        }
    }
}

// (Σ_k ‖g_k(ω)‖^q)^{1/q} per atom, sup for q = ∞.
std::vector<double> sequence_norms(std::size_t atoms, std::span<const RandomVector> g, double q) {
    std::vector<double> out(atoms, 0.0);
    for (std::size_t a = 0; a < atoms; ++a) {
        double s = 0.0;
        for (const auto& gk : g) {
            const double x = gk.norm_at(a);
            s = std::isinf(q) ? std::max(s, x) : s + std::pow(x, q);
        }
        out[a] = std::isinf(q) ? s : std::pow(s, 1.0 / q);
    }
    return out;
}

void require_open_exponent(double p, const char* what) {
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw DomainError(std::string(what) + ": p must lie in (1, inf)");
    }
}

} // namespace

std::vector<RandomVector> stein_apply(const FilteredSpace& space, std::span<const RandomVector> f,
                                      std::span<const int> n_indices) {
    check_inputs(space, f, n_indices);
    std::vector<RandomVector> out;
    out.reserve(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        out.push_back(cond_expect(space, f[k], n_indices[k]));
    }
    return out;
}

double stein_constant(double p) {
    require_open_exponent(p, "stein_constant");
    if (p > 2.0) {
        return stein_constant(conjugate_exponent(p));
    }
    return std::pow(conjugate_exponent(p), 1.0 - p / 2.0);
}

InequalityReport stein_report(const FilteredSpace& space, std::span<const RandomVector> f,
                              std::span<const int> n_indices, double p) {
    const double c = stein_constant(p);
    const auto tf = stein_apply(space, f, n_indices);
    return make_report("stein", "", p, lp_norm(space, sequence_norms(space.atoms(), tf, 2.0), p),
                       lp_norm(space, sequence_norms(space.atoms(), f, 2.0), p), c);
}

InequalityReport stein_lp_contraction_report(const FilteredSpace& space, std::span<const RandomVector> f,
                                             std::span<const int> n_indices, double p) {
    require_open_exponent(p, "stein_lp_contraction_report");
    const auto tf = stein_apply(space, f, n_indices);
    return make_report("stein-lp-lp", "", p, lp_norm(space, sequence_norms(space.atoms(), tf, p), p),
                       lp_norm(space, sequence_norms(space.atoms(), f, p), p), 1.0);
}

void validate(const MixedNormSpec& spec) {
    if (!(spec.p > 1.0) || !std::isfinite(spec.p)) {
        throw ValidationError("mixed norm: p must lie in (1, inf)");
    }
    if (!(spec.q >= 1.0)) {
        throw ValidationError("mixed norm: q must lie in [1, inf]");
    }
    if (spec.inner_dim == 0) {
        throw ValidationError("mixed norm: inner dimension must be positive");
    }
}

double mixed_norm(const FilteredSpace& space, std::span<const RandomVector> f, const MixedNormSpec& spec) {
    validate(spec);
    for (const auto& fk : f) {
        if (fk.dim != spec.inner_dim || fk.values.size() != space.atoms() * fk.dim) {
            throw StructuralError("mixed norm: f_k does not match the spec");
        }
    }
    return lp_norm(space, sequence_norms(space.atoms(), f, spec.q), spec.p);
}

} // namespace bdgkit
