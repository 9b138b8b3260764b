#include "bdgkit/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "bdgkit/errors.hpp"
#include "bdgkit/inequalities.hpp"

namespace bdgkit {

// =============================================================================
// Ensembles
// =============================================================================

const char* to_string(PathFamily family) {
    switch (family) {
    case PathFamily::brownian:
        return "brownian";
    case PathFamily::compensated_poisson:
        return "compensated_poisson";
    case PathFamily::stable_truncated:
        return "stable_truncated";
    }
    return "?";
}

PathFamily path_family_from_string(const std::string& name) {
    for (auto f : {PathFamily::brownian, PathFamily::compensated_poisson, PathFamily::stable_truncated}) {
        if (name == to_string(f)) {
            return f;
        }
    }
    throw ValidationError("unknown path family: " + name);
}

void validate(const EnsembleSpec& spec) {
    if (spec.n_paths == 0 || spec.n_steps == 0 || spec.dim == 0) {
        throw ValidationError("ensemble: n_paths, n_steps and dim must be positive");
    }
    const FamilySpec& f = spec.family;
    if (f.kind == PathFamily::compensated_poisson && !(f.rate > 0.0 && std::isfinite(f.rate))) {
        throw ValidationError("ensemble: poisson rate must be positive");
    }
    if (f.kind == PathFamily::stable_truncated && !(f.alpha > 0.0 && f.alpha < 2.0 && f.cap > 1.0)) {
        throw ValidationError("ensemble: stable law needs alpha in (0,2) and cap > 1");
    }
}

void generate_increments(const EnsembleSpec& spec, std::size_t index, std::span<double> out) {
    if (out.size() != spec.n_steps * spec.dim) {
        throw StructuralError("generate_increments: buffer size mismatch");
    }
    Rng rng(substream_seed(spec.seed, index));
    const double dt = spec.dt();
    const FamilySpec& f = spec.family;
    switch (f.kind) {
    case PathFamily::brownian: {
        const double sd = std::sqrt(dt);
        for (double& x : out) {
            x = sd * rng.normal();
        }
        break;
    }
    case PathFamily::compensated_poisson: {
        const double mean = f.rate * dt;
        for (double& x : out) {
            x = static_cast<double>(rng.poisson(mean)) - mean;
        }
        break;
    }
    case PathFamily::stable_truncated: {
        // Symmetric Pareto-tailed jumps with the α-stable time scaling.
        const double step_scale = std::pow(dt, 1.0 / f.alpha);
        for (double& x : out) {
            const double size = std::min(std::pow(rng.uniform(), -1.0 / f.alpha), f.cap);
            x = step_scale * (rng.coin() ? size : -size);
        }
        break;
    }
    }
}

PathEnsemble simulate(const EnsembleSpec& spec, std::size_t cap) {
    validate(spec);
    const std::size_t per_path = (spec.n_steps + 1) * spec.dim;
    if (per_path > cap / spec.n_paths) {
        throw CapacityError("simulate: ensemble exceeds the sample cap");
    }
    PathEnsemble ens{spec, std::vector<double>(spec.n_paths * per_path, 0.0)};
    std::vector<double> inc(spec.n_steps * spec.dim);
    for (std::size_t i = 0; i < spec.n_paths; ++i) {
        generate_increments(spec, i, inc);
        double* base = ens.paths.data() + i * per_path;
        for (std::size_t k = 1; k <= spec.n_steps; ++k) {
            for (std::size_t c = 0; c < spec.dim; ++c) {
                base[k * spec.dim + c] = base[(k - 1) * spec.dim + c] + inc[(k - 1) * spec.dim + c];
            }
        }
    }
    return ens;
}

// =============================================================================
// Estimates
// =============================================================================

McEstimate estimate(std::span<const double> samples) {
    McEstimate e;
    e.n = samples.size();
    if (e.n == 0) {
        return e;
    }
    double mean = 0.0;
    for (double x : samples) {
        mean += x;
    }
    mean /= static_cast<double>(e.n);
    double ss = 0.0;
    for (double x : samples) {
        ss += (x - mean) * (x - mean);
    }
    e.value = mean;
    e.std_error = e.n > 1 ? std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n)) : 0.0;
    return e;
}

// =============================================================================
// Per-path summaries
// =============================================================================

const char* to_string(AuxConstruction which) {
    switch (which) {
    case AuxConstruction::ub2c:
        return "ub2c";
    case AuxConstruction::lbp_gt2:
        return "lbp_gt2";
    case AuxConstruction::lb2c:
        return "lb2c";
    }
    return "?";
}

AuxConstruction aux_construction_from_string(const std::string& name) {
    for (auto a : {AuxConstruction::ub2c, AuxConstruction::lbp_gt2, AuxConstruction::lb2c}) {
        if (name == to_string(a)) {
            return a;
        }
    }
    throw ValidationError("unknown auxiliary construction: " + name);
}

void validate(const AuxRequest& r) {
    if (!(r.eps > 0.0)) {
        throw DomainError("auxiliary construction: eps must be positive");
    }
    switch (r.which) {
    case AuxConstruction::ub2c:
        if (!(r.p > 0.0 && r.p <= 2.0)) {
            throw DomainError("ub2c needs p in (0, 2]");
        }
        break;
    case AuxConstruction::lb2c:
        if (!(r.p > 0.0 && r.p < 2.0)) {
            throw DomainError("lb2c needs p in (0, 2)");
        }
        break;
    case AuxConstruction::lbp_gt2:
        if (!(r.p > 2.0) || !std::isfinite(r.p)) {
            throw DomainError("lbp_gt2 needs p > 2");
        }
        break;
    }
}

double effective_eps(const AuxRequest& request, std::size_t n_steps) {
    if (request.which == AuxConstruction::lb2c && request.floor_eps && n_steps > 0) {
        return std::max(request.eps, 1.0 / std::sqrt(static_cast<double>(n_steps)));
    }
    return request.eps;
}

namespace {

// Running state of N = H·M with H_{k-1} as the integrand of step k.
struct AuxState {
    AuxRequest req;
    std::vector<double> n;
    double n_star = 0.0;
    double nn = 0.0; // [N,N]
    double h_prev = 0.0;

    double integrand(double qv, double m_star) const {
        switch (req.which) {
        case AuxConstruction::ub2c:
        case AuxConstruction::lbp_gt2:
            return std::sqrt(req.p / 2.0) * std::pow(req.eps + qv, req.p / 4.0 - 0.5);
        case AuxConstruction::lb2c:
            return std::pow(req.eps + m_star, req.p / 2.0 - 1.0);
        }
        return 0.0;
    }
};

} // namespace

PathSummary summarize_increments(std::span<const double> increments, std::size_t dim,
                                 std::span<const AuxRequest> aux) {
    if (dim == 0 || increments.size() % dim != 0) {
        throw StructuralError("summarize_increments: bad dimension");
    }
    const std::size_t steps = increments.size() / dim;
    PathSummary s;
    s.terminal.assign(dim, 0.0);
    std::vector<AuxState> states;
    for (const auto& r : aux) {
        validate(r);
        AuxState st{r, std::vector<double>(dim, 0.0), 0.0, 0.0, 0.0};
        st.req.eps = effective_eps(r, steps);
        st.h_prev = st.integrand(0.0, 0.0);
        states.push_back(std::move(st));
    }
    std::vector<double>& x = s.terminal;
    for (std::size_t k = 0; k < steps; ++k) {
        const double* dx = increments.data() + k * dim;
        double jump_sq = 0.0;
        double norm_sq = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            x[c] += dx[c];
            jump_sq += dx[c] * dx[c];
            norm_sq += x[c] * x[c];
        }
        s.qv += jump_sq;
        s.sup_norm = std::max(s.sup_norm, std::sqrt(norm_sq));
        for (auto& st : states) {
            double n_sq = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                st.n[c] += st.h_prev * dx[c];
                n_sq += st.n[c] * st.n[c];
            }
            st.nn += st.h_prev * st.h_prev * jump_sq;
            st.n_star = std::max(st.n_star, std::sqrt(n_sq));
            st.h_prev = st.integrand(s.qv, s.sup_norm);
        }
    }
    for (double v : x) {
        s.terminal_sq += v * v;
    }
    for (const auto& st : states) {
        AuxOutcome o;
        const double p = st.req.p;
        const double eps = st.req.eps;
        switch (st.req.which) {
        case AuxConstruction::ub2c:
            // M* <= 2 H_T^{-1} N*
            o.lhs = s.sup_norm;
            o.rhs = 2.0 * st.n_star / st.h_prev;
            break;
        case AuxConstruction::lb2c:
            // N* <= (2/p)(ε + M*)^{p/2}
            o.lhs = st.n_star;
            o.rhs = 2.0 / p * std::pow(eps + s.sup_norm, p / 2.0);
            break;
        case AuxConstruction::lbp_gt2: {
            // N* <= 2 H_T M*, and [N,N] ≈ (ε+[M,M])^{p/2} - ε^{p/2}
            o.lhs = st.n_star;
            o.rhs = 2.0 * st.h_prev * s.sup_norm;
            const double target = std::pow(eps + s.qv, p / 2.0) - std::pow(eps, p / 2.0);
            o.relative_error = target > 0.0 ? std::abs(st.nn - target) / target : 0.0;
            break;
        }
        }
        s.aux.push_back(o);
    }
    return s;
}

std::vector<PathSummary> summarize(const EnsembleSpec& spec, std::span<const AuxRequest> aux, unsigned threads) {
    validate(spec);
    for (const auto& r : aux) {
        validate(r);
    }
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.n_paths));
    std::vector<PathSummary> out(spec.n_paths);
    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<double> inc(spec.n_steps * spec.dim);
        for (std::size_t i = begin; i < end; ++i) {
            generate_increments(spec, i, inc);
            out[i] = summarize_increments(inc, spec.dim, aux);
        }
    };
    if (threads <= 1) {
        work(0, spec.n_paths);
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (spec.n_paths + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(spec.n_paths, begin + chunk);
        if (begin < end) {
            pool.emplace_back(work, begin, end);
        }
    }
    for (auto& th : pool) {
        th.join();
    }
    return out;
}

std::vector<PathSummary> summarize(const PathEnsemble& ens, std::span<const AuxRequest> aux) {
    const EnsembleSpec& spec = ens.spec;
    std::vector<PathSummary> out;
    out.reserve(spec.n_paths);
    std::vector<double> inc(spec.n_steps * spec.dim);
    for (std::size_t i = 0; i < spec.n_paths; ++i) {
        for (std::size_t k = 1; k <= spec.n_steps; ++k) {
            const auto now = ens.point(i, k);
            const auto before = ens.point(i, k - 1);
            for (std::size_t c = 0; c < spec.dim; ++c) {
                inc[(k - 1) * spec.dim + c] = now[c] - before[c];
            }
        }
        out.push_back(summarize_increments(inc, spec.dim, aux));
    }
    return out;
}

// =============================================================================
// Reports
// =============================================================================

double mc_upper_constant(double p) {
    if (!(p > 0.0)) {
        throw DomainError("mc_upper_constant: p must be positive");
    }
    return p <= 2.0 ? 4.0 * std::sqrt(2.0 / p) : ito_upper_constant(p);
}

double mc_lower_constant(double p) {
    if (!(p > 0.0)) {
        throw DomainError("mc_lower_constant: p must be positive");
    }
    if (p < 2.0) {
        return 2.0 / p;
    }
    return p == 2.0 ? 1.0 : std::sqrt(p / 2.0);
}

namespace {

// ‖X‖_p = (E X^p)^{1/p} with a delta-method standard error.
McEstimate norm_estimate(const McEstimate& moment, double p) {
    McEstimate e = moment;
    e.value = std::pow(moment.value, 1.0 / p);
    e.std_error = moment.value > 0.0 ? std::pow(moment.value, 1.0 / p - 1.0) / p * moment.std_error : 0.0;
    return e;
}

McReport mc_side(std::string name, double p, const McEstimate& lhs, const McEstimate& rhs, double c) {
    McReport r{make_report(std::move(name), "", p, lhs.value, rhs.value, c), lhs, rhs};
    const double slack = 3.0 * std::sqrt(lhs.std_error * lhs.std_error + c * c * rhs.std_error * rhs.std_error);
    if (!r.report.degenerate) {
        r.report.pass = std::isfinite(lhs.value) && lhs.value <= c * rhs.value + slack;
    }
    return r;
}

// lhs = mean of paired differences, rhs = 3 SE.
McReport band_report(std::string name, double p, std::span<const double> diffs, bool two_sided) {
    const McEstimate d = estimate(diffs);
    const double dev = two_sided ? std::abs(d.value) : d.value;
    McReport r{make_report(std::move(name), "", p, dev, 3.0 * d.std_error, 1.0), d, {}};
    if (d.std_error == 0.0) {
        r.report.pass = dev <= 1e-12;
    }
    return r;
}

} // namespace

std::vector<McReport> bdg_mc_report(const EnsembleSpec& spec, std::span<const PathSummary> paths, double p) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw DomainError("bdg_mc_report: p must be positive");
    }
    if (p < 1.0 && spec.family.kind != PathFamily::brownian) {
        throw DomainError("bdg_mc_report: p < 1 is only covered for continuous (brownian) paths");
    }
    std::vector<double> sup_p(paths.size());
    std::vector<double> qv_p(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        sup_p[i] = std::pow(paths[i].sup_norm, p);
        qv_p[i] = std::pow(paths[i].qv, p / 2.0);
    }
    const McEstimate star = norm_estimate(estimate(sup_p), p);
    const McEstimate root_qv = norm_estimate(estimate(qv_p), p);
    return {mc_side("bdg-mc-upper", p, star, root_qv, mc_upper_constant(p)),
            mc_side("bdg-mc-lower", p, root_qv, star, mc_lower_constant(p))};
}

std::vector<McReport> bdg_mc_report(const PathEnsemble& ens, double p) {
    const auto paths = summarize(ens, {});
    return bdg_mc_report(ens.spec, paths, p);
}

std::vector<McReport> l2_bracket_report(std::span<const PathSummary> paths) {
    std::vector<double> low(paths.size());
    std::vector<double> high(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const double sup_sq = paths[i].sup_norm * paths[i].sup_norm;
        low[i] = paths[i].qv - sup_sq;
        high[i] = sup_sq - 4.0 * paths[i].qv;
    }
    return {band_report("mc-l2-bracket-lower", 2.0, low, false),
            band_report("mc-l2-bracket-upper", 2.0, high, false)};
}

McReport mc_isometry_report(std::span<const PathSummary> paths) {
    std::vector<double> d(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        d[i] = paths[i].terminal_sq - paths[i].qv;
    }
    return band_report("mc-isometry", 2.0, d, true);
}

McReport qv_convergence_report(const EnsembleSpec& spec, std::span<const PathSummary> paths, double limit) {
    if (spec.family.kind != PathFamily::brownian) {
        throw DomainError("qv_convergence_report: brownian paths only");
    }
    std::vector<double> err(paths.size());
    const double d = static_cast<double>(spec.dim);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        err[i] = std::abs(paths[i].qv / d - 1.0);
    }
    const McEstimate e = estimate(err);
    return {make_report("mc-qv-convergence", "", 2.0, e.value, 1.0, limit), e, {}};
}

McReport terminal_mean_report(std::span<const PathSummary> paths) {
    if (paths.empty()) {
        return {make_report("mc-terminal-mean", "", 1.0, 0.0, 5.0, 1.0), {}, {}};
    }
    const std::size_t dim = paths[0].terminal.size();
    double worst = 0.0;
    McEstimate worst_estimate;
    std::vector<double> coord(paths.size());
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t i = 0; i < paths.size(); ++i) {
            coord[i] = paths[i].terminal[c];
        }
        const McEstimate e = estimate(coord);
        const double z = e.std_error > 0.0 ? std::abs(e.value) / e.std_error : (e.value == 0.0 ? 0.0 : INFINITY);
        if (z >= worst) {
            worst = z;
            worst_estimate = e;
        }
    }
    return {make_report("mc-terminal-mean", "", 1.0, worst, 5.0, 1.0), worst_estimate, {}};
}

AuxReport auxiliary_construction_report(std::span<const PathSummary> paths, std::size_t aux_index,
                                        const AuxRequest& request, double min_fraction, double equality_slack) {
    validate(request);
    std::size_t good = 0;
    double max_excess = -INFINITY;
    double rel_sum = 0.0;
    for (const auto& s : paths) {
        if (aux_index >= s.aux.size()) {
            throw StructuralError("auxiliary_construction_report: summary lacks the requested construction");
        }
        const AuxOutcome& o = s.aux[aux_index];
        const bool holds = o.lhs <= o.rhs * (1.0 + 1e-12) &&
                           (request.which != AuxConstruction::lbp_gt2 || o.relative_error <= equality_slack);
        good += holds ? 1 : 0;
        if (o.rhs > 0.0) {
            max_excess = std::max(max_excess, o.lhs / o.rhs - 1.0);
        }
        rel_sum += o.relative_error;
    }
    AuxReport r;
    const double n = static_cast<double>(std::max<std::size_t>(1, paths.size()));
    r.pass_fraction = paths.empty() ? 1.0 : static_cast<double>(good) / n;
    r.max_excess = paths.empty() ? 0.0 : max_excess;
    r.mean_relative_error = rel_sum / n;
    r.eps = request.eps;
    r.report = make_report(std::string("mc-aux-") + to_string(request.which), "", request.p, 1.0 - r.pass_fraction,
                           1.0 - min_fraction, 1.0);
    return r;
}

AuxReport auxiliary_construction_check(const PathEnsemble& ens, const AuxRequest& request) {
    const AuxRequest one[] = {request};
    const auto paths = summarize(ens, one);
    AuxReport r = auxiliary_construction_report(paths, 0, request);
    r.eps = effective_eps(request, ens.spec.n_steps);
    return r;
}

std::vector<AuxReport> aux_eps_sweep(const EnsembleSpec& spec, AuxRequest request, std::span<const double> eps_values,
                                     unsigned threads) {
    request.floor_eps = false;
    std::vector<AuxRequest> requests;
    for (double eps : eps_values) {
        request.eps = eps;
        requests.push_back(request);
    }
    const auto paths = summarize(spec, requests, threads);
    std::vector<AuxReport> out;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        out.push_back(auxiliary_construction_report(paths, i, requests[i]));
    }
    return out;
}

} // namespace bdgkit
