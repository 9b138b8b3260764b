#include "bdgkit/suites.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "bdgkit/calculus.hpp"
#include "bdgkit/compensation.hpp"
#include "bdgkit/davis.hpp"
#include "bdgkit/errors.hpp"
#include "bdgkit/inequalities.hpp"
#include "bdgkit/rng.hpp"
#include "bdgkit/stein.hpp"

namespace bdgkit {

// =============================================================================
// Configuration
// =============================================================================

ExperimentConfig default_config() {
    ExperimentConfig c;
    auto spec = [](int b, int t, std::size_t d, JumpLaw law, bool random_probs) {
        MartingaleSpec s;
        s.branching = b;
        s.horizon = t;
        s.dim = d;
        s.jump_law = law;
        s.random_child_probs = random_probs;
        return s;
    };
    c.martingale_specs = {
        spec(2, 6, 1, JumpLaw::rademacher, false),
        spec(3, 4, 1, JumpLaw::centered_uniform, true),
        spec(2, 7, 1, JumpLaw::heavy_tail_truncated, true),
        spec(2, 5, 2, JumpLaw::heavy_tail_truncated, false),
        spec(3, 3, 3, JumpLaw::poisson_compensated, true),
        spec(2, 5, 4, JumpLaw::centered_uniform, false),
    };
    auto ensemble = [](PathFamily kind, std::size_t paths, std::size_t steps, std::size_t dim) {
        EnsembleSpec e;
        e.family.kind = kind;
        e.family.rate = 5.0;
        e.n_paths = paths;
        e.n_steps = steps;
        e.dim = dim;
        return e;
    };
    c.ensembles = {
        ensemble(PathFamily::brownian, 2000, 2000, 1),
        ensemble(PathFamily::brownian, 500, 1000, 3),
        ensemble(PathFamily::compensated_poisson, 1000, 1000, 1),
        ensemble(PathFamily::stable_truncated, 1000, 1000, 1),
    };
    c.aux_requests = {
        {AuxConstruction::ub2c, 1.0, kDefaultAuxEpsilon},    {AuxConstruction::ub2c, 0.5, kDefaultAuxEpsilon},
        {AuxConstruction::lb2c, 1.0, kDefaultAuxEpsilon},    {AuxConstruction::lb2c, 0.5, kDefaultAuxEpsilon},
        {AuxConstruction::lbp_gt2, 4.0, kDefaultAuxEpsilon},
    };
    return c;
}

void validate(const ExperimentConfig& c) {
    if (c.suites.empty()) {
        throw ValidationError("config: no suites selected");
    }
    for (const auto& s : c.suites) {
        if (std::find(kSuiteNames.begin(), kSuiteNames.end(), s) == kSuiteNames.end()) {
            throw ValidationError("config: unknown suite '" + s + "'");
        }
    }
    if (c.format != "csv" && c.format != "json") {
        throw ValidationError("config: format must be csv or json");
    }
    if (c.members == 0) {
        throw ValidationError("config: members must be positive");
    }
    if (c.martingale_specs.empty()) {
        throw ValidationError("config: at least one martingale spec is required");
    }
    for (const auto& s : c.martingale_specs) {
        validate(s);
    }
    for (const auto& e : c.ensembles) {
        validate(e);
    }
    for (const auto& a : c.aux_requests) {
        validate(a);
    }
    auto at_least_one = [](const std::vector<double>& ps, const char* what) {
        for (double p : ps) {
            if (!(p >= 1.0) || !std::isfinite(p)) {
                throw ValidationError(std::string("config: ") + what + " must be finite and >= 1");
            }
        }
    };
    at_least_one(c.p_values, "p_values");
    at_least_one(c.conditional_p_values, "conditional_p_values");
    at_least_one(c.compensator_p_values, "compensator_p_values");
    at_least_one(c.dk_p_values, "dk_p_values");
    for (double p : c.conditional_p_values) {
        if (p == 2.0) {
            throw ValidationError("config: conditional bounds are not stated at p = 2");
        }
    }
    for (double p : c.stein_p_values) {
        if (!(p > 1.0) || !std::isfinite(p)) {
            throw ValidationError("config: stein_p_values must lie in (1, inf)");
        }
    }
    for (double q : c.fv_q_values) {
        if (!(q > 0.0) || q == 1.0 || !std::isfinite(q)) {
            throw ValidationError("config: fv_q_values must lie in (0,1) or (1,inf)");
        }
    }
    for (double p : c.mc_p_values) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw ValidationError("config: mc_p_values must be positive");
        }
    }
    for (const auto& t : c.interpolation) {
        if (!(t[0] > 1.0 && t[0] <= t[2] && t[2] <= t[1] && t[0] < t[1] && std::isfinite(t[1]))) {
            throw ValidationError("config: interpolation triples need 1 < p1 <= p <= p2");
        }
    }
    if (!(c.constant_cap > 0.0)) {
        throw ValidationError("config: constant_cap must be positive");
    }
    if (!(c.aux_min_fraction >= 0.0 && c.aux_min_fraction <= 1.0)) {
        throw ValidationError("config: aux_min_fraction must lie in [0, 1]");
    }
}

namespace {

using nlohmann::json;

json spec_to_json(const MartingaleSpec& s) {
    return json{{"branching", s.branching}, {"horizon", s.horizon},     {"dim", s.dim},
                {"jump_law", to_string(s.jump_law)}, {"scale", s.scale}, {"random_child_probs", s.random_child_probs}};
}

json ensemble_to_json(const EnsembleSpec& e) {
    return json{{"family", to_string(e.family.kind)},
                {"rate", e.family.rate},
                {"alpha", e.family.alpha},
                {"cap", e.family.cap},
                {"n_paths", e.n_paths},
                {"n_steps", e.n_steps},
                {"dim", e.dim}};
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    if (!obj.is_object()) {
        throw ValidationError("config: " + where + " must be an object");
    }
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ValidationError("config: unknown key '" + item.key() + "' in " + where);
        }
    }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        out = obj.at(key).get<T>();
    }
}

MartingaleSpec spec_from_json(const json& j) {
    reject_unknown(j, {"branching", "horizon", "dim", "jump_law", "scale", "random_child_probs"}, "martingale_specs");
    MartingaleSpec s;
    read(j, "branching", s.branching);
    read(j, "horizon", s.horizon);
    read(j, "dim", s.dim);
    read(j, "scale", s.scale);
    read(j, "random_child_probs", s.random_child_probs);
    if (j.contains("jump_law")) {
        s.jump_law = jump_law_from_string(j.at("jump_law").get<std::string>());
    }
    return s;
}

EnsembleSpec ensemble_from_json(const json& j) {
    reject_unknown(j, {"family", "rate", "alpha", "cap", "n_paths", "n_steps", "dim"}, "ensembles");
    EnsembleSpec e;
    if (j.contains("family")) {
        e.family.kind = path_family_from_string(j.at("family").get<std::string>());
    }
    read(j, "rate", e.family.rate);
    read(j, "alpha", e.family.alpha);
    read(j, "cap", e.family.cap);
    read(j, "n_paths", e.n_paths);
    read(j, "n_steps", e.n_steps);
    read(j, "dim", e.dim);
    return e;
}

} // namespace

nlohmann::json to_json(const ExperimentConfig& c) {
    json specs = json::array();
    for (const auto& s : c.martingale_specs) {
        specs.push_back(spec_to_json(s));
    }
    json ensembles = json::array();
    for (const auto& e : c.ensembles) {
        ensembles.push_back(ensemble_to_json(e));
    }
    json aux = json::array();
    for (const auto& a : c.aux_requests) {
        aux.push_back(json{{"which", to_string(a.which)}, {"p", a.p}, {"eps", a.eps}, {"floor_eps", a.floor_eps}});
    }
    return json{{"suites", c.suites},
                {"seed", c.seed},
                {"members", c.members},
                {"p_values", c.p_values},
                {"conditional_p_values", c.conditional_p_values},
                {"compensator_p_values", c.compensator_p_values},
                {"dk_p_values", c.dk_p_values},
                {"stein_p_values", c.stein_p_values},
                {"fv_q_values", c.fv_q_values},
                {"interpolation", c.interpolation},
                {"mc_p_values", c.mc_p_values},
                {"martingale_specs", specs},
                {"ensembles", ensembles},
                {"aux_requests", aux},
                {"tolerances",
                 {{"constant_cap", c.constant_cap},
                  {"aux_min_fraction", c.aux_min_fraction},
                  {"aux_equality_slack", c.aux_equality_slack},
                  {"qv_limit", c.qv_limit}}},
                {"threads", c.threads},
                {"output", {{"path", c.output}, {"format", c.format}}}};
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
    ExperimentConfig c = default_config();
    try {
        reject_unknown(doc,
                       {"suites", "seed", "members", "p_values", "conditional_p_values", "compensator_p_values",
                        "dk_p_values", "stein_p_values", "fv_q_values", "interpolation", "mc_p_values",
                        "martingale_specs", "ensembles", "aux_requests", "tolerances", "threads", "output"},
                       "config");
        read(doc, "suites", c.suites);
        read(doc, "seed", c.seed);
        read(doc, "members", c.members);
        read(doc, "p_values", c.p_values);
        read(doc, "conditional_p_values", c.conditional_p_values);
        read(doc, "compensator_p_values", c.compensator_p_values);
        read(doc, "dk_p_values", c.dk_p_values);
        read(doc, "stein_p_values", c.stein_p_values);
        read(doc, "fv_q_values", c.fv_q_values);
        read(doc, "interpolation", c.interpolation);
        read(doc, "mc_p_values", c.mc_p_values);
        read(doc, "threads", c.threads);
        if (doc.contains("martingale_specs")) {
            c.martingale_specs.clear();
            for (const auto& j : doc.at("martingale_specs")) {
                c.martingale_specs.push_back(spec_from_json(j));
            }
        }
        if (doc.contains("ensembles")) {
            c.ensembles.clear();
            for (const auto& j : doc.at("ensembles")) {
                c.ensembles.push_back(ensemble_from_json(j));
            }
        }
        if (doc.contains("aux_requests")) {
            c.aux_requests.clear();
            for (const auto& j : doc.at("aux_requests")) {
                reject_unknown(j, {"which", "p", "eps", "floor_eps"}, "aux_requests");
                AuxRequest a;
                a.which = aux_construction_from_string(j.at("which").get<std::string>());
                read(j, "p", a.p);
                read(j, "eps", a.eps);
                read(j, "floor_eps", a.floor_eps);
                c.aux_requests.push_back(a);
            }
        }
        if (doc.contains("tolerances")) {
            const json& t = doc.at("tolerances");
            reject_unknown(t, {"constant_cap", "aux_min_fraction", "aux_equality_slack", "qv_limit"}, "tolerances");
            read(t, "constant_cap", c.constant_cap);
            read(t, "aux_min_fraction", c.aux_min_fraction);
            read(t, "aux_equality_slack", c.aux_equality_slack);
            read(t, "qv_limit", c.qv_limit);
        }
        if (doc.contains("output")) {
            const json& o = doc.at("output");
            reject_unknown(o, {"path", "format"}, "output");
            read(o, "path", c.output);
            read(o, "format", c.format);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

std::string describe(const MartingaleSpec& s) {
    std::ostringstream out;
    out << "tree(b=" << s.branching << " T=" << s.horizon << " d=" << s.dim << ' ' << to_string(s.jump_law)
        << (s.random_child_probs ? " random-probs" : "") << ')';
    return out.str();
}

std::string describe(const EnsembleSpec& e) {
    std::ostringstream out;
    out << to_string(e.family.kind);
    if (e.family.kind == PathFamily::compensated_poisson) {
        out << "(rate=" << format_number(e.family.rate) << ')';
    } else if (e.family.kind == PathFamily::stable_truncated) {
        out << "(alpha=" << format_number(e.family.alpha) << " cap=" << format_number(e.family.cap) << ')';
    }
    out << " paths=" << e.n_paths << " steps=" << e.n_steps << " d=" << e.dim;
    return out.str();
}

// =============================================================================
// Helpers
// =============================================================================

namespace {

std::uint64_t suite_seed(const ExperimentConfig& c, const std::string& suite) {
    const auto it = std::find(kSuiteNames.begin(), kSuiteNames.end(), suite);
    return substream_seed(c.seed, static_cast<std::uint64_t>(it - kSuiteNames.begin()) + 1);
}

// Groups reports by (name, family, p) and emits one aggregated row per
// group, in order of first appearance.
class Collector {
public:
    void add(InequalityReport r, const std::string& family) {
        r.family = family;
        const auto key = std::make_tuple(r.name, family, r.p);
        auto it = index_.find(key);
        if (it == index_.end()) {
            it = index_.emplace(key, groups_.size()).first;
            groups_.emplace_back();
        }
        groups_[it->second].push_back(std::move(r));
    }

    void add_all(const std::vector<InequalityReport>& rs, const std::string& family, const std::string& prefix = "") {
        for (auto r : rs) {
            r.name = prefix + r.name;
            add(std::move(r), family);
        }
    }

    std::vector<InequalityReport> rows() const {
        std::vector<InequalityReport> out;
        for (const auto& g : groups_) {
            out.push_back(aggregate(g, g.front().family));
        }
        return out;
    }

private:
    std::map<std::tuple<std::string, std::string, double>, std::size_t> index_;
    std::vector<std::vector<InequalityReport>> groups_;
};

InequalityReport bool_report(std::string name, double p, bool ok) {
    // lhs = 1 on failure; constant 0 makes any failure a violation.
    return make_report(std::move(name), "", p, ok ? 0.0 : 1.0, 1.0, 0.0);
}

InequalityReport residual_report(std::string name, double residual, double limit, double p = 0.0) {
    return make_report(std::move(name), "", p, residual, 1.0, limit);
}

InequalityReport forced(InequalityReport r, bool pass) {
    if (!r.degenerate) {
        r.pass = pass;
    }
    return r;
}

std::vector<double> terminal_of(const Process& x) {
    std::vector<double> out(x.atoms());
    for (std::size_t a = 0; a < out.size(); ++a) {
        out[a] = x(x.steps() - 1, a);
    }
    return out;
}

} // namespace

GeneratedMartingale suite_member(const ExperimentConfig& config, const std::string& suite, std::size_t i) {
    MartingaleSpec s = config.martingale_specs[i % config.martingale_specs.size()];
    s.seed = substream_seed(suite_seed(config, suite), i);
    return generate_martingale(s);
}

// =============================================================================
// fv-calculus
// =============================================================================

std::vector<InequalityReport> run_fv_calculus(const ExperimentConfig& config) {
    Collector col;
    const std::size_t n_templates = config.martingale_specs.size();
    for (std::size_t i = 0; i < config.members; ++i) {
        const auto g = suite_member(config, "fv-calculus", i);
        const std::string family = describe(config.martingale_specs[i % n_templates]);
        const Process& m = g.martingale;
        const PathFunctional qv = quadratic_variation(m);

        // V_n = M_n (1 + [M,M]_n), adapted and of the same shape as M.
        Process v = Process::zeros_like(m, Measurability::adapted);
        Process u = Process::zeros_for(g.space, 1, Measurability::adapted);
        Process h = Process::zeros_for(g.space, 1, Measurability::adapted);
        for (std::size_t n = 0; n < m.steps(); ++n) {
            for (std::size_t a = 0; a < m.atoms(); ++a) {
                const auto mv = m.at(n, a);
                auto vv = v.at(n, a);
                for (std::size_t c = 0; c < m.dim(); ++c) {
                    vv[c] = mv[c] * (1.0 + qv(n, a));
                }
                u(n, a) = 1.0 + qv(n, a);
                h(n, a) = 1.0 + std::sin(mv[0]);
            }
        }
        col.add(residual_report("fv-ibp", check_ibp(m, v), 1e-10), family);
        const FvRuleResiduals rules = check_fv_rules(u);
        col.add(residual_report("fv-square-rule", rules.square_rule, 1e-10), family);
        col.add(residual_report("fv-sqrt-rule", rules.sqrt_rule, 1e-10), family);
        col.add(residual_report("fv-reciprocal-rule", rules.reciprocal_rule, 1e-10), family);
        col.add(residual_report("fv-integral-qv", check_integral_qv(left_shift(h), m), 1e-10), family);

        const auto star = maximal(m).terminal_values();
        const double level = 0.5 * *std::max_element(star.begin(), star.end());
        const StoppingTime tau = StoppingTime::hitting_time(g.space, m, level);
        col.add(residual_report("fv-stopped-qv", check_stopped_qv(g.space, m, tau), 0.0), family);

        for (double p : {2.0, 3.0, 4.0}) {
            const ItoRemainderResult r = check_ito_remainder(g.space, m, p);
            col.add(forced(make_report("fv-ito-remainder", "", p, r.remainder, r.bound, 1.0), r.ok), family);
        }
    }

    // Lemma on increasing paths: a mix of flat stretches and jumps over
    // several orders of magnitude.
    Rng rng(substream_seed(suite_seed(config, "fv-calculus"), 0xF1F1));
    std::vector<double> path;
    for (std::size_t i = 0; i < config.members; ++i) {
        path.assign(2 + rng.below(30), 0.0);
        for (std::size_t k = 1; k < path.size(); ++k) {
            const double step = rng.uniform() < 0.3 ? 0.0 : std::pow(10.0, rng.uniform(-3.0, 3.0)) * rng.uniform();
            path[k] = path[k - 1] + step;
        }
        for (double q : config.fv_q_values) {
            const FvLemmaResult r = fv_lemma_path(path, q);
            col.add(forced(make_report("fv-lemma", "", q, r.lhs, r.rhs + r.slack, 1.0), r.ok), "increasing-paths");
        }
    }
    return col.rows();
}

// =============================================================================
// compensator
// =============================================================================

std::vector<InequalityReport> run_compensator(const ExperimentConfig& config) {
    Collector col;
    const std::size_t n_templates = config.martingale_specs.size();
    for (std::size_t i = 0; i < config.members; ++i) {
        const auto g = suite_member(config, "compensator", i);
        const std::string family = describe(config.martingale_specs[i % n_templates]);
        const Process& m = g.martingale;
        for (const Process& v : {total_variation(m).values, quadratic_variation(m).values}) {
            Process vv = v;
            vv.set_kind(Measurability::adapted);
            const CompensatorPair pair = compensator(g.space, vv);
            const double ev = expectation(g.space, terminal_of(vv));
            const double ec = expectation(g.space, terminal_of(pair.compensated));
            col.add(make_report("compensator-mean", "", 1.0, std::abs(ev - ec), ev, 1e-10), family);
            col.add(make_report("compensator-predictable", "", 1.0,
                                measurability_defect(g.space, pair.compensated, Measurability::predictable),
                                std::max(1.0, vv.max_abs()), 1e-12),
                    family);
            col.add(bool_report("compensator-martingale-part", 1.0, is_martingale(g.space, pair.martingale_part, 1e-10)),
                    family);
            for (double p : config.compensator_p_values) {
                col.add(check_compensator_lp(g.space, vv, p), family);
            }
        }
    }
    // L1 bound for vector processes in a few dimensions.
    const std::size_t dims[] = {2, 3, 8};
    for (std::size_t i = 0; i < config.members; ++i) {
        MartingaleSpec s = config.martingale_specs[i % n_templates];
        s.dim = dims[i % 3];
        s.horizon = std::min(s.horizon, 5);
        s.seed = substream_seed(suite_seed(config, "compensator"), 0x10000 + i);
        const auto g = generate_martingale(s);
        // Componentwise |M|: adapted, not a martingale.
        Process x = g.martingale;
        for (double& e : x.data()) {
            e = std::abs(e);
        }
        x.set_kind(Measurability::adapted);
        col.add(check_compensator_l1_hilbert(g.space, x), describe(s));
    }
    return col.rows();
}

// =============================================================================
// davis
// =============================================================================

std::vector<InequalityReport> run_davis(const ExperimentConfig& config) {
    Collector col;
    const std::size_t n_templates = config.martingale_specs.size();
    for (std::size_t i = 0; i < config.members; ++i) {
        const auto g = suite_member(config, "davis", i);
        const std::string family = describe(config.martingale_specs[i % n_templates]);
        const Process& m = g.martingale;
        const DavisDecomposition dec = davis_decompose(g.space, m);
        const DavisCertificate cert = certify(g.space, m, dec);
        col.add(make_report("davis-sum", "", 1.0, cert.sum_residual, cert.scale, 1e-12), family);
        col.add(residual_report("davis-jump", std::max(0.0, cert.jump_excess), 1e-10, 1.0), family);
        col.add(make_report("davis-variation", "", 1.0, std::max(0.0, cert.variation_excess), cert.scale, 1e-12),
                family);
        col.add(residual_report("davis-compensator-jump", std::max(0.0, cert.compensator_excess), 1e-10, 1.0), family);
        col.add(bool_report("davis-martingale-parts", 1.0, cert.l_martingale && cert.k_martingale), family);
        col.add(bool_report("davis-jump-doubling", 1.0, check_jump_doubling(m)), family);
        if (m.dim() == 1) {
            for (double p : config.dk_p_values) {
                col.add(check_dK_bound(g.space, m, p), family);
            }
        } else {
            col.add(check_dK_bound(g.space, m, 1.0), family);
        }
    }
    return col.rows();
}

// =============================================================================
// bdg-exact
// =============================================================================

std::vector<InequalityReport> run_bdg_exact(const ExperimentConfig& config) {
    Collector col;
    const std::size_t n_templates = config.martingale_specs.size();
    for (std::size_t i = 0; i < config.members; ++i) {
        const auto g = suite_member(config, "bdg-exact", i);
        const std::string family = describe(config.martingale_specs[i % n_templates]);
        const Process& m = g.martingale;
        col.add(isometry_report(g.space, m), family);
        col.add(pathwise_report("jump-le-qv", 2.0, jump_maximal(m).terminal_values(), [&] {
                    auto q = quadratic_variation(m).terminal_values();
                    for (double& x : q) {
                        x = std::sqrt(x);
                    }
                    return q;
                }()),
                family);
        for (double p : config.p_values) {
            col.add(bdg_report(g.space, m, p, BdgSide::upper, config.constant_cap), family);
            col.add(bdg_report(g.space, m, p, BdgSide::lower, config.constant_cap), family);
            if (p > 1.0) {
                col.add(doob_report(g.space, m, p), family);
            }
            if (p >= 2.0) {
                col.add(bdg_upper_ito_report(g.space, m, p), family);
            }
            if (m.dim() == 1) {
                col.add_all(replay_real_chain(g.space, m, p, config.constant_cap), family, "real-");
            }
            col.add_all(replay_hilbert_chain(g.space, m, p, config.constant_cap), family, "hilbert-");
        }
        // Conditional bounds with two dominating processes: the tight
        // one-step-ahead bound and the constant overall max jump.
        const Process d_tight = dominating_process(g.space, m);
        Process d_flat = Process::zeros_for(g.space, 1, Measurability::adapted);
        const double flat = d_tight.max_abs();
        for (double& x : d_flat.data()) {
            x = flat;
        }
        for (double p : config.conditional_p_values) {
            std::vector<ConditionalBound> which;
            if (p == 1.0) {
                which = {ConditionalBound::clb1, ConditionalBound::cub1};
            } else if (p < 2.0) {
                which = {ConditionalBound::clb2minus, ConditionalBound::cub2minus};
            } else {
                which = {ConditionalBound::clb2plus};
            }
            for (auto w : which) {
                col.add(conditional_bound_report(g.space, m, d_tight, p, w), family);
                col.add(conditional_bound_report(g.space, m, d_flat, p, w), family);
            }
        }
    }
    return col.rows();
}

// =============================================================================
// stein
// =============================================================================

std::vector<InequalityReport> run_stein(const ExperimentConfig& config) {
    Collector col;
    const std::uint64_t base = suite_seed(config, "stein");
    for (std::size_t i = 0; i < config.members; ++i) {
        const auto g = suite_member(config, "stein", i);
        Rng rng(substream_seed(base, 0x5000 + i));
        const std::size_t dim = i % 2 == 0 ? 1 : 3;
        const int horizon = g.space.horizon();
        const std::size_t count = 1 + rng.below(static_cast<std::uint64_t>(horizon) + 2);
        std::vector<RandomVector> f;
        std::vector<int> idx;
        for (std::size_t k = 0; k < count; ++k) {
            RandomVector fk{dim, std::vector<double>(g.space.atoms() * dim, 0.0)};
            const double amplitude = std::pow(10.0, rng.uniform(-1.0, 1.0));
            const bool sparse = rng.uniform() < 0.3;
            const std::size_t spike = rng.below(g.space.atoms());
            for (std::size_t a = 0; a < g.space.atoms(); ++a) {
                if (sparse && a != spike) {
                    continue;
                }
                for (std::size_t c = 0; c < dim; ++c) {
                    fk.at(a)[c] = amplitude * rng.normal();
                }
            }
            f.push_back(std::move(fk));
            idx.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(horizon) + 1)));
        }
        const std::string family = "stein(d=" + std::to_string(dim) + ")";
        for (double p : config.stein_p_values) {
            col.add(stein_report(g.space, f, idx, p), family);
            col.add(stein_lp_contraction_report(g.space, f, idx, p), family);
        }
    }
    return col.rows();
}

// =============================================================================
// duality-interp
// =============================================================================

std::vector<InequalityReport> run_duality_interp(const ExperimentConfig& config) {
    Collector col;
    const std::size_t n_templates = config.martingale_specs.size();
    std::vector<GeneratedMartingale> ensemble;
    ensemble.reserve(config.members);
    for (std::size_t i = 0; i < config.members; ++i) {
        ensemble.push_back(suite_member(config, "duality-interp", i));
        const auto& g = ensemble.back();
        const std::string family = describe(config.martingale_specs[i % n_templates]);
        for (double p : config.p_values) {
            if (p <= 1.0) {
                continue;
            }
            const DualityChain chain = duality_lower_to_upper_check(g.space, g.martingale, p, config.constant_cap);
            col.add_all(chain.links, family);
            col.add(chain.conclusion, family);
        }
    }
    for (const auto& t : config.interpolation) {
        const InterpolationResult r = interpolation_lower_check(ensemble, t[0], t[1], t[2]);
        std::ostringstream family;
        family << "all-templates(p1=" << format_number(t[0]) << " p2=" << format_number(t[1]) << ')';
        col.add_all(r.members, family.str());
    }
    return col.rows();
}

// =============================================================================
// bdg-mc
// =============================================================================

std::vector<InequalityReport> run_bdg_mc(const ExperimentConfig& config) {
    std::vector<InequalityReport> out;
    const std::uint64_t base = suite_seed(config, "bdg-mc");
    for (std::size_t e = 0; e < config.ensembles.size(); ++e) {
        EnsembleSpec spec = config.ensembles[e];
        spec.seed = substream_seed(base, e);
        const std::string family = describe(spec);
        const bool continuous = spec.family.kind == PathFamily::brownian;
        const std::vector<AuxRequest> aux = continuous ? config.aux_requests : std::vector<AuxRequest>{};
        const auto paths = summarize(spec, aux, config.threads);
        auto push = [&](InequalityReport r) {
            r.family = family;
            out.push_back(std::move(r));
        };
        for (double p : config.mc_p_values) {
            if (p < 1.0 && !continuous) {
                continue;
            }
            for (auto& r : bdg_mc_report(spec, paths, p)) {
                push(r.report);
            }
        }
        for (auto& r : l2_bracket_report(paths)) {
            push(r.report);
        }
        push(mc_isometry_report(paths).report);
        push(terminal_mean_report(paths).report);
        if (continuous) {
            push(qv_convergence_report(spec, paths, config.qv_limit).report);
            for (std::size_t a = 0; a < aux.size(); ++a) {
                push(auxiliary_construction_report(paths, a, aux[a], config.aux_min_fraction,
                                                   config.aux_equality_slack)
                         .report);
            }
        }
    }
    return out;
}

// =============================================================================
// Dispatch
// =============================================================================

std::vector<InequalityReport> run_suite(const std::string& name, const ExperimentConfig& config) {
    if (name == "fv-calculus") {
        return run_fv_calculus(config);
    }
    if (name == "compensator") {
        return run_compensator(config);
    }
    if (name == "davis") {
        return run_davis(config);
    }
    if (name == "bdg-exact") {
        return run_bdg_exact(config);
    }
    if (name == "stein") {
        return run_stein(config);
    }
    if (name == "duality-interp") {
        return run_duality_interp(config);
    }
    if (name == "bdg-mc") {
        return run_bdg_mc(config);
    }
    throw ValidationError("unknown suite '" + name + "'");
}

std::vector<InequalityReport> run(const ExperimentConfig& config) {
    validate(config);
    std::vector<InequalityReport> out;
    for (const auto& s : config.suites) {
        auto rows = run_suite(s, config);
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

} // namespace bdgkit
