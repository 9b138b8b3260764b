// bdgkit: run the verification suites and dump engine objects as JSON.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "bdgkit/davis.hpp"
#include "bdgkit/errors.hpp"
#include "bdgkit/serialization.hpp"
#include "bdgkit/suites.hpp"

namespace {

enum ExitCode { kOk = 0, kTestFailure = 1, kConfigError = 2, kCapacityError = 3, kIoError = 4 };

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw bdgkit::ValidationError("--p: cannot parse '" + item + "'");
        }
    }
    if (out.empty()) {
        throw bdgkit::ValidationError("--p: empty list");
    }
    return out;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::ios_base::failure("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw std::ios_base::failure("write to '" + path + "' failed");
    }
}

// =============================================================================
// run
// =============================================================================

struct RunOptions {
    std::string config;
    std::vector<std::string> suites;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    std::string p;
    std::optional<std::size_t> members;
};

int do_run(const RunOptions& opt) {
    bdgkit::ExperimentConfig config = opt.config.empty()
                                          ? bdgkit::default_config()
                                          : bdgkit::config_from_json(bdgkit::read_json_file(opt.config));
    if (!opt.suites.empty()) {
        config.suites = opt.suites;
    }
    if (opt.seed) {
        config.seed = *opt.seed;
    }
    if (!opt.out.empty()) {
        config.output = opt.out;
    }
    if (!opt.format.empty()) {
        config.format = opt.format;
    }
    if (!opt.p.empty()) {
        config.p_values = parse_list(opt.p);
    }
    if (opt.members) {
        config.members = *opt.members;
    }
    bdgkit::validate(config);

    const auto reports = bdgkit::run(config);
    const std::string text =
        config.format == "json" ? bdgkit::to_json(reports).dump(2) + "\n" : bdgkit::to_csv(reports);
    emit(config.output, text);

    std::size_t failures = 0;
    for (const auto& r : reports) {
        if (!r.pass) {
            ++failures;
            std::cerr << "FAIL " << r.name << " [" << r.family << "] p=" << bdgkit::format_number(r.p)
                      << " lhs=" << bdgkit::format_number(r.lhs) << " rhs=" << bdgkit::format_number(r.rhs)
                      << " C=" << bdgkit::format_number(r.constant()) << '\n';
        }
    }
    std::cerr << reports.size() << " rows, " << failures << " failing\n";
    return failures == 0 ? kOk : kTestFailure;
}

// =============================================================================
// davis dump / space dump / space load
// =============================================================================

struct SpecOptions {
    bdgkit::MartingaleSpec spec;
    std::string law = "rademacher";
    std::string out;
};

void add_spec_options(CLI::App* cmd, SpecOptions& o) {
    cmd->add_option("--branching", o.spec.branching, "children per node")->capture_default_str();
    cmd->add_option("--horizon", o.spec.horizon, "number of steps T")->capture_default_str();
    cmd->add_option("--dim", o.spec.dim, "dimension of the values")->capture_default_str();
    cmd->add_option("--law", o.law, "rademacher|centered_uniform|heavy_tail_truncated|poisson_compensated")
        ->capture_default_str();
    cmd->add_option("--scale", o.spec.scale, "jump scale")->capture_default_str();
    cmd->add_option("--seed", o.spec.seed, "generator seed")->capture_default_str();
    cmd->add_flag("--random-probs", o.spec.random_child_probs, "draw conditional child probabilities");
    cmd->add_option("--out", o.out, "output path (default stdout)");
}

int do_davis_dump(SpecOptions& o) {
    o.spec.jump_law = bdgkit::jump_law_from_string(o.law);
    const auto g = bdgkit::generate_martingale(o.spec);
    const auto dec = bdgkit::davis_decompose(g.space, g.martingale);
    const auto cert = bdgkit::certify(g.space, g.martingale, dec);
    nlohmann::json doc = bdgkit::to_json(g.space, {{"M", g.martingale},
                                                   {"L", dec.L},
                                                   {"K", dec.K},
                                                   {"K1", dec.K1},
                                                   {"K2", dec.K2},
                                                   {"S", dec.S.values}});
    doc["certificate"] = {{"sum_residual", cert.sum_residual},
                          {"jump_excess", cert.jump_excess},
                          {"max_jump_ratio", cert.jump_ratio},
                          {"variation_excess", cert.variation_excess},
                          {"compensator_excess", cert.compensator_excess},
                          {"l_martingale", cert.l_martingale},
                          {"k_martingale", cert.k_martingale},
                          {"ok", cert.ok()}};
    emit(o.out, doc.dump(2) + "\n");
    return cert.ok() ? kOk : kTestFailure;
}

int do_space_dump(SpecOptions& o) {
    o.spec.jump_law = bdgkit::jump_law_from_string(o.law);
    const auto g = bdgkit::generate_martingale(o.spec);
    emit(o.out, bdgkit::to_json(g.space, {{"M", g.martingale}}).dump(2) + "\n");
    return kOk;
}

int do_space_load(const std::string& path) {
    const bdgkit::SpaceDocument doc = bdgkit::space_from_json(bdgkit::read_json_file(path));
    std::cout << "atoms " << doc.space.atoms() << ", horizon " << doc.space.horizon() << '\n';
    bool ok = true;
    for (const auto& p : doc.processes) {
        const bool adapted = bdgkit::is_measurable(doc.space, p.process, bdgkit::Measurability::adapted);
        const bool mart = adapted && bdgkit::is_martingale(doc.space, p.process);
        std::cout << p.name << ": dim " << p.process.dim() << (adapted ? ", adapted" : ", not adapted")
                  << (mart ? ", martingale" : "") << '\n';
        ok = ok && adapted;
    }
    return ok ? kOk : kTestFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and Monte Carlo checks of martingale inequalities"};
    app.require_subcommand(0, 1);

    RunOptions run;
    auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", run.config, "JSON experiment config");
        cmd->add_option("--suite", run.suites, "suite to run (repeatable)")
            ->check(CLI::IsMember(bdgkit::kSuiteNames));
        cmd->add_option("--seed", run.seed, "master seed");
        cmd->add_option("--out", run.out, "report path (default stdout)");
        cmd->add_option("--format", run.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--p", run.p, "comma-separated exponents for the exact BDG and duality suites");
        cmd->add_option("--members", run.members, "ensemble size per suite");
    };
    add_run_options(&app);
    CLI::App* run_cmd = app.add_subcommand("run", "run verification suites (the default)");
    add_run_options(run_cmd);

    CLI::App* davis = app.add_subcommand("davis", "Davis decomposition tools");
    davis->require_subcommand(1);
    SpecOptions davis_opts;
    CLI::App* davis_dump = davis->add_subcommand("dump", "decompose a generated martingale and write JSON");
    add_spec_options(davis_dump, davis_opts);

    CLI::App* space = app.add_subcommand("space", "filtered space JSON tools");
    space->require_subcommand(1);
    SpecOptions space_opts;
    CLI::App* space_dump = space->add_subcommand("dump", "write a generated space and martingale");
    add_spec_options(space_dump, space_opts);
    std::string load_path;
    CLI::App* space_load = space->add_subcommand("load", "read a space document and check its processes");
    space_load->add_option("path", load_path, "JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (davis_dump->parsed()) {
            return do_davis_dump(davis_opts);
        }
        if (space_dump->parsed()) {
            return do_space_dump(space_opts);
        }
        if (space_load->parsed()) {
            return do_space_load(load_path);
        }
        return do_run(run);
    } catch (const bdgkit::CapacityError& e) {
        std::cerr << "capacity: " << e.what() << '\n';
        return kCapacityError;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "config: " << e.what() << '\n';
        return kConfigError;
    }
}
