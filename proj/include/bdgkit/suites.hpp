#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdgkit/montecarlo.hpp"
#include "bdgkit/prob_space.hpp"
#include "bdgkit/report.hpp"

namespace bdgkit {

// =============================================================================
// Configuration
// =============================================================================

inline const std::vector<std::string> kSuiteNames = {"fv-calculus", "compensator", "davis", "bdg-exact",
                                                     "stein",       "duality-interp", "bdg-mc"};

struct ExperimentConfig {
    std::vector<std::string> suites = kSuiteNames;
    std::uint64_t seed = 20240607;
    std::size_t members = 200; // generated martingales / instances per suite

    std::vector<double> p_values = {1.0, 1.5, 2.0, 3.0, 4.0};
    std::vector<double> conditional_p_values = {1.0, 1.25, 1.5, 1.9, 3.0, 4.0};
    std::vector<double> compensator_p_values = {1.0, 1.5, 2.0, 4.0};
    std::vector<double> dk_p_values = {1.0, 2.0, 4.0};
    std::vector<double> stein_p_values = {1.25, 1.5, 2.0, 3.0, 4.0};
    std::vector<double> fv_q_values = {0.3, 0.5, 1.5, 3.0};
    std::vector<std::array<double, 3>> interpolation = {{2.0, 4.0, 3.0}}; // (p1, p2, p)
    std::vector<double> mc_p_values = {0.5, 1.0, 2.0};

    std::vector<MartingaleSpec> martingale_specs; // templates; seeds are derived
    std::vector<EnsembleSpec> ensembles;          // seeds are derived
    std::vector<AuxRequest> aux_requests;

    double constant_cap = 64.0;
    double aux_min_fraction = kAuxMinFraction;
    double aux_equality_slack = kAuxEqualitySlack;
    double qv_limit = 0.05;
    unsigned threads = 0;

    std::string output;
    std::string format = "csv";
};

/// Defaults sized for a quick run; see README for the acceptance sizes.
ExperimentConfig default_config();

/// Throws ValidationError for unknown suites, formats, or bad parameters.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys take defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);

std::string describe(const MartingaleSpec& spec);
std::string describe(const EnsembleSpec& spec);

// =============================================================================
// Suites
// =============================================================================

/// Ensemble member i of a suite: template i mod #templates, seed derived
/// from (config seed, suite, i).
GeneratedMartingale suite_member(const ExperimentConfig& config, const std::string& suite, std::size_t i);

std::vector<InequalityReport> run_fv_calculus(const ExperimentConfig& config);
std::vector<InequalityReport> run_compensator(const ExperimentConfig& config);
std::vector<InequalityReport> run_davis(const ExperimentConfig& config);
std::vector<InequalityReport> run_bdg_exact(const ExperimentConfig& config);
std::vector<InequalityReport> run_stein(const ExperimentConfig& config);
std::vector<InequalityReport> run_duality_interp(const ExperimentConfig& config);
std::vector<InequalityReport> run_bdg_mc(const ExperimentConfig& config);

std::vector<InequalityReport> run_suite(const std::string& name, const ExperimentConfig& config);
/// All configured suites in order.
std::vector<InequalityReport> run(const ExperimentConfig& config);

} // namespace bdgkit
