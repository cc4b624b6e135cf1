#pragma once

#include "fluctrack/hlmb_filter.hpp"
#include "fluctrack/metrics.hpp"
#include "fluctrack/scenario.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluctrack::harness {

/// Unreadable or invalid configuration and input files (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentSettings {
    int runs = 25;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::vector<FilterKind> filters{FilterKind::GmLmb, FilterKind::GmLmbK, FilterKind::GmLmbM,
                                    FilterKind::GmSmcHlmb, FilterKind::GmGHlmb};
    int labeling_after_k = 55;
};

struct HarnessConfig {
    ScenarioConfig scenario = ScenarioConfig::crossing_default();
    FilterConfig filter;              ///< kind, swerling, motion and clutter are set per run
    double filter_delta_swerling1 = 1.0;
    double filter_delta_swerling3 = 2.0;
    OspaParams ospa;
    ExperimentSettings experiment;
};

/// The full default configuration as YAML text.
const std::string& default_config_yaml();

/// Defaults overlaid with `yaml`. Unknown keys and bad values throw ConfigError.
HarnessConfig parse_config(const std::string& yaml);
HarnessConfig load_config(const std::string& path);
HarnessConfig default_config();

/// Scenario with the given fluctuation model.
ScenarioConfig make_scenario(const HarnessConfig& config, SwerlingKind swerling);

/// Filter of `kind` matched to the scenario: motion from dt / sigma_v / sigma_eps, clutter
/// from the region and mean count, ARG delta chosen by the fluctuation model.
FilterConfig make_filter_config(const HarnessConfig& config, FilterKind kind, SwerlingKind swerling);

SwerlingKind parse_swerling(int value);

}  // namespace fluctrack::harness
