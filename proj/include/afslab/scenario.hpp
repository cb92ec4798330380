#pragma once

#include <string>
#include <vector>

#include "afslab/simkit.hpp"

namespace afslab {

enum class Scenario {
    two_comp_plain,     // analyte + continuous background, disjoint mass channels
    two_comp_overlap,   // background shares the analyte base channel
    three_comp_plain,   // two analytes + background, disjoint channels
    three_comp_overlap, // overlapping Gaussian elutions + shared channels
};

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario s);

struct ComponentSpec {
    EmgParams elution;
    SpectrumSpec spectrum;
};

/// Full generative description of a simulated dataset.
struct ScenarioSpec {
    std::string tag = "custom";
    int n_scans = 0;
    int n_channels = 0;
    std::vector<ComponentSpec> components;
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;
};

ScenarioSpec canned_scenario(Scenario s);

Dataset build_dataset(const ScenarioSpec& spec);

}  // namespace afslab
