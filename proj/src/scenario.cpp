#include "afslab/scenario.hpp"

namespace afslab {

Scenario scenario_from_string(const std::string& name) {
    if (name == "two_comp_plain") return Scenario::two_comp_plain;
    if (name == "two_comp_overlap") return Scenario::two_comp_overlap;
    if (name == "three_comp_plain") return Scenario::three_comp_plain;
    if (name == "three_comp_overlap") return Scenario::three_comp_overlap;
    throw ConfigError("unknown scenario '" + name + "'");
}

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::two_comp_plain: return "two_comp_plain";
        case Scenario::two_comp_overlap: return "two_comp_overlap";
        case Scenario::three_comp_plain: return "three_comp_plain";
        case Scenario::three_comp_overlap: return "three_comp_overlap";
    }
    throw ConfigError("unknown scenario enum value");
}

namespace {

SpectrumSpec sticks(int n_channels, std::vector<std::pair<int, double>> peaks) {
    SpectrumSpec s;
    s.n_channels = n_channels;
    s.peaks = std::move(peaks);
    return s;
}

}  // namespace

ScenarioSpec canned_scenario(Scenario s) {
    ScenarioSpec spec;
    spec.tag = to_string(s);
    spec.noise_sigma = 0.0;
    spec.seed = 20240901;

    switch (s) {
        case Scenario::two_comp_plain: {
            spec.n_scans = 50;
            spec.n_channels = 40;
            // component 1: continuous background hump, never vanishing
            spec.components.push_back(
                {EmgParams{30.0, 25.0, 8.0, 0.0},
                 sticks(40, {{0, 1.0}, {3, 0.8}, {5, 0.65}, {8, 0.9}, {11, 0.5}, {14, 0.7},
                             {17, 0.45}, {20, 0.6}, {23, 0.35}, {26, 0.5}, {29, 0.3}, {32, 0.4}})});
            // component 2: analyte peak whose tail keeps covering the
            // background to the end of the window; the coverage both ways is
            // what opens a two-dimensional band of feasible rotations
            spec.components.push_back(
                {EmgParams{100.0, 11.0, 3.5, 9.0},
                 sticks(40, {{2, 0.5}, {7, 1.0}, {13, 0.8}, {19, 0.6}, {27, 0.45}, {35, 0.3}})});
            break;
        }
        case Scenario::two_comp_overlap: {
            spec.n_scans = 50;
            spec.n_channels = 40;
            // as two_comp_plain, but the background also covers the analyte
            // base channel (7)
            spec.components.push_back(
                {EmgParams{30.0, 25.0, 8.0, 0.0},
                 sticks(40, {{0, 1.0}, {3, 0.8}, {5, 0.65}, {7, 0.2}, {8, 0.9}, {11, 0.5},
                             {14, 0.7}, {17, 0.45}, {20, 0.6}, {23, 0.35}, {26, 0.5}, {29, 0.3},
                             {32, 0.4}})});
            spec.components.push_back(
                {EmgParams{100.0, 11.0, 3.5, 9.0},
                 sticks(40, {{2, 0.5}, {7, 1.0}, {13, 0.8}, {19, 0.6}, {27, 0.45}, {35, 0.3}})});
            break;
        }
        case Scenario::three_comp_plain: {
            spec.n_scans = 50;
            spec.n_channels = 50;
            // strongly co-eluting cluster with matched tails: every profile
            // stays a bounded fraction of every other across the window, so
            // all three rotation regions have genuine area
            spec.components.push_back(
                {EmgParams{100.0, 13.0, 4.5, 8.0},
                 sticks(50, {{2, 0.5}, {7, 1.0}, {13, 0.8}, {19, 0.6}, {27, 0.45}, {35, 0.3}})});
            spec.components.push_back(
                {EmgParams{85.0, 18.0, 5.5, 8.0},
                 sticks(50, {{4, 0.7}, {10, 1.0}, {16, 0.55}, {22, 0.8}, {30, 0.4}, {38, 0.6},
                             {44, 0.35}})});
            spec.components.push_back(
                {EmgParams{35.0, 22.0, 9.0, 8.0},
                 sticks(50, {{0, 1.0}, {3, 0.8}, {5, 0.6}, {8, 0.9}, {11, 0.5}, {14, 0.7},
                             {17, 0.45}, {20, 0.6}, {23, 0.35}, {26, 0.5}, {29, 0.3}, {32, 0.4},
                             {37, 0.25}, {41, 0.3}})});
            break;
        }
        case Scenario::three_comp_overlap: {
            spec.n_scans = 50;
            spec.n_channels = 50;
            // same co-eluting cluster as three_comp_plain; mass-channel
            // overlap runs both ways between component 1 and the background
            spec.components.push_back(
                {EmgParams{100.0, 13.0, 4.5, 8.0},
                 sticks(50, {{0, 0.3}, {2, 0.5}, {7, 1.0}, {13, 0.8}, {19, 0.6}, {27, 0.45},
                             {35, 0.3}})});
            spec.components.push_back(
                {EmgParams{85.0, 18.0, 5.5, 8.0},
                 sticks(50, {{4, 0.7}, {10, 1.0}, {16, 0.55}, {22, 0.8}, {30, 0.4}, {38, 0.6},
                             {44, 0.35}})});
            spec.components.push_back(
                {EmgParams{35.0, 22.0, 9.0, 8.0},
                 sticks(50, {{0, 1.0}, {3, 0.8}, {5, 0.6}, {7, 0.4}, {8, 0.9}, {11, 0.5},
                             {14, 0.7}, {17, 0.45}, {20, 0.6}, {23, 0.35}, {26, 0.5}, {29, 0.3},
                             {32, 0.4}, {37, 0.25}, {41, 0.3}})});
            break;
        }
    }
    return spec;
}

Dataset build_dataset(const ScenarioSpec& spec) {
    if (spec.n_scans < 2) throw ConfigError("ScenarioSpec: n_scans must be >= 2");
    if (spec.n_channels < 1) throw ConfigError("ScenarioSpec: n_channels must be >= 1");
    if (spec.components.empty()) throw ConfigError("ScenarioSpec: needs at least one component");

    Vector t(spec.n_scans);
    for (int i = 0; i < spec.n_scans; ++i) t[i] = static_cast<double>(i);

    std::vector<Vector> elutions;
    std::vector<Vector> spectra;
    for (const auto& comp : spec.components) {
        if (comp.spectrum.n_channels != spec.n_channels) {
            throw ConfigError("ScenarioSpec: spectrum n_channels mismatch");
        }
        elutions.push_back(emg_peak(t, comp.elution));
        spectra.push_back(make_spectrum(comp.spectrum));
    }
    return assemble_dataset(elutions, spectra, spec.noise_sigma, spec.seed, spec.tag);
}

}  // namespace afslab
