#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "afslab/common.hpp"

namespace afslab {

/// Exponentially modified Gaussian peak parameters, in scan-index units.
struct EmgParams {
    double amplitude = 1.0;  // Gaussian prefactor, arbitrary intensity units
    double center = 0.0;     // scan index of the underlying Gaussian
    double sigma = 1.0;      // Gaussian width, > 0
    double tau = 0.0;        // exponential tail constant, >= 0

    void validate() const;
};

/// Evaluate an EMG elution profile on a grid of scan indices.
///
/// f(t) = A*(sigma/tau)*sqrt(pi/2) * exp(sigma^2/(2 tau^2) - (t-c)/tau)
///        * erfc((sigma/tau - (t-c)/sigma)/sqrt(2))
/// computed through erfcx to stay finite for small tau; tau/sigma < 1e-4
/// falls back to the pure Gaussian A*exp(-(t-c)^2/(2 sigma^2)).
Vector emg_peak(const Vector& t, const EmgParams& params);

/// Sparse mass spectrum: a handful of (channel, relative intensity) sticks.
struct SpectrumSpec {
    int n_channels = 0;
    std::vector<std::pair<int, double>> peaks;  // intensity in (0, 1]
};

/// Stick spectrum from a spec, max-normalized so the base peak is exactly 1.
Vector make_spectrum(const SpectrumSpec& spec);

/// Simulated bilinear dataset D = C_true * S_true (+ optional noise).
struct Dataset {
    Matrix D;       // n_scans x n_channels
    Matrix C_true;  // n_scans x p
    Matrix S_true;  // p x n_channels, rows max-normalized to 1
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::string scenario;

    int n_scans() const { return static_cast<int>(D.rows()); }
    int n_channels() const { return static_cast<int>(D.cols()); }
    int n_components() const { return static_cast<int>(C_true.cols()); }
};

/// Assemble a dataset from per-component elution and spectrum vectors.
/// Spectrum rows are max-normalized; the compensating scale moves into the
/// elution columns so the product is exactly the one implied by the inputs.
/// Noise is i.i.d. Gaussian(0, noise_sigma), drawn deterministically from
/// the seed.
Dataset assemble_dataset(const std::vector<Vector>& elutions,
                         const std::vector<Vector>& spectra, double noise_sigma,
                         std::uint64_t seed, std::string scenario_tag = "custom");

}  // namespace afslab
