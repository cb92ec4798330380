#include "afslab/simkit.hpp"

#include <cmath>

#include "afslab/rng.hpp"

namespace afslab {

namespace {

// Scaled complementary error function erfcx(w) = exp(w^2) erfc(w).
// Direct evaluation is safe up to w ~ 25 (erfc underflows near 26.5);
// beyond that use the asymptotic expansion.
double erfcx(double w) {
    if (w < 25.0) return std::exp(w * w) * std::erfc(w);
    const double iw2 = 1.0 / (w * w);
    const double series = 1.0 + iw2 * (-0.5 + iw2 * (0.75 + iw2 * (-1.875 + iw2 * 6.5625)));
    return series / (w * 1.7724538509055160273);  // w * sqrt(pi)
}

}  // namespace

void EmgParams::validate() const {
    if (!std::isfinite(amplitude) || !std::isfinite(center) || !std::isfinite(sigma) ||
        !std::isfinite(tau)) {
        throw ConfigError("EmgParams: parameters must be finite");
    }
    if (amplitude <= 0.0) throw ConfigError("EmgParams: amplitude must be > 0");
    if (sigma <= 0.0) throw ConfigError("EmgParams: sigma must be > 0");
    if (tau < 0.0) throw ConfigError("EmgParams: tau must be >= 0");
}

Vector emg_peak(const Vector& t, const EmgParams& params) {
    params.validate();
    const double a = params.amplitude;
    const double c = params.center;
    const double s = params.sigma;
    const double tau = params.tau;

    Vector out(t.size());
    if (tau / s < 1e-4) {
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const double z = (t[i] - c) / s;
            out[i] = a * std::exp(-0.5 * z * z);
        }
        return out;
    }

    const double prefac = a * (s / tau) * 1.2533141373155002512;  // sqrt(pi/2)
    const double inv_sqrt2 = 0.70710678118654752440;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        const double d = t[i] - c;
        const double w = (s / tau - d / s) * inv_sqrt2;
        double v;
        if (w >= 0.0) {
            // exp(E) erfc(w) = erfcx(w) exp(E - w^2), and E - w^2 = -d^2/(2 s^2)
            v = prefac * erfcx(w) * std::exp(-0.5 * (d / s) * (d / s));
        } else {
            // far right tail: the direct exponent is already very negative
            const double e = 0.5 * (s / tau) * (s / tau) - d / tau;
            v = prefac * std::exp(e) * std::erfc(w);
        }
        out[i] = v;
    }
    return out;
}

Vector make_spectrum(const SpectrumSpec& spec) {
    if (spec.n_channels <= 0) throw ConfigError("SpectrumSpec: n_channels must be > 0");
    if (spec.peaks.empty()) throw ConfigError("SpectrumSpec: peak list is empty");

    Vector v = Vector::Zero(spec.n_channels);
    double max_intensity = 0.0;
    for (const auto& [channel, intensity] : spec.peaks) {
        if (channel < 0 || channel >= spec.n_channels) {
            throw ConfigError("SpectrumSpec: channel " + std::to_string(channel) +
                              " out of range [0, " + std::to_string(spec.n_channels) + ")");
        }
        if (!(intensity > 0.0) || intensity > 1.0 || !std::isfinite(intensity)) {
            throw ConfigError("SpectrumSpec: intensity must be in (0, 1]");
        }
        if (v[channel] != 0.0) {
            throw ConfigError("SpectrumSpec: duplicate channel " + std::to_string(channel));
        }
        v[channel] = intensity;
        max_intensity = std::max(max_intensity, intensity);
    }
    v /= max_intensity;
    return v;
}

Dataset assemble_dataset(const std::vector<Vector>& elutions,
                         const std::vector<Vector>& spectra, double noise_sigma,
                         std::uint64_t seed, std::string scenario_tag) {
    if (elutions.empty() || elutions.size() != spectra.size()) {
        throw ConfigError("assemble_dataset: need matching, non-empty elution/spectrum lists");
    }
    if (noise_sigma < 0.0 || !std::isfinite(noise_sigma)) {
        throw ConfigError("assemble_dataset: noise_sigma must be finite and >= 0");
    }
    const int p = static_cast<int>(elutions.size());
    const Eigen::Index n = elutions[0].size();
    const Eigen::Index m = spectra[0].size();
    for (int k = 0; k < p; ++k) {
        if (elutions[k].size() != n) {
            throw ConfigError("assemble_dataset: elution length mismatch at component " +
                              std::to_string(k));
        }
        if (spectra[k].size() != m) {
            throw ConfigError("assemble_dataset: spectrum length mismatch at component " +
                              std::to_string(k));
        }
    }

    Dataset ds;
    ds.C_true.resize(n, p);
    ds.S_true.resize(p, m);
    for (int k = 0; k < p; ++k) {
        const double smax = spectra[k].maxCoeff();
        if (!(smax > 0.0)) {
            throw ConfigError("assemble_dataset: spectrum " + std::to_string(k) + " is all zero");
        }
        ds.S_true.row(k) = spectra[k].transpose() / smax;
        ds.C_true.col(k) = elutions[k] * smax;
        if (ds.C_true.col(k).minCoeff() < 0.0 || ds.S_true.row(k).minCoeff() < 0.0) {
            throw ConfigError("assemble_dataset: component " + std::to_string(k) +
                              " has negative entries");
        }
    }
    ds.D = ds.C_true * ds.S_true;
    if (noise_sigma > 0.0) {
        Rng rng(derive_seed(seed, /*stream=*/0x6e6f697365ULL));  // "noise"
        for (Eigen::Index j = 0; j < m; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                ds.D(i, j) += rng.normal(0.0, noise_sigma);
            }
        }
    }
    ds.noise_sigma = noise_sigma;
    ds.seed = seed;
    ds.scenario = std::move(scenario_tag);
    return ds;
}

}  // namespace afslab
