#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "afslab/afs.hpp"
#include "afslab/mcr.hpp"
#include "afslab/norms.hpp"
#include "afslab/scenario.hpp"

namespace afslab {

/// Everything a run needs, resolved from the JSON config file plus CLI
/// overrides. Defaults follow the canned experiment setup: auto grid bounds,
/// 201 steps for two components / 81 for three, x sweep 0..2 in steps of
/// 0.25, and a five-point lambda ladder.
struct ExperimentConfig {
    ScenarioSpec scenario;
    std::filesystem::path out_dir = "out";

    bool grid_auto = true;
    GridSpec grid;          // box honoured when grid_auto is false
    int grid_steps = 0;     // 0 = per-p default (201 / 81)
    double feas_tol = 1e-6;

    std::vector<PenaltySpec> penalties;  // lambda ladder for cmd_mcr
    std::vector<double> x_list;          // exponents for cmd_norms
    double zero_tol = 1e-6;

    InitMethod mcr_init = InitMethod::random_rows;
    double mcr_epsilon = 1e-8;
    int mcr_max_iter = 500;

    SimplexOptions simplex;  // inner optimizer for three-component grids
    int threads = 0;         // 0 = hardware concurrency

    static ExperimentConfig from_file(const std::filesystem::path& config_path);
    /// Needed pieces computed lazily by the commands.
    int resolved_steps() const;
    int resolved_threads() const;
};

/// CLI override knobs (applied after the config file is parsed).
struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

ExperimentConfig load_config(const std::filesystem::path& path, const CliOverrides& overrides);

/// Shared grid computation: dataset -> factor -> AfsGrid per the config.
struct GridBundle {
    Dataset dataset;
    SvdFactor factor;
    AfsGrid grid;
};
GridBundle compute_grid(const ExperimentConfig& config);

void cmd_simulate(const ExperimentConfig& config);
void cmd_afs(const ExperimentConfig& config);
void cmd_norms(const ExperimentConfig& config);
void cmd_mcr(const ExperimentConfig& config);
void cmd_all(const ExperimentConfig& config);

// --- analysis helpers shared by cmd_norms, the acceptance suite and tests ---

struct CellRef {
    int ia = 0;
    int ib = 0;
};
inline int chebyshev(CellRef a, CellRef b) {
    return std::max(std::abs(a.ia - b.ia), std::abs(a.ib - b.ib));
}

struct TrueCellInfo {
    std::pair<double, double> t;  // back-solved rotation parameters
    CellRef cell;                 // snapped lattice cell
    int region = -1;              // region of the nearest feasible cell
    int feasible_dist = 0;        // chebyshev distance to that cell
};
std::vector<TrueCellInfo> locate_true_cells(const AfsGrid& grid, const SvdFactor& factor,
                                            const Matrix& C_true);

/// Cell minimizing the summed surface within one region.
CellRef argmin_in_region(const AfsGrid& grid, const NormSurface& surface, int region);

/// Mean of defined gradient magnitudes in the (2*radius+1)^2 window.
double mean_gradient_window(const AfsGrid& grid, const Vector& gradients, CellRef center,
                            int radius);

/// Fraction of interior feasible cells (all four neighbours feasible) whose
/// gradient magnitude is below tol.
double interior_plateau_fraction(const AfsGrid& grid, const Vector& gradients, double tol);

/// Two-component permutation symmetry: cells of each region mapped through
/// (t12, t21) -> (1/t21, 1/t12), snapped, and tested against the other
/// region's cell set. Returns mismatches / total feasible cells.
double twofold_mismatch_fraction(const AfsGrid& grid);

/// Best-permutation cosine similarities between recovered and true spectra.
std::vector<double> matched_cosines(const Matrix& S_recovered, const Matrix& S_true);

}  // namespace afslab
