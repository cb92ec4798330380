#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "afslab/common.hpp"
#include "afslab/factor.hpp"
#include "afslab/solvers.hpp"

namespace afslab {

/// Rectangular search grid over the two free rotation parameters:
/// (t12, t21) for two components, (t12, t13) for three.
struct GridSpec {
    double a_min = -2.0, a_max = 2.0;  // first axis (t12)
    double b_min = -2.0, b_max = 2.0;  // second axis (t21 or t13)
    int steps_a = 201, steps_b = 201;  // lattice points per axis, >= 2
    double feas_tol = 1e-6;            // relative non-negativity tolerance

    void validate() const;
    double a_at(int ia) const { return a_min + (a_max - a_min) * ia / (steps_a - 1); }
    double b_at(int ib) const { return b_min + (b_max - b_min) * ib / (steps_b - 1); }
    double da() const { return (a_max - a_min) / (steps_a - 1); }
    double db() const { return (b_max - b_min) / (steps_b - 1); }
    int snap_a(double a) const;
    int snap_b(double b) const;
};

struct GridCell {
    double ta = 0.0, tb = 0.0;
    double log_ssq = 0.0;
    bool feasible = false;
    std::array<double, 4> inner_T{1.0, 0.0, 0.0, 1.0};  // (t22,t23,t32,t33), p=3 only
    Matrix S_rows;  // p x m max-normalized spectra, only stored when feasible
};

/// Grid of evaluated rotation cells plus 4-connected region labelling of the
/// feasible set. Cells are stored row-major: index = ib * steps_a + ia.
struct AfsGrid {
    GridSpec spec;
    int p = 0;
    std::uint64_t factor_hash = 0;
    std::vector<GridCell> cells;
    std::vector<int> region_of;      // per cell, -1 when infeasible
    int region_count = 0;
    std::vector<int> region_sizes;   // indexed by region id

    int index(int ia, int ib) const { return ib * spec.steps_a + ia; }
    const GridCell& at(int ia, int ib) const { return cells[index(ia, ib)]; }
    GridCell& at(int ia, int ib) { return cells[index(ia, ib)]; }
    int n_feasible() const;

    /// Region id of the feasible cell nearest (Chebyshev) to (ia, ib);
    /// also reports that distance. Throws EmptyAfsError when nothing is
    /// feasible.
    std::pair<int, int> nearest_feasible_region(int ia, int ib) const;
};

/// Non-negativity within a relative tolerance:
/// min(X) >= -tol * max(X) for both matrices.
bool feasibility(const Matrix& C_hat, const Matrix& S_hat, double tol);

struct CellEval {
    double log_ssq = 0.0;
    Matrix C;  // sign-canonicalized rotated factors (not clipped)
    Matrix S;
};

/// log10 of the clipped-reconstruction residual: negative entries of the
/// rotated profiles are zeroed, the ssq of C+ S+ against the factor
/// reconstruction is added to the factor truncation residual (together the
/// distance to the data), and floor_eps keeps the noiseless plateau finite.
/// Degenerate T raises DegenerateRotationError.
CellEval cell_objective(const SvdFactor& factor, const Matrix& T, double floor_eps);

/// floor_eps used by the grids: 1e-16 * ||D_hat||^2 (factor reconstruction).
double default_floor_eps(const SvdFactor& factor);

/// Exhaustive (t12, t21) grid for a rank-2 factor. Cells are independent;
/// rows are evaluated in parallel when threads > 1 with bit-identical output.
/// Throws EmptyAfsError when no feasible cell exists.
AfsGrid afs_grid_2comp(const SvdFactor& factor, const GridSpec& grid, int threads = 1);

/// (t12, t13) grid for a rank-3 factor: per cell, Nelder-Mead minimizes the
/// clipped-reconstruction ssq over the four inner elements (t22,t23,t32,t33),
/// warm-started from the left neighbour within each row (else an
/// identity-like seed), with seeded restarts. Parallel per row,
/// bit-identical to sequential execution.
AfsGrid afs_grid_3comp(const SvdFactor& factor, const GridSpec& grid,
                       const SimplexOptions& opts, int threads = 1);

/// Back-solved rotation parameters of the true solution, from the
/// least-squares fit of scores * X = C_true (rows of X^-1 normalized per the
/// p=2 / p=3 conventions). For p=2 the single (t12, t21) pair comes back as
/// a one-element vector; for p=3 one (t12, t13) pair per component.
std::vector<std::pair<double, double>> true_rotation_points(const SvdFactor& factor,
                                                            const Matrix& C_true);

/// Deterministic scenario-derived bounding box: starting from the true
/// rotation points (and their permutation images for p=2), probe coarse
/// grids and expand until every feasible cell sits strictly inside the box.
GridSpec auto_grid_bounds(const SvdFactor& factor, const Matrix& C_true, int steps,
                          double feas_tol, const SimplexOptions& opts = {}, int threads = 1);

}  // namespace afslab
