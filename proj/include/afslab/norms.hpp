#pragma once

#include <vector>

#include "afslab/afs.hpp"
#include "afslab/common.hpp"

namespace afslab {

/// L_x power sum: sum |v_i|^x for x in (0, 2]; for x = 0 the count of
/// entries with |v_i| > zero_tol. These are the penalty-style measures
/// (no x-th root is taken).
double lx_norm(const Vector& v, double x, double zero_tol = 1e-6);

/// Per-cell L_x values over the feasible cells of an AfsGrid. All arrays are
/// row-major flat copies of the grid; infeasible cells hold NaN. The summed
/// surface adds the p per-component values; the scaled copy is the summed
/// surface min-max normalized over feasible cells.
struct NormSurface {
    double x_exponent = 1.0;
    GridSpec spec;
    int p = 0;
    std::vector<Vector> per_component;  // p arrays, one value per cell
    Vector sum;
    Vector scaled;

    int index(int ia, int ib) const { return ib * spec.steps_a + ia; }
    bool defined(int idx) const { return std::isfinite(sum[idx]); }
};

NormSurface norm_surface(const AfsGrid& grid, double x, double zero_tol = 1e-6);

/// Central-difference gradient magnitudes of the summed (or min-max scaled)
/// surface; one-sided differences where only one neighbour along an axis is
/// feasible, zero contribution where none is. NaN on infeasible cells.
/// Fewer than 3x3 feasible cells is an error.
Vector gradient_field(const NormSurface& surface, bool scaled);

/// One scaled surface per exponent in xs (must be sorted, within [0, 2]).
std::vector<NormSurface> sweep_x(const AfsGrid& grid, const std::vector<double>& xs,
                                 double zero_tol = 1e-6);

}  // namespace afslab
