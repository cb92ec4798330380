#pragma once

#include <cstdint>
#include <vector>

#include "afslab/common.hpp"
#include "afslab/solvers.hpp"

namespace afslab {

enum class InitMethod { purest_rows, random_rows, provided };

/// Initial spectral estimate: p non-negative rows, max-normalized to 1.
/// purest_rows picks data rows by successive orthogonal-residual magnitude;
/// random_rows draws p distinct row indices from the seed; provided
/// normalizes the caller's matrix.
Matrix initial_estimate(const Matrix& D, int p, InitMethod method, std::uint64_t seed = 0,
                        const Matrix* provided = nullptr);

struct McrOptions {
    PenaltySpec penalty;      // lambda = 0 gives plain non-negative ALS
    double epsilon = 1e-8;    // relative ssq-change stopping threshold
    int max_iter = 500;
};

struct McrResult {
    Matrix C;                       // n x p, non-negative
    Matrix S;                       // p x m, non-negative, rows max-normalized
    std::vector<double> ssq_trace;  // ssq after each completed iteration
    bool converged = false;
    int iterations = 0;
    PenaltySpec penalty;

    double final_ssq() const { return ssq_trace.empty() ? 0.0 : ssq_trace.back(); }
};

/// MCR-ALS with non-negativity on both factors and an elastic-net penalty on
/// the spectral update. Each iteration: C rows by NNLS against S, S columns
/// by penalized non-negative coordinate descent against C, then S rows are
/// re-normalized to max 1 with the compensating scale moved into C. Stops
/// when |ssq_t - ssq_{t-1}| < epsilon * ssq_t or at max_iter. A component
/// whose spectrum collapses to all zeros raises ComponentCollapseError.
McrResult mcr_als(const Matrix& D, int p, const Matrix& S0, const McrOptions& opts = {});

}  // namespace afslab
