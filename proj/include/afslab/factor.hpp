#pragma once

#include <cstdint>

#include "afslab/common.hpp"

namespace afslab {

/// Truncated rank-p factorization D ~ scores * loadings^T.
/// Scores carry the singular values (U = left vectors * Sigma); loadings
/// columns are orthonormal. Sign convention: the largest-magnitude entry of
/// each loading column is positive, which makes the factorization unique.
struct SvdFactor {
    Matrix scores;    // n x p
    Matrix loadings;  // m x p, orthonormal columns
    int p = 0;
    double truncation_ssq = 0.0;  // ||D - scores*loadings^T||_F^2

    /// FNV-1a over the factor bytes; identifies the factor in output files.
    std::uint64_t content_hash() const;
};

SvdFactor truncated_svd(const Matrix& D, int p);

/// Normalized rotation parameterization.
/// p=2:  T = [[1, t12], [t21, 1]]
/// p=3:  T = [[1, t12, t13], [1, t22, t23], [1, t32, t33]]
struct RotationSpec {
    int p = 2;
    double t12 = 0.0, t21 = 0.0;                            // p = 2
    double t13 = 0.0, t22 = 1.0, t23 = 0.0, t32 = 0.0, t33 = 1.0;  // p = 3

    static RotationSpec two(double t12, double t21);
    static RotationSpec three(double t12, double t13, double t22, double t23,
                              double t32, double t33);
};

Matrix realize_T(const RotationSpec& spec);

/// True when |det T| < rel_tol * prod(row norms); such T must not be inverted.
bool is_degenerate(const Matrix& T, double rel_tol = 1e-8);

struct RotatedPair {
    Matrix C;  // n x p
    Matrix S;  // p x m
};

/// C = scores * T^-1, S = T * loadings^T, with per-component sign
/// canonicalization: whenever the largest-magnitude entry of a spectral row
/// is negative, that row and its concentration column are both negated
/// (the product C*S is unchanged; intensity ambiguity covers the sign).
/// Throws DegenerateRotationError for near-singular T.
RotatedPair rotate(const SvdFactor& factor, const Matrix& T);

/// Sum of squared element-wise differences (Frobenius distance squared).
double ssq(const Matrix& a, const Matrix& b);

}  // namespace afslab
