#include "afslab/factor.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstring>

namespace afslab {

std::uint64_t SvdFactor::content_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const double* data, std::size_t count) {
        const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < count * sizeof(double); ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    mix(scores.data(), static_cast<std::size_t>(scores.size()));
    mix(loadings.data(), static_cast<std::size_t>(loadings.size()));
    return h;
}

SvdFactor truncated_svd(const Matrix& D, int p) {
    if (p < 1 || p > std::min(D.rows(), D.cols())) {
        throw ConfigError("truncated_svd: p must be in [1, min(n, m)]");
    }
    Eigen::BDCSVD<Matrix> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();

    SvdFactor f;
    f.p = p;
    f.scores = svd.matrixU().leftCols(p) * sv.head(p).asDiagonal();
    f.loadings = svd.matrixV().leftCols(p);

    // sign convention: largest-magnitude loading entry positive
    for (int j = 0; j < p; ++j) {
        Eigen::Index imax;
        f.loadings.col(j).cwiseAbs().maxCoeff(&imax);
        if (f.loadings(imax, j) < 0.0) {
            f.loadings.col(j) = -f.loadings.col(j);
            f.scores.col(j) = -f.scores.col(j);
        }
    }
    f.truncation_ssq = sv.tail(sv.size() - p).squaredNorm();
    return f;
}

RotationSpec RotationSpec::two(double t12, double t21) {
    RotationSpec s;
    s.p = 2;
    s.t12 = t12;
    s.t21 = t21;
    return s;
}

RotationSpec RotationSpec::three(double t12, double t13, double t22, double t23,
                                 double t32, double t33) {
    RotationSpec s;
    s.p = 3;
    s.t12 = t12;
    s.t13 = t13;
    s.t22 = t22;
    s.t23 = t23;
    s.t32 = t32;
    s.t33 = t33;
    return s;
}

Matrix realize_T(const RotationSpec& spec) {
    if (spec.p == 2) {
        Matrix T(2, 2);
        T << 1.0, spec.t12, spec.t21, 1.0;
        return T;
    }
    if (spec.p == 3) {
        Matrix T(3, 3);
        T << 1.0, spec.t12, spec.t13, 1.0, spec.t22, spec.t23, 1.0, spec.t32, spec.t33;
        return T;
    }
    throw ConfigError("RotationSpec: p must be 2 or 3");
}

bool is_degenerate(const Matrix& T, double rel_tol) {
    double row_norm_product = 1.0;
    for (Eigen::Index i = 0; i < T.rows(); ++i) row_norm_product *= T.row(i).norm();
    const double det = T.determinant();
    return !(std::abs(det) > rel_tol * row_norm_product);
}

RotatedPair rotate(const SvdFactor& factor, const Matrix& T) {
    if (T.rows() != factor.p || T.cols() != factor.p) {
        throw ConfigError("rotate: T must be p x p");
    }
    if (is_degenerate(T)) {
        throw DegenerateRotationError("rotate: T is numerically singular");
    }
    RotatedPair out;
    // C = U T^-1  <=>  C^T = T^-T U^T, solved against T^T
    Eigen::PartialPivLU<Matrix> lu(T.transpose());
    out.C = lu.solve(factor.scores.transpose()).transpose();
    out.S = T * factor.loadings.transpose();

    for (int i = 0; i < factor.p; ++i) {
        Eigen::Index jmax;
        out.S.row(i).cwiseAbs().maxCoeff(&jmax);
        if (out.S(i, jmax) < 0.0) {
            out.S.row(i) = -out.S.row(i);
            out.C.col(i) = -out.C.col(i);
        }
    }
    return out;
}

double ssq(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ConfigError("ssq: shape mismatch");
    }
    return (a - b).squaredNorm();
}

}  // namespace afslab
