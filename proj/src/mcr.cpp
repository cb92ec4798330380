#include "afslab/mcr.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "afslab/factor.hpp"
#include "afslab/rng.hpp"

namespace afslab {

Matrix initial_estimate(const Matrix& D, int p, InitMethod method, std::uint64_t seed,
                        const Matrix* provided) {
    const int n = static_cast<int>(D.rows());
    const int m = static_cast<int>(D.cols());
    if (p < 1 || p > m) throw ConfigError("initial_estimate: p must be in [1, n_channels]");

    Matrix S0(p, m);
    switch (method) {
        case InitMethod::provided: {
            if (!provided || provided->rows() != p || provided->cols() != m) {
                throw ConfigError("initial_estimate: provided matrix must be p x m");
            }
            S0 = *provided;
            break;
        }
        case InitMethod::random_rows: {
            if (p > n) throw ConfigError("initial_estimate: p exceeds row count");
            Rng rng(derive_seed(seed, /*stream=*/0x696e6974ULL));
            std::set<std::uint64_t> chosen;
            for (int k = 0; k < p; ++k) {
                std::uint64_t idx = rng.uniform_index(static_cast<std::uint64_t>(n));
                while (chosen.count(idx)) idx = rng.uniform_index(static_cast<std::uint64_t>(n));
                chosen.insert(idx);
                S0.row(k) = D.row(static_cast<Eigen::Index>(idx));
            }
            break;
        }
        case InitMethod::purest_rows: {
            if (p > n) throw ConfigError("initial_estimate: p exceeds row count");
            // successively pick the row with the largest residual after
            // projecting out the span of the rows already chosen
            Matrix basis(p, m);
            for (int k = 0; k < p; ++k) {
                int best = -1;
                double best_norm = -1.0;
                for (int i = 0; i < n; ++i) {
                    Vector r = D.row(i).transpose();
                    for (int j = 0; j < k; ++j) r -= basis.row(j).transpose().dot(r) * basis.row(j).transpose();
                    const double nrm = r.norm();
                    if (nrm > best_norm) {
                        best_norm = nrm;
                        best = i;
                    }
                }
                S0.row(k) = D.row(best);
                Vector r = D.row(best).transpose();
                for (int j = 0; j < k; ++j) r -= basis.row(j).transpose().dot(r) * basis.row(j).transpose();
                const double nrm = r.norm();
                if (nrm > 0.0) r /= nrm;
                basis.row(k) = r.transpose();
            }
            break;
        }
    }

    S0 = S0.cwiseMax(0.0);
    for (int k = 0; k < p; ++k) {
        const double mx = S0.row(k).maxCoeff();
        if (!(mx > 0.0)) {
            throw ConfigError("initial_estimate: row " + std::to_string(k) + " is all zero");
        }
        S0.row(k) /= mx;
    }
    return S0;
}

McrResult mcr_als(const Matrix& D, int p, const Matrix& S0, const McrOptions& opts) {
    if (p < 1) throw ConfigError("mcr_als: p must be >= 1");
    if (S0.rows() != p || S0.cols() != D.cols()) {
        throw ConfigError("mcr_als: S0 must be p x n_channels");
    }
    if (!(opts.epsilon > 0.0)) throw ConfigError("mcr_als: epsilon must be > 0");
    opts.penalty.validate();

    const int n = static_cast<int>(D.rows());
    const int m = static_cast<int>(D.cols());

    McrResult res;
    res.penalty = opts.penalty;
    res.S = S0;
    res.C = Matrix::Zero(n, p);

    auto check_alive = [p](const Matrix& S, const char* stage) {
        for (int k = 0; k < p; ++k) {
            if (!(S.row(k).cwiseAbs().maxCoeff() > 0.0)) {
                throw ComponentCollapseError(std::string("mcr_als: component ") +
                                             std::to_string(k + 1) + " collapsed to zero during " +
                                             stage + " update");
            }
        }
    };

    // fits at the machine floor count as converged even when the relative
    // test cannot resolve them
    const double machine_floor = 1e-20 * D.squaredNorm();
    double prev_ssq = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        // C update: row-wise NNLS against the current spectra
        const Matrix St = res.S.transpose();  // m x p
        for (int i = 0; i < n; ++i) {
            res.C.row(i) = nnls(St, D.row(i).transpose()).transpose();
        }
        for (int k = 0; k < p; ++k) {
            if (!(res.C.col(k).cwiseAbs().maxCoeff() > 0.0)) {
                throw ComponentCollapseError("mcr_als: component " + std::to_string(k + 1) +
                                             " collapsed to zero during concentration update");
            }
        }

        // S update: column-wise penalized non-negative regression against C.
        // With no penalty the elastic-net objective reduces to NNLS, which
        // the active-set solver answers exactly; otherwise coordinate
        // descent runs warm-started from the previous iterate.
        if (opts.penalty.lambda == 0.0) {
            for (int j = 0; j < m; ++j) {
                res.S.col(j) = nnls(res.C, D.col(j));
            }
        } else {
            for (int j = 0; j < m; ++j) {
                const Vector warm = res.S.col(j);
                res.S.col(j) =
                    elastic_net(res.C, D.col(j), opts.penalty, /*nonneg=*/true, 10000, 1e-8,
                                &warm).x;
            }
        }
        check_alive(res.S, "spectral");

        // intensity-ambiguity fix: rows of S to max 1, compensate in C
        for (int k = 0; k < p; ++k) {
            const double mx = res.S.row(k).maxCoeff();
            res.S.row(k) /= mx;
            res.C.col(k) *= mx;
        }

        const double cur_ssq = ssq(D, res.C * res.S);
        res.ssq_trace.push_back(cur_ssq);
        res.iterations = iter;
        if (cur_ssq <= machine_floor ||
            std::abs(prev_ssq - cur_ssq) < opts.epsilon * cur_ssq) {
            res.converged = true;
            break;
        }
        prev_ssq = cur_ssq;
    }
    return res;
}

}  // namespace afslab
