#include "afslab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "afslab/rng.hpp"

namespace afslab {

void PenaltySpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("PenaltySpec: lambda must be finite and >= 0");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("PenaltySpec: alpha must be in [0, 1]");
    if (!(x_exponent >= 0.0 && x_exponent <= 2.0)) {
        throw ConfigError("PenaltySpec: x_exponent must be in [0, 2]");
    }
}

void SimplexOptions::validate() const {
    if (max_iter <= 0) throw ConfigError("SimplexOptions: max_iter must be > 0");
    if (restarts < 0) throw ConfigError("SimplexOptions: restarts must be >= 0");
    if (!(x_tol > 0.0) || !(f_tol > 0.0)) {
        throw ConfigError("SimplexOptions: tolerances must be > 0");
    }
}

OlsResult ols(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows()) throw ConfigError("ols: A and B row counts differ");
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
    OlsResult r;
    r.X = cod.solve(B);
    r.rank_deficient = cod.rank() < A.cols();
    return r;
}

Vector nnls(const Matrix& A, const Vector& b) {
    if (A.rows() != b.size()) throw ConfigError("nnls: A and b row counts differ");
    const int k = static_cast<int>(A.cols());
    const Matrix AtA = A.transpose() * A;
    const Vector Atb = A.transpose() * b;
    const double scale = std::max(Atb.cwiseAbs().maxCoeff(), 1e-300);
    const double tol = 1e-10 * scale;

    Vector x = Vector::Zero(k);
    std::vector<bool> passive(k, false);
    Vector grad = -Atb;  // A^T(Ax - b) at x = 0

    auto solve_passive = [&](const std::vector<bool>& set) {
        std::vector<int> idx;
        for (int i = 0; i < k; ++i)
            if (set[i]) idx.push_back(i);
        Vector z = Vector::Zero(k);
        if (idx.empty()) return z;
        Matrix sub(idx.size(), idx.size());
        Vector rhs(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a) {
            rhs[a] = Atb[idx[a]];
            for (std::size_t c = 0; c < idx.size(); ++c) sub(a, c) = AtA(idx[a], idx[c]);
        }
        Vector sol = sub.ldlt().solve(rhs);
        for (std::size_t a = 0; a < idx.size(); ++a) z[idx[a]] = sol[a];
        return z;
    };

    const int max_outer = 3 * k + 30;
    for (int outer = 0; outer < max_outer; ++outer) {
        // most negative gradient among the active (zero) set
        int enter = -1;
        double best = -tol;
        for (int i = 0; i < k; ++i) {
            if (!passive[i] && grad[i] < best) {
                best = grad[i];
                enter = i;
            }
        }
        if (enter < 0) break;  // KKT satisfied
        passive[enter] = true;

        Vector z = solve_passive(passive);
        // inner loop: back off along x -> z until the passive set is feasible
        int guard = 0;
        while (true) {
            double amin = 1.0;
            int leave = -1;
            for (int i = 0; i < k; ++i) {
                if (passive[i] && z[i] <= 0.0) {
                    const double a = x[i] / (x[i] - z[i]);
                    if (a < amin) {
                        amin = a;
                        leave = i;
                    }
                }
            }
            if (leave < 0) break;
            x += amin * (z - x);
            for (int i = 0; i < k; ++i) {
                if (passive[i] && (i == leave || x[i] <= 0.0)) {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            z = solve_passive(passive);
            if (++guard > k + 2) break;
        }
        x = z;
        grad = AtA * x - Atb;
    }
    for (int i = 0; i < k; ++i) x[i] = std::max(x[i], 0.0);
    return x;
}

namespace {

double elastic_net_objective(const Matrix& A, const Vector& b, const Vector& x, double lambda,
                             double alpha) {
    const double fit = 0.5 * (b - A * x).squaredNorm();
    const double l1 = x.cwiseAbs().sum();
    const double l2 = x.squaredNorm();
    return fit + lambda * (0.5 * (1.0 - alpha) * l2 + alpha * l1);
}

}  // namespace

ElasticNetResult elastic_net(const Matrix& A, const Vector& b, const PenaltySpec& penalty,
                             bool nonneg, int max_sweeps, double tol, const Vector* warm) {
    penalty.validate();
    if (A.rows() != b.size()) throw ConfigError("elastic_net: A and b row counts differ");
    const int k = static_cast<int>(A.cols());
    const Matrix AtA = A.transpose() * A;
    const Vector Atb = A.transpose() * b;
    const double lam_l1 = penalty.lambda * penalty.alpha;
    const double lam_l2 = penalty.lambda * (1.0 - penalty.alpha);

    ElasticNetResult res;
    if (warm) {
        if (warm->size() != k) throw ConfigError("elastic_net: warm start has wrong length");
        res.x = nonneg ? warm->cwiseMax(0.0) : *warm;
    } else {
        res.x = Vector::Zero(k);
    }
    Vector ax_correl = AtA * res.x;  // updated incrementally

    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (int j = 0; j < k; ++j) {
            const double denom = AtA(j, j) + lam_l2;
            const double rho = Atb[j] - ax_correl[j] + AtA(j, j) * res.x[j];
            double xj;
            if (denom <= 0.0) {
                xj = 0.0;
            } else if (nonneg) {
                xj = std::max(0.0, rho - lam_l1) / denom;
            } else {
                const double mag = std::max(0.0, std::abs(rho) - lam_l1);
                xj = (rho >= 0.0 ? mag : -mag) / denom;
            }
            const double delta = xj - res.x[j];
            if (delta != 0.0) {
                ax_correl += delta * AtA.col(j);
                res.x[j] = xj;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        res.sweeps = sweep;
        res.objective_trace.push_back(
            elastic_net_objective(A, b, res.x, penalty.lambda, penalty.alpha));
        if (max_delta < tol) {
            res.converged = true;
            return res;
        }
    }
    res.converged = false;
    return res;
}

namespace {

SimplexResult nelder_mead_single(const std::function<double(const Vector&)>& f, const Vector& x0,
                                 const SimplexOptions& opts) {
    const int n = static_cast<int>(x0.size());
    auto safe_f = [&f](const Vector& x) {
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    // fminsearch-style initial simplex
    std::vector<Vector> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    int evals = 0;
    fv[0] = safe_f(pts[0]);
    ++evals;
    for (int i = 0; i < n; ++i) {
        Vector v = x0;
        v[i] = (v[i] != 0.0) ? v[i] * 1.05 : 0.00025;
        pts[i + 1] = v;
        fv[i + 1] = safe_f(v);
        ++evals;
    }

    std::vector<int> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&fv](int a, int b) { return fv[a] < fv[b]; });
        std::vector<Vector> p2(n + 1);
        std::vector<double> f2(n + 1);
        for (int i = 0; i <= n; ++i) {
            p2[i] = pts[order[i]];
            f2[i] = fv[order[i]];
        }
        pts.swap(p2);
        fv.swap(f2);
    };
    sort_simplex();

    SimplexResult result;
    result.converged = false;
    while (evals < opts.max_iter) {
        // termination: simplex diameter or f spread below tolerance
        double diam = 0.0;
        for (int i = 1; i <= n; ++i) {
            diam = std::max(diam, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
        }
        const double fspread = fv[n] - fv[0];
        if (diam < opts.x_tol || fspread < opts.f_tol) {
            result.converged = true;
            break;
        }

        Vector centroid = Vector::Zero(n);
        for (int i = 0; i < n; ++i) centroid += pts[i];
        centroid /= n;

        const Vector xr = centroid + (centroid - pts[n]);  // reflection
        const double fr = safe_f(xr);
        ++evals;
        if (fr < fv[0]) {
            const Vector xe = centroid + 2.0 * (centroid - pts[n]);  // expansion
            const double fe = safe_f(xe);
            ++evals;
            if (fe < fr) {
                pts[n] = xe;
                fv[n] = fe;
            } else {
                pts[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            pts[n] = xr;
            fv[n] = fr;
        } else {
            bool shrink = false;
            if (fr < fv[n]) {
                const Vector xc = centroid + 0.5 * (xr - centroid);  // outside contraction
                const double fc = safe_f(xc);
                ++evals;
                if (fc <= fr) {
                    pts[n] = xc;
                    fv[n] = fc;
                } else {
                    shrink = true;
                }
            } else {
                const Vector xc = centroid - 0.5 * (centroid - pts[n]);  // inside contraction
                const double fc = safe_f(xc);
                ++evals;
                if (fc < fv[n]) {
                    pts[n] = xc;
                    fv[n] = fc;
                } else {
                    shrink = true;
                }
            }
            if (shrink) {
                for (int i = 1; i <= n; ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    fv[i] = safe_f(pts[i]);
                    ++evals;
                }
            }
        }
        sort_simplex();
    }

    result.x = pts[0];
    result.f = fv[0];
    result.evals = evals;
    return result;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                          const SimplexOptions& opts) {
    opts.validate();
    if (x0.size() == 0) throw ConfigError("nelder_mead: x0 is empty");
    const double f0 = f(x0);
    if (!std::isfinite(f0)) throw NumericError("nelder_mead: f(x0) is not finite");

    SimplexResult best = nelder_mead_single(f, x0, opts);
    for (int r = 1; r <= opts.restarts; ++r) {
        Rng rng(derive_seed(opts.seed, /*stream=*/0x73696d706cULL, static_cast<std::uint64_t>(r)));
        Vector xs = x0;
        for (Eigen::Index i = 0; i < xs.size(); ++i) {
            const double u = rng.uniform(-0.1, 0.1);
            xs[i] = (xs[i] != 0.0) ? xs[i] * (1.0 + u) : u;
        }
        SimplexResult cand = nelder_mead_single(f, xs, opts);
        cand.evals += best.evals;
        if (cand.f < best.f) {
            best = cand;
        } else {
            best.evals = cand.evals;
        }
    }
    // never report worse than the starting point
    if (f0 < best.f) {
        best.x = x0;
        best.f = f0;
    }
    return best;
}

}  // namespace afslab
