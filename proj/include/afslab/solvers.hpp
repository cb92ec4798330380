#pragma once

#include <cstdint>
#include <functional>

#include "afslab/common.hpp"

namespace afslab {

/// Elastic-net penalty: lambda * sum_j [ (1-alpha)/2 * x_j^2 + alpha*|x_j| ].
/// alpha=1 is Lasso, alpha=0 ridge. x_exponent selects the norm used for
/// surface analysis; the regression solver itself only uses lambda/alpha.
struct PenaltySpec {
    double lambda = 0.0;
    double alpha = 1.0;
    double x_exponent = 1.0;

    void validate() const;
};

struct OlsResult {
    Matrix X;                    // k x q
    bool rank_deficient = false; // pseudo-inverse fallback was taken
};

/// Columnwise least squares: minimize ||B - A*X||_F^2.
OlsResult ols(const Matrix& A, const Matrix& B);

/// Non-negative least squares (Lawson-Hanson active set on the normal
/// equations). The result satisfies the KKT conditions: x_i > 0 implies
/// |grad_i| ~ 0 and x_i = 0 implies grad_i >= 0, where grad = A^T(Ax - b).
Vector nnls(const Matrix& A, const Vector& b);

struct ElasticNetResult {
    Vector x;
    bool converged = true;
    int sweeps = 0;
    std::vector<double> objective_trace;  // objective after each sweep
};

/// Cyclic coordinate descent for
///   min 1/2 ||b - A x||^2 + lambda * sum[(1-alpha)/2 x^2 + alpha |x|]
/// with optional non-negativity clamping. Stops when the largest coordinate
/// change in a sweep drops below tol, or after max_sweeps (converged=false).
/// warm, when given, seeds the iteration (zeros otherwise).
ElasticNetResult elastic_net(const Matrix& A, const Vector& b, const PenaltySpec& penalty,
                             bool nonneg, int max_sweeps = 10000, double tol = 1e-8,
                             const Vector* warm = nullptr);

struct SimplexOptions {
    int max_iter = 400;     // function evaluations per start
    double x_tol = 1e-9;    // simplex diameter tolerance
    double f_tol = 1e-12;   // f spread tolerance
    int restarts = 0;       // extra starts from x0 perturbed by +-10%
    std::uint64_t seed = 0; // seeds the restart perturbations

    void validate() const;
};

struct SimplexResult {
    Vector x;
    double f = 0.0;
    bool converged = false;
    int evals = 0;
};

/// Nelder-Mead simplex minimization (fminsearch-style: reflection 1,
/// expansion 2, contraction 0.5, shrink 0.5; initial simplex perturbs each
/// coordinate by 5%, 0.00025 for zeros). Non-finite f(x0) is an error;
/// non-finite values mid-run are treated as +inf. Restarts perturb x0 and
/// the best result over all starts is returned; f never exceeds f(x0).
SimplexResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                          const SimplexOptions& opts = {});

}  // namespace afslab
