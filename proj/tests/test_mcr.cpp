#include <doctest.h>

#include "afslab/factor.hpp"
#include "afslab/mcr.hpp"
#include "afslab/scenario.hpp"

using namespace afslab;

TEST_CASE("initial_estimate normalizes provided spectra") {
    const Dataset ds = build_dataset(canned_scenario(Scenario::two_comp_plain));
    Matrix scaled = 3.7 * ds.S_true;
    const Matrix S0 = initial_estimate(ds.D, 2, InitMethod::provided, 0, &scaled);
    CHECK((S0 - ds.S_true).cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 0; k < 2; ++k) CHECK(S0.row(k).maxCoeff() == 1.0);
}

TEST_CASE("initial_estimate random_rows is seeded and deterministic") {
    const Dataset ds = build_dataset(canned_scenario(Scenario::two_comp_plain));
    const Matrix a = initial_estimate(ds.D, 2, InitMethod::random_rows, 42);
    const Matrix b = initial_estimate(ds.D, 2, InitMethod::random_rows, 42);
    const Matrix c = initial_estimate(ds.D, 2, InitMethod::random_rows, 43);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("initial_estimate purest_rows separates the two components") {
    const Dataset ds = build_dataset(canned_scenario(Scenario::two_comp_plain));
    const Matrix S0 = initial_estimate(ds.D, 2, InitMethod::purest_rows, 0);
    // dominant channels of the two picked rows must belong to different
    // true components (disjoint supports in this scenario)
    Eigen::Index dom0, dom1;
    S0.row(0).maxCoeff(&dom0);
    S0.row(1).maxCoeff(&dom1);
    const bool comp0_of_dom0 = ds.S_true(0, dom0) > 0.0;
    const bool comp0_of_dom1 = ds.S_true(0, dom1) > 0.0;
    CHECK(comp0_of_dom0 != comp0_of_dom1);
}

TEST_CASE("mcr_als started at the truth is an immediate fixed point") {
    const Dataset ds = build_dataset(canned_scenario(Scenario::two_comp_plain));
    McrOptions opts;  // lambda = 0
    const McrResult res = mcr_als(ds.D, 2, ds.S_true, opts);
    CHECK(res.converged);
    CHECK(res.iterations <= 3);
    CHECK(res.final_ssq() < 1e-12 * ds.D.squaredNorm());
    for (int k = 0; k < 2; ++k) {
        const double cos = res.S.row(k).dot(ds.S_true.row(k)) /
                           (res.S.row(k).norm() * ds.S_true.row(k).norm());
        CHECK(cos > 0.9999);
    }
}

TEST_CASE("mcr_als is deterministic") {
    const Dataset ds = build_dataset(canned_scenario(Scenario::two_comp_overlap));
    const Matrix S0 = initial_estimate(ds.D, 2, InitMethod::random_rows, 7);
    McrOptions opts;
    opts.max_iter = 60;
    const McrResult a = mcr_als(ds.D, 2, S0, opts);
    const McrResult b = mcr_als(ds.D, 2, S0, opts);
    CHECK(a.C == b.C);
    CHECK(a.S == b.S);
    CHECK(a.ssq_trace == b.ssq_trace);
}

TEST_CASE("unpenalized mcr_als has a non-increasing ssq trace") {
    const Dataset ds = build_dataset(canned_scenario(Scenario::two_comp_overlap));
    const Matrix S0 = initial_estimate(ds.D, 2, InitMethod::random_rows, 3);
    McrOptions opts;
    opts.max_iter = 80;
    const McrResult res = mcr_als(ds.D, 2, S0, opts);
    for (std::size_t i = 1; i < res.ssq_trace.size(); ++i) {
        CHECK(res.ssq_trace[i] <= res.ssq_trace[i - 1] + 1e-9);
    }
}

TEST_CASE("mcr_als output invariants: normalization and reconstruction") {
    const Dataset ds = build_dataset(canned_scenario(Scenario::two_comp_plain));
    const Matrix S0 = initial_estimate(ds.D, 2, InitMethod::random_rows, 11);
    McrOptions opts;
    opts.max_iter = 40;
    const McrResult res = mcr_als(ds.D, 2, S0, opts);
    CHECK(res.C.minCoeff() >= 0.0);
    CHECK(res.S.minCoeff() >= 0.0);
    for (int k = 0; k < 2; ++k) CHECK(res.S.row(k).maxCoeff() == 1.0);
    // last trace entry is exactly the reconstruction error of the outputs
    CHECK(ssq(ds.D, res.C * res.S) == res.ssq_trace.back());
}

TEST_CASE("a small Lasso penalty does not raise the spectral L1 mass") {
    // from a random start both runs settle inside the ambiguity band, where
    // the penalty pulls toward sparser spectra
    const Dataset ds = build_dataset(canned_scenario(Scenario::two_comp_overlap));
    const Matrix S0 = initial_estimate(ds.D, 2, InitMethod::random_rows, ds.seed);
    McrOptions plain;
    plain.max_iter = 300;
    const McrResult base = mcr_als(ds.D, 2, S0, plain);

    McrOptions lasso = plain;
    lasso.penalty.lambda = 1e-3 * (ds.C_true.transpose() * ds.D).cwiseAbs().maxCoeff();
    lasso.penalty.alpha = 1.0;
    const McrResult sparse = mcr_als(ds.D, 2, S0, lasso);

    auto total_l1 = [](const Matrix& S) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < S.rows(); ++k) acc += S.row(k).cwiseAbs().sum();
        return acc;
    };
    CHECK(total_l1(sparse.S) <= total_l1(base.S) + 1e-9);
}

TEST_CASE("spectral L1 mass shrinks along a lambda ladder from a random start") {
    // The exact per-update Lasso path is monotone (covered in the solver
    // tests); the ALS fixed points it converges to are only monotone up to
    // local-solution noise, so the end-to-end ladder check allows a relative
    // slack.
    const Dataset ds = build_dataset(canned_scenario(Scenario::two_comp_overlap));
    const Matrix S0 = initial_estimate(ds.D, 2, InitMethod::random_rows, ds.seed);
    const double lambda_ref = (ds.D.transpose() * ds.D).diagonal().maxCoeff();
    double prev = std::numeric_limits<double>::infinity();
    double first = 0.0;
    for (double rel : {0.0, 1e-5, 1e-4, 1e-3, 3e-3}) {
        McrOptions opts;
        opts.penalty.lambda = rel * lambda_ref;
        opts.penalty.alpha = 1.0;
        opts.max_iter = 300;
        const McrResult res = mcr_als(ds.D, 2, S0, opts);
        double l1 = 0.0;
        for (int k = 0; k < 2; ++k) l1 += res.S.row(k).cwiseAbs().sum();
        if (!std::isfinite(prev)) first = l1;
        CHECK(l1 <= prev + 0.005 * first);
        prev = l1;
    }
    // the ladder as a whole must shrink the spectra
    CHECK(prev < first - 1e-6);
}

TEST_CASE("a component with no data support collapses with a clear error") {
    // rank-1 data, second candidate spectrum lives on empty channels
    Vector elution(20);
    for (int i = 0; i < 20; ++i) elution[i] = std::exp(-0.5 * (i - 10.0) * (i - 10.0) / 9.0);
    Vector s(12);
    s.setZero();
    s[0] = 1.0;
    s[1] = 0.5;
    const Matrix D = elution * s.transpose();

    Matrix S0 = Matrix::Zero(2, 12);
    S0.row(0) = s.transpose();
    S0(1, 5) = 1.0;
    S0(1, 6) = 0.4;

    CHECK_THROWS_AS(mcr_als(D, 2, S0, {}), ComponentCollapseError);
    try {
        mcr_als(D, 2, S0, {});
    } catch (const ComponentCollapseError& e) {
        CHECK(std::string(e.what()).find("component 2") != std::string::npos);
    }
}

TEST_CASE("mcr_als validates inputs") {
    const Dataset ds = build_dataset(canned_scenario(Scenario::two_comp_plain));
    Matrix bad(1, 3);
    bad << 1.0, 0.5, 0.2;
    CHECK_THROWS_AS(mcr_als(ds.D, 2, bad, {}), ConfigError);
    McrOptions opts;
    opts.epsilon = 0.0;
    CHECK_THROWS_AS(mcr_als(ds.D, 2, ds.S_true, opts), ConfigError);
}
