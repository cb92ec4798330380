#include "afslab/afs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <functional>
#include <thread>

#include "afslab/rng.hpp"

namespace afslab {

namespace {
constexpr double kSentinelLogSsq = 300.0;  // degenerate-rotation cells
}

void GridSpec::validate() const {
    if (!(a_max > a_min) || !(b_max > b_min)) {
        throw ConfigError("GridSpec: axis max must exceed min");
    }
    if (steps_a < 2 || steps_b < 2) throw ConfigError("GridSpec: steps must be >= 2");
    if (!(feas_tol >= 0.0)) throw ConfigError("GridSpec: feas_tol must be >= 0");
}

int GridSpec::snap_a(double a) const {
    const int i = static_cast<int>(std::lround((a - a_min) / da()));
    return std::clamp(i, 0, steps_a - 1);
}

int GridSpec::snap_b(double b) const {
    const int i = static_cast<int>(std::lround((b - b_min) / db()));
    return std::clamp(i, 0, steps_b - 1);
}

int AfsGrid::n_feasible() const {
    int n = 0;
    for (const auto& c : cells) n += c.feasible ? 1 : 0;
    return n;
}

std::pair<int, int> AfsGrid::nearest_feasible_region(int ia, int ib) const {
    const int max_r = std::max(spec.steps_a, spec.steps_b);
    for (int r = 0; r <= max_r; ++r) {
        for (int jb = ib - r; jb <= ib + r; ++jb) {
            if (jb < 0 || jb >= spec.steps_b) continue;
            for (int ja = ia - r; ja <= ia + r; ++ja) {
                if (ja < 0 || ja >= spec.steps_a) continue;
                if (std::max(std::abs(ja - ia), std::abs(jb - ib)) != r) continue;
                if (at(ja, jb).feasible) return {region_of[index(ja, jb)], r};
            }
        }
    }
    throw EmptyAfsError("AfsGrid: no feasible cell in grid");
}

bool feasibility(const Matrix& C_hat, const Matrix& S_hat, double tol) {
    const double cmax = C_hat.maxCoeff();
    const double smax = S_hat.maxCoeff();
    return C_hat.minCoeff() >= -tol * cmax && S_hat.minCoeff() >= -tol * smax;
}

double default_floor_eps(const SvdFactor& factor) {
    // ||D_hat||^2 = sum of retained singular values squared = ||scores||^2
    return 1e-16 * factor.scores.squaredNorm();
}

namespace {

// Workspace-reusing core of cell_objective; dhat is the rank-p
// reconstruction scores * loadings^T, precomputed by the caller.
struct CellEvaluator {
    const SvdFactor& factor;
    const Matrix& dhat;
    double floor_eps;
    Matrix C, S, Cp, Sp, recon;

    CellEvaluator(const SvdFactor& f, const Matrix& dh, double fe)
        : factor(f), dhat(dh), floor_eps(fe) {}

    // returns log_ssq; leaves canonicalized C, S in the workspace
    double eval(const Matrix& T) {
        Eigen::PartialPivLU<Matrix> lu(T.transpose());
        C.noalias() = lu.solve(factor.scores.transpose()).transpose();
        S.noalias() = T * factor.loadings.transpose();
        for (int i = 0; i < factor.p; ++i) {
            Eigen::Index jmax;
            S.row(i).cwiseAbs().maxCoeff(&jmax);
            if (S(i, jmax) < 0.0) {
                S.row(i) = -S.row(i);
                C.col(i) = -C.col(i);
            }
        }
        Cp = C.cwiseMax(0.0);
        Sp = S.cwiseMax(0.0);
        recon.noalias() = Cp * Sp;
        const double clip_ssq = (dhat - recon).squaredNorm();
        return std::log10(factor.truncation_ssq + clip_ssq + floor_eps);
    }
};

void label_regions(AfsGrid& grid) {
    const int na = grid.spec.steps_a;
    const int nb = grid.spec.steps_b;
    grid.region_of.assign(grid.cells.size(), -1);
    grid.region_sizes.clear();
    grid.region_count = 0;
    for (int ib = 0; ib < nb; ++ib) {
        for (int ia = 0; ia < na; ++ia) {
            const int start = grid.index(ia, ib);
            if (!grid.cells[start].feasible || grid.region_of[start] >= 0) continue;
            const int id = grid.region_count++;
            int size = 0;
            std::deque<std::pair<int, int>> queue{{ia, ib}};
            grid.region_of[start] = id;
            while (!queue.empty()) {
                auto [ca, cb] = queue.front();
                queue.pop_front();
                ++size;
                constexpr int dx[4] = {1, -1, 0, 0};
                constexpr int dy[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    const int ja = ca + dx[d];
                    const int jb = cb + dy[d];
                    if (ja < 0 || ja >= na || jb < 0 || jb >= nb) continue;
                    const int j = grid.index(ja, jb);
                    if (grid.cells[j].feasible && grid.region_of[j] < 0) {
                        grid.region_of[j] = id;
                        queue.emplace_back(ja, jb);
                    }
                }
            }
            grid.region_sizes.push_back(size);
        }
    }
}

void store_feasible_spectra(GridCell& cell, const Matrix& S) {
    cell.S_rows = S;
    for (Eigen::Index i = 0; i < cell.S_rows.rows(); ++i) {
        const double mx = cell.S_rows.row(i).maxCoeff();
        if (mx > 0.0) cell.S_rows.row(i) /= mx;
    }
}

void run_rows_parallel(int nb, int threads, const std::function<void(int)>& row_fn) {
    threads = std::max(1, std::min(threads, nb));
    if (threads == 1) {
        for (int ib = 0; ib < nb; ++ib) row_fn(ib);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int ib = next.fetch_add(1); ib < nb; ib = next.fetch_add(1)) row_fn(ib);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

CellEval cell_objective(const SvdFactor& factor, const Matrix& T, double floor_eps) {
    if (is_degenerate(T)) {
        throw DegenerateRotationError("cell_objective: degenerate rotation");
    }
    const Matrix dhat = factor.scores * factor.loadings.transpose();
    CellEvaluator ev(factor, dhat, floor_eps);
    CellEval out;
    out.log_ssq = ev.eval(T);
    out.C = std::move(ev.C);
    out.S = std::move(ev.S);
    return out;
}

AfsGrid afs_grid_2comp(const SvdFactor& factor, const GridSpec& grid, int threads) {
    grid.validate();
    if (factor.p != 2) throw ConfigError("afs_grid_2comp: factor must have p = 2");

    AfsGrid out;
    out.spec = grid;
    out.p = 2;
    out.factor_hash = factor.content_hash();
    out.cells.resize(static_cast<std::size_t>(grid.steps_a) * grid.steps_b);

    const Matrix dhat = factor.scores * factor.loadings.transpose();
    const double floor_eps = default_floor_eps(factor);

    run_rows_parallel(grid.steps_b, threads, [&](int ib) {
        CellEvaluator ev(factor, dhat, floor_eps);
        Matrix T(2, 2);
        for (int ia = 0; ia < grid.steps_a; ++ia) {
            GridCell& cell = out.at(ia, ib);
            cell.ta = grid.a_at(ia);
            cell.tb = grid.b_at(ib);
            T << 1.0, cell.ta, cell.tb, 1.0;
            if (is_degenerate(T)) {
                cell.log_ssq = kSentinelLogSsq;
                cell.feasible = false;
                continue;
            }
            cell.log_ssq = ev.eval(T);
            cell.feasible = feasibility(ev.C, ev.S, grid.feas_tol);
            if (cell.feasible) store_feasible_spectra(cell, ev.S);
        }
    });

    label_regions(out);
    if (out.region_count == 0) {
        throw EmptyAfsError("afs_grid_2comp: no feasible cell; widen the grid box");
    }
    return out;
}

namespace {

// Shared state of the 3-component grid sweep: best inner parameters and
// objective value per cell, refined across passes.
struct InnerState {
    std::vector<Vector> y;
    std::vector<double> f;
};

Matrix& realize_inner(Matrix& T, double ta, double tb, const Vector& y) {
    T << 1.0, ta, tb, 1.0, y[0], y[1], 1.0, y[2], y[3];
    return T;
}

// Cold seed: inner rows close to the leading (all-positive) loading
// direction, slightly split so T stays non-singular. The identity-like seed
// [1,0,0,1] sits in a divergent basin for strongly overlapped data.
Vector cold_inner_seed() {
    Vector y(4);
    y << 0.15, -0.1, -0.1, 0.15;
    return y;
}

}  // namespace

AfsGrid afs_grid_3comp(const SvdFactor& factor, const GridSpec& grid, const SimplexOptions& opts,
                       int threads) {
    grid.validate();
    opts.validate();
    if (factor.p != 3) throw ConfigError("afs_grid_3comp: factor must have p = 3");

    AfsGrid out;
    out.spec = grid;
    out.p = 3;
    out.factor_hash = factor.content_hash();
    const int na = grid.steps_a;
    const int nb = grid.steps_b;
    out.cells.resize(static_cast<std::size_t>(na) * nb);

    const Matrix dhat = factor.scores * factor.loadings.transpose();
    const double floor_eps = default_floor_eps(factor);

    InnerState state;
    state.y.assign(out.cells.size(), Vector());
    state.f.assign(out.cells.size(), std::numeric_limits<double>::infinity());

    auto minimize_cell = [&](CellEvaluator& ev, Matrix& T, int ia, int ib, const Vector& seed,
                             int restarts) {
        const double ta = grid.a_at(ia);
        const double tb = grid.b_at(ib);
        auto objective = [&](const Vector& y) {
            realize_inner(T, ta, tb, y);
            if (is_degenerate(T)) return std::numeric_limits<double>::infinity();
            return ev.eval(T);
        };
        Vector y0 = (seed.size() == 4) ? seed : cold_inner_seed();
        if (!std::isfinite(objective(y0))) y0 = cold_inner_seed();
        SimplexOptions cell_opts = opts;
        cell_opts.restarts = restarts;
        cell_opts.seed =
            derive_seed(opts.seed, 0xafc3ULL, static_cast<std::uint64_t>(out.index(ia, ib)));
        const int idx = out.index(ia, ib);
        try {
            const SimplexResult res = nelder_mead(objective, y0, cell_opts);
            if (res.f < state.f[idx]) {
                state.f[idx] = res.f;
                state.y[idx] = res.x;
            }
        } catch (const NumericError&) {
            // objective non-finite even at the fallback seed: leave the cell
            // unsolved; the refinement passes may still reach it
        }
    };

    // pass 1: row-major sweep, warm-started from the left neighbour; when the
    // warm start fails to reach the residual plateau the cold seed gets a try
    // too, so isolated regions are entered regardless of sweep direction
    const double plateau = std::log10(factor.truncation_ssq + floor_eps);
    run_rows_parallel(nb, threads, [&](int ib) {
        CellEvaluator ev(factor, dhat, floor_eps);
        Matrix T(3, 3);
        const Vector no_seed;
        for (int ia = 0; ia < na; ++ia) {
            const Vector& left = (ia > 0) ? state.y[out.index(ia - 1, ib)] : no_seed;
            minimize_cell(ev, T, ia, ib, left, opts.restarts);
            if (ia > 0 && state.f[out.index(ia, ib)] > plateau + 0.5) {
                minimize_cell(ev, T, ia, ib, no_seed, opts.restarts);
            }
        }
    });

    // refinement passes: re-seed each cell from the neighbour opposite the
    // flow direction whenever that neighbour's inner parameters look better;
    // this lets solutions propagate into regions the first sweep entered
    // from an unlucky side
    struct Pass {
        int dx, dy;  // neighbour offset supplying the seed
    };
    const Pass passes[4] = {{1, 0}, {0, 1}, {0, -1}, {-1, 0}};
    for (const Pass& pass : passes) {
        auto refine_line = [&](int fixed) {
            CellEvaluator ev(factor, dhat, floor_eps);
            Matrix T(3, 3);
            const bool horizontal = pass.dy == 0;
            const int len = horizontal ? na : nb;
            for (int step = 0; step < len; ++step) {
                // walk against the seed offset so updates chain along the line
                const int along = (horizontal ? pass.dx : pass.dy) > 0 ? len - 1 - step : step;
                const int ia = horizontal ? along : fixed;
                const int ib = horizontal ? fixed : along;
                const int ja = ia + pass.dx;
                const int jb = ib + pass.dy;
                if (ja < 0 || ja >= na || jb < 0 || jb >= nb) continue;
                const int nidx = out.index(ja, jb);
                if (state.y[nidx].size() == 0) continue;
                const double ta = grid.a_at(ia);
                const double tb = grid.b_at(ib);
                realize_inner(T, ta, tb, state.y[nidx]);
                const double f_seeded =
                    is_degenerate(T) ? std::numeric_limits<double>::infinity() : ev.eval(T);
                if (f_seeded < state.f[out.index(ia, ib)] - 1e-12) {
                    minimize_cell(ev, T, ia, ib, state.y[nidx], 0);
                }
            }
        };
        run_rows_parallel(pass.dy == 0 ? nb : na, threads, refine_line);
    }

    // store pass: evaluate the cells from their current inner parameters
    auto store_cells = [&] {
        run_rows_parallel(nb, threads, [&](int ib) {
            CellEvaluator ev(factor, dhat, floor_eps);
            Matrix T(3, 3);
            for (int ia = 0; ia < na; ++ia) {
                GridCell& cell = out.at(ia, ib);
                cell.ta = grid.a_at(ia);
                cell.tb = grid.b_at(ib);
                const int idx = out.index(ia, ib);
                cell.feasible = false;
                cell.S_rows = Matrix();
                if (state.y[idx].size() == 0) {
                    cell.log_ssq = kSentinelLogSsq;
                    continue;
                }
                const Vector& y = state.y[idx];
                cell.inner_T = {y[0], y[1], y[2], y[3]};
                realize_inner(T, cell.ta, cell.tb, y);
                if (is_degenerate(T)) {
                    cell.log_ssq = kSentinelLogSsq;
                    continue;
                }
                cell.log_ssq = ev.eval(T);
                cell.feasible = feasibility(ev.C, ev.S, grid.feas_tol);
                if (cell.feasible) store_feasible_spectra(cell, ev.S);
            }
        });
        label_regions(out);
    };
    store_cells();

    // Canonicalization pass. Inside a feasible region the inner objective is
    // flat, so Nelder-Mead parks rows 2 and 3 wherever it entered the basin;
    // that per-cell drift would leak into every stored spectrum and swamp the
    // row-1 signal of the norm surfaces. Sample candidate completions from
    // each region, measure how many cells each one covers (feasible at equal
    // objective), and pin every cell to the widest-coverage completion that
    // covers it. This also recovers isolated cells the sweeps missed.
    std::vector<Vector> candidates;
    std::vector<int> candidate_home;
    for (int r = 0; r < out.region_count; ++r) {
        std::vector<int> members;
        for (std::size_t i = 0; i < out.cells.size(); ++i) {
            if (out.region_of[i] == r && state.y[i].size() == 4) {
                members.push_back(static_cast<int>(i));
            }
        }
        const int max_per_region = 32;
        const int stride = std::max<int>(1, static_cast<int>(members.size()) / max_per_region);
        for (std::size_t j = 0; j < members.size(); j += stride) {
            candidates.push_back(state.y[members[j]]);
            candidate_home.push_back(members[j]);
        }
    }

    // Polish each candidate toward the sparsest completion of its flat
    // basin: minimize the L1 mass of the max-normalized inner rows subject
    // to staying at the residual plateau. Equal-ssq completions are exactly
    // the rotational ambiguity of the remaining two components, and the
    // sparsest of them spans its region widest, which makes it the natural
    // canonical representative.
    {
        CellEvaluator ev(factor, dhat, floor_eps);
        Matrix T(3, 3);
        std::vector<Vector> polished;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const int home = candidate_home[c];
            const double ta = out.cells[home].ta;
            const double tb = out.cells[home].tb;
            auto sparse_objective = [&](const Vector& y) {
                realize_inner(T, ta, tb, y);
                if (is_degenerate(T)) return std::numeric_limits<double>::infinity();
                const double f = ev.eval(T);
                // soft boundary: the sparsest completion sits exactly on the
                // non-negativity wall, which a hard cutoff would make
                // unreachable for the simplex
                const double neg_c = std::max(0.0, -ev.C.minCoeff() / std::max(ev.C.maxCoeff(), 1e-300));
                const double neg_s = std::max(0.0, -ev.S.minCoeff() / std::max(ev.S.maxCoeff(), 1e-300));
                double l1 = 0.0;
                for (int i = 1; i < 3; ++i) {
                    const double mx = ev.S.row(i).cwiseAbs().maxCoeff();
                    if (mx > 0.0) l1 += ev.S.row(i).cwiseAbs().sum() / mx;
                }
                double penalty = 0.0;
                if (neg_c > grid.feas_tol) penalty += 1e4 * (neg_c - grid.feas_tol);
                if (neg_s > grid.feas_tol) penalty += 1e4 * (neg_s - grid.feas_tol);
                return l1 + penalty + 1e3 * std::max(0.0, f - (plateau + 0.25));
            };
            SimplexOptions polish_opts = opts;
            polish_opts.restarts = 0;
            polish_opts.f_tol = 1e-10;
            try {
                const SimplexResult res = nelder_mead(sparse_objective, candidates[c], polish_opts);
                if (std::isfinite(res.f)) {
                    polished.push_back(res.x);
                    // Shrinking the inner parameters toward zero mixes a
                    // trace of the all-positive leading loading into each
                    // row: the L1 mass stays within a hair of the sparse
                    // optimum while every union channel returns above the
                    // zero threshold, keeping the L0 count flat.
                    for (double delta : {5e-4, 2e-3}) {
                        polished.push_back((1.0 - delta) * res.x);
                    }
                }
            } catch (const NumericError&) {
            }
        }
        // polished candidates go first so they win coverage ties
        candidates.insert(candidates.begin(), polished.begin(), polished.end());
    }
    if (!candidates.empty()) {
        const int ncand = static_cast<int>(candidates.size());
        std::vector<std::vector<char>> covers(
            ncand, std::vector<char>(out.cells.size(), 0));
        std::vector<Vector> cand_f(ncand);
        for (int c = 0; c < ncand; ++c) cand_f[c].resize(out.cells.size());
        run_rows_parallel(nb, threads, [&](int ib) {
            CellEvaluator ev(factor, dhat, floor_eps);
            Matrix T(3, 3);
            for (int ia = 0; ia < na; ++ia) {
                const int idx = out.index(ia, ib);
                for (int c = 0; c < ncand; ++c) {
                    realize_inner(T, grid.a_at(ia), grid.b_at(ib), candidates[c]);
                    if (is_degenerate(T)) continue;
                    const double f = ev.eval(T);
                    cand_f[c][idx] = f;
                    if (f <= state.f[idx] + 1e-9 && feasibility(ev.C, ev.S, grid.feas_tol)) {
                        covers[c][idx] = 1;
                    }
                }
            }
        });
        std::vector<long> coverage(ncand, 0);
        for (int c = 0; c < ncand; ++c) {
            for (char hit : covers[c]) coverage[c] += hit;
        }
        // The inner spectral rows depend on the completion only, so each
        // candidate has one L1 mass and one channel support. Cells adopt, of
        // the candidates covering them with reasonably wide span, the one
        // with the smallest L1 mass; near-ties resolve toward full channel
        // support (flat L0) and then candidate order.
        std::vector<double> cand_l1(ncand, 0.0);
        std::vector<int> cand_support(ncand, 0);
        for (int c = 0; c < ncand; ++c) {
            if (candidates[c].size() != 4) continue;
            const Matrix rows = Matrix((Matrix(2, 3) << 1.0, candidates[c][0], candidates[c][1],
                                        1.0, candidates[c][2], candidates[c][3])
                                           .finished() *
                                       factor.loadings.transpose());
            for (int i = 0; i < rows.rows(); ++i) {
                const double mx = rows.row(i).cwiseAbs().maxCoeff();
                if (mx <= 0.0) continue;
                cand_l1[c] += rows.row(i).cwiseAbs().sum() / mx;
                for (Eigen::Index j = 0; j < rows.cols(); ++j) {
                    if (std::abs(rows(i, j)) / mx > 1e-6) ++cand_support[c];
                }
            }
        }
        auto better = [&](int a, int b) {  // is candidate a preferable to b
            const long qa = std::lround(cand_l1[a] / 0.02);
            const long qb = std::lround(cand_l1[b] / 0.02);
            if (qa != qb) return qa < qb;
            if (cand_support[a] != cand_support[b]) return cand_support[a] > cand_support[b];
            return a < b;
        };
        for (std::size_t idx = 0; idx < out.cells.size(); ++idx) {
            long best_cov = 0;
            for (int c = 0; c < ncand; ++c) {
                if (covers[c][idx]) best_cov = std::max(best_cov, coverage[c]);
            }
            if (best_cov == 0) continue;
            int pick = -1;
            for (int c = 0; c < ncand; ++c) {
                if (!covers[c][idx] || 2 * coverage[c] < best_cov) continue;
                if (pick < 0 || better(c, pick)) pick = c;
            }
            if (pick >= 0) {
                state.y[idx] = candidates[pick];
                state.f[idx] = cand_f[pick][idx];
            }
        }
        store_cells();
    }

    if (out.region_count == 0) {
        throw EmptyAfsError("afs_grid_3comp: no feasible cell; widen the grid box");
    }
    return out;
}

std::vector<std::pair<double, double>> true_rotation_points(const SvdFactor& factor,
                                                            const Matrix& C_true) {
    if (C_true.cols() != factor.p || C_true.rows() != factor.scores.rows()) {
        throw ConfigError("true_rotation_points: C_true must be n x p");
    }
    // least-squares solve scores * X = C_true, then T = X^-1
    const Matrix X = ols(factor.scores, C_true).X;
    if (is_degenerate(X)) {
        throw NumericError("true_rotation_points: C_true does not span the factor space");
    }
    const Matrix T = X.inverse();

    std::vector<std::pair<double, double>> pts;
    if (factor.p == 2) {
        pts.emplace_back(T(0, 1) / T(0, 0), T(1, 0) / T(1, 1));
    } else {
        for (int k = 0; k < factor.p; ++k) {
            pts.emplace_back(T(k, 1) / T(k, 0), T(k, 2) / T(k, 0));
        }
    }
    return pts;
}

GridSpec auto_grid_bounds(const SvdFactor& factor, const Matrix& C_true, int steps,
                          double feas_tol, const SimplexOptions& opts, int threads) {
    auto pts = true_rotation_points(factor, C_true);
    if (factor.p == 2) {
        // permutation image of the true point anchors the second region
        const auto [t12, t21] = pts[0];
        if (t12 != 0.0 && t21 != 0.0) pts.emplace_back(1.0 / t21, 1.0 / t12);
    }

    double a_lo = pts[0].first, a_hi = pts[0].first;
    double b_lo = pts[0].second, b_hi = pts[0].second;
    for (const auto& [a, b] : pts) {
        a_lo = std::min(a_lo, a);
        a_hi = std::max(a_hi, a);
        b_lo = std::min(b_lo, b);
        b_hi = std::max(b_hi, b);
    }
    auto inflate = [](double& lo, double& hi, double factor_, double min_half) {
        const double c = 0.5 * (lo + hi);
        const double h = std::max(0.5 * (hi - lo) * factor_, min_half);
        lo = c - h;
        hi = c + h;
    };
    inflate(a_lo, a_hi, 3.0, 0.75);
    inflate(b_lo, b_hi, 3.0, 0.75);

    const int probe_steps = factor.p == 2 ? 81 : 27;
    for (int iter = 0; iter < 6; ++iter) {
        GridSpec probe;
        probe.a_min = a_lo;
        probe.a_max = a_hi;
        probe.b_min = b_lo;
        probe.b_max = b_hi;
        probe.steps_a = probe.steps_b = probe_steps;
        probe.feas_tol = feas_tol;

        AfsGrid g;
        bool empty = false;
        try {
            g = factor.p == 2 ? afs_grid_2comp(factor, probe, threads)
                              : afs_grid_3comp(factor, probe, opts, threads);
        } catch (const EmptyAfsError&) {
            empty = true;
        }
        if (empty) {
            inflate(a_lo, a_hi, 2.0, 0.0);
            inflate(b_lo, b_hi, 2.0, 0.0);
            continue;
        }

        // bounding box of the feasible set
        double fa_lo = 1e300, fa_hi = -1e300, fb_lo = 1e300, fb_hi = -1e300;
        for (const auto& c : g.cells) {
            if (!c.feasible) continue;
            fa_lo = std::min(fa_lo, c.ta);
            fa_hi = std::max(fa_hi, c.ta);
            fb_lo = std::min(fb_lo, c.tb);
            fb_hi = std::max(fb_hi, c.tb);
        }
        const double margin_a = 2.0 * probe.da();
        const double margin_b = 2.0 * probe.db();
        const bool interior = fa_lo > a_lo + margin_a && fa_hi < a_hi - margin_a &&
                              fb_lo > b_lo + margin_b && fb_hi < b_hi - margin_b;
        if (interior) {
            // the box must also keep every true rotation point comfortably
            // inside; a coarse probe can miss thin fringes near them
            for (const auto& [a, b] : pts) {
                fa_lo = std::min(fa_lo, a);
                fa_hi = std::max(fa_hi, a);
                fb_lo = std::min(fb_lo, b);
                fb_hi = std::max(fb_hi, b);
            }
            const double pad_a = 0.12 * std::max(fa_hi - fa_lo, 4.0 * probe.da());
            const double pad_b = 0.12 * std::max(fb_hi - fb_lo, 4.0 * probe.db());
            GridSpec final_spec;
            final_spec.a_min = fa_lo - pad_a;
            final_spec.a_max = fa_hi + pad_a;
            final_spec.b_min = fb_lo - pad_b;
            final_spec.b_max = fb_hi + pad_b;
            final_spec.steps_a = final_spec.steps_b = steps;
            final_spec.feas_tol = feas_tol;
            // offset the lattice half a cell along the first axis: region
            // corners tend to coincide with the feasible bounding box corner,
            // and a lattice point sitting exactly on an acute corner leaves
            // its tip cell connected only diagonally
            const double half_cell = 0.5 * (final_spec.a_max - final_spec.a_min) / (steps - 1);
            final_spec.a_min += half_cell;
            final_spec.a_max += half_cell;
            return final_spec;
        }
        // grow the box past the detected feasible extent and re-probe
        a_lo = std::min(a_lo, fa_lo) - 4.0 * margin_a;
        a_hi = std::max(a_hi, fa_hi) + 4.0 * margin_a;
        b_lo = std::min(b_lo, fb_lo) - 4.0 * margin_b;
        b_hi = std::max(b_hi, fb_hi) + 4.0 * margin_b;
        inflate(a_lo, a_hi, 1.3, 0.0);
        inflate(b_lo, b_hi, 1.3, 0.0);
    }
    throw NumericError("auto_grid_bounds: feasible set did not stabilize inside a box");
}

}  // namespace afslab
