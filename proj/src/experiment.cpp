#include "afslab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "afslab/io.hpp"

namespace afslab {

using nlohmann::json;

namespace {

ScenarioSpec scenario_from_json(const json& j) {
    ScenarioSpec spec;
    spec.tag = j.value("tag", std::string("custom"));
    if (!j.contains("n_scans")) throw ConfigError("custom scenario: missing field 'n_scans'");
    if (!j.contains("n_channels")) {
        throw ConfigError("custom scenario: missing field 'n_channels'");
    }
    spec.n_scans = j.at("n_scans").get<int>();
    spec.n_channels = j.at("n_channels").get<int>();
    spec.noise_sigma = j.value("noise_sigma", 0.0);
    spec.seed = j.value("seed", 1ULL);
    if (!j.contains("components") || !j.at("components").is_array() ||
        j.at("components").empty()) {
        throw ConfigError("custom scenario: field 'components' must be a non-empty array");
    }
    for (const auto& cj : j.at("components")) {
        ComponentSpec comp;
        const auto& ej = cj.at("elution");
        comp.elution.amplitude = ej.at("amplitude").get<double>();
        comp.elution.center = ej.at("center").get<double>();
        comp.elution.sigma = ej.at("sigma").get<double>();
        comp.elution.tau = ej.value("tau", 0.0);
        comp.spectrum.n_channels = spec.n_channels;
        for (const auto& pk : cj.at("spectrum").at("peaks")) {
            comp.spectrum.peaks.emplace_back(pk.at(0).get<int>(), pk.at(1).get<double>());
        }
        spec.components.push_back(std::move(comp));
    }
    return spec;
}

json active_grid_json(const GridSpec& g) {
    return json{{"a_min", g.a_min}, {"a_max", g.a_max},     {"b_min", g.b_min},
                {"b_max", g.b_max}, {"steps_a", g.steps_a}, {"steps_b", g.steps_b},
                {"feas_tol", g.feas_tol}};
}

std::string hex_hash(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string x_label(double x) {
    std::ostringstream ss;
    ss << x;
    return ss.str();
}

// long-format AFS table with the default norm columns
void write_afs_csv(const std::filesystem::path& path, const AfsGrid& grid) {
    const std::vector<double> exponents{0.0, 1.0, 2.0};
    std::vector<NormSurface> surfaces;
    for (double x : exponents) surfaces.push_back(norm_surface(grid, x, 1e-6));

    std::vector<std::string> header{"t_a", "t_b", "log_ssq", "feasible", "region"};
    for (double x : exponents) {
        for (int k = 0; k < grid.p; ++k) {
            header.push_back("L" + x_label(x) + "_c" + std::to_string(k + 1));
        }
        header.push_back("sum_L" + x_label(x));
    }

    Matrix table(static_cast<Eigen::Index>(grid.cells.size()), header.size());
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const GridCell& cell = grid.cells[i];
        Eigen::Index col = 0;
        table(i, col++) = cell.ta;
        table(i, col++) = cell.tb;
        table(i, col++) = cell.log_ssq;
        table(i, col++) = cell.feasible ? 1.0 : 0.0;
        table(i, col++) = grid.region_of[i];
        for (const auto& surf : surfaces) {
            for (int k = 0; k < grid.p; ++k) table(i, col++) = surf.per_component[k][i];
            table(i, col++) = surf.sum[i];
        }
    }
    write_csv(path, table, header);
}

Matrix surface_matrix(const AfsGrid& grid, const Vector& flat) {
    Matrix m(grid.spec.steps_b, grid.spec.steps_a);
    for (int ib = 0; ib < grid.spec.steps_b; ++ib) {
        for (int ia = 0; ia < grid.spec.steps_a; ++ia) {
            m(ib, ia) = flat[grid.index(ia, ib)];
        }
    }
    return m;
}

void write_norm_csv(const std::filesystem::path& path, const AfsGrid& grid,
                    const NormSurface& surf) {
    std::vector<std::string> header{"t_a", "t_b"};
    for (int k = 0; k < surf.p; ++k) header.push_back("L_c" + std::to_string(k + 1));
    header.push_back("sum");
    header.push_back("scaled");
    Matrix table(static_cast<Eigen::Index>(grid.cells.size()), header.size());
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        Eigen::Index col = 0;
        table(i, col++) = grid.cells[i].ta;
        table(i, col++) = grid.cells[i].tb;
        for (int k = 0; k < surf.p; ++k) table(i, col++) = surf.per_component[k][i];
        table(i, col++) = surf.sum[i];
        table(i, col++) = surf.scaled[i];
    }
    write_csv(path, table, header);
}

json true_cells_json(const std::vector<TrueCellInfo>& infos) {
    json arr = json::array();
    for (const auto& info : infos) {
        arr.push_back(json{{"t_a", info.t.first},
                           {"t_b", info.t.second},
                           {"cell_a", info.cell.ia},
                           {"cell_b", info.cell.ib},
                           {"region", info.region},
                           {"feasible_dist", info.feasible_dist}});
    }
    return arr;
}

}  // namespace

int ExperimentConfig::resolved_steps() const {
    if (grid_steps > 0) return grid_steps;
    return static_cast<int>(scenario.components.size()) <= 2 ? 201 : 81;
}

int ExperimentConfig::resolved_threads() const {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& config_path) {
    json j;
    try {
        j = json::parse(read_text(config_path));
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + config_path.string() + ": " + e.what());
    }

    ExperimentConfig cfg;
    if (!j.contains("scenario")) throw ConfigError("config: missing field 'scenario'");
    const auto& sj = j.at("scenario");
    if (sj.is_string()) {
        cfg.scenario = canned_scenario(scenario_from_string(sj.get<std::string>()));
    } else if (sj.is_object() && sj.contains("custom")) {
        const std::filesystem::path p =
            config_path.parent_path() / sj.at("custom").get<std::string>();
        if (!std::filesystem::exists(p)) {
            throw ConfigError("config: custom scenario file does not exist: " + p.string());
        }
        try {
            cfg.scenario = scenario_from_json(json::parse(read_text(p)));
        } catch (const json::exception& e) {
            throw ConfigError("custom scenario parse error: " + std::string(e.what()));
        }
    } else {
        throw ConfigError("config: 'scenario' must be a name or {\"custom\": path}");
    }

    if (j.contains("seed")) cfg.scenario.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("grid")) {
        const auto& gj = j.at("grid");
        cfg.grid_auto = gj.value("auto", true);
        if (gj.contains("steps")) cfg.grid_steps = gj.at("steps").get<int>();
        cfg.feas_tol = gj.value("feas_tol", 1e-6);
        if (!cfg.grid_auto) {
            for (const char* field : {"a_min", "a_max", "b_min", "b_max"}) {
                if (!gj.contains(field)) {
                    throw ConfigError(std::string("config: explicit grid needs field '") + field +
                                      "'");
                }
            }
            cfg.grid.a_min = gj.at("a_min").get<double>();
            cfg.grid.a_max = gj.at("a_max").get<double>();
            cfg.grid.b_min = gj.at("b_min").get<double>();
            cfg.grid.b_max = gj.at("b_max").get<double>();
        }
    }
    if (j.contains("penalties")) {
        for (const auto& pj : j.at("penalties")) {
            PenaltySpec pen;
            pen.lambda = pj.at("lambda").get<double>();
            pen.alpha = pj.value("alpha", 1.0);
            pen.x_exponent = pj.value("x_exponent", 1.0);
            pen.validate();
            cfg.penalties.push_back(pen);
        }
    }
    if (j.contains("x_list")) {
        for (const auto& xv : j.at("x_list")) cfg.x_list.push_back(xv.get<double>());
        if (!std::is_sorted(cfg.x_list.begin(), cfg.x_list.end())) {
            throw ConfigError("config: x_list must be sorted ascending");
        }
        for (double x : cfg.x_list) {
            if (x < 0.0 || x > 2.0) throw ConfigError("config: x_list entries must be in [0, 2]");
        }
    }
    cfg.zero_tol = j.value("zero_tol", 1e-6);
    if (j.contains("mcr")) {
        const auto& mj = j.at("mcr");
        cfg.mcr_epsilon = mj.value("epsilon", 1e-8);
        cfg.mcr_max_iter = mj.value("max_iter", 500);
        const std::string init = mj.value("init", std::string("random_rows"));
        if (init == "random_rows") {
            cfg.mcr_init = InitMethod::random_rows;
        } else if (init == "purest_rows") {
            cfg.mcr_init = InitMethod::purest_rows;
        } else if (init == "truth") {
            cfg.mcr_init = InitMethod::provided;
        } else {
            throw ConfigError("config: mcr.init must be random_rows, purest_rows or truth");
        }
    }
    if (j.contains("simplex")) {
        const auto& oj = j.at("simplex");
        cfg.simplex.max_iter = oj.value("max_iter", cfg.simplex.max_iter);
        cfg.simplex.x_tol = oj.value("x_tol", cfg.simplex.x_tol);
        cfg.simplex.f_tol = oj.value("f_tol", cfg.simplex.f_tol);
        cfg.simplex.restarts = oj.value("restarts", cfg.simplex.restarts);
        cfg.simplex.seed = oj.value("seed", cfg.simplex.seed);
    }
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();

    // experiment-level defaults (the lambda ladder is synthesized against the
    // data scale inside cmd_mcr when no penalties are configured)
    if (cfg.x_list.empty()) {
        for (int i = 0; i <= 8; ++i) cfg.x_list.push_back(0.25 * i);
    }
    // inner simplex defaults suited to the grid search
    if (!j.contains("simplex")) {
        cfg.simplex.max_iter = 2000;
        cfg.simplex.x_tol = 1e-9;
        cfg.simplex.f_tol = 1e-12;
        cfg.simplex.restarts = 1;
        cfg.simplex.seed = 7;
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const CliOverrides& overrides) {
    ExperimentConfig cfg = ExperimentConfig::from_file(path);
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    if (overrides.threads) cfg.threads = *overrides.threads;
    if (overrides.seed) cfg.scenario.seed = *overrides.seed;
    return cfg;
}

GridBundle compute_grid(const ExperimentConfig& config) {
    GridBundle bundle;
    bundle.dataset = build_dataset(config.scenario);
    const int p = bundle.dataset.n_components();
    if (p != 2 && p != 3) {
        throw ConfigError("AFS mapping supports 2- or 3-component scenarios, got " +
                          std::to_string(p));
    }
    bundle.factor = truncated_svd(bundle.dataset.D, p);
    GridSpec grid;
    if (config.grid_auto) {
        grid = auto_grid_bounds(bundle.factor, bundle.dataset.C_true, config.resolved_steps(),
                                config.feas_tol, config.simplex, config.resolved_threads());
    } else {
        grid = config.grid;
        grid.steps_a = grid.steps_b = config.resolved_steps();
        grid.feas_tol = config.feas_tol;
    }
    bundle.grid = (p == 2)
                      ? afs_grid_2comp(bundle.factor, grid, config.resolved_threads())
                      : afs_grid_3comp(bundle.factor, grid, config.simplex,
                                       config.resolved_threads());
    return bundle;
}

void cmd_simulate(const ExperimentConfig& config) {
    const Dataset ds = build_dataset(config.scenario);
    std::filesystem::create_directories(config.out_dir);

    std::vector<std::string> channel_header;
    for (int j = 0; j < ds.n_channels(); ++j) channel_header.push_back(std::to_string(j));
    write_csv(config.out_dir / "D.csv", ds.D, channel_header);
    write_csv(config.out_dir / "C_true.csv", ds.C_true);
    write_csv(config.out_dir / "S_true.csv", ds.S_true, channel_header);

    json meta{{"scenario", ds.scenario},
              {"n_scans", ds.n_scans()},
              {"n_channels", ds.n_channels()},
              {"n_components", ds.n_components()},
              {"seed", ds.seed},
              {"noise_sigma", ds.noise_sigma}};
    json supports = json::array();
    for (int k = 0; k < ds.n_components(); ++k) {
        json chans = json::array();
        for (int j = 0; j < ds.n_channels(); ++j) {
            if (ds.S_true(k, j) > 0.0) chans.push_back(j);
        }
        supports.push_back(chans);
    }
    meta["channel_supports"] = supports;
    write_text(config.out_dir / "meta.json", meta.dump(2) + "\n");
}

void cmd_afs(const ExperimentConfig& config) {
    const GridBundle bundle = compute_grid(config);
    const AfsGrid& grid = bundle.grid;
    std::filesystem::create_directories(config.out_dir);

    write_afs_csv(config.out_dir / "afs.csv", grid);

    Matrix log_ssq(grid.spec.steps_b, grid.spec.steps_a);
    for (int ib = 0; ib < grid.spec.steps_b; ++ib) {
        for (int ia = 0; ia < grid.spec.steps_a; ++ia) {
            log_ssq(ib, ia) = grid.at(ia, ib).log_ssq;
        }
    }
    write_pgm(config.out_dir / "heatmap_log_ssq.pgm", log_ssq);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& cell : grid.cells) {
        if (cell.feasible) {
            lo = std::min(lo, cell.log_ssq);
            hi = std::max(hi, cell.log_ssq);
        }
    }
    const auto true_cells = locate_true_cells(grid, bundle.factor, bundle.dataset.C_true);

    json meta{{"scenario", bundle.dataset.scenario},
              {"p", grid.p},
              {"grid", active_grid_json(grid.spec)},
              {"factor_hash", hex_hash(grid.factor_hash)},
              {"truncation_ssq", bundle.factor.truncation_ssq},
              {"seed", bundle.dataset.seed},
              {"n_feasible", grid.n_feasible()},
              {"region_count", grid.region_count},
              {"region_sizes", grid.region_sizes},
              {"log_ssq_feasible_min", lo},
              {"log_ssq_feasible_max", hi},
              {"log_ssq_feasible_spread", hi - lo},
              {"true_cells", true_cells_json(true_cells)}};
    if (grid.p == 3) {
        meta["simplex"] = json{{"max_iter", config.simplex.max_iter},
                               {"x_tol", config.simplex.x_tol},
                               {"f_tol", config.simplex.f_tol},
                               {"restarts", config.simplex.restarts},
                               {"seed", config.simplex.seed}};
    }
    if (grid.p == 2) meta["twofold_mismatch_fraction"] = twofold_mismatch_fraction(grid);
    write_text(config.out_dir / "afs_meta.json", meta.dump(2) + "\n");
}

void cmd_norms(const ExperimentConfig& config) {
    const GridBundle bundle = compute_grid(config);
    const AfsGrid& grid = bundle.grid;
    std::filesystem::create_directories(config.out_dir);
    std::filesystem::create_directories(config.out_dir / "frames");

    const auto frames = sweep_x(grid, config.x_list, config.zero_tol);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "frame_%02zu.csv", i);
        write_norm_csv(config.out_dir / "frames" / name, grid, frames[i]);
        std::snprintf(name, sizeof(name), "frame_%02zu.pgm", i);
        write_pgm(config.out_dir / "frames" / name, surface_matrix(grid, frames[i].scaled));
        write_norm_csv(config.out_dir / ("norms_x" + x_label(frames[i].x_exponent) + ".csv"),
                       grid, frames[i]);
    }

    const auto true_cells = locate_true_cells(grid, bundle.factor, bundle.dataset.C_true);
    const NormSurface s0 = norm_surface(grid, 0.0, config.zero_tol);
    const NormSurface s1 = norm_surface(grid, 1.0, config.zero_tol);
    const NormSurface s2 = norm_surface(grid, 2.0, config.zero_tol);
    const Vector g0 = gradient_field(s0, true);
    const Vector g1 = gradient_field(s1, true);
    const Vector g2 = gradient_field(s2, true);

    json regions = json::array();
    for (std::size_t k = 0; k < true_cells.size(); ++k) {
        const TrueCellInfo& info = true_cells[k];
        json entry{{"component", k + 1},
                   {"true_cell", json{{"a", info.cell.ia}, {"b", info.cell.ib}}},
                   {"region", info.region},
                   {"feasible_dist", info.feasible_dist}};
        for (const auto& [surf, name] :
             {std::pair<const NormSurface*, const char*>{&s0, "L0"},
              std::pair<const NormSurface*, const char*>{&s1, "L1"},
              std::pair<const NormSurface*, const char*>{&s2, "L2"}}) {
            const CellRef cr = argmin_in_region(grid, *surf, info.region);
            entry[std::string("argmin_sum_") + name] =
                json{{"a", cr.ia},
                     {"b", cr.ib},
                     {"dist_to_true", chebyshev(cr, info.cell)},
                     {"value", surf->sum[grid.index(cr.ia, cr.ib)]}};
        }
        const double m1 = mean_gradient_window(grid, g1, info.cell, 2);
        const double m2 = mean_gradient_window(grid, g2, info.cell, 2);
        entry["mean_scaled_gradient_5x5"] =
            json{{"L1", m1}, {"L2", m2}, {"ratio", m2 > 0.0 ? m1 / m2 : 0.0}};
        entry["l2_argmin_differs"] =
            entry["argmin_sum_L2"]["dist_to_true"].get<int>() >= 3 &&
            entry["argmin_sum_L1"]["dist_to_true"].get<int>() <= 2;
        regions.push_back(entry);
    }

    // x sweep traced at the first component's true cell
    json sweep = json::array();
    for (const auto& frame : frames) {
        const Vector g = gradient_field(frame, true);
        sweep.push_back(json{
            {"x", frame.x_exponent},
            {"near_true_mean_scaled_gradient",
             mean_gradient_window(grid, g, true_cells.front().cell, 2)}});
    }

    json summary{{"scenario", bundle.dataset.scenario},
                 {"factor_hash", hex_hash(grid.factor_hash)},
                 {"x_list", config.x_list},
                 {"zero_tol", config.zero_tol},
                 {"frames", frames.size()},
                 {"regions", regions},
                 {"x_sweep", sweep},
                 {"L0_interior_plateau_fraction", interior_plateau_fraction(grid, g0, 1e-9)}};
    write_text(config.out_dir / "summary.json", summary.dump(2) + "\n");
}

void cmd_mcr(const ExperimentConfig& config) {
    const Dataset ds = build_dataset(config.scenario);
    const int p = ds.n_components();
    std::filesystem::create_directories(config.out_dir);

    const Matrix* provided = config.mcr_init == InitMethod::provided ? &ds.S_true : nullptr;
    const Matrix S0 = initial_estimate(ds.D, p, config.mcr_init, ds.seed, provided);

    std::vector<PenaltySpec> penalties = config.penalties;
    if (penalties.empty()) {
        // default Lasso ladder scaled to the data: the soft threshold acts
        // against correlations of column size ~ max_j ||d_j||^2
        const double lambda_ref = (ds.D.transpose() * ds.D).diagonal().maxCoeff();
        for (double rel : {0.0, 1e-5, 1e-4, 1e-3, 3e-3}) {
            penalties.push_back(PenaltySpec{rel * lambda_ref, 1.0, 1.0});
        }
    }

    json ladder = json::array();
    for (std::size_t i = 0; i < penalties.size(); ++i) {
        McrOptions opts;
        opts.penalty = penalties[i];
        opts.epsilon = config.mcr_epsilon;
        opts.max_iter = config.mcr_max_iter;
        const McrResult res = mcr_als(ds.D, p, S0, opts);

        const std::filesystem::path dir =
            config.out_dir / ("penalty_" + std::to_string(i));
        std::filesystem::create_directories(dir);
        write_csv(dir / "C.csv", res.C);
        write_csv(dir / "S.csv", res.S);
        Matrix trace(static_cast<Eigen::Index>(res.ssq_trace.size()), 2);
        for (std::size_t t = 0; t < res.ssq_trace.size(); ++t) {
            trace(t, 0) = static_cast<double>(t + 1);
            trace(t, 1) = res.ssq_trace[t];
        }
        write_csv(dir / "trace.csv", trace, {"iteration", "ssq"});

        double sum_l1 = 0.0;
        for (int k = 0; k < p; ++k) sum_l1 += res.S.row(k).cwiseAbs().sum();
        const auto cosines = matched_cosines(res.S, ds.S_true);
        const double mean_cos =
            std::accumulate(cosines.begin(), cosines.end(), 0.0) / cosines.size();

        json rj{{"lambda", res.penalty.lambda},
                {"alpha", res.penalty.alpha},
                {"converged", res.converged},
                {"iterations", res.iterations},
                {"final_ssq", res.final_ssq()},
                {"sum_l1_S", sum_l1},
                {"cosine_per_component", cosines},
                {"mean_cosine", mean_cos}};
        write_text(dir / "result.json", rj.dump(2) + "\n");
        rj["dir"] = dir.filename().string();
        ladder.push_back(rj);
    }
    json summary{{"scenario", ds.scenario},
                 {"init",
                  config.mcr_init == InitMethod::random_rows
                      ? "random_rows"
                      : (config.mcr_init == InitMethod::purest_rows ? "purest_rows" : "truth")},
                 {"seed", ds.seed},
                 {"epsilon", config.mcr_epsilon},
                 {"max_iter", config.mcr_max_iter},
                 {"ladder", ladder}};
    write_text(config.out_dir / "mcr_summary.json", summary.dump(2) + "\n");
}

void cmd_all(const ExperimentConfig& config) {
    ExperimentConfig sub = config;
    sub.out_dir = config.out_dir / "dataset";
    cmd_simulate(sub);
    sub.out_dir = config.out_dir / "afs";
    cmd_afs(sub);
    sub.out_dir = config.out_dir / "norms";
    cmd_norms(sub);
    sub.out_dir = config.out_dir / "mcr";
    cmd_mcr(sub);
}

std::vector<TrueCellInfo> locate_true_cells(const AfsGrid& grid, const SvdFactor& factor,
                                            const Matrix& C_true) {
    std::vector<TrueCellInfo> out;
    for (const auto& pt : true_rotation_points(factor, C_true)) {
        TrueCellInfo info;
        info.t = pt;
        info.cell = CellRef{grid.spec.snap_a(pt.first), grid.spec.snap_b(pt.second)};
        const auto [region, dist] = grid.nearest_feasible_region(info.cell.ia, info.cell.ib);
        info.region = region;
        info.feasible_dist = dist;
        out.push_back(info);
    }
    return out;
}

CellRef argmin_in_region(const AfsGrid& grid, const NormSurface& surface, int region) {
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        if (grid.region_of[i] != region) continue;
        const double v = surface.sum[i];
        if (std::isfinite(v) && v < best) {
            best = v;
            best_idx = static_cast<int>(i);
        }
    }
    if (best_idx < 0) throw NumericError("argmin_in_region: region has no feasible cells");
    return CellRef{best_idx % grid.spec.steps_a, best_idx / grid.spec.steps_a};
}

double mean_gradient_window(const AfsGrid& grid, const Vector& gradients, CellRef center,
                            int radius) {
    double acc = 0.0;
    int n = 0;
    for (int db = -radius; db <= radius; ++db) {
        for (int da = -radius; da <= radius; ++da) {
            const int ia = center.ia + da;
            const int ib = center.ib + db;
            if (ia < 0 || ia >= grid.spec.steps_a || ib < 0 || ib >= grid.spec.steps_b) continue;
            const double g = gradients[grid.index(ia, ib)];
            if (std::isfinite(g)) {
                acc += g;
                ++n;
            }
        }
    }
    if (n == 0) throw NumericError("mean_gradient_window: no defined gradients near the cell");
    return acc / n;
}

double interior_plateau_fraction(const AfsGrid& grid, const Vector& gradients, double tol) {
    int interior = 0;
    int flat = 0;
    for (int ib = 1; ib + 1 < grid.spec.steps_b; ++ib) {
        for (int ia = 1; ia + 1 < grid.spec.steps_a; ++ia) {
            if (!grid.at(ia, ib).feasible || !grid.at(ia - 1, ib).feasible ||
                !grid.at(ia + 1, ib).feasible || !grid.at(ia, ib - 1).feasible ||
                !grid.at(ia, ib + 1).feasible) {
                continue;
            }
            ++interior;
            if (gradients[grid.index(ia, ib)] < tol) ++flat;
        }
    }
    if (interior == 0) throw NumericError("interior_plateau_fraction: no interior cells");
    return static_cast<double>(flat) / interior;
}

double twofold_mismatch_fraction(const AfsGrid& grid) {
    if (grid.p != 2) throw ConfigError("twofold_mismatch_fraction: needs a 2-component grid");
    if (grid.region_count != 2) {
        throw NumericError("twofold_mismatch_fraction: expected exactly 2 regions, found " +
                           std::to_string(grid.region_count));
    }
    long total = 0;
    long misses = 0;
    for (int ib = 0; ib < grid.spec.steps_b; ++ib) {
        for (int ia = 0; ia < grid.spec.steps_a; ++ia) {
            const int region = grid.region_of[grid.index(ia, ib)];
            if (region < 0) continue;
            ++total;
            const double t12 = grid.spec.a_at(ia);
            const double t21 = grid.spec.b_at(ib);
            if (t12 == 0.0 || t21 == 0.0) {
                ++misses;
                continue;
            }
            const int ja = grid.spec.snap_a(1.0 / t21);
            const int jb = grid.spec.snap_b(1.0 / t12);
            if (grid.region_of[grid.index(ja, jb)] != 1 - region) ++misses;
        }
    }
    return total > 0 ? static_cast<double>(misses) / total : 1.0;
}

std::vector<double> matched_cosines(const Matrix& S_recovered, const Matrix& S_true) {
    const int p = static_cast<int>(S_true.rows());
    if (S_recovered.rows() != p || S_recovered.cols() != S_true.cols()) {
        throw ConfigError("matched_cosines: shape mismatch");
    }
    Matrix cos(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            const double denom = S_recovered.row(i).norm() * S_true.row(j).norm();
            cos(i, j) = denom > 0.0 ? S_recovered.row(i).dot(S_true.row(j)) / denom : 0.0;
        }
    }
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> best;
    double best_mean = -std::numeric_limits<double>::infinity();
    do {
        double mean = 0.0;
        for (int j = 0; j < p; ++j) mean += cos(perm[j], j);
        if (mean > best_mean) {
            best_mean = mean;
            best.assign(p, 0.0);
            for (int j = 0; j < p; ++j) best[j] = cos(perm[j], j);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace afslab
