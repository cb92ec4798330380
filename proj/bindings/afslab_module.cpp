#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afslab/afs.hpp"
#include "afslab/experiment.hpp"
#include "afslab/mcr.hpp"
#include "afslab/norms.hpp"
#include "afslab/scenario.hpp"
#include "afslab/simkit.hpp"
#include "afslab/solvers.hpp"

namespace py = pybind11;
using namespace afslab;

namespace {

Matrix grid_matrix(const AfsGrid& grid, const std::function<double(const GridCell&, int)>& get) {
    Matrix m(grid.spec.steps_b, grid.spec.steps_a);
    for (int ib = 0; ib < grid.spec.steps_b; ++ib) {
        for (int ia = 0; ia < grid.spec.steps_a; ++ia) {
            m(ib, ia) = get(grid.at(ia, ib), grid.index(ia, ib));
        }
    }
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "afslab: bilinear LC/GC-MS simulation, AFS mapping, L_x-norm "
              "surfaces and penalized MCR-ALS";

    py::register_exception<ConfigError>(m, "AfsLabConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "AfsLabNumericError", PyExc_RuntimeError);

    // --- simkit ---
    py::class_<EmgParams>(m, "EmgParams")
        .def(py::init([](double amplitude, double center, double sigma, double tau) {
                 return EmgParams{amplitude, center, sigma, tau};
             }),
             py::arg("amplitude"), py::arg("center"), py::arg("sigma"), py::arg("tau") = 0.0)
        .def_readwrite("amplitude", &EmgParams::amplitude)
        .def_readwrite("center", &EmgParams::center)
        .def_readwrite("sigma", &EmgParams::sigma)
        .def_readwrite("tau", &EmgParams::tau);
    m.def("emg_peak", &emg_peak, py::arg("t"), py::arg("params"));

    py::class_<SpectrumSpec>(m, "SpectrumSpec")
        .def(py::init([](int n_channels, std::vector<std::pair<int, double>> peaks) {
                 return SpectrumSpec{n_channels, std::move(peaks)};
             }),
             py::arg("n_channels"), py::arg("peaks"));
    m.def("make_spectrum", &make_spectrum, py::arg("spec"));

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("D", &Dataset::D)
        .def_readonly("C_true", &Dataset::C_true)
        .def_readonly("S_true", &Dataset::S_true)
        .def_readonly("noise_sigma", &Dataset::noise_sigma)
        .def_readonly("seed", &Dataset::seed)
        .def_readonly("scenario", &Dataset::scenario)
        .def_property_readonly("n_components", &Dataset::n_components);
    m.def(
        "assemble_dataset",
        [](const std::vector<Vector>& elutions, const std::vector<Vector>& spectra,
           double noise_sigma, std::uint64_t seed, const std::string& tag) {
            return assemble_dataset(elutions, spectra, noise_sigma, seed, tag);
        },
        py::arg("elutions"), py::arg("spectra"), py::arg("noise_sigma") = 0.0,
        py::arg("seed") = 1, py::arg("tag") = "custom");
    m.def(
        "scenario_dataset",
        [](const std::string& name) { return build_dataset(canned_scenario(scenario_from_string(name))); },
        py::arg("name"), "Build one of the canned datasets by scenario name.");

    // --- factor ---
    py::class_<SvdFactor>(m, "SvdFactor")
        .def_readonly("scores", &SvdFactor::scores)
        .def_readonly("loadings", &SvdFactor::loadings)
        .def_readonly("p", &SvdFactor::p)
        .def_readonly("truncation_ssq", &SvdFactor::truncation_ssq);
    m.def("truncated_svd", &truncated_svd, py::arg("D"), py::arg("p"));
    m.def(
        "realize_T",
        [](int p, const std::vector<double>& params) {
            if (p == 2 && params.size() == 2) {
                return realize_T(RotationSpec::two(params[0], params[1]));
            }
            if (p == 3 && params.size() == 6) {
                return realize_T(RotationSpec::three(params[0], params[1], params[2], params[3],
                                                     params[4], params[5]));
            }
            throw ConfigError("realize_T: p=2 needs (t12, t21); p=3 needs six parameters");
        },
        py::arg("p"), py::arg("params"));
    m.def(
        "rotate",
        [](const SvdFactor& f, const Matrix& T) {
            const RotatedPair pair = rotate(f, T);
            return py::make_tuple(pair.C, pair.S);
        },
        py::arg("factor"), py::arg("T"));
    m.def("ssq", &ssq, py::arg("a"), py::arg("b"));

    // --- solvers ---
    py::class_<PenaltySpec>(m, "PenaltySpec")
        .def(py::init([](double lambda, double alpha, double x_exponent) {
                 PenaltySpec p{lambda, alpha, x_exponent};
                 p.validate();
                 return p;
             }),
             py::arg("lambda_") = 0.0, py::arg("alpha") = 1.0, py::arg("x_exponent") = 1.0)
        .def_readwrite("lambda_", &PenaltySpec::lambda)
        .def_readwrite("alpha", &PenaltySpec::alpha)
        .def_readwrite("x_exponent", &PenaltySpec::x_exponent);

    m.def(
        "ols", [](const Matrix& A, const Matrix& B) { return ols(A, B).X; }, py::arg("A"),
        py::arg("B"));
    m.def("nnls", &nnls, py::arg("A"), py::arg("b"));
    m.def(
        "elastic_net",
        [](const Matrix& A, const Vector& b, const PenaltySpec& penalty, bool nonneg) {
            const auto res = elastic_net(A, b, penalty, nonneg);
            return py::make_tuple(res.x, res.converged);
        },
        py::arg("A"), py::arg("b"), py::arg("penalty"), py::arg("nonneg") = false);

    py::class_<SimplexOptions>(m, "SimplexOptions")
        .def(py::init<>())
        .def_readwrite("max_iter", &SimplexOptions::max_iter)
        .def_readwrite("x_tol", &SimplexOptions::x_tol)
        .def_readwrite("f_tol", &SimplexOptions::f_tol)
        .def_readwrite("restarts", &SimplexOptions::restarts)
        .def_readwrite("seed", &SimplexOptions::seed);
    m.def(
        "nelder_mead",
        [](const std::function<double(const Vector&)>& f, const Vector& x0,
           const SimplexOptions& opts) {
            const SimplexResult res = nelder_mead(f, x0, opts);
            return py::make_tuple(res.x, res.f, res.converged);
        },
        py::arg("f"), py::arg("x0"), py::arg("opts") = SimplexOptions{});

    // --- mcr ---
    py::enum_<InitMethod>(m, "InitMethod")
        .value("purest_rows", InitMethod::purest_rows)
        .value("random_rows", InitMethod::random_rows)
        .value("provided", InitMethod::provided);
    m.def(
        "initial_estimate",
        [](const Matrix& D, int p, InitMethod method, std::uint64_t seed,
           std::optional<Matrix> provided) {
            return initial_estimate(D, p, method, seed, provided ? &*provided : nullptr);
        },
        py::arg("D"), py::arg("p"), py::arg("method"), py::arg("seed") = 0,
        py::arg("provided") = std::nullopt);

    py::class_<McrResult>(m, "McrResult")
        .def_readonly("C", &McrResult::C)
        .def_readonly("S", &McrResult::S)
        .def_readonly("ssq_trace", &McrResult::ssq_trace)
        .def_readonly("converged", &McrResult::converged)
        .def_readonly("iterations", &McrResult::iterations)
        .def_property_readonly("final_ssq", &McrResult::final_ssq);
    m.def(
        "mcr_als",
        [](const Matrix& D, int p, const Matrix& S0, const PenaltySpec& penalty, double epsilon,
           int max_iter) {
            McrOptions opts;
            opts.penalty = penalty;
            opts.epsilon = epsilon;
            opts.max_iter = max_iter;
            return mcr_als(D, p, S0, opts);
        },
        py::arg("D"), py::arg("p"), py::arg("S0"), py::arg("penalty") = PenaltySpec{},
        py::arg("epsilon") = 1e-8, py::arg("max_iter") = 500);

    // --- afs ---
    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_readwrite("a_min", &GridSpec::a_min)
        .def_readwrite("a_max", &GridSpec::a_max)
        .def_readwrite("b_min", &GridSpec::b_min)
        .def_readwrite("b_max", &GridSpec::b_max)
        .def_readwrite("steps_a", &GridSpec::steps_a)
        .def_readwrite("steps_b", &GridSpec::steps_b)
        .def_readwrite("feas_tol", &GridSpec::feas_tol);

    py::class_<AfsGrid>(m, "AfsGrid")
        .def_readonly("spec", &AfsGrid::spec)
        .def_readonly("p", &AfsGrid::p)
        .def_readonly("region_count", &AfsGrid::region_count)
        .def_readonly("region_sizes", &AfsGrid::region_sizes)
        .def_property_readonly("n_feasible", &AfsGrid::n_feasible)
        .def_property_readonly("log_ssq",
                               [](const AfsGrid& g) {
                                   return grid_matrix(
                                       g, [](const GridCell& c, int) { return c.log_ssq; });
                               })
        .def_property_readonly("feasible",
                               [](const AfsGrid& g) {
                                   return grid_matrix(g, [](const GridCell& c, int) {
                                       return c.feasible ? 1.0 : 0.0;
                                   });
                               })
        .def_property_readonly("regions",
                               [](const AfsGrid& g) {
                                   return grid_matrix(g, [&g](const GridCell&, int idx) {
                                       return static_cast<double>(g.region_of[idx]);
                                   });
                               })
        .def("spectra_at", [](const AfsGrid& g, int ia, int ib) {
            const GridCell& cell = g.at(ia, ib);
            if (!cell.feasible) throw NumericError("cell is not feasible");
            return cell.S_rows;
        });

    m.def("feasibility", &feasibility, py::arg("C_hat"), py::arg("S_hat"), py::arg("tol"));
    m.def("afs_grid_2comp", &afs_grid_2comp, py::arg("factor"), py::arg("grid"),
          py::arg("threads") = 1);
    m.def("afs_grid_3comp", &afs_grid_3comp, py::arg("factor"), py::arg("grid"), py::arg("opts"),
          py::arg("threads") = 1);
    m.def("true_rotation_points", &true_rotation_points, py::arg("factor"), py::arg("C_true"));
    m.def("auto_grid_bounds", &auto_grid_bounds, py::arg("factor"), py::arg("C_true"),
          py::arg("steps"), py::arg("feas_tol") = 1e-6, py::arg("opts") = SimplexOptions{},
          py::arg("threads") = 1);

    // --- norms ---
    m.def("lx_norm", &lx_norm, py::arg("v"), py::arg("x"), py::arg("zero_tol") = 1e-6);
    py::class_<NormSurface>(m, "NormSurface")
        .def_readonly("x_exponent", &NormSurface::x_exponent)
        .def_readonly("p", &NormSurface::p)
        .def_property_readonly("sum",
                               [](const NormSurface& s) {
                                   Matrix m2(s.spec.steps_b, s.spec.steps_a);
                                   for (int ib = 0; ib < s.spec.steps_b; ++ib)
                                       for (int ia = 0; ia < s.spec.steps_a; ++ia)
                                           m2(ib, ia) = s.sum[s.index(ia, ib)];
                                   return m2;
                               })
        .def_property_readonly("scaled", [](const NormSurface& s) {
            Matrix m2(s.spec.steps_b, s.spec.steps_a);
            for (int ib = 0; ib < s.spec.steps_b; ++ib)
                for (int ia = 0; ia < s.spec.steps_a; ++ia) m2(ib, ia) = s.scaled[s.index(ia, ib)];
            return m2;
        });
    m.def("norm_surface", &norm_surface, py::arg("grid"), py::arg("x"),
          py::arg("zero_tol") = 1e-6);
    m.def("sweep_x", &sweep_x, py::arg("grid"), py::arg("xs"), py::arg("zero_tol") = 1e-6);
}
