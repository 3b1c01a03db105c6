#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rgr/config.hpp"
#include "rgr/datagen.hpp"
#include "rgr/forecast.hpp"
#include "rgr/io.hpp"
#include "rgr/lowrank.hpp"
#include "rgr/mapping.hpp"
#include "rgr/registration.hpp"
#include "rgr/runner.hpp"

namespace py = pybind11;
using namespace rgr;

PYBIND11_MODULE(_rgr, m) {
    m.doc() = "Registration-based dimensionality reduction on low-rank moving grids";

    py::register_exception<InvalidDataError>(m, "InvalidDataError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

    // ----- low-rank ------------------------------------------------------
    py::class_<LowRankFactors>(m, "LowRankFactors")
        .def_readonly("left", &LowRankFactors::left)
        .def_readonly("right", &LowRankFactors::right)
        .def_readonly("singular_values", &LowRankFactors::singular_values)
        .def_readonly("rank", &LowRankFactors::rank);
    m.def("truncated_svd", &truncated_svd, py::arg("m"), py::arg("k"));
    m.def("reconstruct", &reconstruct, py::arg("factors"));
    m.def("frobenius_error", &frobenius_error, py::arg("a"), py::arg("b"),
          py::arg("relative") = false);
    m.def("singular_values", &singular_values, py::arg("m"));

    // ----- grids ---------------------------------------------------------
    py::class_<ReferenceGrid>(m, "ReferenceGrid")
        .def_readonly("dim", &ReferenceGrid::dim)
        .def_property_readonly("num_nodes",
                               [](const ReferenceGrid& g) { return g.num_nodes(); })
        .def("axis", [](const ReferenceGrid& g, int a) { return g.axis.at(a); }, py::arg("a"))
        .def("coords", &ReferenceGrid::coords)
        .def_static("uniform_1d", &ReferenceGrid::uniform_1d, py::arg("a"), py::arg("b"),
                    py::arg("n"))
        .def_static("uniform_2d", &ReferenceGrid::uniform_2d, py::arg("ax"), py::arg("bx"),
                    py::arg("nx"), py::arg("ay"), py::arg("by"), py::arg("ny"));

    py::class_<VolumeReport>(m, "VolumeReport")
        .def_readonly("passed", &VolumeReport::passed)
        .def_readonly("global_min", &VolumeReport::global_min)
        .def_readonly("per_step_min", &VolumeReport::per_step_min);

    py::class_<MovingGrid>(m, "MovingGrid")
        .def_readonly("reference", &MovingGrid::reference)
        .def_readonly("rank", &MovingGrid::rank)
        .def_readonly("num_steps", &MovingGrid::num_steps)
        .def_readonly("basis", &MovingGrid::basis)
        .def_readonly("coeffs", &MovingGrid::coeffs)
        .def_property_readonly("num_control_steps",
                               [](const MovingGrid& g) { return g.num_control_steps(); })
        .def("assemble", &MovingGrid::assemble, py::arg("n"));
    m.def("init_from_reference", &init_from_reference, py::arg("ref"), py::arg("rank"),
          py::arg("num_steps"), py::arg("perturb_scale") = 0.0, py::arg("seed") = 0,
          py::arg("control_counts") = std::vector<int>{}, py::arg("control_steps") = 0,
          py::arg("upsample_degree") = 3, py::arg("boundary_pinned") = true);
    m.def("cell_volumes", &cell_volumes, py::arg("coords"), py::arg("ref"));
    m.def("validate_diffeomorphism", &validate_diffeomorphism, py::arg("grid"), py::arg("v_min"));

    // ----- mapping -------------------------------------------------------
    m.def(
        "map_forward",
        [](const Matrix& mm, const MovingGrid& g, int degree) {
            return map_forward(mm, g, InterpConfig{degree});
        },
        py::arg("m"), py::arg("grid"), py::arg("degree") = 1);
    m.def(
        "map_inverse",
        [](const Matrix& latent, const MovingGrid& g, int degree) {
            return map_inverse(latent, g, InterpConfig{degree});
        },
        py::arg("latent"), py::arg("grid"), py::arg("degree") = 1);
    m.def("second_difference", &second_difference, py::arg("n"), py::arg("scale"));

    // ----- data generation -----------------------------------------------
    py::class_<PdeRunConfig>(m, "PdeRunConfig")
        .def(py::init<>())
        .def_readwrite("x_min", &PdeRunConfig::x_min)
        .def_readwrite("x_max", &PdeRunConfig::x_max)
        .def_readwrite("final_time", &PdeRunConfig::final_time)
        .def_readwrite("dx", &PdeRunConfig::dx)
        .def_readwrite("dt", &PdeRunConfig::dt)
        .def_readwrite("reynolds", &PdeRunConfig::reynolds)
        .def_readwrite("snapshot_stride", &PdeRunConfig::snapshot_stride)
        .def_readwrite("ic_shape", &PdeRunConfig::ic_shape)
        .def_readwrite("ic_offset", &PdeRunConfig::ic_offset)
        .def_readwrite("ic_amplitude", &PdeRunConfig::ic_amplitude)
        .def_readwrite("ic_center", &PdeRunConfig::ic_center)
        .def_readwrite("ic_width", &PdeRunConfig::ic_width)
        .def_readwrite("ic_mode", &PdeRunConfig::ic_mode);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("snapshots", &Dataset::snapshots)
        .def_readonly("reference", &Dataset::reference)
        .def_readonly("times", &Dataset::times);

    py::class_<AdvectionOracle>(m, "AdvectionOracle")
        .def_readonly("data", &AdvectionOracle::data)
        .def_readonly("true_grid", &AdvectionOracle::true_grid);

    m.def("rotated_glyph", &rotated_glyph, py::arg("size"), py::arg("total_degrees"),
          py::arg("increment"), py::arg("glyph") = "A");
    m.def("burgers_solve", &burgers_solve, py::arg("cfg"));
    m.def("wave_solve", &wave_solve, py::arg("cfg"));
    m.def("advecting_gaussian", &advecting_gaussian, py::arg("speed"), py::arg("cfg"),
          py::arg("num_steps"));

    // ----- registration --------------------------------------------------
    py::class_<RegistrationProblem>(m, "RegistrationProblem")
        .def(py::init<>())
        .def_readwrite("snapshots", &RegistrationProblem::snapshots)
        .def_readwrite("reference", &RegistrationProblem::reference)
        .def_readwrite("grid_rank", &RegistrationProblem::grid_rank)
        .def_readwrite("latent_rank", &RegistrationProblem::latent_rank)
        .def_readwrite("gamma1", &RegistrationProblem::gamma1)
        .def_readwrite("gamma2", &RegistrationProblem::gamma2)
        .def_readwrite("v_min", &RegistrationProblem::v_min)
        .def_readwrite("boundary_pinned", &RegistrationProblem::boundary_pinned)
        .def_readwrite("control_counts", &RegistrationProblem::control_counts)
        .def_readwrite("control_steps", &RegistrationProblem::control_steps)
        .def_property(
            "interp_degree",
            [](const RegistrationProblem& p) { return p.interp.degree; },
            [](RegistrationProblem& p, int d) { p.interp.degree = d; })
        .def_readwrite("max_iters", &RegistrationProblem::max_iters)
        .def_readwrite("perturb_scale", &RegistrationProblem::perturb_scale)
        .def_readwrite("seed", &RegistrationProblem::seed)
        .def_readwrite("threads", &RegistrationProblem::threads);

    py::class_<ObjectiveParts>(m, "ObjectiveParts")
        .def_readonly("total", &ObjectiveParts::total)
        .def_readonly("data", &ObjectiveParts::data)
        .def_readonly("reg1", &ObjectiveParts::reg1)
        .def_readonly("reg2", &ObjectiveParts::reg2)
        .def_readonly("penalty", &ObjectiveParts::penalty)
        .def_readonly("min_volume", &ObjectiveParts::min_volume);

    py::class_<RegistrationResult>(m, "RegistrationResult")
        .def_readonly("grid", &RegistrationResult::grid)
        .def_readonly("latent", &RegistrationResult::latent)
        .def_readonly("trace", &RegistrationResult::trace)
        .def_readonly("data_error", &RegistrationResult::data_error)
        .def_readonly("data_error_rel", &RegistrationResult::data_error_rel)
        .def_readonly("volumes", &RegistrationResult::volumes)
        .def_readonly("iterations", &RegistrationResult::iterations)
        .def_readonly("converged", &RegistrationResult::converged);

    m.def("initialize_grid", &initialize_grid, py::arg("problem"));
    m.def(
        "evaluate_objective",
        [](const RegistrationProblem& p, const MovingGrid& g) {
            return evaluate_objective(p, g);
        },
        py::arg("problem"), py::arg("grid"));
    m.def("train", &train, py::arg("problem"), py::call_guard<py::gil_scoped_release>());

    // ----- forecasting ---------------------------------------------------
    py::class_<LatentSeries>(m, "LatentSeries")
        .def(py::init<>())
        .def_readwrite("coords", &LatentSeries::coords)
        .def_readwrite("times", &LatentSeries::times);

    py::class_<ArModel>(m, "ArModel")
        .def_readonly("order", &ArModel::order)
        .def_readonly("coeff", &ArModel::coeff)
        .def_readonly("bias", &ArModel::bias)
        .def_readonly("fit_residual", &ArModel::fit_residual);

    m.def("extend_grid", &extend_grid, py::arg("grid"), py::arg("extra_steps"),
          py::arg("v_min") = 0.0);
    m.def("fit_ar", &fit_ar, py::arg("series"), py::arg("order"), py::arg("ridge"));
    m.def("predict", &predict, py::arg("model"), py::arg("series"), py::arg("horizon"));
    m.def(
        "reconstruct_prediction",
        [](const MovingGrid& g_ext, const Matrix& left, const LatentSeries& pred, int first_step,
           int degree) {
            return reconstruct_prediction(g_ext, left, pred, first_step, InterpConfig{degree});
        },
        py::arg("grid_ext"), py::arg("left_factor"), py::arg("prediction"),
        py::arg("first_step"), py::arg("degree") = 1);

    // ----- persistence and pipeline --------------------------------------
    m.def("read_matrix", &read_matrix, py::arg("path"));
    m.def("write_matrix", &write_matrix, py::arg("path"), py::arg("m"));
    m.def(
        "run_experiment",
        [](const std::string& config_path, const std::string& out_dir, int threads, bool quiet) {
            Runner r;
            r.cfg = load_config(config_path);
            r.out_dir = out_dir.empty() ? r.cfg.output_dir : out_dir;
            r.threads = threads;
            r.quiet = quiet;
            {
                py::gil_scoped_release release;
                r.run_all();
            }
            return r.out_dir;
        },
        py::arg("config_path"), py::arg("out_dir") = "", py::arg("threads") = 0,
        py::arg("quiet") = true,
        "Run generate/train/evaluate/forecast for a config file; returns the output directory.");
}
