// Python bindings. Sample matrices cross the boundary row-per-sample (m x n),
// the numpy convention; the core stores one column per sample.

#include "pcopt/error.hpp"
#include "pcopt/config.hpp"
#include "pcopt/estimation.hpp"
#include "pcopt/fitting.hpp"
#include "pcopt/meta.hpp"
#include "pcopt/models.hpp"
#include "pcopt/objectives.hpp"
#include "pcopt/optimizer.hpp"
#include "pcopt/schedule.hpp"
#include "pcopt/trace_io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace pcopt;

namespace {

using RowPoints = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

SampleSet to_samples(const RowPoints& x, const Eigen::VectorXd& g, const Eigen::VectorXd& h) {
    return SampleSet(x.transpose(), g, h);
}

RowPoints rows_of(const Eigen::MatrixXd& columns) { return columns.transpose(); }

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    write_aggregate_csv(rows, out);
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Probability-collectives optimization core";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def("objective_names", &objective_names);
    m.def(
        "evaluate",
        [](const std::string& name, const Eigen::VectorXd& x, bool classical_woods) {
            return evaluate_noiseless(make_objective(name, 0.0, classical_woods), x);
        },
        py::arg("name"), py::arg("x"), py::arg("classical_woods") = false,
        "Noiseless objective value at x.");

    py::class_<Gaussian>(m, "Gaussian")
        .def(py::init<Eigen::VectorXd, Eigen::MatrixXd>(), py::arg("mean"), py::arg("covariance"))
        .def_property_readonly("mean", &Gaussian::mean)
        .def_property_readonly("covariance", &Gaussian::covariance)
        .def("density", &Gaussian::density)
        .def("log_density", &Gaussian::log_density);

    py::class_<MixtureModel>(m, "MixtureModel")
        .def(py::init<std::vector<Gaussian>, Eigen::VectorXd>(), py::arg("components"), py::arg("weights"))
        .def(py::init<Gaussian>())
        .def_property_readonly("components", &MixtureModel::components)
        .def_property_readonly("weights", &MixtureModel::weights)
        .def_property_readonly("dimension", &MixtureModel::dimension)
        .def("density", &MixtureModel::density)
        .def("log_density", &MixtureModel::log_density)
        .def(
            "sample",
            [](const MixtureModel& q, Eigen::Index count, std::uint64_t seed) {
                Rng rng(seed);
                const auto draw = draw_samples(q, count, rng);
                return py::make_tuple(rows_of(draw.points), draw.proposal_densities);
            },
            py::arg("count"), py::arg("seed"), "Returns (points m x n, mixture density at each point).")
        .def("serialize", &MixtureModel::serialize)
        .def_static("parse", [](const std::string& text) { return MixtureModel::parse(text); })
        .def("__len__", &MixtureModel::size);

    m.def(
        "boltzmann_weights",
        [](const RowPoints& x, const Eigen::VectorXd& g, const Eigen::VectorXd& h, double beta) {
            return boltzmann_weights(to_samples(x, g, h), beta).normalized();
        },
        py::arg("points"), py::arg("values"), py::arg("densities"), py::arg("beta"),
        "Normalized Boltzmann likelihood ratios.");
    m.def(
        "estimate_expected_G",
        [](const MixtureModel& q, const RowPoints& x, const Eigen::VectorXd& g, const Eigen::VectorXd& h) {
            return estimate_expected_G(q, to_samples(x, g, h));
        },
        py::arg("model"), py::arg("points"), py::arg("values"), py::arg("densities"));
    m.def(
        "bias_variance_decompose",
        [](const std::vector<double>& estimates, double truth) {
            const auto r = bias_variance_decompose(estimates, truth);
            return py::dict(py::arg("bias_squared") = r.bias_squared, py::arg("variance") = r.variance,
                            py::arg("mse") = r.mse);
        },
        py::arg("estimates"), py::arg("true_value"));

    m.def(
        "fit_gaussian",
        [](const RowPoints& x, const Eigen::VectorXd& g, const Eigen::VectorXd& h, double beta) {
            const auto data = to_samples(x, g, h);
            return fit_gaussian_closed_form(data, boltzmann_weights(data, beta));
        },
        py::arg("points"), py::arg("values"), py::arg("densities"), py::arg("beta"),
        "Closed-form Boltzmann-weighted Gaussian fit.");
    m.def(
        "fit_mixture",
        [](const RowPoints& x, const Eigen::VectorXd& g, const Eigen::VectorXd& h, double beta,
           std::size_t components, std::size_t restarts, std::uint64_t seed) {
            const auto data = to_samples(x, g, h);
            EmConfig cfg;
            cfg.components = components;
            cfg.restarts = restarts;
            Rng rng(seed);
            auto report = fit_mixture_em(data, boltzmann_weights(data, beta), cfg, rng);
            return py::make_tuple(std::move(report.model), report.final_weighted_nll, report.nll_traces);
        },
        py::arg("points"), py::arg("values"), py::arg("densities"), py::arg("beta"), py::arg("components"),
        py::arg("restarts") = 4, py::arg("seed") = 1,
        "Weighted EM. Returns (model, final normalized NLL, per-restart NLL traces).");
    m.def(
        "cross_validate_beta",
        [](const RowPoints& x, const Eigen::VectorXd& g, const Eigen::VectorXd& h, double center,
           std::size_t folds, std::uint64_t seed) {
            const auto data = to_samples(x, g, h);
            Rng rng(seed);
            const auto plan = make_folds(data, folds, rng);
            const auto cv = cross_validate_beta(data, center, BetaGrid{}, plan, CvOptions{}, rng);
            return py::make_tuple(cv.chosen(), cv.candidates, cv.mean_scores);
        },
        py::arg("points"), py::arg("values"), py::arg("densities"), py::arg("beta_center"), py::arg("folds") = 5,
        py::arg("seed") = 1, "Returns (chosen beta, candidates, mean held-out scores).");
    m.def(
        "softmin_weights",
        [](const std::vector<double>& scores, std::optional<double> temperature) {
            return softmin_weights(scores, temperature);
        },
        py::arg("scores"), py::arg("temperature") = py::none());

    m.def(
        "run_json",
        [](const std::string& config_json) {
            RunTrace trace;
            {
                py::gil_scoped_release release;
                trace = pc_optimize(parse_config(config_json));
            }
            return trace_to_json(trace);
        },
        py::arg("config_json"), "Runs one optimization; returns the JSON trace.");
    m.def(
        "ensemble_csv",
        [](const std::string& config_json, std::size_t trials, std::size_t threads) {
            EnsembleReport rep;
            {
                py::gil_scoped_release release;
                rep = run_ensemble(parse_config(config_json), trials, threads);
            }
            return aggregate_csv(rep.rows);
        },
        py::arg("config_json"), py::arg("trials"), py::arg("threads") = 1,
        "Runs seeded trials; returns the per-iteration aggregate table as CSV.");
    m.def(
        "fit_geometric_schedule",
        [](const std::vector<double>& t, const std::vector<double>& beta) {
            const auto fit = fit_geometric_schedule(t, beta);
            return py::dict(py::arg("log_linear") = py::make_tuple(fit.log_linear.beta0, fit.log_linear.k_beta),
                            py::arg("nonlinear") = py::make_tuple(fit.nonlinear.beta0, fit.nonlinear.k_beta));
        },
        py::arg("iterations"), py::arg("betas"));
    m.def("update_beta_geometric", &update_beta_geometric, py::arg("beta"), py::arg("k_beta"));
}
