#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "capmimo/csv.hpp"
#include "capmimo/errors.hpp"
#include "capmimo/experiments.hpp"
#include "capmimo/models.hpp"
#include "capmimo/physics_kernel.hpp"
#include "capmimo/spectra.hpp"

namespace py = pybind11;
using namespace capmimo;

namespace {

ModelOptions options(std::size_t inner_points) { return ModelOptions{inner_points}; }

}  // namespace

PYBIND11_MODULE(_capmimo, m) {
    m.doc() = "Mutual information of continuous-aperture and discrete line-array transceivers";

    auto base = py::register_exception<Error>(m, "CapmimoError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<NotPsdError>(m, "NotPsdError", base.ptr());
    py::register_exception<NotHermitianError>(m, "NotHermitianError", base.ptr());
    py::register_exception<SnrControlUndefinedError>(m, "SnrControlUndefinedError", base.ptr());

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init([](double wavelength, double aperture, double distance, double power, double noise) {
                 SystemConfig c{wavelength, aperture, distance, power, noise};
                 c.validate();
                 return c;
             }),
             py::arg("wavelength") = 0.04, py::arg("aperture") = 2.0, py::arg("distance") = 10.0,
             py::arg("power") = 1.0, py::arg("noise") = 2.0)
        .def_readwrite("wavelength", &SystemConfig::wavelength)
        .def_readwrite("aperture", &SystemConfig::aperture)
        .def_readwrite("distance", &SystemConfig::distance)
        .def_readwrite("power", &SystemConfig::power)
        .def_readwrite("noise", &SystemConfig::noise)
        .def_property_readonly("wavenumber", &SystemConfig::wavenumber)
        .def("validate", &SystemConfig::validate)
        .def("__repr__", [](const SystemConfig& c) {
            return "SystemConfig(wavelength=" + format_double(c.wavelength) + ", aperture=" +
                   format_double(c.aperture) + ", distance=" + format_double(c.distance) +
                   ", power=" + format_double(c.power) + ", noise=" + format_double(c.noise) + ")";
        });

    m.def("default_inner_points", &default_inner_points, py::arg("cfg"));
    m.def("default_reference_points", &default_reference_points, py::arg("cfg"));
    m.def("green_scalar", &green_scalar, py::arg("r"), py::arg("s"), py::arg("cfg"));
    m.def("kernel_value", &kernel_value, py::arg("r"), py::arg("r_prime"), py::arg("cfg"), py::arg("inner_points"));
    m.def("operator_trace", &operator_trace, py::arg("cfg"), py::arg("outer_points"), py::arg("inner_points"));

    py::class_<QuadratureGrid>(m, "QuadratureGrid")
        .def_readonly("points", &QuadratureGrid::points)
        .def_readonly("length", &QuadratureGrid::length)
        .def_readonly("weight", &QuadratureGrid::weight)
        .def("__len__", &QuadratureGrid::size);
    m.def("midpoint_grid", &midpoint_grid, py::arg("length"), py::arg("m"));

    py::class_<SpectralResult>(m, "SpectralResult")
        .def_readonly("eigenvalues", &SpectralResult::eigenvalues)
        .def_readonly("clamped_count", &SpectralResult::clamped_count)
        .def_readonly("roundoff_zeroed", &SpectralResult::roundoff_zeroed)
        .def_readonly("clamp_floor", &SpectralResult::clamp_floor);

    py::enum_<ModelTag>(m, "ModelTag")
        .value("continuous", ModelTag::continuous)
        .value("discrete_rx", ModelTag::discrete_rx)
        .value("discrete_trx", ModelTag::discrete_trx)
        .value("intermediate_I0p", ModelTag::intermediate_I0p)
        .value("intermediate_I0pp", ModelTag::intermediate_I0pp);

    py::class_<MiResult>(m, "MiResult")
        .def_readonly("value_nats", &MiResult::value_nats)
        .def_property_readonly("value_bits", &MiResult::value_bits)
        .def_readonly("tag", &MiResult::tag)
        .def_readonly("m1", &MiResult::m1)
        .def_readonly("m2", &MiResult::m2)
        .def_readonly("ref_m", &MiResult::ref_m)
        .def_readonly("inner_points", &MiResult::inner_points)
        .def_readonly("noise_used", &MiResult::noise_used)
        .def_readonly("near_field", &MiResult::near_field)
        .def_readonly("spectrum", &MiResult::spectrum);

    py::class_<NoiseControl>(m, "NoiseControl")
        .def_readonly("n_value", &NoiseControl::n_value)
        .def_readonly("limit_value", &NoiseControl::limit_value)
        .def_readonly("gap", &NoiseControl::gap)
        .def_readonly("error_bound", &NoiseControl::error_bound);

    m.def(
        "mi_continuous",
        [](const SystemConfig& cfg, std::size_t ref_m, std::size_t inner) {
            return mi_continuous(cfg, ref_m, options(inner));
        },
        py::arg("cfg"), py::arg("ref_m"), py::arg("inner_points") = 0);
    m.def(
        "mi_discrete_rx",
        [](std::size_t mm, const SystemConfig& cfg, std::size_t inner) {
            return mi_discrete_rx(mm, cfg, options(inner));
        },
        py::arg("m"), py::arg("cfg"), py::arg("inner_points") = 0);
    m.def(
        "mi_discrete_trx",
        [](std::size_t m1, std::size_t m2, const SystemConfig& cfg) { return mi_discrete_trx(m1, m2, cfg); },
        py::arg("m1"), py::arg("m2"), py::arg("cfg"));
    m.def(
        "mi_intermediate",
        [](const std::string& kind, const SystemConfig& cfg, std::size_t ref_m, std::size_t m1, std::size_t m2,
           std::size_t inner) {
            IntermediateKind k;
            if (kind == "I0_prime")
                k = IntermediateKind::I0_prime;
            else if (kind == "I0_double_prime")
                k = IntermediateKind::I0_double_prime;
            else
                throw py::value_error("kind must be 'I0_prime' or 'I0_double_prime'");
            return mi_intermediate(k, cfg, ref_m, m1, m2, options(inner));
        },
        py::arg("kind"), py::arg("cfg"), py::arg("ref_m"), py::arg("m1"), py::arg("m2"), py::arg("inner_points") = 0);
    m.def(
        "noise_rx",
        [](const QuadratureGrid& g, const SystemConfig& cfg, std::size_t inner) {
            return noise_rx(g, cfg, options(inner));
        },
        py::arg("grid"), py::arg("cfg"), py::arg("inner_points") = 0);
    m.def(
        "noise_trx", [](const QuadratureGrid& rx, const QuadratureGrid& tx, const SystemConfig& cfg) {
            return noise_trx(rx, tx, cfg);
        },
        py::arg("rx_grid"), py::arg("tx_grid"), py::arg("cfg"));

    py::class_<DofEstimate>(m, "DofEstimate")
        .def_readonly("eigen_count", &DofEstimate::eigen_count)
        .def_readonly("analytic", &DofEstimate::analytic)
        .def_readonly("threshold_rel", &DofEstimate::threshold_rel)
        .def_readonly("spectrum", &DofEstimate::spectrum);
    m.def(
        "dof_estimate",
        [](const SystemConfig& cfg, std::size_t ref_m, double threshold, std::size_t inner) {
            return dof_estimate(cfg, ref_m, threshold, options(inner));
        },
        py::arg("cfg"), py::arg("ref_m"), py::arg("threshold_rel") = 0.01, py::arg("inner_points") = 0);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("scenario", &SweepRow::scenario)
        .def_readonly("d", &SweepRow::d)
        .def_readonly("m1", &SweepRow::m1)
        .def_readonly("m2", &SweepRow::m2)
        .def_readonly("ref_m", &SweepRow::ref_m)
        .def_readonly("mi_nats", &SweepRow::mi_nats)
        .def_readonly("mi_ref_nats", &SweepRow::mi_ref_nats)
        .def_readonly("abs_gap", &SweepRow::abs_gap)
        .def_readonly("n_used", &SweepRow::n_used)
        .def_readonly("tag", &SweepRow::tag)
        .def_readonly("wall_time_s", &SweepRow::wall_time_s)
        .def_readonly("error", &SweepRow::error)
        .def_property_readonly("mi_bits", &SweepRow::mi_bits);

    py::class_<SlopeFit>(m, "SlopeFit")
        .def_readonly("slope", &SlopeFit::slope)
        .def_readonly("intercept", &SlopeFit::intercept)
        .def_readonly("r_squared", &SlopeFit::r_squared)
        .def_readonly("m_min", &SlopeFit::m_min)
        .def_readonly("m_max", &SlopeFit::m_max)
        .def_readonly("points", &SlopeFit::points);

    auto sweep_opts = [](const std::string& scenario, std::size_t inner, std::size_t threads) {
        SweepOptions o;
        o.scenario = scenario;
        o.model.inner_points = inner;
        o.threads = threads;
        return o;
    };
    m.def(
        "sweep_receiver",
        [sweep_opts](const SystemConfig& cfg, const std::vector<double>& distances,
                     const std::vector<std::size_t>& m_values, std::size_t ref_m, const std::string& scenario,
                     std::size_t inner, std::size_t threads) {
            py::gil_scoped_release release;
            return sweep_receiver(cfg, distances, m_values, ref_m, sweep_opts(scenario, inner, threads));
        },
        py::arg("cfg"), py::arg("distances"), py::arg("m_values"), py::arg("ref_m"), py::arg("scenario") = "default",
        py::arg("inner_points") = 0, py::arg("threads") = 0);
    m.def(
        "sweep_transceiver",
        [sweep_opts](const SystemConfig& cfg, const std::vector<double>& distances,
                     const std::vector<std::size_t>& m_values, std::size_t ref_m, const std::string& scenario,
                     std::size_t inner, std::size_t threads) {
            py::gil_scoped_release release;
            return sweep_transceiver(cfg, distances, m_values, ref_m, sweep_opts(scenario, inner, threads));
        },
        py::arg("cfg"), py::arg("distances"), py::arg("m_values"), py::arg("ref_m"), py::arg("scenario") = "default",
        py::arg("inner_points") = 0, py::arg("threads") = 0);
    m.def("fit_convergence_slope",
          [](const std::vector<SweepRow>& rows) { return fit_convergence_slope(rows); }, py::arg("rows"));
    m.def(
        "sweep_csv",
        [](const std::vector<SweepRow>& rows, bool timing) {
            std::ostringstream s;
            write_sweep_csv(s, rows, CsvOptions{timing});
            return s.str();
        },
        py::arg("rows"), py::arg("timing") = false);
}
