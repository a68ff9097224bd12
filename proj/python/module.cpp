#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qlink/config.hpp"
#include "qlink/converter.hpp"
#include "qlink/link_protocol.hpp"
#include "qlink/photonics.hpp"
#include "qlink/rng.hpp"
#include "qlink/spin_node.hpp"
#include "qlink/tradespace.hpp"
#include "qlink/units.hpp"

namespace py = pybind11;
using namespace qlink;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Telecom quantum-network link simulator core";

    m.attr("SPEED_OF_LIGHT_NM_THZ") = kSpeedOfLightNmThz;
    m.def("frequency_thz", &frequency_thz, py::arg("wavelength_nm"));
    m.def("wavelength_nm", &wavelength_nm, py::arg("frequency_thz"));

    py::enum_<Regime>(m, "Regime")
        .value("AntiStokes", Regime::AntiStokes)
        .value("Stokes", Regime::Stokes)
        .value("Boundary", Regime::Boundary);

    py::class_<GainBand>(m, "GainBand")
        .def(py::init([](std::string name, double lo, double hi) {
                 return GainBand{std::move(name), lo, hi};
             }),
             py::arg("name"), py::arg("min_nm"), py::arg("max_nm"))
        .def_readonly("name", &GainBand::name)
        .def_readonly("min_nm", &GainBand::min_nm)
        .def_readonly("max_nm", &GainBand::max_nm);

    py::class_<ConversionScheme>(m, "ConversionScheme")
        .def_readonly("memory_nm", &ConversionScheme::memory_nm)
        .def_readonly("target_nm", &ConversionScheme::target_nm)
        .def_readonly("pump_nm", &ConversionScheme::pump_nm)
        .def_readonly("regime", &ConversionScheme::regime)
        .def_readonly("pump_target_separation_thz",
                      &ConversionScheme::pump_target_separation_thz)
        .def_readonly("low_noise", &ConversionScheme::low_noise);

    m.def("plan_single_pump", &plan_single_pump, py::arg("memory_nm"), py::arg("target_nm"));
    m.def("plan_two_pump", &plan_two_pump, py::arg("memory_nm"), py::arg("target_nm"),
          py::arg("pump1_nm"));
    m.def("default_gain_bands", &default_gain_bands);
    m.def("feasible_pumps", &feasible_pumps, py::arg("scheme"), py::arg("bands"));

    py::class_<PhaseMatchCurve>(m, "PhaseMatchCurve")
        .def(py::init<>())
        .def_readwrite("peak_pump_nm", &PhaseMatchCurve::peak_pump_nm)
        .def_readwrite("ref_temp_c", &PhaseMatchCurve::ref_temp_c)
        .def_readwrite("temp_slope_nm_per_c", &PhaseMatchCurve::temp_slope_nm_per_c)
        .def_readwrite("fwhm_nm", &PhaseMatchCurve::fwhm_nm);

    py::class_<ConverterModel>(m, "ConverterModel")
        .def(py::init<>())
        .def_readwrite("eta_opt", &ConverterModel::eta_opt)
        .def_readwrite("eta_int", &ConverterModel::eta_int)
        .def_readwrite("eta0_w_m2", &ConverterModel::eta0_w_m2)
        .def_readwrite("length_m", &ConverterModel::length_m)
        .def_readwrite("phase_match", &ConverterModel::phase_match);

    m.def("downconverter_defaults", &downconverter_defaults);
    m.def("upconverter_defaults", &upconverter_defaults);
    m.def("external_efficiency", &external_efficiency, py::arg("model"),
          py::arg("pump_power_mw"));
    m.def("optimal_pump_power_mw", &optimal_pump_power_mw, py::arg("model"));
    m.def("noise_rate_hz", &noise_rate_hz, py::arg("model"), py::arg("pump_power_mw"));
    m.def("noise_spectral_density", &noise_spectral_density, py::arg("model"),
          py::arg("pump_power_mw"));
    m.def("phase_match_transfer", &phase_match_transfer, py::arg("curve"), py::arg("pump_nm"),
          py::arg("temp_c"));

    py::class_<SpinCavityModel>(m, "SpinCavityModel")
        .def(py::init<>())
        .def_readwrite("lambda_up", &SpinCavityModel::lambda_up)
        .def_readwrite("lambda_down", &SpinCavityModel::lambda_down)
        .def_readwrite("threshold", &SpinCavityModel::threshold)
        .def_readwrite("init_fidelity", &SpinCavityModel::init_fidelity)
        .def_readwrite("pi_pulse_fidelity", &SpinCavityModel::pi_pulse_fidelity)
        .def_readwrite("pi_pulses_per_transfer", &SpinCavityModel::pi_pulses_per_transfer)
        .def_readwrite("reflect_up", &SpinCavityModel::reflect_up)
        .def_readwrite("reflect_down", &SpinCavityModel::reflect_down);

    m.def("readout_error_analytic", &readout_error_analytic, py::arg("model"));
    m.def("sequence_fidelity", &sequence_fidelity, py::arg("model"), py::arg("n_pi_pulses"));
    m.def("transfer_fidelity_analytic", &transfer_fidelity_analytic, py::arg("model"));
    m.def(
        "transfer_fidelity",
        [](const SpinCavityModel& model, int trials_per_state, std::uint64_t seed) {
            const FidelityResult r = transfer_fidelity(model, trials_per_state, seed);
            return py::make_tuple(r.fidelity, r.sigma, r.heralds);
        },
        py::arg("model"), py::arg("trials_per_state"), py::arg("seed"));

    py::class_<SourceModel>(m, "SourceModel")
        .def(py::init<>())
        .def_readwrite("repetition_rate_hz", &SourceModel::repetition_rate_hz)
        .def_readwrite("emission", &SourceModel::emission)
        .def_readwrite("window_ns", &SourceModel::window_ns)
        .def_readwrite("shape_width_ns", &SourceModel::shape_width_ns)
        .def_readwrite("indistinguishability", &SourceModel::indistinguishability);

    py::class_<DetectorModel>(m, "DetectorModel")
        .def(py::init<>())
        .def_readwrite("efficiency", &DetectorModel::efficiency)
        .def_readwrite("dark_rate_hz", &DetectorModel::dark_rate_hz);

    m.def(
        "hbt_g2_run",
        [](const SourceModel& source, double noise_pump_mw, double channel_loss_db,
           const DetectorModel& detector, double duration_s, std::uint64_t seed) {
            ConverterOperatingPoint op{downconverter_defaults(), noise_pump_mw};
            const EventStream stream =
                simulate_stream(source, op, channel_loss_db, detector, duration_s, seed);
            const auto [a, b] = split_balanced(stream, splitmix64(seed));
            const CorrelationResult r =
                hbt_g2(a, b, source.trigger_period_ns(), source.window_ns);
            return py::make_tuple(r.g2_zero, r.g2_zero_sigma, r.low_confidence);
        },
        "Simulate a converted stream, split it, and estimate g2(0)",
        py::arg("source"), py::arg("noise_pump_mw"), py::arg("channel_loss_db"),
        py::arg("detector"), py::arg("duration_s"), py::arg("seed"));
}
