#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fcldvr/analysis.hpp"
#include "fcldvr/circuit_model.hpp"
#include "fcldvr/design_toolkit.hpp"
#include "fcldvr/errors.hpp"
#include "fcldvr/scenario_io.hpp"
#include "fcldvr/transient_sim.hpp"

namespace py = pybind11;
using namespace fcldvr;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Transient simulator and design toolkit for a series-transformer "
              "fault current limiter / sag compensator";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    // ---- circuit model -------------------------------------------------
    py::class_<GridParams>(m, "GridParams")
        .def(py::init<>())
        .def_readwrite("v_source_rms", &GridParams::v_source_rms)
        .def_readwrite("frequency", &GridParams::frequency)
        .def_readwrite("r_source_line", &GridParams::r_source_line)
        .def_readwrite("l_source_line", &GridParams::l_source_line)
        .def_readwrite("r_load", &GridParams::r_load)
        .def_readwrite("l_load", &GridParams::l_load)
        .def("omega", &GridParams::omega)
        .def("v_peak", &GridParams::v_peak)
        .def("validate", &GridParams::validate);

    py::class_<TransformerParams>(m, "TransformerParams")
        .def(py::init<>())
        .def_readwrite("turns_ratio_a", &TransformerParams::turns_ratio_a)
        .def_readwrite("l_magnetizing", &TransformerParams::l_magnetizing)
        .def_readwrite("l_leakage", &TransformerParams::l_leakage)
        .def_readwrite("r_primary", &TransformerParams::r_primary)
        .def_readwrite("r_secondary_referred", &TransformerParams::r_secondary_referred)
        .def_readwrite("p_core", &TransformerParams::p_core)
        .def_readwrite("c_filter", &TransformerParams::c_filter)
        .def("validate", &TransformerParams::validate);

    py::class_<SwitchParams>(m, "SwitchParams")
        .def(py::init<>())
        .def_readwrite("v_ces", &SwitchParams::v_ces)
        .def_readwrite("v_on_drop", &SwitchParams::v_on_drop)
        .def_readwrite("v_dc", &SwitchParams::v_dc)
        .def("validate", &SwitchParams::validate);

    py::class_<PhasorImpedance>(m, "PhasorImpedance")
        .def(py::init<double, double>(), py::arg("resistance"), py::arg("reactance"))
        .def_readwrite("resistance", &PhasorImpedance::resistance)
        .def_readwrite("reactance", &PhasorImpedance::reactance)
        .def("magnitude", &PhasorImpedance::magnitude)
        .def("phase", &PhasorImpedance::phase);

    m.def("total_impedance", &total_impedance,
          py::arg("resistance"), py::arg("inductance"), py::arg("omega"));
    m.def("normal_mode_current", &normal_mode_current,
          py::arg("t"), py::arg("grid"), py::arg("transformer"));
    m.def("fault_mode_current", &fault_mode_current,
          py::arg("t"), py::arg("fault_time"), py::arg("grid"), py::arg("transformer"),
          py::arg("continuity_current") = std::nullopt);
    m.def("pcc_voltage_normal", &pcc_voltage_normal,
          py::arg("z_load"), py::arg("z_source"), py::arg("z_leak"), py::arg("v_rms"));
    m.def("pcc_voltage_fault", &pcc_voltage_fault,
          py::arg("z_line"), py::arg("z_fcl"), py::arg("z_source"), py::arg("z_leak"),
          py::arg("v_rms"));

    // ---- design toolkit ------------------------------------------------
    py::class_<FaultLimitSpec>(m, "FaultLimitSpec")
        .def(py::init<>())
        .def_readwrite("lambda_i", &FaultLimitSpec::lambda_i)
        .def_readwrite("load_va", &FaultLimitSpec::load_va)
        .def_readwrite("sag_ratio_lambda_v", &FaultLimitSpec::sag_ratio_lambda_v);

    py::enum_<StressCase>(m, "StressCase")
        .value("FaultPositiveHalf", StressCase::FaultPositiveHalf)
        .value("FaultNegativeHalf", StressCase::FaultNegativeHalf)
        .value("Compensation", StressCase::Compensation);

    py::class_<DesignReport>(m, "DesignReport")
        .def(py::init<>())
        .def_readwrite("rated_current", &DesignReport::rated_current)
        .def_readwrite("l_m_max", &DesignReport::l_m_max)
        .def_readwrite("dc_link_max", &DesignReport::dc_link_max)
        .def_readwrite("turns_ratio", &DesignReport::turns_ratio)
        .def_readwrite("series_ratio_k", &DesignReport::series_ratio_k)
        .def_readwrite("transformer_va", &DesignReport::transformer_va)
        .def_readwrite("stress_fault_pos", &DesignReport::stress_fault_pos)
        .def_readwrite("stress_fault_neg", &DesignReport::stress_fault_neg)
        .def_readwrite("stress_compensation", &DesignReport::stress_compensation)
        .def("validate", &DesignReport::validate);

    m.def("rated_load_current", &rated_load_current,
          py::arg("load_va"), py::arg("v_line_rms"));
    m.def("size_magnetizing_inductance", &size_magnetizing_inductance,
          py::arg("v_line_rms"), py::arg("omega"), py::arg("lambda_i"),
          py::arg("i_rated_rms"));
    m.def("dc_link_limit", &dc_link_limit, py::arg("v_ces"));
    m.def("turns_ratio_for_sag", &turns_ratio_for_sag,
          py::arg("lambda_v"), py::arg("v_line_rms"), py::arg("v_ac_inv_rms"));
    m.def("series_transformer_ratio", &series_transformer_ratio,
          py::arg("v_line_rms"), py::arg("lambda_i"), py::arg("i_rated_rms"),
          py::arg("omega"), py::arg("l_secondary"));
    m.def("transformer_capacity", &transformer_capacity,
          py::arg("lambda_i"), py::arg("i_rated_rms"), py::arg("v_line_rms"));
    m.def("switch_stress", &switch_stress,
          py::arg("stress_case"), py::arg("lambda_v"), py::arg("v_line_peak"),
          py::arg("turns_ratio_a"), py::arg("v_dc"));
    m.def("build_design_report", &build_design_report,
          py::arg("spec"), py::arg("v_line_rms"), py::arg("omega"),
          py::arg("v_ac_inv_rms"), py::arg("v_ces"), py::arg("l_secondary"),
          py::arg("v_dc"));

    // ---- transient simulation ------------------------------------------
    py::enum_<OperatingMode>(m, "OperatingMode")
        .value("Normal", OperatingMode::Normal)
        .value("Compensation", OperatingMode::Compensation)
        .value("FaultLimiting", OperatingMode::FaultLimiting);

    py::class_<SagEvent>(m, "SagEvent")
        .def(py::init<>())
        .def_readwrite("start", &SagEvent::start)
        .def_readwrite("end", &SagEvent::end)
        .def_readwrite("depth_alpha", &SagEvent::depth_alpha);

    py::class_<FaultEvent>(m, "FaultEvent")
        .def(py::init<>())
        .def_readwrite("start", &FaultEvent::start)
        .def_readwrite("end", &FaultEvent::end)
        .def_readwrite("fault_resistance", &FaultEvent::fault_resistance);

    py::class_<SourceHarmonic>(m, "SourceHarmonic")
        .def(py::init<>())
        .def_readwrite("order", &SourceHarmonic::order)
        .def_readwrite("amplitude_pu", &SourceHarmonic::amplitude_pu)
        .def_readwrite("phase", &SourceHarmonic::phase);

    py::class_<ControllerConfig>(m, "ControllerConfig")
        .def(py::init<>())
        .def_readwrite("sag_enter_pu", &ControllerConfig::sag_enter_pu)
        .def_readwrite("sag_exit_pu", &ControllerConfig::sag_exit_pu)
        .def_readwrite("overcurrent_multiple", &ControllerConfig::overcurrent_multiple)
        .def_readwrite("rearm_hold", &ControllerConfig::rearm_hold)
        .def_readwrite("rms_window", &ControllerConfig::rms_window)
        .def_readwrite("limiter_enabled", &ControllerConfig::limiter_enabled)
        .def_readwrite("compensator_enabled", &ControllerConfig::compensator_enabled)
        .def("validate", &ControllerConfig::validate);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("grid", &Scenario::grid)
        .def_readwrite("transformer", &Scenario::transformer)
        .def_readwrite("switches", &Scenario::switches)
        .def_readwrite("controller", &Scenario::controller)
        .def_readwrite("sags", &Scenario::sags)
        .def_readwrite("faults", &Scenario::faults)
        .def_readwrite("harmonics", &Scenario::harmonics)
        .def_readwrite("horizon", &Scenario::horizon)
        .def_readwrite("dt", &Scenario::dt)
        .def_readwrite("preset_name", &Scenario::preset_name)
        .def("validate", &Scenario::validate);

    py::class_<WaveformTrace>(m, "WaveformTrace")
        .def(py::init<>())
        .def_readwrite("dt", &WaveformTrace::dt)
        .def_readwrite("time", &WaveformTrace::time)
        .def_readwrite("v_source", &WaveformTrace::v_source)
        .def_readwrite("v_pcc", &WaveformTrace::v_pcc)
        .def_readwrite("v_load", &WaveformTrace::v_load)
        .def_readwrite("i_line", &WaveformTrace::i_line)
        .def_readwrite("u_comp", &WaveformTrace::u_comp)
        .def_readwrite("mode", &WaveformTrace::mode)
        .def_readwrite("switches", &WaveformTrace::switches)
        .def("size", &WaveformTrace::size)
        .def("validate", &WaveformTrace::validate);

    py::class_<ModeTransition>(m, "ModeTransition")
        .def_readonly("time", &ModeTransition::time)
        .def_readonly("from_mode", &ModeTransition::from)
        .def_readonly("to_mode", &ModeTransition::to)
        .def_readonly("i_line", &ModeTransition::i_line);

    py::class_<SimResult>(m, "SimResult")
        .def_readonly("trace", &SimResult::trace)
        .def_readonly("events", &SimResult::events)
        .def_readonly("saturated", &SimResult::saturated)
        .def_readonly("first_saturation", &SimResult::first_saturation)
        .def_readonly("rated_peak_current", &SimResult::rated_peak_current)
        .def_readonly("nominal_pcc_rms", &SimResult::nominal_pcc_rms);

    py::class_<CompensationCommand>(m, "CompensationCommand")
        .def_readonly("secondary_command", &CompensationCommand::secondary_command)
        .def_readonly("saturated", &CompensationCommand::saturated);

    m.def("max_step_size", &max_step_size, py::arg("frequency"));
    m.def("compensation_reference", &compensation_reference,
          py::arg("v_source_instant"), py::arg("nominal_waveform_instant"),
          py::arg("transformer"), py::arg("switches"));
    m.def("run_scenario", &run_scenario, py::arg("scenario"));

    // ---- analysis ------------------------------------------------------
    py::class_<HarmonicAnalysis>(m, "HarmonicAnalysis")
        .def_readonly("dc", &HarmonicAnalysis::dc)
        .def_readonly("amplitudes", &HarmonicAnalysis::amplitudes)
        .def_readonly("periods", &HarmonicAnalysis::periods)
        .def_readonly("thd", &HarmonicAnalysis::thd)
        .def("fundamental", &HarmonicAnalysis::fundamental);

    py::class_<LossBreakdown>(m, "LossBreakdown")
        .def(py::init<>())
        .def_readwrite("p_core", &LossBreakdown::p_core)
        .def_readwrite("p_copper", &LossBreakdown::p_copper)
        .def_readwrite("p_switch", &LossBreakdown::p_switch)
        .def_readwrite("p_total", &LossBreakdown::p_total);

    py::class_<ScenarioMetrics>(m, "ScenarioMetrics")
        .def_readonly("sag_depth", &ScenarioMetrics::sag_depth)
        .def_readonly("compensation_error", &ScenarioMetrics::compensation_error)
        .def_readonly("max_fault_current", &ScenarioMetrics::max_fault_current)
        .def_readonly("limited_steady_peak", &ScenarioMetrics::limited_steady_peak)
        .def_readonly("baseline_peak", &ScenarioMetrics::baseline_peak)
        .def_readonly("limiting_ratio", &ScenarioMetrics::limiting_ratio);

    py::class_<TopologyRow>(m, "TopologyRow")
        .def_readonly("label", &TopologyRow::label)
        .def_readonly("transformers", &TopologyRow::transformers)
        .def_readonly("switches_3ph", &TopologyRow::switches_3ph)
        .def_readonly("dc_sources_3ph", &TopologyRow::dc_sources_3ph)
        .def_readonly("compensates_sag", &TopologyRow::compensates_sag)
        .def_readonly("limits_fault", &TopologyRow::limits_fault)
        .def_readonly("loss_w", &TopologyRow::loss_w);

    m.def("rms", [](const std::vector<double>& samples) {
        return rms(std::span<const double>(samples));
    }, py::arg("samples"));
    m.def("rms_over", &rms_over,
          py::arg("trace"), py::arg("channel"), py::arg("t_start"), py::arg("t_end"));
    m.def("channel_from_name", &channel_from_name, py::arg("name"));
    m.def("harmonic_analysis", [](const std::vector<double>& samples, double dt,
                                  double fundamental_hz, int max_harmonic) {
        return harmonic_analysis(std::span<const double>(samples), dt, fundamental_hz,
                                 max_harmonic);
    }, py::arg("samples"), py::arg("dt"), py::arg("fundamental_hz"),
       py::arg("max_harmonic") = 50);
    m.def("thd", [](const std::vector<double>& samples, double dt, double fundamental_hz,
                    int max_harmonic) {
        return thd(std::span<const double>(samples), dt, fundamental_hz, max_harmonic);
    }, py::arg("samples"), py::arg("dt"), py::arg("fundamental_hz"),
       py::arg("max_harmonic") = 50);
    m.def("steady_fundamental_amplitude", &steady_fundamental_amplitude,
          py::arg("trace"), py::arg("channel"), py::arg("window_end"),
          py::arg("fundamental_hz"), py::arg("periods") = 1);
    m.def("power_loss", &power_loss,
          py::arg("mode"), py::arg("transformer"), py::arg("switches"),
          py::arg("i_primary_rms"), py::arg("i_secondary_referred_rms"),
          py::arg("i_line_rms"));
    m.def("efficiency_percent", &efficiency_percent, py::arg("loss"), py::arg("p_load_w"));
    m.def("scenario_metrics", [](const WaveformTrace& trace, const Scenario& sc,
                                 const std::vector<ModeTransition>& transitions,
                                 const NominalValues& nominal,
                                 std::optional<double> baseline_steady_peak) {
        return scenario_metrics(trace, sc.sags, sc.faults, transitions, nominal,
                                baseline_steady_peak);
    }, py::arg("trace"), py::arg("scenario"), py::arg("transitions"), py::arg("nominal"),
       py::arg("baseline_steady_peak") = std::nullopt);
    m.def("topology_comparison", &topology_comparison, py::arg("params"));

    py::enum_<TraceChannel>(m, "TraceChannel")
        .value("VSource", TraceChannel::VSource)
        .value("VPcc", TraceChannel::VPcc)
        .value("VLoad", TraceChannel::VLoad)
        .value("ILine", TraceChannel::ILine)
        .value("UComp", TraceChannel::UComp);

    py::class_<NominalValues>(m, "NominalValues")
        .def(py::init<>())
        .def_readwrite("v_source_rms", &NominalValues::v_source_rms)
        .def_readwrite("v_pcc_rms", &NominalValues::v_pcc_rms)
        .def_readwrite("rated_peak_current", &NominalValues::rated_peak_current)
        .def_readwrite("fundamental_hz", &NominalValues::fundamental_hz);

    // ---- scenario / trace io -------------------------------------------
    m.def("preset_names", &preset_names);
    m.def("preset_scenario", &preset_scenario, py::arg("name"));
    m.def("parse_scenario", [](const std::string& text) {
        return parse_scenario(text);
    }, py::arg("text"));
    m.def("serialize_scenario", &serialize_scenario, py::arg("scenario"));
    m.def("save_trace", [](const WaveformTrace& trace, const std::string& path) {
        write_trace(trace, path);
    }, py::arg("trace"), py::arg("path"));
    m.def("load_trace", [](const std::string& path) {
        return read_trace(path);
    }, py::arg("path"));
    m.def("design_report_text", [](const DesignReport& report) {
        std::ostringstream out;
        write_report(report, out);
        return out.str();
    }, py::arg("report"));
    m.def("loss_report_text", [](const LossBreakdown& loss) {
        std::ostringstream out;
        write_report(loss, out);
        return out.str();
    }, py::arg("loss"));
}
