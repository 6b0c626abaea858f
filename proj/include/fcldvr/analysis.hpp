#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcldvr/circuit_model.hpp"
#include "fcldvr/errors.hpp"
#include "fcldvr/transient_sim.hpp"

namespace fcldvr {

/// Trace channel selector for the waveform analysis helpers.
enum class TraceChannel { VSource, VPcc, VLoad, ILine, UComp };

TraceChannel channel_from_name(const std::string& name);
const std::vector<double>& channel(const WaveformTrace& trace, TraceChannel which);

/// Root-mean-square of a sample span. Throws ValidationError on an empty
/// span.
double rms(std::span<const double> samples);

/// RMS of a trace channel over [t_start, t_end). Throws if the window holds
/// no samples.
double rms_over(const WaveformTrace& trace, TraceChannel which, double t_start, double t_end);

/// Discrete-Fourier harmonic content of a uniformly sampled span that covers
/// an integer number of fundamental periods.
struct HarmonicAnalysis {
    double dc = 0.0;                          ///< mean value
    std::vector<double> amplitudes;           ///< amplitudes, index h-1 holds harmonic h
    int periods = 0;                          ///< fundamental periods in the span
    double thd = 0.0;                         ///< sqrt(sum h>=2 A_h^2) / A_1

    [[nodiscard]] double fundamental() const { return amplitudes.empty() ? 0.0 : amplitudes[0]; }
};

/// Analyze `samples` (spacing dt) against `fundamental_hz`. The span length
/// must be an integer number of periods (within 1e-6 of one); harmonics are
/// evaluated up to min(max_harmonic, Nyquist). Throws ValidationError for a
/// non-integer window or a vanishing fundamental (THD undefined).
HarmonicAnalysis harmonic_analysis(std::span<const double> samples, double dt,
                                   double fundamental_hz, int max_harmonic = 50);

/// Total harmonic distortion of the span; see harmonic_analysis.
double thd(std::span<const double> samples, double dt, double fundamental_hz,
           int max_harmonic = 50);

/// Steady-state amplitude of a channel: the fundamental-frequency Fourier
/// amplitude over the `periods` full periods ending at window_end.
double steady_fundamental_amplitude(const WaveformTrace& trace, TraceChannel which,
                                    double window_end, double fundamental_hz,
                                    int periods = 1);

/// Conduction losses of the device at one operating point. The switch term
/// is absent while the switches are open (fault limiting).
struct LossBreakdown {
    double p_core = 0.0;    ///< constant core loss [W]
    double p_copper = 0.0;  ///< winding I^2 R, both windings [W]
    double p_switch = 0.0;  ///< switch conduction drop [W]
    double p_total = 0.0;   ///< sum of the above [W]
};

LossBreakdown power_loss(OperatingMode mode, const TransformerParams& xfmr,
                         const SwitchParams& switches, double i_primary_rms,
                         double i_secondary_referred_rms, double i_line_rms);

/// Delivered power over delivered-plus-lost, in percent.
double efficiency_percent(const LossBreakdown& loss, double p_load_w);

/// Nominal quantities the scenario metrics are measured against.
struct NominalValues {
    double v_source_rms = 0.0;       ///< nominal source EMF [V RMS]
    double v_pcc_rms = 0.0;          ///< nominal coupling-point voltage [V RMS]
    double rated_peak_current = 0.0; ///< rated line-current amplitude [A]
    double fundamental_hz = 0.0;     ///< fundamental frequency [Hz]
};

/// Headline numbers of one simulated run.
struct ScenarioMetrics {
    double sag_depth = 0.0;           ///< 1 - min windowed source RMS / nominal
    double compensation_error = 0.0;  ///< max relative load-RMS error inside compensation windows
    double max_fault_current = 0.0;   ///< max |i_line| inside fault windows [A]
    std::optional<double> limited_steady_peak;  ///< steady current amplitude in the fault window [A]
    std::optional<double> baseline_peak;        ///< unlimited steady amplitude [A]
    std::optional<double> limiting_ratio;       ///< baseline_peak / limited_steady_peak
};

/// Compute the metrics of a run. Fault/sag windows come from the scenario
/// events; compensation windows from the mode-transition log (an all-Normal
/// log yields zero error). The baseline peak, when supplied, must be
/// measured the same way as the limited one (or taken from the closed form).
ScenarioMetrics scenario_metrics(const WaveformTrace& trace, std::span<const SagEvent> sags,
                                 std::span<const FaultEvent> faults,
                                 std::span<const ModeTransition> transitions,
                                 const NominalValues& nominal,
                                 std::optional<double> baseline_steady_peak = std::nullopt);

/// Rebuild the mode-transition log from the mode column of a trace.
std::vector<ModeTransition> events_from_trace(const WaveformTrace& trace);

/// One topology of the published comparison set. Component counts are for
/// the three-phase realization; the loss formula (when the source gives one)
/// is evaluated verbatim from named symbols.
struct TopologyEntry {
    std::string label;
    int transformers = 0;
    int switches_3ph = 0;
    int dc_sources_3ph = 0;
    bool compensates_sag = false;
    bool limits_fault = false;
    std::vector<std::string> loss_symbols;  ///< required parameter names; empty = no formula
    double (*loss_eval)(const std::map<std::string, double>&) = nullptr;

    [[nodiscard]] bool has_loss_formula() const { return loss_eval != nullptr; }
};

/// The built-in six-entry comparison dataset (literature reference labels
/// plus the proposed device).
const std::vector<TopologyEntry>& topology_table();

/// Evaluated comparison row.
struct TopologyRow {
    std::string label;
    int transformers = 0;
    int switches_3ph = 0;
    int dc_sources_3ph = 0;
    bool compensates_sag = false;
    bool limits_fault = false;
    std::optional<double> loss_w;  ///< absent when the entry has no formula
};

/// Evaluate every entry at the operating point given by `params` (shared
/// symbol namespace). Throws ValidationError naming the entry and the symbol
/// when a required parameter is missing.
std::vector<TopologyRow> topology_comparison(const std::map<std::string, double>& params);

} // namespace fcldvr
