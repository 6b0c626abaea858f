#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fcldvr/circuit_model.hpp"
#include "fcldvr/errors.hpp"

namespace fcldvr {

/// Device mode. Normal: switches closed, magnetizing branch shorted, no
/// injection. Compensation: switches inverting, series voltage injected.
/// FaultLimiting: switches open, magnetizing inductance in the line.
enum class OperatingMode : std::uint8_t { Normal, Compensation, FaultLimiting };

/// Single-letter code used in traces: N / C / F.
char mode_code(OperatingMode mode);
OperatingMode mode_from_code(char code);

/// Source-side voltage dip: the EMF amplitude is scaled by (1 - depth_alpha)
/// over [start, end).
struct SagEvent {
    double start = 0.0;        ///< [s]
    double end = 0.0;          ///< [s]
    double depth_alpha = 0.0;  ///< fractional dip in (0, 1)

    void validate() const;
};

/// Shunt fault at the coupling point over [start, end). A zero resistance is
/// a bolted fault; a positive one leaves a residual divider.
struct FaultEvent {
    double start = 0.0;             ///< [s]
    double end = 0.0;               ///< [s]
    double fault_resistance = 0.0;  ///< [ohm], >= 0

    void validate() const;
};

/// Harmonic component riding on the source EMF for the whole horizon:
/// adds amplitude_pu * V_peak * sin(order * w * t + phase) to the EMF.
struct SourceHarmonic {
    int order = 0;             ///< harmonic order >= 2
    double amplitude_pu = 0.0; ///< fraction of the fundamental peak, [0, 1)
    double phase = 0.0;        ///< [rad]

    void validate() const;
};

/// Detection thresholds and timing of the mode state machine.
struct ControllerConfig {
    double sag_enter_pu = 0.90;         ///< enter Compensation below this PCC RMS [pu]
    double sag_exit_pu = 0.95;          ///< leave Compensation at/above this PCC RMS [pu]
    double overcurrent_multiple = 2.0;  ///< trip when |i| exceeds this multiple of rated peak
    double rearm_hold = 0.0;            ///< time the current must stay in the rated band before re-closing [s]
    double rms_window = 0.0;            ///< trailing window of the detection RMS [s]
    bool limiter_enabled = true;        ///< false: switches never open (baseline runs)
    bool compensator_enabled = true;    ///< false: never inject (uncompensated runs)

    void validate() const;
};

/// Integrator state at one instant. The electrical states are the line
/// current and the filter capacitor voltage; the rest is controller output.
struct SimState {
    double time = 0.0;      ///< [s]
    double i_line = 0.0;    ///< series line current [A]
    double v_cap = 0.0;     ///< filter capacitor voltage, secondary side [V]
    OperatingMode mode = OperatingMode::Normal;
    bool switches_on = true;  ///< false exactly in FaultLimiting
    double u_comp = 0.0;    ///< injected series voltage, primary side [V]
};

/// Events that are in force at one instant, as seen by the integrator.
struct ActiveEvents {
    std::optional<double> sag_alpha;         ///< active sag depth
    std::optional<double> fault_resistance;  ///< active fault shunt [ohm]
};

/// Uniformly sampled waveform record, one row per integrator step.
struct WaveformTrace {
    double dt = 0.0;  ///< sample period [s]
    std::vector<double> time;
    std::vector<double> v_source;  ///< source EMF including sag and harmonics [V]
    std::vector<double> v_pcc;     ///< coupling-point voltage [V]
    std::vector<double> v_load;    ///< load terminal voltage (= v_pcc) [V]
    std::vector<double> i_line;    ///< line current [A]
    std::vector<double> u_comp;    ///< injected series voltage [V]
    std::vector<OperatingMode> mode;
    std::vector<std::uint8_t> switches;  ///< 1 = closed

    [[nodiscard]] std::size_t size() const noexcept { return time.size(); }
    void validate() const;
};

/// One mode change, recorded at the decision instant.
struct ModeTransition {
    double time = 0.0;
    OperatingMode from = OperatingMode::Normal;
    OperatingMode to = OperatingMode::Normal;
    double i_line = 0.0;  ///< line current carried across the transition [A]
};

/// Full description of one run.
struct Scenario {
    GridParams grid;
    TransformerParams transformer;
    SwitchParams switches;
    ControllerConfig controller;
    std::vector<SagEvent> sags;
    std::vector<FaultEvent> faults;
    std::vector<SourceHarmonic> harmonics;
    double horizon = 0.0;  ///< run length [s]
    double dt = 0.0;       ///< step size [s]
    std::string preset_name;  ///< empty unless built from a named preset

    /// Validates every sub-object, event ordering/overlap, horizon and dt.
    void validate() const;
};

/// Outcome of run_scenario.
struct SimResult {
    WaveformTrace trace;
    std::vector<ModeTransition> events;
    bool saturated = false;        ///< injection clamp engaged at least once
    double first_saturation = 0.0; ///< time of first clamp engagement [s]
    double rated_peak_current = 0.0;  ///< closed-form normal-mode amplitude [A]
    double nominal_pcc_rms = 0.0;     ///< coupling-point voltage at nominal EMF [V RMS]
};

/// Largest admissible step for the trapezoidal integrator at this
/// fundamental frequency (1 / (200 f)).
double max_step_size(double frequency);

/// Instantaneous source EMF with sag scaling and harmonic content applied.
double source_emf(double t, const GridParams& grid, const ActiveEvents& active,
                  const std::vector<SourceHarmonic>& harmonics);

/// Feed-forward injection command for the inverter, secondary side. The
/// command is the waveform deficit reflected through the turns ratio and
/// clamped to the DC link; `saturated` reports an engaged clamp.
struct CompensationCommand {
    double secondary_command = 0.0;  ///< [V]
    bool saturated = false;
};
CompensationCommand compensation_reference(double v_source_instant,
                                           double nominal_waveform_instant,
                                           const TransformerParams& xfmr,
                                           const SwitchParams& switches);

/// Advance one trapezoidal step of the piecewise-linear network. The mode
/// carried by `state` selects the topology; the controller is not involved.
/// Throws ValidationError for an inadmissible dt and NumericError if the new
/// state is not finite.
SimState step(const SimState& state, const GridParams& grid, const TransformerParams& xfmr,
              const SwitchParams& switches, const ActiveEvents& active, double dt,
              const std::vector<SourceHarmonic>& harmonics = {});

/// Coupling-point voltage consistent with `state` and the active events.
double instantaneous_pcc(const SimState& state, const GridParams& grid,
                         const TransformerParams& xfmr, const ActiveEvents& active,
                         const std::vector<SourceHarmonic>& harmonics = {});

/// Pure mode decision. Overcurrent wins over any voltage condition; sag
/// entry/exit uses the hysteresis pair; FaultLimiting is left only after the
/// current has stayed inside the rated band for the rearm hold, the follow-on
/// mode picked by the sag test.
OperatingMode detect_mode(const SimState& state, double detection_rms,
                          double rated_peak_current, double nominal_pcc_rms,
                          const ControllerConfig& cfg, double time_below_rated);

/// Run a whole scenario: controller + integrator, one trace row per step.
SimResult run_scenario(const Scenario& scenario);

} // namespace fcldvr
