#pragma once

#include <complex>
#include <optional>

#include "fcldvr/errors.hpp"

namespace fcldvr {

/// Electrical parameters of the supply, the feeder and the load of the
/// single-phase network the limiter/restorer is inserted into. Voltages are
/// RMS; the source EMF is v(t) = sqrt(2) * v_source_rms * sin(2*pi*f*t).
struct GridParams {
    double v_source_rms = 0.0;   ///< source EMF magnitude [V RMS]
    double frequency = 0.0;      ///< fundamental frequency [Hz]
    double r_source_line = 0.0;  ///< source + feeder series resistance [ohm]
    double l_source_line = 0.0;  ///< source + feeder series inductance [H]
    double r_load = 0.0;         ///< load resistance [ohm]
    double l_load = 0.0;         ///< load inductance [H]

    [[nodiscard]] double omega() const noexcept;   ///< angular frequency [rad/s]
    [[nodiscard]] double v_peak() const noexcept;  ///< source amplitude [V]

    /// Throws ValidationError naming the violated rule.
    void validate() const;
};

/// Series transformer of the limiter/restorer. The magnetizing branch is the
/// fault-limiting impedance; the inverter couples through the turns ratio
/// (primary voltage = turns_ratio_a * secondary voltage). Winding
/// resistances are used by the loss model; the secondary resistance is the
/// primary-referred value.
struct TransformerParams {
    double turns_ratio_a = 0.0;         ///< primary : secondary voltage gain
    double l_magnetizing = 0.0;         ///< magnetizing inductance [H]
    double l_leakage = 0.0;             ///< series leakage inductance [H]
    double r_primary = 0.0;             ///< primary winding resistance [ohm]
    double r_secondary_referred = 0.0;  ///< secondary winding resistance, primary-referred [ohm]
    double p_core = 0.0;                ///< constant core loss [W]
    double c_filter = 0.0;              ///< output filter capacitor across the secondary [F]

    void validate() const;
};

/// Inverter switch pair and its DC link.
struct SwitchParams {
    double v_ces = 0.0;       ///< switch collector-emitter voltage rating [V]
    double v_on_drop = 0.0;   ///< conduction drop per conducting device [V]
    double v_dc = 0.0;        ///< DC-link voltage [V]

    void validate() const;
};

/// Series impedance in rectangular form.
struct PhasorImpedance {
    double resistance = 0.0;  ///< [ohm]
    double reactance = 0.0;   ///< [ohm]

    [[nodiscard]] double magnitude() const noexcept;
    /// Impedance angle atan2(X, R); [0, pi/2] for R, X >= 0.
    [[nodiscard]] double phase() const noexcept;
    [[nodiscard]] std::complex<double> to_complex() const noexcept;
};

/// Closed-form line-current solution: amplitude * sin(w*t - phase_lag) plus,
/// after onset_time, a decaying exponential decay_amplitude *
/// exp(-(t - onset_time)/decay_time_constant).
struct SinusoidSolution {
    double amplitude = 0.0;            ///< steady sinusoid amplitude [A]
    double phase_lag = 0.0;            ///< current lag behind the source [rad]
    double decay_amplitude = 0.0;      ///< exponential term initial value [A]
    double decay_time_constant = 0.0;  ///< L/R of the active loop [s]
    double onset_time = 0.0;           ///< time the exponential term starts [s]

    /// Evaluate the solution at time t for angular frequency omega.
    [[nodiscard]] double eval(double t, double omega) const;
};

/// |Z| and angle of a series R-L branch at angular frequency omega.
/// Throws ValidationError for a degenerate branch (R = 0 and L = 0) or
/// negative inputs.
PhasorImpedance total_impedance(double resistance, double inductance, double omega);

/// R and L of the loop the line current flows through when the switches are
/// closed (magnetizing branch shorted): series source/feeder + leakage + load.
double normal_loop_resistance(const GridParams& grid);
double normal_loop_inductance(const GridParams& grid, const TransformerParams& xfmr);

/// Loop inductance of the analytic current-limiting solution: the magnetizing
/// inductance replaces the leakage term (leakage neglected against it).
double fault_loop_inductance(const GridParams& grid, const TransformerParams& xfmr);

/// Closed-form solutions of the series loop driven by the sinusoidal source.
SinusoidSolution normal_mode_solution(const GridParams& grid, const TransformerParams& xfmr);

/// Closed-form current after the magnetizing inductance is inserted at
/// fault_time. Without a continuity current the decay constant takes the
/// fixed value -amplitude; with one, it is chosen so the current is exactly
/// continuity_current at fault_time.
SinusoidSolution fault_mode_solution(const GridParams& grid, const TransformerParams& xfmr,
                                     double fault_time,
                                     std::optional<double> continuity_current = std::nullopt);

/// Steady normal-mode line current at time t [A].
double normal_mode_current(double t, const GridParams& grid, const TransformerParams& xfmr);

/// Fault-mode line current at time t >= fault_time [A]. Throws
/// ValidationError for t < fault_time.
double fault_mode_current(double t, double fault_time, const GridParams& grid,
                          const TransformerParams& xfmr,
                          std::optional<double> continuity_current = std::nullopt);

/// Voltage magnitude at the coupling point with the limiter bypassed:
/// |V_s| * |Z_load / (Z_load + Z_source + Z_leak)|. Throws ValidationError
/// when the denominator is degenerate (zero magnitude).
double pcc_voltage_normal(const PhasorImpedance& z_load, const PhasorImpedance& z_source,
                          const PhasorImpedance& z_leak, double v_source_rms);

/// Voltage magnitude at the coupling point during a fault with the limiting
/// impedance inserted: |V_s| * |(Z_line + Z_fcl) / (Z_line + Z_source +
/// Z_leak + Z_fcl)|.
double pcc_voltage_fault(const PhasorImpedance& z_line, const PhasorImpedance& z_fcl,
                         const PhasorImpedance& z_source, const PhasorImpedance& z_leak,
                         double v_source_rms);

} // namespace fcldvr
