#pragma once

#include "fcldvr/circuit_model.hpp"
#include "fcldvr/errors.hpp"

namespace fcldvr {

/// Operating bracket the series transformer is sized against.
struct FaultLimitSpec {
    double lambda_i = 0.0;      ///< allowed fault-current multiple of rated current (> 1)
    double load_va = 0.0;       ///< protected load apparent power [VA]
    double sag_ratio_lambda_v = 0.0;  ///< deepest compensable sag as a fraction of line voltage (0, 1)

    void validate() const;
};

/// Electrical stress across one of the two inverter switches.
enum class StressCase {
    FaultPositiveHalf,   ///< blocking during limiting, positive half-cycle
    FaultNegativeHalf,   ///< blocking during limiting, negative half-cycle
    Compensation,        ///< commutating while injecting
};

/// Complete sizing summary for one design point.
struct DesignReport {
    double rated_current = 0.0;      ///< load current at nominal voltage [A RMS]
    double l_m_max = 0.0;            ///< largest admissible magnetizing inductance [H]
    double dc_link_max = 0.0;        ///< largest admissible DC-link voltage [V]
    double turns_ratio = 0.0;        ///< inverter coupling ratio for the deepest sag
    double series_ratio_k = 0.0;     ///< series-transformer turns ratio from the secondary inductance
    double transformer_va = 0.0;     ///< required transformer capacity [VA]
    double stress_fault_pos = 0.0;   ///< switch stress, limiting, positive half [V]
    double stress_fault_neg = 0.0;   ///< switch stress, limiting, negative half [V]
    double stress_compensation = 0.0;  ///< switch stress while injecting [V]

    /// All entries must be finite; all but stress_fault_neg must be positive.
    void validate() const;
};

/// Load current drawn at nominal voltage: S / V. Throws for non-positive
/// inputs.
double rated_load_current(double load_va, double v_line_rms);

/// Largest magnetizing inductance that still caps the bolted-fault current at
/// lambda_i times the rated current: L = U / (omega * lambda_i * i_rated).
double size_magnetizing_inductance(double v_line_rms, double omega, double lambda_i,
                                   double i_rated_rms);

/// Highest admissible DC-link voltage for a switch rating: 0.65 * v_ces.
double dc_link_limit(double v_ces);

/// Inverter coupling ratio that lets v_ac_inv cover the deepest sag:
/// a = lambda_v * v_line / v_ac_inv.
double turns_ratio_for_sag(double sag_ratio_lambda_v, double v_line_rms, double v_ac_inv_rms);

/// Series-transformer turns ratio so that the secondary-side inductance
/// l_secondary, referred through k^2, equals the limiting inductance:
/// k = sqrt(U / (lambda_i * i_rated * omega * l_secondary)).
double series_transformer_ratio(double v_line_rms, double lambda_i, double i_rated_rms,
                                double omega, double l_secondary);

/// The uncorrected linear form of the same ratio (no square root). Kept only
/// for comparison against the published table; the referred-impedance
/// derivation requires the square-root form above.
double series_transformer_ratio_linear_form(double v_line_rms, double lambda_i,
                                            double i_rated_rms, double omega,
                                            double l_secondary);

/// Transformer capacity that must carry the limited fault: lambda_i *
/// i_rated * U.
double transformer_capacity(double lambda_i, double i_rated_rms, double v_line_rms);

/// Peak voltage across one inverter switch. For the limiting cases the sag
/// ratio scales the line peak reflected through the coupling ratio a; during
/// compensation both DC rails appear across the off switch.
double switch_stress(StressCase stress_case, double sag_ratio_lambda_v, double v_line_peak,
                     double turns_ratio_a, double v_dc);

/// Assemble the full report for one design point.
DesignReport build_design_report(const FaultLimitSpec& spec, double v_line_rms, double omega,
                                 double v_ac_inv_rms, double v_ces, double l_secondary,
                                 double v_dc);

} // namespace fcldvr
