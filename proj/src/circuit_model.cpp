#include "fcldvr/circuit_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace fcldvr {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

} // namespace

double GridParams::omega() const noexcept { return 2.0 * std::numbers::pi * frequency; }

double GridParams::v_peak() const noexcept { return v_source_rms * std::numbers::sqrt2; }

void GridParams::validate() const {
    require(v_source_rms > 0.0, "GridParams: v_source_rms must be > 0");
    require(frequency > 0.0, "GridParams: frequency must be > 0");
    require(r_source_line >= 0.0, "GridParams: r_source_line must be >= 0");
    require(l_source_line >= 0.0, "GridParams: l_source_line must be >= 0");
    require(r_load >= 0.0, "GridParams: r_load must be >= 0");
    require(l_load >= 0.0, "GridParams: l_load must be >= 0");
}

void TransformerParams::validate() const {
    require(turns_ratio_a > 0.0, "TransformerParams: turns_ratio_a must be > 0");
    require(l_leakage >= 0.0, "TransformerParams: l_leakage must be >= 0");
    require(l_magnetizing > l_leakage,
            "TransformerParams: l_magnetizing must exceed l_leakage");
    require(r_primary >= 0.0, "TransformerParams: r_primary must be >= 0");
    require(r_secondary_referred >= 0.0,
            "TransformerParams: r_secondary_referred must be >= 0");
    require(p_core >= 0.0, "TransformerParams: p_core must be >= 0");
    require(c_filter >= 0.0, "TransformerParams: c_filter must be >= 0");
}

void SwitchParams::validate() const {
    require(v_ces > 0.0, "SwitchParams: v_ces must be > 0");
    require(v_on_drop >= 0.0, "SwitchParams: v_on_drop must be >= 0");
    require(v_dc > 0.0, "SwitchParams: v_dc must be > 0");
    require(v_dc <= 0.65 * v_ces,
            "SwitchParams: v_dc exceeds 0.65 * v_ces (DC-link safety margin)");
}

double PhasorImpedance::magnitude() const noexcept { return std::hypot(resistance, reactance); }

double PhasorImpedance::phase() const noexcept { return std::atan2(reactance, resistance); }

std::complex<double> PhasorImpedance::to_complex() const noexcept {
    return {resistance, reactance};
}

double SinusoidSolution::eval(double t, double omega) const {
    double value = amplitude * std::sin(omega * t - phase_lag);
    if (decay_amplitude != 0.0 && t >= onset_time) {
        value += decay_amplitude * std::exp(-(t - onset_time) / decay_time_constant);
    }
    return value;
}

PhasorImpedance total_impedance(double resistance, double inductance, double omega) {
    require(resistance >= 0.0, "total_impedance: resistance must be >= 0");
    require(inductance >= 0.0, "total_impedance: inductance must be >= 0");
    require(omega > 0.0, "total_impedance: omega must be > 0");
    require(resistance > 0.0 || inductance > 0.0,
            "total_impedance: degenerate branch (R = 0 and L = 0)");
    return {resistance, omega * inductance};
}

double normal_loop_resistance(const GridParams& grid) {
    return grid.r_source_line + grid.r_load;
}

double normal_loop_inductance(const GridParams& grid, const TransformerParams& xfmr) {
    return grid.l_source_line + grid.l_load + xfmr.l_leakage;
}

double fault_loop_inductance(const GridParams& grid, const TransformerParams& xfmr) {
    return grid.l_source_line + grid.l_load + xfmr.l_magnetizing;
}

SinusoidSolution normal_mode_solution(const GridParams& grid, const TransformerParams& xfmr) {
    const double omega = grid.omega();
    const double r = normal_loop_resistance(grid);
    const double l = normal_loop_inductance(grid, xfmr);
    const PhasorImpedance z = total_impedance(r, l, omega);
    SinusoidSolution sol;
    sol.amplitude = grid.v_peak() / z.magnitude();
    sol.phase_lag = z.phase();
    sol.decay_amplitude = 0.0;
    sol.decay_time_constant = (r > 0.0) ? l / r : std::numeric_limits<double>::infinity();
    sol.onset_time = 0.0;
    return sol;
}

SinusoidSolution fault_mode_solution(const GridParams& grid, const TransformerParams& xfmr,
                                     double fault_time,
                                     std::optional<double> continuity_current) {
    const double omega = grid.omega();
    const double r = normal_loop_resistance(grid);
    const double l = fault_loop_inductance(grid, xfmr);
    require(r > 0.0, "fault_mode_solution: loop resistance must be > 0 for a decaying term");
    const PhasorImpedance z = total_impedance(r, l, omega);
    SinusoidSolution sol;
    sol.amplitude = grid.v_peak() / z.magnitude();
    sol.phase_lag = z.phase();
    sol.decay_time_constant = l / r;
    sol.onset_time = fault_time;
    if (continuity_current) {
        // Decay constant chosen so the solution passes through the supplied
        // pre-fault current at the insertion instant.
        sol.decay_amplitude =
            *continuity_current - sol.amplitude * std::sin(omega * fault_time - sol.phase_lag);
    } else {
        sol.decay_amplitude = -sol.amplitude;
    }
    return sol;
}

double normal_mode_current(double t, const GridParams& grid, const TransformerParams& xfmr) {
    return normal_mode_solution(grid, xfmr).eval(t, grid.omega());
}

double fault_mode_current(double t, double fault_time, const GridParams& grid,
                          const TransformerParams& xfmr,
                          std::optional<double> continuity_current) {
    require(t >= fault_time, "fault_mode_current: t must be >= fault_time");
    return fault_mode_solution(grid, xfmr, fault_time, continuity_current).eval(t, grid.omega());
}

namespace {

double divider_magnitude(const std::complex<double>& numerator,
                         const std::complex<double>& denominator, double v_source_rms,
                         const char* who) {
    if (std::abs(denominator) <= 0.0) {
        throw ValidationError(std::string(who) + ": degenerate divider (|Z_total| = 0)");
    }
    return v_source_rms * std::abs(numerator / denominator);
}

} // namespace

double pcc_voltage_normal(const PhasorImpedance& z_load, const PhasorImpedance& z_source,
                          const PhasorImpedance& z_leak, double v_source_rms) {
    require(v_source_rms >= 0.0, "pcc_voltage_normal: v_source_rms must be >= 0");
    const std::complex<double> zl = z_load.to_complex();
    const std::complex<double> zt = zl + z_source.to_complex() + z_leak.to_complex();
    return divider_magnitude(zl, zt, v_source_rms, "pcc_voltage_normal");
}

double pcc_voltage_fault(const PhasorImpedance& z_line, const PhasorImpedance& z_fcl,
                         const PhasorImpedance& z_source, const PhasorImpedance& z_leak,
                         double v_source_rms) {
    require(v_source_rms >= 0.0, "pcc_voltage_fault: v_source_rms must be >= 0");
    const std::complex<double> zn = z_line.to_complex() + z_fcl.to_complex();
    const std::complex<double> zt = zn + z_source.to_complex() + z_leak.to_complex();
    return divider_magnitude(zn, zt, v_source_rms, "pcc_voltage_fault");
}

} // namespace fcldvr
