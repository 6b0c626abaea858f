#include "fcldvr/design_toolkit.hpp"

#include <cmath>
#include <numbers>

namespace fcldvr {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

void require_positive(double v, const char* what) {
    require(std::isfinite(v) && v > 0.0, what);
}

} // namespace

void FaultLimitSpec::validate() const {
    require(lambda_i > 1.0, "FaultLimitSpec: lambda_i must be > 1");
    require(load_va > 0.0, "FaultLimitSpec: load_va must be > 0");
    require(sag_ratio_lambda_v > 0.0 && sag_ratio_lambda_v < 1.0,
            "FaultLimitSpec: sag_ratio_lambda_v must lie in (0, 1)");
}

void DesignReport::validate() const {
    require_positive(rated_current, "DesignReport: rated_current must be positive");
    require_positive(l_m_max, "DesignReport: l_m_max must be positive");
    require_positive(dc_link_max, "DesignReport: dc_link_max must be positive");
    require_positive(turns_ratio, "DesignReport: turns_ratio must be positive");
    require_positive(series_ratio_k, "DesignReport: series_ratio_k must be positive");
    require_positive(transformer_va, "DesignReport: transformer_va must be positive");
    require_positive(stress_fault_pos, "DesignReport: stress_fault_pos must be positive");
    require(std::isfinite(stress_fault_neg), "DesignReport: stress_fault_neg must be finite");
    require_positive(stress_compensation, "DesignReport: stress_compensation must be positive");
}

double rated_load_current(double load_va, double v_line_rms) {
    require_positive(load_va, "rated_load_current: load_va must be > 0");
    require_positive(v_line_rms, "rated_load_current: v_line_rms must be > 0");
    return load_va / v_line_rms;
}

double size_magnetizing_inductance(double v_line_rms, double omega, double lambda_i,
                                   double i_rated_rms) {
    require_positive(v_line_rms, "size_magnetizing_inductance: v_line_rms must be > 0");
    require_positive(omega, "size_magnetizing_inductance: omega must be > 0");
    require(lambda_i > 1.0, "size_magnetizing_inductance: lambda_i must be > 1");
    require_positive(i_rated_rms, "size_magnetizing_inductance: i_rated_rms must be > 0");
    return v_line_rms / (omega * lambda_i * i_rated_rms);
}

double dc_link_limit(double v_ces) {
    require_positive(v_ces, "dc_link_limit: v_ces must be > 0");
    return 0.65 * v_ces;
}

double turns_ratio_for_sag(double sag_ratio_lambda_v, double v_line_rms, double v_ac_inv_rms) {
    require(sag_ratio_lambda_v > 0.0 && sag_ratio_lambda_v < 1.0,
            "turns_ratio_for_sag: sag ratio must lie in (0, 1)");
    require_positive(v_line_rms, "turns_ratio_for_sag: v_line_rms must be > 0");
    require_positive(v_ac_inv_rms, "turns_ratio_for_sag: v_ac_inv_rms must be > 0");
    return sag_ratio_lambda_v * v_line_rms / v_ac_inv_rms;
}

namespace {

double referred_ratio_squared(double v_line_rms, double lambda_i, double i_rated_rms,
                              double omega, double l_secondary) {
    require_positive(v_line_rms, "series_transformer_ratio: v_line_rms must be > 0");
    require(lambda_i > 1.0, "series_transformer_ratio: lambda_i must be > 1");
    require_positive(i_rated_rms, "series_transformer_ratio: i_rated_rms must be > 0");
    require_positive(omega, "series_transformer_ratio: omega must be > 0");
    require_positive(l_secondary, "series_transformer_ratio: l_secondary must be > 0");
    return v_line_rms / (lambda_i * i_rated_rms * omega * l_secondary);
}

} // namespace

double series_transformer_ratio(double v_line_rms, double lambda_i, double i_rated_rms,
                                double omega, double l_secondary) {
    // The secondary inductance refers to the line side through k^2, so the
    // ratio is the square root of the impedance quotient.
    return std::sqrt(
        referred_ratio_squared(v_line_rms, lambda_i, i_rated_rms, omega, l_secondary));
}

double series_transformer_ratio_linear_form(double v_line_rms, double lambda_i,
                                            double i_rated_rms, double omega,
                                            double l_secondary) {
    return referred_ratio_squared(v_line_rms, lambda_i, i_rated_rms, omega, l_secondary);
}

double transformer_capacity(double lambda_i, double i_rated_rms, double v_line_rms) {
    require(lambda_i > 1.0, "transformer_capacity: lambda_i must be > 1");
    require_positive(i_rated_rms, "transformer_capacity: i_rated_rms must be > 0");
    require_positive(v_line_rms, "transformer_capacity: v_line_rms must be > 0");
    return lambda_i * i_rated_rms * v_line_rms;
}

double switch_stress(StressCase stress_case, double sag_ratio_lambda_v, double v_line_peak,
                     double turns_ratio_a, double v_dc) {
    require(sag_ratio_lambda_v > 0.0 && sag_ratio_lambda_v <= 1.0,
            "switch_stress: sag ratio must lie in (0, 1]");
    require_positive(v_line_peak, "switch_stress: v_line_peak must be > 0");
    require_positive(turns_ratio_a, "switch_stress: turns_ratio_a must be > 0");
    require_positive(v_dc, "switch_stress: v_dc must be > 0");
    const double reflected = sag_ratio_lambda_v * v_line_peak / turns_ratio_a;
    switch (stress_case) {
    case StressCase::FaultPositiveHalf:
        return reflected + v_dc;
    case StressCase::FaultNegativeHalf:
        return -reflected + v_dc;
    case StressCase::Compensation:
        return 2.0 * v_dc;
    }
    throw ValidationError("switch_stress: unknown stress case");
}

DesignReport build_design_report(const FaultLimitSpec& spec, double v_line_rms, double omega,
                                 double v_ac_inv_rms, double v_ces, double l_secondary,
                                 double v_dc) {
    spec.validate();
    DesignReport report;
    report.rated_current = rated_load_current(spec.load_va, v_line_rms);
    report.l_m_max =
        size_magnetizing_inductance(v_line_rms, omega, spec.lambda_i, report.rated_current);
    report.dc_link_max = dc_link_limit(v_ces);
    report.turns_ratio = turns_ratio_for_sag(spec.sag_ratio_lambda_v, v_line_rms, v_ac_inv_rms);
    report.series_ratio_k = series_transformer_ratio(v_line_rms, spec.lambda_i,
                                                     report.rated_current, omega, l_secondary);
    report.transformer_va = transformer_capacity(spec.lambda_i, report.rated_current, v_line_rms);
    const double v_peak = v_line_rms * std::numbers::sqrt2;
    report.stress_fault_pos = switch_stress(StressCase::FaultPositiveHalf,
                                            spec.sag_ratio_lambda_v, v_peak,
                                            report.turns_ratio, v_dc);
    report.stress_fault_neg = switch_stress(StressCase::FaultNegativeHalf,
                                            spec.sag_ratio_lambda_v, v_peak,
                                            report.turns_ratio, v_dc);
    report.stress_compensation =
        switch_stress(StressCase::Compensation, spec.sag_ratio_lambda_v, v_peak,
                      report.turns_ratio, v_dc);
    report.validate();
    return report;
}

} // namespace fcldvr
