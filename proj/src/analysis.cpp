#include "fcldvr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fcldvr {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

std::size_t index_at(const WaveformTrace& trace, double t) {
    const auto idx = std::llround(t / trace.dt);
    if (idx < 0) return 0;
    const auto n = static_cast<long long>(trace.size());
    return static_cast<std::size_t>(std::min(idx, n));
}

} // namespace

TraceChannel channel_from_name(const std::string& name) {
    if (name == "v_source") return TraceChannel::VSource;
    if (name == "v_pcc") return TraceChannel::VPcc;
    if (name == "v_load") return TraceChannel::VLoad;
    if (name == "i_line") return TraceChannel::ILine;
    if (name == "u_comp") return TraceChannel::UComp;
    throw ValidationError("unknown trace channel '" + name +
                          "' (expected v_source, v_pcc, v_load, i_line or u_comp)");
}

const std::vector<double>& channel(const WaveformTrace& trace, TraceChannel which) {
    switch (which) {
    case TraceChannel::VSource: return trace.v_source;
    case TraceChannel::VPcc: return trace.v_pcc;
    case TraceChannel::VLoad: return trace.v_load;
    case TraceChannel::ILine: return trace.i_line;
    case TraceChannel::UComp: return trace.u_comp;
    }
    throw ValidationError("channel: unknown selector");
}

double rms(std::span<const double> samples) {
    require(!samples.empty(), "rms: window holds no samples");
    double sum = 0.0;
    for (double x : samples) sum += x * x;
    return std::sqrt(sum / static_cast<double>(samples.size()));
}

double rms_over(const WaveformTrace& trace, TraceChannel which, double t_start, double t_end) {
    require(t_end > t_start, "rms_over: window must have positive length");
    const auto& data = channel(trace, which);
    const std::size_t first = index_at(trace, t_start);
    const std::size_t last = std::min(index_at(trace, t_end), data.size());
    require(last > first, "rms_over: window holds no samples");
    return rms(std::span<const double>(data.data() + first, last - first));
}

HarmonicAnalysis harmonic_analysis(std::span<const double> samples, double dt,
                                   double fundamental_hz, int max_harmonic) {
    require(dt > 0.0, "harmonic_analysis: dt must be > 0");
    require(fundamental_hz > 0.0, "harmonic_analysis: fundamental must be > 0");
    require(max_harmonic >= 1, "harmonic_analysis: harmonic cap must be >= 1");
    const std::size_t n = samples.size();
    require(n >= 2, "harmonic_analysis: span too short");

    const double periods_exact = static_cast<double>(n) * dt * fundamental_hz;
    const auto periods = static_cast<long long>(std::llround(periods_exact));
    if (periods < 1 || std::abs(periods_exact - static_cast<double>(periods)) >
                           1e-6 * std::max(1.0, periods_exact)) {
        throw ValidationError(
            "harmonic_analysis: span must cover an integer number of fundamental periods");
    }

    HarmonicAnalysis out;
    out.periods = static_cast<int>(periods);

    double mean = 0.0;
    for (double x : samples) mean += x;
    out.dc = mean / static_cast<double>(n);

    // Harmonic h lives in bin h * periods; the phase index advances by the
    // bin stride modulo n, kept in exact integer arithmetic.
    const long long half = static_cast<long long>(n) / 2;
    int h_max = max_harmonic;
    if (static_cast<long long>(h_max) * periods > half) {
        h_max = static_cast<int>(half / periods);
    }
    require(h_max >= 1, "harmonic_analysis: fundamental bin above Nyquist");

    out.amplitudes.resize(static_cast<std::size_t>(h_max), 0.0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int h = 1; h <= h_max; ++h) {
        const long long stride = (static_cast<long long>(h) * periods) % static_cast<long long>(n);
        long long k = 0;
        double re = 0.0;
        double im = 0.0;
        for (std::size_t idx = 0; idx < n; ++idx) {
            const double angle = two_pi * static_cast<double>(k) / static_cast<double>(n);
            re += samples[idx] * std::cos(angle);
            im -= samples[idx] * std::sin(angle);
            k += stride;
            if (k >= static_cast<long long>(n)) k -= static_cast<long long>(n);
        }
        out.amplitudes[static_cast<std::size_t>(h - 1)] =
            2.0 / static_cast<double>(n) * std::hypot(re, im);
    }

    const double a1 = out.amplitudes[0];
    double signal_scale = rms(samples);
    if (a1 <= 1e-12 * std::max(1.0, signal_scale)) {
        throw ValidationError("harmonic_analysis: vanishing fundamental, THD undefined");
    }
    double harm_sq = 0.0;
    for (std::size_t idx = 1; idx < out.amplitudes.size(); ++idx) {
        harm_sq += out.amplitudes[idx] * out.amplitudes[idx];
    }
    out.thd = std::sqrt(harm_sq) / a1;
    return out;
}

double thd(std::span<const double> samples, double dt, double fundamental_hz, int max_harmonic) {
    return harmonic_analysis(samples, dt, fundamental_hz, max_harmonic).thd;
}

double steady_fundamental_amplitude(const WaveformTrace& trace, TraceChannel which,
                                    double window_end, double fundamental_hz, int periods) {
    require(periods >= 1, "steady_fundamental_amplitude: periods must be >= 1");
    require(fundamental_hz > 0.0, "steady_fundamental_amplitude: fundamental must be > 0");
    const auto samples_per_period =
        static_cast<std::size_t>(std::llround(1.0 / (fundamental_hz * trace.dt)));
    require(samples_per_period >= 2, "steady_fundamental_amplitude: dt too coarse");
    const std::size_t want = samples_per_period * static_cast<std::size_t>(periods);
    const auto& data = channel(trace, which);
    const std::size_t last = std::min(index_at(trace, window_end), data.size());
    require(last >= want, "steady_fundamental_amplitude: window precedes the trace");
    const std::span<const double> span(data.data() + (last - want), want);
    return harmonic_analysis(span, trace.dt, fundamental_hz, 1).fundamental();
}

LossBreakdown power_loss(OperatingMode mode, const TransformerParams& xfmr,
                         const SwitchParams& switches, double i_primary_rms,
                         double i_secondary_referred_rms, double i_line_rms) {
    require(i_primary_rms >= 0.0, "power_loss: i_primary_rms must be >= 0");
    require(i_secondary_referred_rms >= 0.0, "power_loss: i_secondary_referred_rms must be >= 0");
    require(i_line_rms >= 0.0, "power_loss: i_line_rms must be >= 0");
    LossBreakdown loss;
    loss.p_core = xfmr.p_core;
    loss.p_copper = xfmr.r_primary * i_primary_rms * i_primary_rms +
                    xfmr.r_secondary_referred * i_secondary_referred_rms * i_secondary_referred_rms;
    // Open switches carry no current, so the conduction term disappears
    // while limiting.
    loss.p_switch =
        (mode == OperatingMode::FaultLimiting) ? 0.0 : switches.v_on_drop * i_line_rms;
    loss.p_total = loss.p_core + loss.p_copper + loss.p_switch;
    return loss;
}

double efficiency_percent(const LossBreakdown& loss, double p_load_w) {
    require(p_load_w > 0.0, "efficiency_percent: p_load_w must be > 0");
    return 100.0 * p_load_w / (p_load_w + loss.p_total);
}

std::vector<ModeTransition> events_from_trace(const WaveformTrace& trace) {
    std::vector<ModeTransition> out;
    for (std::size_t k = 1; k < trace.size(); ++k) {
        if (trace.mode[k] != trace.mode[k - 1]) {
            out.push_back({trace.time[k], trace.mode[k - 1], trace.mode[k], trace.i_line[k]});
        }
    }
    return out;
}

namespace {

/// Rolling one-period RMS extrema via a prefix sum of squares.
struct RollingRms {
    std::vector<double> prefix_sq;  // prefix_sq[k] = sum of squares of rows [0, k)

    explicit RollingRms(const std::vector<double>& data) {
        prefix_sq.resize(data.size() + 1, 0.0);
        for (std::size_t k = 0; k < data.size(); ++k) {
            prefix_sq[k + 1] = prefix_sq[k] + data[k] * data[k];
        }
    }

    [[nodiscard]] double over(std::size_t first, std::size_t last) const {
        return std::sqrt(std::max(0.0, (prefix_sq[last] - prefix_sq[first]) /
                                           static_cast<double>(last - first)));
    }
};

} // namespace

ScenarioMetrics scenario_metrics(const WaveformTrace& trace, std::span<const SagEvent> sags,
                                 std::span<const FaultEvent> faults,
                                 std::span<const ModeTransition> transitions,
                                 const NominalValues& nominal,
                                 std::optional<double> baseline_steady_peak) {
    require(nominal.v_source_rms > 0.0, "scenario_metrics: nominal source voltage must be > 0");
    require(nominal.v_pcc_rms > 0.0, "scenario_metrics: nominal PCC voltage must be > 0");
    require(nominal.fundamental_hz > 0.0, "scenario_metrics: fundamental must be > 0");
    trace.validate();
    const auto period_samples =
        static_cast<std::size_t>(std::llround(1.0 / (nominal.fundamental_hz * trace.dt)));
    require(period_samples >= 2 && trace.size() > period_samples,
            "scenario_metrics: trace shorter than one fundamental period");

    ScenarioMetrics metrics;

    // Sag depth: deepest one-period windowed RMS of the source EMF.
    {
        const RollingRms roll(trace.v_source);
        double min_rms = std::numeric_limits<double>::infinity();
        for (std::size_t first = 0; first + period_samples <= trace.size(); ++first) {
            min_rms = std::min(min_rms, roll.over(first, first + period_samples));
        }
        metrics.sag_depth = std::max(0.0, 1.0 - min_rms / nominal.v_source_rms);
    }

    // Compensation error: worst one-period load RMS deviation inside the
    // compensation-mode windows reconstructed from the transition log.
    {
        const RollingRms roll(trace.v_load);
        double worst = 0.0;
        double window_start = 0.0;
        OperatingMode current = trace.mode.empty() ? OperatingMode::Normal : trace.mode.front();
        auto close_window = [&](double t_end) {
            if (current != OperatingMode::Compensation) return;
            std::size_t first = index_at(trace, window_start);
            const std::size_t last = std::min(index_at(trace, t_end), trace.size());
            for (; first + period_samples <= last; ++first) {
                const double r = roll.over(first, first + period_samples);
                worst = std::max(worst, std::abs(r - nominal.v_pcc_rms) / nominal.v_pcc_rms);
            }
        };
        for (const auto& tr : transitions) {
            close_window(tr.time);
            window_start = tr.time;
            current = tr.to;
        }
        close_window(trace.time.back() + trace.dt);
        metrics.compensation_error = worst;
    }

    // Fault-window current metrics.
    double max_fault = 0.0;
    std::optional<double> limited;
    for (const auto& f : faults) {
        const std::size_t first = index_at(trace, f.start);
        const std::size_t last = std::min(index_at(trace, f.end), trace.size());
        for (std::size_t k = first; k < last; ++k) {
            max_fault = std::max(max_fault, std::abs(trace.i_line[k]));
        }
        // Steady amplitude over the last full period of the window, where the
        // switching transient has decayed furthest.
        if (last >= first + period_samples) {
            const double amp = steady_fundamental_amplitude(trace, TraceChannel::ILine, f.end,
                                                            nominal.fundamental_hz, 1);
            limited = limited ? std::max(*limited, amp) : amp;
        }
    }
    metrics.max_fault_current = max_fault;
    metrics.limited_steady_peak = limited;
    metrics.baseline_peak = baseline_steady_peak;
    if (limited && baseline_steady_peak && *limited > 0.0) {
        metrics.limiting_ratio = *baseline_steady_peak / *limited;
    }

    (void)sags;  // sag windows are implicit in the source channel
    return metrics;
}

namespace {

double sym(const std::map<std::string, double>& params, const char* label, const char* name) {
    const auto it = params.find(name);
    if (it == params.end()) {
        throw ValidationError(std::string("topology ") + label + ": missing parameter '" +
                              name + "'");
    }
    return it->second;
}

double loss_ref1(const std::map<std::string, double>& p) {
    const char* L = "[1]";
    return (sym(p, L, "i_pri") * sym(p, L, "r_s1") +
            sym(p, L, "i_sec_ref") * sym(p, L, "i_sec_ref") * sym(p, L, "r_s2_ref")) *
               sym(p, L, "i_pri") +
           (2.0 * sym(p, L, "v_df") + sym(p, L, "v_sw") + sym(p, L, "r_d") * sym(p, L, "i_d")) *
               sym(p, L, "i_dc");
}

double loss_ref23(const std::map<std::string, double>& p) {
    const char* L = "[23]";
    return (sym(p, L, "i_pri") * sym(p, L, "r_s1") +
            sym(p, L, "i_sec_ref") * sym(p, L, "i_sec_ref") * sym(p, L, "r_s2_ref")) *
               sym(p, L, "i_pri") +
           (std::numbers::sqrt2 * sym(p, L, "i_n") * sym(p, L, "r_c") + 2.0 * sym(p, L, "v_d") +
            sym(p, L, "v_igbt")) *
               sym(p, L, "i_dc");
}

double loss_ref24(const std::map<std::string, double>& p) {
    const char* L = "[24]";
    return sym(p, L, "p_core") + sym(p, L, "r_t1") * sym(p, L, "i_pri") * sym(p, L, "i_pri") +
           sym(p, L, "r_t2_series") * sym(p, L, "i_sec_ref") * sym(p, L, "i_sec_ref") +
           sym(p, L, "v_igbt") * sym(p, L, "i_line_ref");
}

double loss_ref22(const std::map<std::string, double>& p) {
    const char* L = "[22]";
    return sym(p, L, "p_core_series") +
           sym(p, L, "r_t1_series") * sym(p, L, "i_pri") * sym(p, L, "i_pri") +
           sym(p, L, "r_t2_series") * sym(p, L, "i_sec_ref") * sym(p, L, "i_sec_ref") +
           sym(p, L, "p_loss_diode") + sym(p, L, "v_igbt") * sym(p, L, "i_line_ref") +
           sym(p, L, "v_thyristor") * sym(p, L, "i_line_ref");
}

double loss_proposed(const std::map<std::string, double>& p) {
    const char* L = "proposed";
    return sym(p, L, "p_core") + sym(p, L, "r_t1") * sym(p, L, "i_pri") * sym(p, L, "i_pri") +
           sym(p, L, "r_t2_ref") * sym(p, L, "i_sec_ref") * sym(p, L, "i_sec_ref") +
           sym(p, L, "v_igbt") * sym(p, L, "i_line_ref");
}

} // namespace

const std::vector<TopologyEntry>& topology_table() {
    static const std::vector<TopologyEntry> table = {
        {"[1]", 2, 1, 0, false, true,
         {"i_pri", "i_sec_ref", "r_s1", "r_s2_ref", "v_df", "v_sw", "r_d", "i_d", "i_dc"},
         &loss_ref1},
        {"[23]", 1, 1, 1, false, true,
         {"i_pri", "i_sec_ref", "r_s1", "r_s2_ref", "i_n", "r_c", "v_d", "v_igbt", "i_dc"},
         &loss_ref23},
        {"[24]", 1, 6, 0, false, true,
         {"i_pri", "i_sec_ref", "i_line_ref", "p_core", "r_t1", "r_t2_series", "v_igbt"},
         &loss_ref24},
        {"[22]", 2, 24, 3, true, true,
         {"i_pri", "i_sec_ref", "i_line_ref", "p_core_series", "r_t1_series", "r_t2_series",
          "p_loss_diode", "v_igbt", "v_thyristor"},
         &loss_ref22},
        {"[9]", 2, 10, 0, true, true, {}, nullptr},
        {"proposed", 1, 6, 3, true, true,
         {"i_pri", "i_sec_ref", "i_line_ref", "p_core", "r_t1", "r_t2_ref", "v_igbt"},
         &loss_proposed},
    };
    return table;
}

std::vector<TopologyRow> topology_comparison(const std::map<std::string, double>& params) {
    std::vector<TopologyRow> rows;
    rows.reserve(topology_table().size());
    for (const auto& entry : topology_table()) {
        TopologyRow row;
        row.label = entry.label;
        row.transformers = entry.transformers;
        row.switches_3ph = entry.switches_3ph;
        row.dc_sources_3ph = entry.dc_sources_3ph;
        row.compensates_sag = entry.compensates_sag;
        row.limits_fault = entry.limits_fault;
        if (entry.has_loss_formula()) row.loss_w = entry.loss_eval(params);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace fcldvr
