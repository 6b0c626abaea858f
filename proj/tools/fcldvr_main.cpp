// Command-line front end: simulation runs, design sizing, waveform analysis
// and the topology comparison table.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fcldvr/analysis.hpp"
#include "fcldvr/circuit_model.hpp"
#include "fcldvr/design_toolkit.hpp"
#include "fcldvr/errors.hpp"
#include "fcldvr/scenario_io.hpp"
#include "fcldvr/transient_sim.hpp"

namespace {

using namespace fcldvr;

std::string fmt9(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return {buf, res.ptr};
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    return parse_scenario(in);
}

NominalValues nominal_of(const Scenario& sc) {
    const double omega = sc.grid.omega();
    NominalValues nominal;
    nominal.v_source_rms = sc.grid.v_source_rms;
    nominal.fundamental_hz = sc.grid.frequency;
    nominal.rated_peak_current = normal_mode_solution(sc.grid, sc.transformer).amplitude;
    nominal.v_pcc_rms = pcc_voltage_normal(
        {sc.grid.r_load, omega * sc.grid.l_load},
        {sc.grid.r_source_line, omega * sc.grid.l_source_line},
        {0.0, omega * sc.transformer.l_leakage}, sc.grid.v_source_rms);
    return nominal;
}

// --------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string scenario_path;
    std::string out_path;
    std::string report_path;
};

int run_simulate(const SimulateOpts& opts) {
    const Scenario scenario = load_scenario(opts.scenario_path);
    const SimResult result = run_scenario(scenario);
    write_trace(result.trace, opts.out_path);
    std::cout << "trace: " << opts.out_path << " (" << result.trace.size() << " rows, "
              << result.events.size() << " mode transitions"
              << (result.saturated ? ", injection saturated" : "") << ")\n";

    if (!opts.report_path.empty()) {
        const NominalValues nominal = nominal_of(scenario);
        const ScenarioMetrics metrics =
            scenario_metrics(result.trace, scenario.sags, scenario.faults, result.events,
                             nominal);
        std::ofstream rep(opts.report_path, std::ios::binary);
        if (!rep) throw ValidationError("cannot open '" + opts.report_path + "' for writing");
        write_report(std::optional<ScenarioMetrics>(metrics), rep);
        rep << "\n[run]\n"
            << "rows = " << result.trace.size() << '\n'
            << "transitions = " << result.events.size() << '\n'
            << "saturated = " << (result.saturated ? "true" : "false") << '\n'
            << "rated_peak_current = " << fmt9(result.rated_peak_current) << " A\n"
            << "nominal_pcc_rms = " << fmt9(result.nominal_pcc_rms) << " V\n";
        if (!rep) throw ValidationError("write failed for '" + opts.report_path + "'");
        std::cout << "report: " << opts.report_path << '\n';
    }
    return 0;
}

// ----------------------------------------------------------------- design

struct DesignOpts {
    std::string preset;
    std::optional<double> v_line;
    std::optional<double> frequency;
    std::optional<double> load_va;
    std::optional<double> i_rated;
    std::optional<double> lambda_i;
    std::optional<double> lambda_v;
    std::optional<double> v_ac_inv;
    std::optional<double> v_ces;
    std::optional<double> v_dc;
    std::optional<double> l_secondary;
    std::optional<double> turns_ratio;
    bool linear_form = false;
    std::string stress_case;
};

void fill_from_preset(DesignOpts& o) {
    if (o.preset.empty()) return;
    const Scenario sc = preset_scenario(o.preset);
    auto fill = [](std::optional<double>& slot, double v) {
        if (!slot) slot = v;
    };
    fill(o.v_line, sc.grid.v_source_rms);
    fill(o.frequency, sc.grid.frequency);
    fill(o.v_ces, sc.switches.v_ces);
    fill(o.v_dc, sc.switches.v_dc);
    fill(o.turns_ratio, sc.transformer.turns_ratio_a);
    if (!o.load_va && !o.i_rated) {
        // Apparent power the preset load draws at nominal voltage.
        const double z =
            total_impedance(sc.grid.r_load, sc.grid.l_load, sc.grid.omega()).magnitude();
        o.load_va = sc.grid.v_source_rms * sc.grid.v_source_rms / z;
    }
}

double req(const std::optional<double>& slot, const char* flag) {
    if (!slot) {
        throw ValidationError(std::string("missing ") + flag + " (pass it or use --preset)");
    }
    return *slot;
}

double resolve_i_rated(const DesignOpts& o) {
    if (o.i_rated) return *o.i_rated;
    if (o.load_va) return rated_load_current(*o.load_va, req(o.v_line, "--v-line"));
    throw ValidationError("missing --i-rated or --load-va (or use --preset)");
}

double omega_of(const DesignOpts& o) {
    return 2.0 * std::numbers::pi * req(o.frequency, "--frequency");
}

int run_design_lm(DesignOpts& o) {
    fill_from_preset(o);
    const double value = size_magnetizing_inductance(req(o.v_line, "--v-line"), omega_of(o),
                                                     req(o.lambda_i, "--lambda-i"),
                                                     resolve_i_rated(o));
    std::cout << "l_m_max = " << fmt9(value) << " H\n";
    return 0;
}

int run_design_turns(DesignOpts& o) {
    fill_from_preset(o);
    const double value =
        turns_ratio_for_sag(req(o.lambda_v, "--lambda-v"), req(o.v_line, "--v-line"),
                            req(o.v_ac_inv, "--v-ac-inv"));
    std::cout << "turns_ratio = " << fmt9(value) << '\n';
    return 0;
}

int run_design_series_ratio(DesignOpts& o) {
    fill_from_preset(o);
    const double v_line = req(o.v_line, "--v-line");
    const double lambda_i = req(o.lambda_i, "--lambda-i");
    const double i_rated = resolve_i_rated(o);
    const double omega = omega_of(o);
    const double l_secondary = req(o.l_secondary, "--l-secondary");
    const double value = o.linear_form
                             ? series_transformer_ratio_linear_form(v_line, lambda_i, i_rated,
                                                                    omega, l_secondary)
                             : series_transformer_ratio(v_line, lambda_i, i_rated, omega,
                                                        l_secondary);
    std::cout << (o.linear_form ? "series_ratio_linear = " : "series_ratio_k = ") << fmt9(value)
              << '\n';
    return 0;
}

int run_design_capacity(DesignOpts& o) {
    fill_from_preset(o);
    const double value = transformer_capacity(req(o.lambda_i, "--lambda-i"), resolve_i_rated(o),
                                              req(o.v_line, "--v-line"));
    std::cout << "transformer_va = " << fmt9(value) << " VA\n";
    return 0;
}

int run_design_dc_link(DesignOpts& o) {
    fill_from_preset(o);
    const double value = dc_link_limit(req(o.v_ces, "--v-ces"));
    std::cout << "dc_link_max = " << fmt9(value) << " V\n";
    return 0;
}

int run_design_stress(DesignOpts& o) {
    fill_from_preset(o);
    StressCase which = StressCase::Compensation;
    if (o.stress_case == "fault-pos") {
        which = StressCase::FaultPositiveHalf;
    } else if (o.stress_case == "fault-neg") {
        which = StressCase::FaultNegativeHalf;
    }
    const double v_peak = std::numbers::sqrt2 * req(o.v_line, "--v-line");
    const double value = switch_stress(which, req(o.lambda_v, "--lambda-v"), v_peak,
                                       req(o.turns_ratio, "--turns-ratio"),
                                       req(o.v_dc, "--v-dc"));
    std::cout << "stress = " << fmt9(value) << " V\n";
    return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOpts {
    std::string trace_path;
    std::string scenario_path;
    std::string channel_name = "v_load";
    double fundamental_hz = 50.0;
    std::optional<double> window;
    int max_harmonic = 50;
    std::optional<double> baseline;
};

const char* channel_unit(TraceChannel which) {
    return which == TraceChannel::ILine ? "A" : "V";
}

/// Trailing analysis window of the trace: the last `window` seconds when
/// given, otherwise the whole record.
std::span<const double> select_window(const WaveformTrace& trace, TraceChannel which,
                                      const std::optional<double>& window) {
    const std::vector<double>& data = channel(trace, which);
    if (!window) return {data.data(), data.size()};
    if (trace.dt <= 0.0) throw ValidationError("trace is too short to carry a sample period");
    const auto want = static_cast<std::size_t>(std::llround(*window / trace.dt));
    if (want == 0 || want > data.size()) {
        throw ValidationError("--window must cover between one sample and the whole trace");
    }
    return {data.data() + (data.size() - want), want};
}

int run_analyze_thd(const AnalyzeOpts& opts) {
    const WaveformTrace trace = read_trace(opts.trace_path);
    const TraceChannel which = channel_from_name(opts.channel_name);
    const auto samples = select_window(trace, which, opts.window);
    const HarmonicAnalysis result =
        harmonic_analysis(samples, trace.dt, opts.fundamental_hz, opts.max_harmonic);
    std::cout << "fundamental = " << fmt9(result.fundamental()) << ' ' << channel_unit(which)
              << '\n'
              << "thd = " << fmt9(result.thd) << '\n';
    return 0;
}

int run_analyze_rms(const AnalyzeOpts& opts) {
    const WaveformTrace trace = read_trace(opts.trace_path);
    const TraceChannel which = channel_from_name(opts.channel_name);
    const auto samples = select_window(trace, which, opts.window);
    std::cout << "rms = " << fmt9(rms(samples)) << ' ' << channel_unit(which) << '\n';
    return 0;
}

int run_analyze_metrics(const AnalyzeOpts& opts) {
    const WaveformTrace trace = read_trace(opts.trace_path);
    const Scenario scenario = load_scenario(opts.scenario_path);
    const std::vector<ModeTransition> transitions = events_from_trace(trace);
    const ScenarioMetrics metrics = scenario_metrics(
        trace, scenario.sags, scenario.faults, transitions, nominal_of(scenario),
        opts.baseline);
    write_report(std::optional<ScenarioMetrics>(metrics), std::cout);
    return 0;
}

// ------------------------------------------------------------- topologies

int run_compare(const std::string& params_path) {
    std::ifstream in(params_path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + params_path + "' for reading");
    const std::map<std::string, double> params = parse_params(in);
    const std::vector<TopologyRow> rows = topology_comparison(params);
    write_report(std::span<const TopologyRow>(rows.data(), rows.size()), std::cout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Series-transformer fault current limiter / voltage sag compensator toolkit"};
    app.require_subcommand(1);

    SimulateOpts sim_opts;
    CLI::App* sim = app.add_subcommand("simulate", "Run a scenario and emit the waveform trace");
    sim->add_option("--scenario", sim_opts.scenario_path, "scenario description file")
        ->required();
    sim->add_option("--out", sim_opts.out_path, "output trace (CSV)")->required();
    sim->add_option("--report", sim_opts.report_path, "also write a run-metrics report");

    DesignOpts design_opts;
    CLI::App* design = app.add_subcommand("design", "Sizing rules for one design point");
    design->require_subcommand(1);
    auto add_common = [&design_opts](CLI::App* cmd) {
        cmd->add_option("--preset", design_opts.preset,
                        "fill unset values from a built-in parameter set (table2, table3)")
            ->check(CLI::IsMember(preset_names()));
        cmd->add_option("--v-line", design_opts.v_line, "line voltage [V RMS]");
        return cmd;
    };
    CLI::App* d_lm = add_common(design->add_subcommand(
        "lm", "largest magnetizing inductance that still caps the fault current"));
    d_lm->add_option("--frequency", design_opts.frequency, "fundamental frequency [Hz]");
    d_lm->add_option("--lambda-i", design_opts.lambda_i, "allowed fault-current multiple");
    CLI::Option* lm_load = d_lm->add_option("--load-va", design_opts.load_va,
                                            "protected load apparent power [VA]");
    d_lm->add_option("--i-rated", design_opts.i_rated, "rated load current [A RMS]")
        ->excludes(lm_load);

    CLI::App* d_turns = add_common(
        design->add_subcommand("turns", "inverter coupling ratio for the deepest sag"));
    d_turns->add_option("--lambda-v", design_opts.lambda_v, "deepest compensable sag fraction");
    d_turns->add_option("--v-ac-inv", design_opts.v_ac_inv, "inverter AC voltage [V RMS]");

    CLI::App* d_series = add_common(design->add_subcommand(
        "series-ratio", "series-transformer turns ratio from the secondary inductance"));
    d_series->add_option("--frequency", design_opts.frequency, "fundamental frequency [Hz]");
    d_series->add_option("--lambda-i", design_opts.lambda_i, "allowed fault-current multiple");
    CLI::Option* sr_load = d_series->add_option("--load-va", design_opts.load_va,
                                                "protected load apparent power [VA]");
    d_series->add_option("--i-rated", design_opts.i_rated, "rated load current [A RMS]")
        ->excludes(sr_load);
    d_series->add_option("--l-secondary", design_opts.l_secondary,
                         "secondary-side inductance [H]");
    d_series->add_flag("--linear", design_opts.linear_form,
                       "evaluate the uncorrected linear form instead");

    CLI::App* d_capacity =
        add_common(design->add_subcommand("capacity", "required transformer capacity"));
    d_capacity->add_option("--lambda-i", design_opts.lambda_i,
                           "allowed fault-current multiple");
    CLI::Option* cap_load = d_capacity->add_option("--load-va", design_opts.load_va,
                                                   "protected load apparent power [VA]");
    d_capacity->add_option("--i-rated", design_opts.i_rated, "rated load current [A RMS]")
        ->excludes(cap_load);

    CLI::App* d_dc =
        add_common(design->add_subcommand("dc-link", "highest admissible DC-link voltage"));
    d_dc->add_option("--v-ces", design_opts.v_ces, "switch voltage rating [V]");

    CLI::App* d_stress =
        add_common(design->add_subcommand("stress", "peak voltage across one switch"));
    d_stress->add_option("--case", design_opts.stress_case,
                         "operating case: fault-pos, fault-neg or compensation")
        ->required()
        ->check(CLI::IsMember({"fault-pos", "fault-neg", "compensation"}));
    d_stress->add_option("--lambda-v", design_opts.lambda_v, "deepest compensable sag fraction");
    d_stress->add_option("--turns-ratio", design_opts.turns_ratio, "inverter coupling ratio");
    d_stress->add_option("--v-dc", design_opts.v_dc, "DC-link voltage [V]");

    AnalyzeOpts an_opts;
    CLI::App* analyze = app.add_subcommand("analyze", "Waveform analysis of a recorded trace");
    analyze->require_subcommand(1);
    auto add_trace_opts = [&an_opts](CLI::App* cmd, bool with_spectral) {
        cmd->add_option("--trace", an_opts.trace_path, "trace file (CSV)")->required();
        cmd->add_option("--channel", an_opts.channel_name,
                        "v_source, v_pcc, v_load, i_line or u_comp")
            ->capture_default_str();
        cmd->add_option("--window", an_opts.window, "trailing window length [s]");
        if (with_spectral) {
            cmd->add_option("--fundamental", an_opts.fundamental_hz, "fundamental [Hz]")
                ->capture_default_str();
            cmd->add_option("--max-harmonic", an_opts.max_harmonic, "highest harmonic order")
                ->capture_default_str();
        }
        return cmd;
    };
    CLI::App* a_thd =
        add_trace_opts(analyze->add_subcommand("thd", "harmonic distortion of a channel"), true);
    CLI::App* a_rms =
        add_trace_opts(analyze->add_subcommand("rms", "RMS value of a channel"), false);
    CLI::App* a_metrics = analyze->add_subcommand("metrics", "headline numbers of a run");
    a_metrics->add_option("--trace", an_opts.trace_path, "trace file (CSV)")->required();
    a_metrics
        ->add_option("--scenario", an_opts.scenario_path,
                     "scenario the trace was produced from (event log source)")
        ->required();
    a_metrics->add_option("--baseline", an_opts.baseline,
                          "unlimited steady fault amplitude for the limiting ratio [A]");

    std::string params_path;
    CLI::App* compare =
        app.add_subcommand("compare-topologies", "Evaluate the topology comparison table");
    compare->add_option("--params", params_path, "operating-point parameter file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return run_simulate(sim_opts);
        if (design->parsed()) {
            if (d_lm->parsed()) return run_design_lm(design_opts);
            if (d_turns->parsed()) return run_design_turns(design_opts);
            if (d_series->parsed()) return run_design_series_ratio(design_opts);
            if (d_capacity->parsed()) return run_design_capacity(design_opts);
            if (d_dc->parsed()) return run_design_dc_link(design_opts);
            if (d_stress->parsed()) return run_design_stress(design_opts);
        }
        if (analyze->parsed()) {
            if (a_thd->parsed()) return run_analyze_thd(an_opts);
            if (a_rms->parsed()) return run_analyze_rms(an_opts);
            if (a_metrics->parsed()) return run_analyze_metrics(an_opts);
        }
        if (compare->parsed()) return run_compare(params_path);
        std::cerr << "error: no command\n";
        return 2;
    } catch (const NumericError& err) {
        std::cerr << "numeric error: " << err.what() << '\n';
        return 3;
    } catch (const ValidationError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
}
