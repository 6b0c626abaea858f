#include "fcldvr/transient_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fcldvr {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

} // namespace

char mode_code(OperatingMode mode) {
    switch (mode) {
    case OperatingMode::Normal: return 'N';
    case OperatingMode::Compensation: return 'C';
    case OperatingMode::FaultLimiting: return 'F';
    }
    throw ValidationError("mode_code: unknown mode");
}

OperatingMode mode_from_code(char code) {
    switch (code) {
    case 'N': return OperatingMode::Normal;
    case 'C': return OperatingMode::Compensation;
    case 'F': return OperatingMode::FaultLimiting;
    default: throw ValidationError(std::string("mode_from_code: unknown mode code '") + code + "'");
    }
}

void SagEvent::validate() const {
    require(start >= 0.0, "SagEvent: start must be >= 0");
    require(end > start, "SagEvent: end must be > start");
    require(depth_alpha > 0.0 && depth_alpha < 1.0, "SagEvent: depth_alpha must lie in (0, 1)");
}

void FaultEvent::validate() const {
    require(start >= 0.0, "FaultEvent: start must be >= 0");
    require(end > start, "FaultEvent: end must be > start");
    require(fault_resistance >= 0.0, "FaultEvent: fault_resistance must be >= 0");
}

void SourceHarmonic::validate() const {
    require(order >= 2, "SourceHarmonic: order must be >= 2");
    require(amplitude_pu >= 0.0 && amplitude_pu < 1.0,
            "SourceHarmonic: amplitude_pu must lie in [0, 1)");
    require(std::isfinite(phase), "SourceHarmonic: phase must be finite");
}

void ControllerConfig::validate() const {
    require(sag_enter_pu > 0.0, "ControllerConfig: sag_enter_pu must be > 0");
    require(sag_enter_pu < sag_exit_pu,
            "ControllerConfig: sag_enter_pu must be below sag_exit_pu");
    require(sag_exit_pu <= 1.0, "ControllerConfig: sag_exit_pu must be <= 1");
    require(overcurrent_multiple > 1.0, "ControllerConfig: overcurrent_multiple must be > 1");
    require(rearm_hold >= 0.0, "ControllerConfig: rearm_hold must be >= 0");
    require(rms_window > 0.0, "ControllerConfig: rms_window must be > 0");
}

void WaveformTrace::validate() const {
    require(dt > 0.0, "WaveformTrace: dt must be > 0");
    const std::size_t n = time.size();
    require(v_source.size() == n && v_pcc.size() == n && v_load.size() == n &&
                i_line.size() == n && u_comp.size() == n && mode.size() == n &&
                switches.size() == n,
            "WaveformTrace: channel lengths differ");
    for (std::size_t k = 1; k < n; ++k) {
        require(time[k] > time[k - 1], "WaveformTrace: time must be strictly increasing");
        // Budget covers 9-significant-digit text round trips of the time
        // column without letting a wrong dt or a missing row through.
        require(std::abs((time[k] - time[k - 1]) - dt) <= 2e-8 * std::max(1.0, std::abs(time[k])),
                "WaveformTrace: sample period must be constant");
    }
}

void Scenario::validate() const {
    grid.validate();
    transformer.validate();
    switches.validate();
    controller.validate();
    require(horizon > 0.0, "Scenario: horizon must be > 0");
    require(dt > 0.0, "Scenario: dt must be > 0");
    if (dt > max_step_size(grid.frequency)) {
        throw ValidationError("Scenario: dt exceeds the integrator limit 1/(200*frequency)");
    }
    for (const auto& s : sags) s.validate();
    for (const auto& f : faults) f.validate();
    for (const auto& h : harmonics) h.validate();

    // Events must be ordered by start within each list and, across both
    // lists, must not overlap in time.
    struct Span { double start, end; };
    std::vector<Span> merged;
    merged.reserve(sags.size() + faults.size());
    for (std::size_t k = 0; k < sags.size(); ++k) {
        if (k > 0) require(sags[k].start >= sags[k - 1].start, "Scenario: sag events out of order");
        merged.push_back({sags[k].start, sags[k].end});
    }
    for (std::size_t k = 0; k < faults.size(); ++k) {
        if (k > 0) {
            require(faults[k].start >= faults[k - 1].start, "Scenario: fault events out of order");
        }
        merged.push_back({faults[k].start, faults[k].end});
        require(faults[k].end <= horizon, "Scenario: fault event ends past the horizon");
    }
    for (const auto& s : sags) require(s.end <= horizon, "Scenario: sag event ends past the horizon");
    std::sort(merged.begin(), merged.end(),
              [](const Span& a, const Span& b) { return a.start < b.start; });
    for (std::size_t k = 1; k < merged.size(); ++k) {
        require(merged[k].start >= merged[k - 1].end, "Scenario: events overlap in time");
    }
}

double max_step_size(double frequency) {
    require(frequency > 0.0, "max_step_size: frequency must be > 0");
    return 1.0 / (200.0 * frequency);
}

double source_emf(double t, const GridParams& grid, const ActiveEvents& active,
                  const std::vector<SourceHarmonic>& harmonics) {
    const double omega = grid.omega();
    const double scale = active.sag_alpha ? (1.0 - *active.sag_alpha) : 1.0;
    double v = std::sin(omega * t);
    for (const auto& h : harmonics) {
        v += h.amplitude_pu * std::sin(static_cast<double>(h.order) * omega * t + h.phase);
    }
    return scale * grid.v_peak() * v;
}

CompensationCommand compensation_reference(double v_source_instant,
                                           double nominal_waveform_instant,
                                           const TransformerParams& xfmr,
                                           const SwitchParams& switches) {
    CompensationCommand cmd;
    cmd.secondary_command =
        (nominal_waveform_instant - v_source_instant) / xfmr.turns_ratio_a;
    if (cmd.secondary_command > switches.v_dc) {
        cmd.secondary_command = switches.v_dc;
        cmd.saturated = true;
    } else if (cmd.secondary_command < -switches.v_dc) {
        cmd.secondary_command = -switches.v_dc;
        cmd.saturated = true;
    }
    return cmd;
}

namespace {

/// Resolved single-mesh view of the network for one mode + event set.
struct Topology {
    double r_loop = 0.0;   ///< total series resistance of the mesh [ohm]
    double l_loop = 0.0;   ///< total series inductance of the mesh [H]
    double r_shunt = 0.0;  ///< coupling-point shunt resistance during a fault [ohm]
    bool fault_active = false;
};

Topology resolve_topology(OperatingMode mode, const GridParams& grid,
                          const TransformerParams& xfmr, const ActiveEvents& active) {
    Topology topo;
    // The transformer leakage stays in the series path in every mode; the
    // magnetizing inductance joins it when the switches are open.
    double l_series = grid.l_source_line + xfmr.l_leakage;
    if (mode == OperatingMode::FaultLimiting) l_series += xfmr.l_magnetizing;
    if (active.fault_resistance) {
        // Faulted: the load branch is shorted out (bolted) or reduced to its
        // resistance in parallel with the fault path.
        topo.fault_active = true;
        const double rf = *active.fault_resistance;
        topo.r_shunt = (rf > 0.0 && grid.r_load > 0.0)
                           ? rf * grid.r_load / (rf + grid.r_load)
                           : 0.0;
        topo.r_loop = grid.r_source_line + topo.r_shunt;
        topo.l_loop = l_series;
    } else {
        topo.r_loop = grid.r_source_line + grid.r_load;
        topo.l_loop = l_series + grid.l_load;
    }
    return topo;
}

/// Injected series voltage (primary side) for a given mode and filter state,
/// evaluated at time t. Returns the voltage and whether the clamp engaged.
struct Injection {
    double u_comp = 0.0;
    double v_cap = 0.0;
    bool saturated = false;
};

Injection injection_at(double t, OperatingMode mode, double v_cap_prev,
                       const GridParams& grid, const TransformerParams& xfmr,
                       const SwitchParams& switches, const ActiveEvents& active,
                       const std::vector<SourceHarmonic>& harmonics) {
    Injection inj;
    if (mode == OperatingMode::FaultLimiting) {
        // Switches open: the secondary is isolated, the filter holds its
        // charge and nothing is injected.
        inj.v_cap = v_cap_prev;
        return inj;
    }
    double command = 0.0;
    if (mode == OperatingMode::Compensation) {
        const double nominal = grid.v_peak() * std::sin(grid.omega() * t);
        const double actual = source_emf(t, grid, active, harmonics);
        const CompensationCommand cmd =
            compensation_reference(actual, nominal, xfmr, switches);
        command = cmd.secondary_command;
        inj.saturated = cmd.saturated;
    }
    // Secondary-side RC between the inverter and the capacitor; with a
    // degenerate filter the capacitor is pinned to the command.
    const double r_sec = xfmr.r_secondary_referred / (xfmr.turns_ratio_a * xfmr.turns_ratio_a);
    if (xfmr.c_filter > 0.0 && r_sec > 0.0) {
        inj.v_cap = v_cap_prev;  // advanced by the integrator, not here
    } else {
        inj.v_cap = command;
    }
    inj.u_comp = (mode == OperatingMode::Compensation) ? xfmr.turns_ratio_a * inj.v_cap : 0.0;
    return inj;
}

} // namespace

SimState step(const SimState& state, const GridParams& grid, const TransformerParams& xfmr,
              const SwitchParams& switches, const ActiveEvents& active, double dt,
              const std::vector<SourceHarmonic>& harmonics) {
    require(dt > 0.0, "step: dt must be > 0");
    if (dt > max_step_size(grid.frequency)) {
        throw ValidationError("step: dt exceeds the integrator limit 1/(200*frequency)");
    }

    const double t0 = state.time;
    const double t1 = t0 + dt;
    const Topology topo = resolve_topology(state.mode, grid, xfmr, active);
    require(topo.l_loop > 0.0, "step: loop inductance must be > 0");

    // Filter capacitor first: its trajectory does not depend on the line
    // current, the line current depends on it through the injection.
    const double a = xfmr.turns_ratio_a;
    const double r_sec = xfmr.r_secondary_referred / (a * a);
    double v_cap1;
    double u0;
    double u1;
    if (state.mode == OperatingMode::FaultLimiting) {
        v_cap1 = state.v_cap;
        u0 = 0.0;
        u1 = 0.0;
    } else {
        auto command_at = [&](double t) {
            if (state.mode != OperatingMode::Compensation) return 0.0;
            const double nominal = grid.v_peak() * std::sin(grid.omega() * t);
            const double actual = source_emf(t, grid, active, harmonics);
            return compensation_reference(actual, nominal, xfmr, switches).secondary_command;
        };
        const double c0 = command_at(t0);
        const double c1 = command_at(t1);
        if (xfmr.c_filter > 0.0 && r_sec > 0.0) {
            // dv/dt = (cmd - v)/tau, trapezoidal update.
            const double tau = r_sec * xfmr.c_filter;
            const double q = dt / (2.0 * tau);
            v_cap1 = (state.v_cap * (1.0 - q) + q * (c0 + c1)) / (1.0 + q);
            u0 = (state.mode == OperatingMode::Compensation) ? a * state.v_cap : 0.0;
            u1 = (state.mode == OperatingMode::Compensation) ? a * v_cap1 : 0.0;
        } else {
            v_cap1 = c1;
            u0 = (state.mode == OperatingMode::Compensation) ? a * c0 : 0.0;
            u1 = (state.mode == OperatingMode::Compensation) ? a * c1 : 0.0;
        }
    }

    // Line current: L di/dt = (v_s + u_comp) - R i, trapezoidal update of the
    // piecewise-linear mesh.
    const double e0 = source_emf(t0, grid, active, harmonics) + u0;
    const double e1 = source_emf(t1, grid, active, harmonics) + u1;
    const double q = dt * topo.r_loop / (2.0 * topo.l_loop);
    const double i1 =
        (state.i_line * (1.0 - q) + dt / (2.0 * topo.l_loop) * (e0 + e1)) / (1.0 + q);

    if (!std::isfinite(i1) || !std::isfinite(v_cap1)) {
        throw NumericError("step: non-finite state at t = " + std::to_string(t1));
    }

    SimState next = state;
    next.time = t1;
    next.i_line = i1;
    next.v_cap = v_cap1;
    next.u_comp = u1;
    return next;
}

double instantaneous_pcc(const SimState& state, const GridParams& grid,
                         const TransformerParams& xfmr, const ActiveEvents& active,
                         const std::vector<SourceHarmonic>& harmonics) {
    const Topology topo = resolve_topology(state.mode, grid, xfmr, active);
    if (topo.fault_active) {
        return topo.r_shunt * state.i_line;
    }
    // Voltage across the load branch: R_L i + L_L di/dt with the derivative
    // taken from the mesh equation.
    const double e = source_emf(state.time, grid, active, harmonics) + state.u_comp;
    const double didt = (e - topo.r_loop * state.i_line) / topo.l_loop;
    return grid.r_load * state.i_line + grid.l_load * didt;
}

OperatingMode detect_mode(const SimState& state, double detection_rms,
                          double rated_peak_current, double nominal_pcc_rms,
                          const ControllerConfig& cfg, double time_below_rated) {
    const double trip_level = cfg.overcurrent_multiple * rated_peak_current;
    // Overcurrent wins over any voltage condition.
    if (cfg.limiter_enabled && std::abs(state.i_line) > trip_level) {
        return OperatingMode::FaultLimiting;
    }
    const bool sagged = detection_rms < cfg.sag_enter_pu * nominal_pcc_rms;
    const bool recovered = detection_rms >= cfg.sag_exit_pu * nominal_pcc_rms;
    switch (state.mode) {
    case OperatingMode::FaultLimiting:
        // Re-close only after the current has stayed inside the rated band
        // long enough; the sag test picks the follow-on mode.
        if (time_below_rated >= cfg.rearm_hold) {
            return (sagged && cfg.compensator_enabled) ? OperatingMode::Compensation
                                                       : OperatingMode::Normal;
        }
        return OperatingMode::FaultLimiting;
    case OperatingMode::Compensation:
        return recovered ? OperatingMode::Normal : OperatingMode::Compensation;
    case OperatingMode::Normal:
        return (cfg.compensator_enabled && sagged) ? OperatingMode::Compensation
                                                   : OperatingMode::Normal;
    }
    throw ValidationError("detect_mode: unknown mode");
}

namespace {

ActiveEvents active_at(double t, const Scenario& sc) {
    ActiveEvents act;
    for (const auto& s : sc.sags) {
        if (t >= s.start && t < s.end) {
            act.sag_alpha = s.depth_alpha;
            break;
        }
    }
    for (const auto& f : sc.faults) {
        if (t >= f.start && t < f.end) {
            act.fault_resistance = f.fault_resistance;
            break;
        }
    }
    return act;
}

} // namespace

SimResult run_scenario(const Scenario& sc) {
    sc.validate();
    const GridParams& grid = sc.grid;
    const TransformerParams& xfmr = sc.transformer;
    const double omega = grid.omega();

    SimResult result;
    const SinusoidSolution rated = normal_mode_solution(grid, xfmr);
    result.rated_peak_current = rated.amplitude;
    result.nominal_pcc_rms = pcc_voltage_normal(
        {grid.r_load, omega * grid.l_load},
        {grid.r_source_line, omega * grid.l_source_line},
        {0.0, omega * xfmr.l_leakage}, grid.v_source_rms);

    const auto n_steps = static_cast<std::size_t>(std::llround(sc.horizon / sc.dt));
    require(n_steps >= 1, "run_scenario: horizon must cover at least one step");

    // Trailing-window RMS of the grid-side voltage (coupling point minus the
    // injected series voltage), warm-started at the nominal level so an
    // event-free run never leaves Normal.
    const auto window_len =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sc.controller.rms_window / sc.dt)));
    const double nominal_sq = result.nominal_pcc_rms * result.nominal_pcc_rms;
    std::vector<double> window(window_len, nominal_sq);
    double window_sum = nominal_sq * static_cast<double>(window_len);
    std::size_t window_pos = 0;

    WaveformTrace& trace = result.trace;
    trace.dt = sc.dt;
    trace.time.reserve(n_steps + 1);
    trace.v_source.reserve(n_steps + 1);
    trace.v_pcc.reserve(n_steps + 1);
    trace.v_load.reserve(n_steps + 1);
    trace.i_line.reserve(n_steps + 1);
    trace.u_comp.reserve(n_steps + 1);
    trace.mode.reserve(n_steps + 1);
    trace.switches.reserve(n_steps + 1);

    SimState state;
    state.time = 0.0;

    double last_at_or_above_rated = -std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * sc.dt;
        state.time = t;
        const ActiveEvents act = active_at(t, sc);

        // Measure with the topology that was in force up to this instant.
        const double v_pcc_measured = instantaneous_pcc(state, grid, xfmr, act, sc.harmonics);
        const double sensed = v_pcc_measured - state.u_comp;
        window_sum += sensed * sensed - window[window_pos];
        window[window_pos] = sensed * sensed;
        window_pos = (window_pos + 1) % window_len;
        const double detection_rms =
            std::sqrt(std::max(0.0, window_sum / static_cast<double>(window_len)));

        if (std::abs(state.i_line) >= result.rated_peak_current) last_at_or_above_rated = t;
        const double time_below_rated = t - last_at_or_above_rated;

        const OperatingMode next_mode = detect_mode(state, detection_rms,
                                                    result.rated_peak_current,
                                                    result.nominal_pcc_rms, sc.controller,
                                                    time_below_rated);
        if (next_mode != state.mode) {
            result.events.push_back({t, state.mode, next_mode, state.i_line});
            state.mode = next_mode;
            state.switches_on = (next_mode != OperatingMode::FaultLimiting);
        }

        // Actuate: the row reflects the topology in force from t onward.
        const Injection inj = injection_at(t, state.mode, state.v_cap, grid, xfmr,
                                           sc.switches, act, sc.harmonics);
        state.v_cap = inj.v_cap;
        state.u_comp = inj.u_comp;
        if (inj.saturated && !result.saturated) {
            result.saturated = true;
            result.first_saturation = t;
        }
        const double v_pcc_row = instantaneous_pcc(state, grid, xfmr, act, sc.harmonics);

        trace.time.push_back(t);
        trace.v_source.push_back(source_emf(t, grid, act, sc.harmonics));
        trace.v_pcc.push_back(v_pcc_row);
        trace.v_load.push_back(v_pcc_row);
        trace.i_line.push_back(state.i_line);
        trace.u_comp.push_back(state.u_comp);
        trace.mode.push_back(state.mode);
        trace.switches.push_back(state.switches_on ? 1 : 0);

        if (k == n_steps) break;
        state = step(state, grid, xfmr, sc.switches, act, sc.dt, sc.harmonics);
    }
    return result;
}

} // namespace fcldvr
