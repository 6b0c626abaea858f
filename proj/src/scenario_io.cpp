#include "fcldvr/scenario_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace fcldvr {

namespace {

constexpr const char* kTraceHeader =
    "time_s,v_source_V,v_pcc_V,v_load_V,i_line_A,u_comp_V,mode,switches";

// ------------------------------------------------------------ number text

/// Shortest decimal that reparses to the identical double.
std::string format_shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

/// 9 significant digits, printf %g style.
std::string format_sig9(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return {buf, res.ptr};
}

bool parse_double(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

bool parse_int(std::string_view text, int& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

// ----------------------------------------------------------------- lexing

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::string_view strip_comment(std::string_view s) {
    const auto pos = s.find('#');
    return pos == std::string_view::npos ? s : s.substr(0, pos);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < s.size()) {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
        std::size_t start = pos;
        while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t') ++pos;
        if (pos > start) tokens.push_back(s.substr(start, pos - start));
    }
    return tokens;
}

// ------------------------------------------------------------------ units

enum class Dim {
    Voltage,
    Frequency,
    Resistance,
    Inductance,
    Capacitance,
    Power,
    Time,
    Angle,
    Scalar,  ///< dimensionless: no unit token allowed
    Flag,    ///< boolean: true/false
};

struct UnitDef {
    const char* name;
    double factor;
};

std::span<const UnitDef> units_for(Dim dim) {
    static constexpr UnitDef voltage[] = {{"V", 1.0}, {"kV", 1e3}, {"mV", 1e-3}};
    static constexpr UnitDef frequency[] = {{"Hz", 1.0}, {"kHz", 1e3}};
    static constexpr UnitDef resistance[] = {
        {"ohm", 1.0}, {"Ohm", 1.0}, {"kohm", 1e3}, {"mohm", 1e-3}};
    static constexpr UnitDef inductance[] = {{"H", 1.0}, {"mH", 1e-3}, {"uH", 1e-6}};
    static constexpr UnitDef capacitance[] = {
        {"F", 1.0}, {"mF", 1e-3}, {"uF", 1e-6}, {"nF", 1e-9}};
    static constexpr UnitDef power[] = {{"W", 1.0}, {"kW", 1e3}, {"mW", 1e-3}};
    static constexpr UnitDef time[] = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}};
    static const UnitDef angle[] = {{"rad", 1.0}, {"deg", std::numbers::pi / 180.0}};
    switch (dim) {
    case Dim::Voltage: return voltage;
    case Dim::Frequency: return frequency;
    case Dim::Resistance: return resistance;
    case Dim::Inductance: return inductance;
    case Dim::Capacitance: return capacitance;
    case Dim::Power: return power;
    case Dim::Time: return time;
    case Dim::Angle: return angle;
    default: return {};
    }
}

const char* dim_label(Dim dim) {
    switch (dim) {
    case Dim::Voltage: return "a voltage unit (V, kV, mV)";
    case Dim::Frequency: return "a frequency unit (Hz, kHz)";
    case Dim::Resistance: return "a resistance unit (ohm, kohm, mohm)";
    case Dim::Inductance: return "an inductance unit (H, mH, uH)";
    case Dim::Capacitance: return "a capacitance unit (F, mF, uF, nF)";
    case Dim::Power: return "a power unit (W, kW, mW)";
    case Dim::Time: return "a time unit (s, ms, us)";
    case Dim::Angle: return "an angle unit (rad, deg)";
    default: return "no unit";
    }
}

const char* canonical_unit(Dim dim) {
    switch (dim) {
    case Dim::Voltage: return "V";
    case Dim::Frequency: return "Hz";
    case Dim::Resistance: return "ohm";
    case Dim::Inductance: return "H";
    case Dim::Capacitance: return "F";
    case Dim::Power: return "W";
    case Dim::Time: return "s";
    case Dim::Angle: return "rad";
    default: return "";
    }
}

/// `value_text` is the right-hand side of a `key = value unit` line.
double parse_quantity(std::string_view value_text, Dim dim, std::string_view key, int line) {
    const auto tokens = split_ws(value_text);
    if (dim == Dim::Flag) {
        if (tokens.size() == 1) {
            if (tokens[0] == "true" || tokens[0] == "1") return 1.0;
            if (tokens[0] == "false" || tokens[0] == "0") return 0.0;
        }
        throw ParseError("value of '" + std::string(key) + "' must be true or false", line);
    }
    if (tokens.empty() || tokens.size() > 2) {
        throw ParseError("expected '" + std::string(key) + " = <number> [unit]'", line);
    }
    double value = 0.0;
    if (!parse_double(tokens[0], value)) {
        throw ParseError("cannot parse number '" + std::string(tokens[0]) + "'", line);
    }
    if (!std::isfinite(value)) {
        throw ParseError("value of '" + std::string(key) + "' must be finite", line);
    }
    if (dim == Dim::Scalar) {
        if (tokens.size() != 1) {
            throw ParseError("'" + std::string(key) + "' is dimensionless and takes no unit",
                             line);
        }
        return value;
    }
    if (tokens.size() != 2) {
        throw ParseError("'" + std::string(key) + "' needs " + dim_label(dim), line);
    }
    for (const UnitDef& unit : units_for(dim)) {
        if (tokens[1] == unit.name) return value * unit.factor;
    }
    throw ParseError("unit '" + std::string(tokens[1]) + "' is not valid for '" +
                         std::string(key) + "' (expected " + dim_label(dim) + ")",
                     line);
}

// ------------------------------------------------------------ scalar keys

struct ScalarKey {
    const char* name;
    Dim dim;
    void (*set)(Scenario&, double);
    double (*get)(const Scenario&);
};

std::span<const ScalarKey> scalar_keys() {
    static const std::array<ScalarKey, 25> keys = {{
        {"v_source_rms", Dim::Voltage, [](Scenario& s, double v) { s.grid.v_source_rms = v; },
         [](const Scenario& s) { return s.grid.v_source_rms; }},
        {"frequency", Dim::Frequency, [](Scenario& s, double v) { s.grid.frequency = v; },
         [](const Scenario& s) { return s.grid.frequency; }},
        {"r_source_line", Dim::Resistance,
         [](Scenario& s, double v) { s.grid.r_source_line = v; },
         [](const Scenario& s) { return s.grid.r_source_line; }},
        {"l_source_line", Dim::Inductance,
         [](Scenario& s, double v) { s.grid.l_source_line = v; },
         [](const Scenario& s) { return s.grid.l_source_line; }},
        {"r_load", Dim::Resistance, [](Scenario& s, double v) { s.grid.r_load = v; },
         [](const Scenario& s) { return s.grid.r_load; }},
        {"l_load", Dim::Inductance, [](Scenario& s, double v) { s.grid.l_load = v; },
         [](const Scenario& s) { return s.grid.l_load; }},
        {"turns_ratio_a", Dim::Scalar,
         [](Scenario& s, double v) { s.transformer.turns_ratio_a = v; },
         [](const Scenario& s) { return s.transformer.turns_ratio_a; }},
        {"l_magnetizing", Dim::Inductance,
         [](Scenario& s, double v) { s.transformer.l_magnetizing = v; },
         [](const Scenario& s) { return s.transformer.l_magnetizing; }},
        {"l_leakage", Dim::Inductance,
         [](Scenario& s, double v) { s.transformer.l_leakage = v; },
         [](const Scenario& s) { return s.transformer.l_leakage; }},
        {"r_primary", Dim::Resistance,
         [](Scenario& s, double v) { s.transformer.r_primary = v; },
         [](const Scenario& s) { return s.transformer.r_primary; }},
        {"r_secondary_referred", Dim::Resistance,
         [](Scenario& s, double v) { s.transformer.r_secondary_referred = v; },
         [](const Scenario& s) { return s.transformer.r_secondary_referred; }},
        {"p_core", Dim::Power, [](Scenario& s, double v) { s.transformer.p_core = v; },
         [](const Scenario& s) { return s.transformer.p_core; }},
        {"c_filter", Dim::Capacitance,
         [](Scenario& s, double v) { s.transformer.c_filter = v; },
         [](const Scenario& s) { return s.transformer.c_filter; }},
        {"v_ces", Dim::Voltage, [](Scenario& s, double v) { s.switches.v_ces = v; },
         [](const Scenario& s) { return s.switches.v_ces; }},
        {"v_on_drop", Dim::Voltage, [](Scenario& s, double v) { s.switches.v_on_drop = v; },
         [](const Scenario& s) { return s.switches.v_on_drop; }},
        {"v_dc", Dim::Voltage, [](Scenario& s, double v) { s.switches.v_dc = v; },
         [](const Scenario& s) { return s.switches.v_dc; }},
        {"sag_enter_pu", Dim::Scalar,
         [](Scenario& s, double v) { s.controller.sag_enter_pu = v; },
         [](const Scenario& s) { return s.controller.sag_enter_pu; }},
        {"sag_exit_pu", Dim::Scalar,
         [](Scenario& s, double v) { s.controller.sag_exit_pu = v; },
         [](const Scenario& s) { return s.controller.sag_exit_pu; }},
        {"overcurrent_multiple", Dim::Scalar,
         [](Scenario& s, double v) { s.controller.overcurrent_multiple = v; },
         [](const Scenario& s) { return s.controller.overcurrent_multiple; }},
        {"rearm_hold", Dim::Time, [](Scenario& s, double v) { s.controller.rearm_hold = v; },
         [](const Scenario& s) { return s.controller.rearm_hold; }},
        {"rms_window", Dim::Time, [](Scenario& s, double v) { s.controller.rms_window = v; },
         [](const Scenario& s) { return s.controller.rms_window; }},
        {"limiter_enabled", Dim::Flag,
         [](Scenario& s, double v) { s.controller.limiter_enabled = v != 0.0; },
         [](const Scenario& s) { return s.controller.limiter_enabled ? 1.0 : 0.0; }},
        {"compensator_enabled", Dim::Flag,
         [](Scenario& s, double v) { s.controller.compensator_enabled = v != 0.0; },
         [](const Scenario& s) { return s.controller.compensator_enabled ? 1.0 : 0.0; }},
        {"horizon", Dim::Time, [](Scenario& s, double v) { s.horizon = v; },
         [](const Scenario& s) { return s.horizon; }},
        {"dt", Dim::Time, [](Scenario& s, double v) { s.dt = v; },
         [](const Scenario& s) { return s.dt; }},
    }};
    return keys;
}

const ScalarKey* find_scalar_key(std::string_view name) {
    for (const ScalarKey& key : scalar_keys()) {
        if (name == key.name) return &key;
    }
    return nullptr;
}

// ------------------------------------------------------------ block state

enum class BlockKind { None, Event, Harmonic };

struct BlockEntry {
    std::string value;
    int line = 0;
};

bool block_key_allowed(BlockKind kind, std::string_view key) {
    if (kind == BlockKind::Event) {
        return key == "type" || key == "start" || key == "end" || key == "depth" ||
               key == "resistance";
    }
    return key == "order" || key == "amplitude" || key == "phase";
}

} // namespace

// ---------------------------------------------------------------- presets

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"table2", "table3"};
    return names;
}

Scenario preset_scenario(const std::string& name) {
    Scenario sc;
    // Shared entries of both parameter tables.
    sc.grid.frequency = 50.0;
    sc.grid.r_load = 45.0;
    sc.transformer.turns_ratio_a = 5.0;
    sc.transformer.l_magnetizing = 80e-3;
    sc.transformer.l_leakage = 1.7e-3;
    sc.switches.v_ces = 1200.0;
    sc.switches.v_on_drop = 2.0;
    sc.controller.rearm_hold = 20e-3;
    sc.controller.rms_window = 10e-3;
    sc.horizon = 0.4;
    sc.dt = 10e-6;
    if (name == "table2") {
        sc.grid.v_source_rms = 220.0;
        sc.grid.r_source_line = 0.1;
        sc.grid.l_source_line = 0.5e-3;
        sc.grid.l_load = 10e-3;
        sc.switches.v_dc = 40.0;
        sc.transformer.c_filter = 0.0;
    } else if (name == "table3") {
        sc.grid.v_source_rms = 63.0;
        sc.grid.r_source_line = 0.0;
        sc.grid.l_source_line = 0.0;
        sc.grid.l_load = 1e-3;
        sc.switches.v_dc = 10.0;
        sc.transformer.c_filter = 20e-6;
    } else {
        throw ValidationError("unknown preset '" + name + "' (known: table2, table3)");
    }
    sc.preset_name = name;
    sc.validate();  // every preset must satisfy the invariants at load time
    return sc;
}

// ---------------------------------------------------------------- parsing

Scenario parse_scenario(std::istream& in) {
    Scenario sc;
    bool any_entry = false;
    BlockKind block = BlockKind::None;
    int block_line = 0;
    std::map<std::string, BlockEntry, std::less<>> block_kv;

    auto block_quantity = [&](const char* key, Dim dim) {
        const auto it = block_kv.find(key);
        if (it == block_kv.end()) {
            const char* kind = block == BlockKind::Event ? "[event]" : "[harmonic]";
            throw ParseError(std::string(kind) + " block is missing '" + key + "'", block_line);
        }
        return parse_quantity(it->second.value, dim, key, it->second.line);
    };
    auto forbid = [&](const char* key, const char* why) {
        const auto it = block_kv.find(key);
        if (it != block_kv.end()) {
            throw ParseError("'" + std::string(key) + "' does not apply to " + why,
                             it->second.line);
        }
    };

    auto flush_block = [&]() {
        if (block == BlockKind::None) return;
        if (block == BlockKind::Event) {
            const auto type_it = block_kv.find("type");
            if (type_it == block_kv.end()) {
                throw ParseError("[event] block needs a 'type' key (sag or fault)", block_line);
            }
            const std::string& type = type_it->second.value;
            if (type == "sag") {
                forbid("resistance", "a sag event");
                SagEvent event;
                event.start = block_quantity("start", Dim::Time);
                event.end = block_quantity("end", Dim::Time);
                event.depth_alpha = block_quantity("depth", Dim::Scalar);
                sc.sags.push_back(event);
            } else if (type == "fault") {
                forbid("depth", "a fault event");
                FaultEvent event;
                event.start = block_quantity("start", Dim::Time);
                event.end = block_quantity("end", Dim::Time);
                if (block_kv.count("resistance") != 0) {
                    event.fault_resistance = block_quantity("resistance", Dim::Resistance);
                }
                sc.faults.push_back(event);
            } else {
                throw ParseError("event type must be sag or fault, got '" + type + "'",
                                 type_it->second.line);
            }
        } else {
            SourceHarmonic harmonic;
            const auto order_it = block_kv.find("order");
            if (order_it == block_kv.end()) {
                throw ParseError("[harmonic] block is missing 'order'", block_line);
            }
            if (!parse_int(trim(order_it->second.value), harmonic.order)) {
                throw ParseError("harmonic 'order' must be an integer",
                                 order_it->second.line);
            }
            harmonic.amplitude_pu = block_quantity("amplitude", Dim::Scalar);
            if (block_kv.count("phase") != 0) {
                harmonic.phase = block_quantity("phase", Dim::Angle);
            }
            sc.harmonics.push_back(harmonic);
        }
        block_kv.clear();
    };

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            flush_block();
            if (line == "[event]") {
                block = BlockKind::Event;
            } else if (line == "[harmonic]") {
                block = BlockKind::Harmonic;
            } else {
                throw ParseError("unknown block '" + std::string(line) +
                                     "' (expected [event] or [harmonic])",
                                 line_no);
            }
            block_line = line_no;
            any_entry = true;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected 'key = value', got '" + std::string(line) + "'", line_no);
        }
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        if (key.empty()) throw ParseError("missing key before '='", line_no);
        if (value.empty()) throw ParseError("missing value for '" + key + "'", line_no);

        if (block != BlockKind::None) {
            if (!block_key_allowed(block, key)) {
                const char* kind = block == BlockKind::Event ? "[event]" : "[harmonic]";
                throw ParseError("unknown key '" + key + "' in " + kind + " block", line_no);
            }
            block_kv[key] = BlockEntry{value, line_no};
            continue;
        }

        if (key == "preset") {
            if (any_entry) {
                throw ParseError("'preset' must be the first entry of the document", line_no);
            }
            try {
                sc = preset_scenario(value);
            } catch (const ValidationError& err) {
                throw ParseError(err.what(), line_no);
            }
            any_entry = true;
            continue;
        }

        const ScalarKey* scalar = find_scalar_key(key);
        if (scalar == nullptr) {
            throw ParseError("unknown key '" + key + "'", line_no);
        }
        scalar->set(sc, parse_quantity(value, scalar->dim, key, line_no));
        any_entry = true;
    }
    flush_block();

    sc.validate();
    return sc;
}

Scenario parse_scenario(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

std::string serialize_scenario(const Scenario& sc) {
    if (!sc.preset_name.empty()) {
        const auto& names = preset_names();
        if (std::find(names.begin(), names.end(), sc.preset_name) == names.end()) {
            throw ValidationError("serialize_scenario: unknown preset name '" + sc.preset_name +
                                  "'");
        }
    }
    std::string out;
    out.reserve(1024);
    if (!sc.preset_name.empty()) {
        out += "preset = ";
        out += sc.preset_name;
        out += '\n';
    }
    for (const ScalarKey& key : scalar_keys()) {
        out += key.name;
        out += " = ";
        if (key.dim == Dim::Flag) {
            out += key.get(sc) != 0.0 ? "true" : "false";
        } else {
            out += format_shortest(key.get(sc));
            if (key.dim != Dim::Scalar) {
                out += ' ';
                out += canonical_unit(key.dim);
            }
        }
        out += '\n';
    }
    for (const SagEvent& event : sc.sags) {
        out += "\n[event]\ntype = sag\nstart = " + format_shortest(event.start) +
               " s\nend = " + format_shortest(event.end) +
               " s\ndepth = " + format_shortest(event.depth_alpha) + "\n";
    }
    for (const FaultEvent& event : sc.faults) {
        out += "\n[event]\ntype = fault\nstart = " + format_shortest(event.start) +
               " s\nend = " + format_shortest(event.end) +
               " s\nresistance = " + format_shortest(event.fault_resistance) + " ohm\n";
    }
    for (const SourceHarmonic& harmonic : sc.harmonics) {
        out += "\n[harmonic]\norder = " + std::to_string(harmonic.order) +
               "\namplitude = " + format_shortest(harmonic.amplitude_pu) +
               "\nphase = " + format_shortest(harmonic.phase) + " rad\n";
    }
    return out;
}

// ------------------------------------------------------------------ trace

void write_trace(const WaveformTrace& trace, std::ostream& out) {
    const std::size_t n = trace.size();
    if (n == 0) throw ValidationError("write_trace: trace is empty");
    if (trace.v_source.size() != n || trace.v_pcc.size() != n || trace.v_load.size() != n ||
        trace.i_line.size() != n || trace.u_comp.size() != n || trace.mode.size() != n ||
        trace.switches.size() != n) {
        throw ValidationError("write_trace: channel lengths differ");
    }
    std::string text;
    text.reserve(64 * (n + 1));
    text += kTraceHeader;
    text += '\n';
    for (std::size_t k = 0; k < n; ++k) {
        text += format_sig9(trace.time[k]);
        text += ',';
        text += format_sig9(trace.v_source[k]);
        text += ',';
        text += format_sig9(trace.v_pcc[k]);
        text += ',';
        text += format_sig9(trace.v_load[k]);
        text += ',';
        text += format_sig9(trace.i_line[k]);
        text += ',';
        text += format_sig9(trace.u_comp[k]);
        text += ',';
        text += mode_code(trace.mode[k]);
        text += ',';
        text += trace.switches[k] != 0 ? '1' : '0';
        text += '\n';
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ValidationError("write_trace: stream write failed");
}

void write_trace(const WaveformTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    write_trace(trace, out);
}

WaveformTrace read_trace(std::istream& in) {
    WaveformTrace trace;
    std::string raw;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (!header_seen) {
            if (raw != kTraceHeader) {
                throw ParseError(std::string("trace header must be '") + kTraceHeader + "'",
                                 line_no);
            }
            header_seen = true;
            continue;
        }
        if (raw.empty()) continue;

        std::array<std::string_view, 8> fields;
        std::string_view rest = raw;
        for (std::size_t f = 0; f < 8; ++f) {
            const auto comma = rest.find(',');
            if (f < 7) {
                if (comma == std::string_view::npos) {
                    throw ParseError("expected 8 comma-separated fields", line_no);
                }
                fields[f] = rest.substr(0, comma);
                rest.remove_prefix(comma + 1);
            } else {
                if (comma != std::string_view::npos) {
                    throw ParseError("expected 8 comma-separated fields", line_no);
                }
                fields[f] = rest;
            }
        }

        std::array<double, 6> values{};
        for (std::size_t f = 0; f < 6; ++f) {
            if (!parse_double(fields[f], values[f]) || !std::isfinite(values[f])) {
                throw ParseError("cannot parse number '" + std::string(fields[f]) + "'",
                                 line_no);
            }
        }
        if (fields[6].size() != 1 ||
            (fields[6][0] != 'N' && fields[6][0] != 'C' && fields[6][0] != 'F')) {
            throw ParseError("mode field must be N, C or F", line_no);
        }
        if (fields[7] != "0" && fields[7] != "1") {
            throw ParseError("switches field must be 0 or 1", line_no);
        }

        trace.time.push_back(values[0]);
        trace.v_source.push_back(values[1]);
        trace.v_pcc.push_back(values[2]);
        trace.v_load.push_back(values[3]);
        trace.i_line.push_back(values[4]);
        trace.u_comp.push_back(values[5]);
        trace.mode.push_back(mode_from_code(fields[6][0]));
        trace.switches.push_back(fields[7] == "1" ? 1 : 0);
    }
    if (!header_seen) throw ParseError("empty trace document");
    if (trace.size() >= 2) trace.dt = trace.time[1] - trace.time[0];
    return trace;
}

WaveformTrace read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    return read_trace(in);
}

// ------------------------------------------------------------ param lists

std::map<std::string, double> parse_params(std::istream& in) {
    std::map<std::string, double> params;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected 'name = value', got '" + std::string(line) + "'",
                             line_no);
        }
        const std::string key{trim(line.substr(0, eq))};
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("missing name before '='", line_no);
        double parsed = 0.0;
        if (!parse_double(value, parsed) || !std::isfinite(parsed)) {
            throw ParseError("cannot parse number '" + std::string(value) + "' for '" + key +
                                 "'",
                             line_no);
        }
        params[key] = parsed;
    }
    return params;
}

std::map<std::string, double> parse_params(const std::string& text) {
    std::istringstream in(text);
    return parse_params(in);
}

// ---------------------------------------------------------------- reports

namespace {

void human_line(std::ostream& out, const char* label, const std::string& value) {
    out << "  " << std::left << std::setw(30) << label << value << '\n';
}

} // namespace

void write_report(const DesignReport& report, std::ostream& out) {
    report.validate();
    out << "Device design summary\n"
        << "---------------------\n";
    human_line(out, "rated load current", format_sig9(report.rated_current) + " A");
    human_line(out, "magnetizing inductance cap", format_sig9(report.l_m_max) + " H");
    human_line(out, "DC-link ceiling", format_sig9(report.dc_link_max) + " V");
    human_line(out, "inverter turns ratio", format_sig9(report.turns_ratio));
    human_line(out, "series turns ratio", format_sig9(report.series_ratio_k));
    human_line(out, "transformer capacity", format_sig9(report.transformer_va) + " VA");
    human_line(out, "switch stress, limit (+)", format_sig9(report.stress_fault_pos) + " V");
    human_line(out, "switch stress, limit (-)", format_sig9(report.stress_fault_neg) + " V");
    human_line(out, "switch stress, injecting", format_sig9(report.stress_compensation) + " V");
    out << '\n'
        << "[design]\n"
        << "rated_current = " << format_sig9(report.rated_current) << " A\n"
        << "l_m_max = " << format_sig9(report.l_m_max) << " H\n"
        << "dc_link_max = " << format_sig9(report.dc_link_max) << " V\n"
        << "turns_ratio = " << format_sig9(report.turns_ratio) << '\n'
        << "series_ratio_k = " << format_sig9(report.series_ratio_k) << '\n'
        << "transformer_va = " << format_sig9(report.transformer_va) << " VA\n"
        << "stress_fault_pos = " << format_sig9(report.stress_fault_pos) << " V\n"
        << "stress_fault_neg = " << format_sig9(report.stress_fault_neg) << " V\n"
        << "stress_compensation = " << format_sig9(report.stress_compensation) << " V\n";
    if (!out) throw ValidationError("write_report: stream write failed");
}

void write_report(const LossBreakdown& loss, std::ostream& out) {
    out << "Conduction-loss breakdown\n"
        << "-------------------------\n";
    human_line(out, "core", format_sig9(loss.p_core) + " W");
    human_line(out, "windings", format_sig9(loss.p_copper) + " W");
    human_line(out, "switches", format_sig9(loss.p_switch) + " W");
    human_line(out, "total", format_sig9(loss.p_total) + " W");
    out << '\n'
        << "[loss]\n"
        << "p_core = " << format_sig9(loss.p_core) << " W\n"
        << "p_copper = " << format_sig9(loss.p_copper) << " W\n"
        << "p_switch = " << format_sig9(loss.p_switch) << " W\n"
        << "p_total = " << format_sig9(loss.p_total) << " W\n";
    if (!out) throw ValidationError("write_report: stream write failed");
}

void write_report(const std::optional<ScenarioMetrics>& metrics, std::ostream& out) {
    out << "Run metrics\n"
        << "-----------\n";
    if (!metrics) {
        out << "  (none recorded)\n\n[metrics]\n";
        if (!out) throw ValidationError("write_report: stream write failed");
        return;
    }
    human_line(out, "deepest source sag", format_sig9(metrics->sag_depth));
    human_line(out, "compensation RMS error", format_sig9(metrics->compensation_error));
    human_line(out, "max fault current", format_sig9(metrics->max_fault_current) + " A");
    if (metrics->limited_steady_peak) {
        human_line(out, "limited steady amplitude",
                   format_sig9(*metrics->limited_steady_peak) + " A");
    }
    if (metrics->baseline_peak) {
        human_line(out, "unlimited steady amplitude",
                   format_sig9(*metrics->baseline_peak) + " A");
    }
    if (metrics->limiting_ratio) {
        human_line(out, "limiting ratio", format_sig9(*metrics->limiting_ratio));
    }
    out << '\n'
        << "[metrics]\n"
        << "sag_depth = " << format_sig9(metrics->sag_depth) << '\n'
        << "compensation_error = " << format_sig9(metrics->compensation_error) << '\n'
        << "max_fault_current = " << format_sig9(metrics->max_fault_current) << " A\n";
    if (metrics->limited_steady_peak) {
        out << "limited_steady_peak = " << format_sig9(*metrics->limited_steady_peak) << " A\n";
    }
    if (metrics->baseline_peak) {
        out << "baseline_peak = " << format_sig9(*metrics->baseline_peak) << " A\n";
    }
    if (metrics->limiting_ratio) {
        out << "limiting_ratio = " << format_sig9(*metrics->limiting_ratio) << '\n';
    }
    if (!out) throw ValidationError("write_report: stream write failed");
}

void write_report(std::span<const TopologyRow> rows, std::ostream& out) {
    out << "Topology comparison\n"
        << "-------------------\n"
        << "  label       xfmr  sw   dc   sag  limit  loss\n";
    for (const TopologyRow& row : rows) {
        out << "  " << std::left << std::setw(12) << row.label << std::setw(6)
            << row.transformers << std::setw(5) << row.switches_3ph << std::setw(5)
            << row.dc_sources_3ph << std::setw(5) << (row.compensates_sag ? "yes" : "no")
            << std::setw(7) << (row.limits_fault ? "yes" : "no")
            << (row.loss_w ? format_sig9(*row.loss_w) + " W" : std::string("-")) << '\n';
    }
    out << '\n'
        << "[topology]\n"
        << "count = " << rows.size() << '\n';
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const TopologyRow& row = rows[k];
        const std::string prefix = std::to_string(k + 1) + ".";
        out << prefix << "label = " << row.label << '\n'
            << prefix << "transformers = " << row.transformers << '\n'
            << prefix << "switches = " << row.switches_3ph << '\n'
            << prefix << "dc_sources = " << row.dc_sources_3ph << '\n'
            << prefix << "compensates_sag = " << (row.compensates_sag ? "true" : "false") << '\n'
            << prefix << "limits_fault = " << (row.limits_fault ? "true" : "false") << '\n';
        if (row.loss_w) out << prefix << "loss = " << format_sig9(*row.loss_w) << " W\n";
    }
    if (!out) throw ValidationError("write_report: stream write failed");
}

} // namespace fcldvr
