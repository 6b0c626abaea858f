#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcldvr/analysis.hpp"
#include "fcldvr/design_toolkit.hpp"
#include "fcldvr/errors.hpp"
#include "fcldvr/transient_sim.hpp"

namespace fcldvr {

/// Names of the built-in scenario presets.
const std::vector<std::string>& preset_names();

/// A fully validated built-in scenario: "table2" is the desk-scale
/// simulation parameter set, "table3" the bench-scale experimental one.
/// Throws ValidationError for an unknown name.
Scenario preset_scenario(const std::string& name);

/// Parse the line-oriented scenario format: `key = value unit` scalars,
/// `[event]` and `[harmonic]` blocks, `#` comments. A `preset` key, when
/// present, must be the first entry and seeds every field; later keys
/// override it. Quantities are converted to base SI units; unknown keys,
/// unknown units and dimension mismatches are rejected. Throws ParseError
/// carrying the offending line number, or ValidationError when the
/// assembled scenario violates an invariant.
Scenario parse_scenario(std::istream& in);
Scenario parse_scenario(const std::string& text);

/// Canonical text form: base SI units, shortest decimals that reparse to
/// the identical value. parse_scenario(serialize_scenario(s)) == s field
/// for field on any valid scenario.
std::string serialize_scenario(const Scenario& scenario);

/// Comma-separated waveform emission. Header row is exactly
/// `time_s,v_source_V,v_pcc_V,v_load_V,i_line_A,u_comp_V,mode,switches`;
/// values carry 9 significant digits with `.` as the decimal separator,
/// mode is N/C/F and switches 0/1. Throws ValidationError on an empty
/// trace.
void write_trace(const WaveformTrace& trace, std::ostream& out);
void write_trace(const WaveformTrace& trace, const std::string& path);

/// Reparse a trace produced by write_trace; rewriting the result emits the
/// byte-identical file. The sample period is recovered from the first two
/// rows. Throws ParseError with the line number on malformed content.
WaveformTrace read_trace(std::istream& in);
WaveformTrace read_trace(const std::string& path);

/// Flat `name = value` parameter listing (base SI units, `#` comments), as
/// consumed by the topology comparison.
std::map<std::string, double> parse_params(std::istream& in);
std::map<std::string, double> parse_params(const std::string& text);

/// Reports are a short human-readable summary followed by machine-readable
/// `[section]` key/value lines; every numeric entry carries its unit.
void write_report(const DesignReport& report, std::ostream& out);
void write_report(const LossBreakdown& loss, std::ostream& out);
void write_report(const std::optional<ScenarioMetrics>& metrics, std::ostream& out);
void write_report(std::span<const TopologyRow> rows, std::ostream& out);

} // namespace fcldvr
