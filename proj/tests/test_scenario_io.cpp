#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fcldvr/scenario_io.hpp"

using namespace fcldvr;

namespace {

std::string line_with(const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find(needle) != std::string::npos) return line;
    }
    return {};
}

int line_count(const std::string& text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

void check_parse_error(const std::string& doc, const std::string& fragment) {
    try {
        parse_scenario(doc);
        FAIL("expected ParseError for: " << doc);
    } catch (const ParseError& e) {
        CAPTURE(doc);
        CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
}

} // namespace

TEST_CASE("built-in presets") {
    CHECK(preset_names() == std::vector<std::string>{"table2", "table3"});
    CHECK_THROWS_AS(preset_scenario("table4"), ValidationError);

    const Scenario t2 = preset_scenario("table2");
    CHECK(t2.preset_name == "table2");
    CHECK(t2.grid.v_source_rms == 220.0);
    CHECK(t2.grid.frequency == 50.0);
    CHECK(t2.grid.r_source_line == 0.1);
    CHECK(t2.grid.l_source_line == 0.5e-3);
    CHECK(t2.grid.r_load == 45.0);
    CHECK(t2.grid.l_load == 10e-3);
    CHECK(t2.transformer.turns_ratio_a == 5.0);
    CHECK(t2.transformer.l_magnetizing == 80e-3);
    CHECK(t2.transformer.l_leakage == 1.7e-3);
    CHECK(t2.transformer.c_filter == 0.0);
    CHECK(t2.switches.v_ces == 1200.0);
    CHECK(t2.switches.v_on_drop == 2.0);
    CHECK(t2.switches.v_dc == 40.0);
    CHECK(t2.controller.sag_enter_pu == 0.9);
    CHECK(t2.controller.sag_exit_pu == 0.95);
    CHECK(t2.controller.overcurrent_multiple == 2.0);
    CHECK(t2.controller.rearm_hold == 0.02);
    CHECK(t2.controller.rms_window == 0.01);
    CHECK(t2.horizon == 0.4);
    CHECK(t2.dt == 1e-5);
    CHECK_NOTHROW(t2.validate());

    const Scenario t3 = preset_scenario("table3");
    CHECK(t3.grid.v_source_rms == 63.0);
    CHECK(t3.grid.r_source_line == 0.0);
    CHECK(t3.grid.l_source_line == 0.0);
    CHECK(t3.grid.l_load == 1e-3);
    CHECK(t3.switches.v_dc == 10.0);
    CHECK(t3.transformer.c_filter == 20e-6);
    CHECK_NOTHROW(t3.validate());
}

TEST_CASE("scenario text round trip") {
    Scenario sc = preset_scenario("table2");
    SagEvent sag;
    sag.start = 0.1;
    sag.end = 0.2;
    sag.depth_alpha = 0.28;
    sc.sags.push_back(sag);
    FaultEvent fault;
    fault.start = 0.25;
    fault.end = 0.35;
    fault.fault_resistance = 1.5;
    sc.faults.push_back(fault);
    SourceHarmonic h5;
    h5.order = 5;
    h5.amplitude_pu = 0.05;
    h5.phase = 0.25;
    sc.harmonics.push_back(h5);

    const std::string once = serialize_scenario(sc);
    const Scenario back = parse_scenario(once);
    CHECK(serialize_scenario(back) == once);
    CHECK(back.grid.v_source_rms == sc.grid.v_source_rms);
    CHECK(back.sags.size() == 1);
    CHECK(back.sags[0].depth_alpha == 0.28);
    CHECK(back.faults[0].fault_resistance == 1.5);
    CHECK(back.harmonics[0].order == 5);
    CHECK(back.harmonics[0].phase == 0.25);
    CHECK(back.preset_name == "table2");
}

TEST_CASE("unit suffixes convert to base SI") {
    const Scenario sc = parse_scenario(
        "preset = table2\n"
        "v_source_rms = 0.22 kV\n"
        "l_load = 10 mH\n"
        "rms_window = 10 ms\n"
        "r_source_line = 100 mohm\n"
        "c_filter = 20 uF\n"
        "frequency = 0.05 kHz\n");
    CHECK(sc.grid.v_source_rms == doctest::Approx(220.0).epsilon(1e-15));
    CHECK(sc.grid.l_load == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(sc.controller.rms_window == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(sc.grid.r_source_line == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(sc.transformer.c_filter == doctest::Approx(20e-6).epsilon(1e-15));
    CHECK(sc.grid.frequency == doctest::Approx(50.0).epsilon(1e-15));

    // Degrees convert for harmonic phases.
    const Scenario sc2 = parse_scenario(
        "preset = table2\n[harmonic]\norder = 5\namplitude = 0.05\nphase = 90 deg\n");
    CHECK(sc2.harmonics[0].phase == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
}

TEST_CASE("preset override and ordering") {
    const Scenario sc = parse_scenario("preset = table2\nv_dc = 10 V\n");
    CHECK(sc.switches.v_dc == 10.0);
    CHECK(sc.grid.v_source_rms == 220.0);

    check_parse_error("v_dc = 10 V\npreset = table2\n", "line 2");
}

TEST_CASE("parse errors carry line numbers") {
    check_parse_error("preset = table2\nno_such_key = 1\n", "line 2");
    check_parse_error("preset = table2\nv_dc = 10 furlong\n", "line 2");
    check_parse_error("preset = table2\nfrequency = 50 V\n", "line 2");
    check_parse_error("preset = table2\nturns_ratio_a = 5 V\n", "line 2");
    check_parse_error("preset = table2\nv_dc = 10\n", "line 2");
    check_parse_error("preset = table2\nlimiter_enabled = maybe\n", "line 2");
    check_parse_error("preset = table2\npreset = table3\n", "line 2");
    check_parse_error("preset = table9\n", "line 1");
    check_parse_error("preset = table2\n[fake_block]\n", "line 2");
    check_parse_error("preset = table2\n[event]\ntype = sag\nstart = 0.1 s\nend = 0.2 s\n"
                      "depth = 0.3\nresistance = 1 ohm\n",
                      "sag");
    check_parse_error("preset = table2\n[event]\ntype = fault\nstart = 0.1 s\n"
                      "end = 0.2 s\ndepth = 0.3\n",
                      "fault");
    check_parse_error("preset = table2\n[event]\nstart = 0.1 s\nend = 0.2 s\n", "type");
    check_parse_error("preset = table2\n[harmonic]\namplitude = 0.05\n", "order");
}

TEST_CASE("invalid assembled scenarios are rejected") {
    CHECK_THROWS_AS(parse_scenario("preset = table2\n"
                                   "[event]\ntype = sag\nstart = 0.1 s\nend = 0.2 s\n"
                                   "depth = 0.3\n"
                                   "[event]\ntype = fault\nstart = 0.15 s\nend = 0.3 s\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario("preset = table2\ndt = 1 ms\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("preset = table2\nhorizon = 0.3 s\n"
                                   "[event]\ntype = fault\nstart = 0.25 s\nend = 0.35 s\n"),
                    ValidationError);
}

TEST_CASE("comments and blank lines are ignored") {
    const Scenario sc = parse_scenario(
        "# benchmark with a tweak\n"
        "\n"
        "preset = table2   # seed everything\n"
        "v_dc = 12 V  # override\n");
    CHECK(sc.switches.v_dc == 12.0);
}

TEST_CASE("trace files round trip byte for byte") {
    Scenario sc = preset_scenario("table2");
    sc.sags.clear();
    sc.faults.clear();
    sc.horizon = 0.02;
    const SimResult res = run_scenario(sc);

    std::ostringstream first;
    write_trace(res.trace, first);
    const std::string text = first.str();
    CHECK(line_with(text, "time_s") ==
          "time_s,v_source_V,v_pcc_V,v_load_V,i_line_A,u_comp_V,mode,switches");

    std::istringstream in(text);
    const WaveformTrace back = read_trace(in);
    CHECK(back.size() == res.trace.size());
    CHECK(back.dt == doctest::Approx(res.trace.dt).epsilon(1e-12));

    std::ostringstream second;
    write_trace(back, second);
    CHECK(second.str() == text);
}

TEST_CASE("one-row trace writes a two-line file") {
    WaveformTrace tiny;
    tiny.dt = 1e-5;
    tiny.time = {0.0};
    tiny.v_source = {1.0};
    tiny.v_pcc = {2.0};
    tiny.v_load = {3.0};
    tiny.i_line = {4.0};
    tiny.u_comp = {0.0};
    tiny.mode = {OperatingMode::Normal};
    tiny.switches = {1};
    std::ostringstream out;
    write_trace(tiny, out);
    CHECK(line_count(out.str()) == 2);

    std::istringstream in(out.str());
    const WaveformTrace back = read_trace(in);
    CHECK(back.size() == 1);
    CHECK(back.dt == 0.0);
    CHECK(back.i_line[0] == 4.0);

    WaveformTrace empty;
    std::ostringstream sink;
    CHECK_THROWS_AS(write_trace(empty, sink), ValidationError);
}

TEST_CASE("benchmark horizon emits the full row count") {
    Scenario sc = preset_scenario("table2");
    sc.sags.clear();
    sc.faults.clear();
    const SimResult res = run_scenario(sc);
    CHECK(res.trace.size() == 40001);
    std::ostringstream out;
    write_trace(res.trace, out);
    CHECK(line_count(out.str()) == 40002);
}

TEST_CASE("malformed trace files are rejected with a line number") {
    const std::string header =
        "time_s,v_source_V,v_pcc_V,v_load_V,i_line_A,u_comp_V,mode,switches\n";
    auto fails_with = [](const std::string& text, const std::string& fragment) {
        std::istringstream in(text);
        try {
            read_trace(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    fails_with("time,volts\n", "header");
    fails_with(header + "0,1,2,3,4,0,N\n", "line 2");
    fails_with(header + "0,1,2,3,4,0,X,1\n", "line 2");
    fails_with(header + "0,1,2,3,4,0,N,7\n", "line 2");
    fails_with(header + "0,abc,2,3,4,0,N,1\n", "line 2");
    fails_with("", "empty");
}

TEST_CASE("design report text") {
    FaultLimitSpec spec;
    spec.lambda_i = 2.0;
    spec.load_va = 220.0 * 4.861;
    spec.sag_ratio_lambda_v = 0.3;
    const DesignReport rep = build_design_report(
        spec, 220.0, 2.0 * std::numbers::pi * 50.0, 13.2, 1200.0, 3.2e-3, 40.0);
    std::ostringstream out;
    write_report(rep, out);
    const std::string text = out.str();
    CHECK(text.find("[design]") != std::string::npos);

    const std::string lm_line = line_with(text, "l_m_max");
    REQUIRE(!lm_line.empty());
    CHECK(lm_line.find(" H") != std::string::npos);
    // Machine line is `l_m_max = <value> H`; the value must reparse to the
    // sizing result at the printed precision.
    std::istringstream fields(lm_line);
    std::string key, eq, value;
    fields >> key >> eq >> value;
    CHECK(std::abs(std::stod(value) - 0.07203062637362061) < 1e-9);

    const std::string rated = line_with(text, "rated_current");
    CHECK(rated.find(" A") != std::string::npos);
}

TEST_CASE("loss and metrics report text") {
    LossBreakdown loss;
    loss.p_core = 2.0;
    loss.p_copper = 2.3629321;
    loss.p_switch = 9.722;
    loss.p_total = 14.0849321;
    std::ostringstream out;
    write_report(loss, out);
    CHECK(out.str().find("[loss]") != std::string::npos);
    CHECK(out.str().find("p_total = 14.0849321 W") != std::string::npos);

    std::ostringstream none;
    write_report(std::optional<ScenarioMetrics>{}, none);
    CHECK(none.str().find("(none recorded)") != std::string::npos);
    CHECK(none.str().find("[metrics]") != std::string::npos);
}

TEST_CASE("topology report lists all six rows") {
    std::map<std::string, double> params{
        {"i_pri", 4.861},      {"i_sec_ref", 4.861}, {"i_line_ref", 4.861},
        {"r_s1", 0.05},        {"r_s2_ref", 0.05},   {"v_df", 1.0},
        {"v_sw", 2.0},         {"r_d", 0.01},        {"i_d", 4.0},
        {"i_dc", 3.0},         {"i_n", 4.861},       {"r_c", 0.02},
        {"v_d", 1.0},          {"v_igbt", 2.0},      {"p_core", 2.0},
        {"r_t1", 0.05},        {"r_t2_series", 0.05}, {"r_t2_ref", 0.05},
        {"p_core_series", 2.0}, {"r_t1_series", 0.05}, {"p_loss_diode", 1.0},
        {"v_thyristor", 1.5},
    };
    const auto rows = topology_comparison(params);
    std::ostringstream out;
    write_report(std::span<const TopologyRow>(rows), out);
    const std::string text = out.str();
    CHECK(text.find("[topology]") != std::string::npos);
    CHECK(text.find("count = 6") != std::string::npos);
    CHECK(text.find("1.label = [1]") != std::string::npos);
    CHECK(text.find("6.label = proposed") != std::string::npos);
    CHECK(text.find("6.loss = ") != std::string::npos);
    // The entry without a published formula gets no loss key.
    CHECK(text.find("5.loss") == std::string::npos);
}

TEST_CASE("flat parameter files") {
    const auto params = parse_params(
        "# operating point\n"
        "i_pri = 4.861\n"
        "v_igbt = 2\n"
        "\n"
        "p_core = 2.0\n");
    CHECK(params.size() == 3);
    CHECK(params.at("i_pri") == 4.861);
    CHECK(params.at("p_core") == 2.0);

    CHECK_THROWS_AS(parse_params("i_pri = not_a_number\n"), ParseError);
    CHECK_THROWS_AS(parse_params("just_some_words\n"), ParseError);
}
