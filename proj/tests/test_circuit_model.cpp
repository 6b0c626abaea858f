#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fcldvr/circuit_model.hpp"

using namespace fcldvr;

namespace {

constexpr double kOmega50 = 2.0 * std::numbers::pi * 50.0;

GridParams bench_grid() {
    GridParams g;
    g.v_source_rms = 220.0;
    g.frequency = 50.0;
    g.r_source_line = 0.1;
    g.l_source_line = 0.5e-3;
    g.r_load = 45.0;
    g.l_load = 10e-3;
    return g;
}

TransformerParams bench_transformer() {
    TransformerParams x;
    x.turns_ratio_a = 5.0;
    x.l_magnetizing = 80e-3;
    x.l_leakage = 1.7e-3;
    return x;
}

} // namespace

TEST_CASE("series impedance magnitude and angle") {
    // Oracle: hypot(45.1, w*0.0122), atan2(w*0.0122, 45.1) computed externally.
    const PhasorImpedance z = total_impedance(45.1, 12.2e-3, kOmega50);
    CHECK(z.magnitude() == doctest::Approx(45.26256642293476).epsilon(1e-12));
    CHECK(z.phase() == doctest::Approx(0.08477951080124256).epsilon(1e-12));

    // Pure resistance and pure inductance degenerate cleanly.
    CHECK(total_impedance(7.5, 0.0, kOmega50).magnitude() == doctest::Approx(7.5));
    CHECK(total_impedance(7.5, 0.0, kOmega50).phase() == doctest::Approx(0.0));
    const PhasorImpedance zl = total_impedance(0.0, 0.1, kOmega50);
    CHECK(zl.magnitude() == doctest::Approx(0.1 * kOmega50).epsilon(1e-12));
    CHECK(zl.phase() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));

    CHECK_THROWS_AS(total_impedance(0.0, 0.0, kOmega50), ValidationError);
    CHECK_THROWS_AS(total_impedance(-1.0, 1e-3, kOmega50), ValidationError);
}

TEST_CASE("series impedance grows with resistance and inductance") {
    double prev = 0.0;
    for (double r = 1.0; r <= 100.0; r += 7.3) {
        const double m = total_impedance(r, 5e-3, kOmega50).magnitude();
        CHECK(m > prev);
        prev = m;
    }
    prev = 0.0;
    for (double l = 1e-3; l <= 0.2; l += 9e-3) {
        const double m = total_impedance(2.0, l, kOmega50).magnitude();
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("normal mode closed form") {
    const GridParams g = bench_grid();
    const TransformerParams x = bench_transformer();
    const SinusoidSolution sol = normal_mode_solution(g, x);

    // Externally computed loop oracle: R = 45.1 ohm, L = 12.2 mH.
    CHECK(sol.amplitude == doctest::Approx(6.8738255099125665).epsilon(1e-12));
    CHECK(sol.phase_lag == doctest::Approx(0.08477951080124256).epsilon(1e-12));

    // Peak where sin(wt - phi) = 1, zero crossing at wt = phi.
    const double w = g.omega();
    const double t_peak = (sol.phase_lag + std::numbers::pi / 2) / w;
    CHECK(normal_mode_current(t_peak, g, x) ==
          doctest::Approx(6.8738255099125665).epsilon(1e-12));
    CHECK(std::abs(normal_mode_current(sol.phase_lag / w, g, x)) < 1e-9);

    // Numeric RMS over one period against peak/sqrt(2).
    const int n = 4000;
    const double period = 1.0 / g.frequency;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double i = normal_mode_current(k * period / n, g, x);
        acc += i * i;
    }
    CHECK(std::sqrt(acc / n) == doctest::Approx(4.8605286307522535).epsilon(1e-9));
}

TEST_CASE("normal mode satisfies its own mesh equation") {
    const GridParams g = bench_grid();
    const TransformerParams x = bench_transformer();
    const double w = g.omega();
    const double r = normal_loop_resistance(g);
    const double l = normal_loop_inductance(g, x);
    const double h = 1e-6;
    for (double t = 0.003; t < 0.04; t += 0.0017) {
        const double di = (normal_mode_current(t + h, g, x) -
                           normal_mode_current(t - h, g, x)) / (2 * h);
        const double residual = g.v_peak() * std::sin(w * t) -
                                l * di - r * normal_mode_current(t, g, x);
        CHECK(std::abs(residual) / g.v_peak() < 1e-6);
    }
}

TEST_CASE("fault mode closed form keeps the load and drops the leakage") {
    const GridParams g = bench_grid();
    const TransformerParams x = bench_transformer();
    CHECK(fault_loop_inductance(g, x) == doctest::Approx(90.5e-3).epsilon(1e-12));

    const double t_f = 0.25;
    const SinusoidSolution sol = fault_mode_solution(g, x, t_f);
    // Oracles: |Z| = hypot(45.1, w*0.0905) = 53.3137..., B = Vm/|Z|.
    CHECK(sol.amplitude == doctest::Approx(5.835774450232557).epsilon(1e-12));
    CHECK(sol.phase_lag == doctest::Approx(0.5624789672174934).epsilon(1e-12));
    CHECK(sol.decay_time_constant ==
          doctest::Approx(0.002006651884700665).epsilon(1e-12));
    CHECK(sol.onset_time == doctest::Approx(t_f));

    // Steady amplitude once the exponential has died (> 10 tau past onset).
    const double w = g.omega();
    double t = t_f + 0.1;
    // move to the next instant where sin(wt - phi) = 1
    const double cycles = std::ceil((w * t - sol.phase_lag - std::numbers::pi / 2) /
                                    (2 * std::numbers::pi));
    t = (sol.phase_lag + std::numbers::pi / 2 + 2 * std::numbers::pi * cycles) / w;
    CHECK(fault_mode_current(t, t_f, g, x) ==
          doctest::Approx(5.835774450232557).epsilon(1e-9));
}

TEST_CASE("fault mode fixed-constant form evaluates as written") {
    const GridParams g = bench_grid();
    const TransformerParams x = bench_transformer();
    const double w = g.omega();
    const SinusoidSolution sol = fault_mode_solution(g, x, 0.0);
    const double phi = sol.phase_lag;
    const double B = sol.amplitude;

    // With the fixed constant -B the onset value is -B at wt_f = phi (the sin
    // term vanishes there) and 0 where the sinusoid is at its crest.
    const double tf1 = phi / w;
    CHECK(fault_mode_current(tf1, tf1, g, x) == doctest::Approx(-B).epsilon(1e-12));
    const double tf2 = (phi + std::numbers::pi / 2) / w;
    CHECK(std::abs(fault_mode_current(tf2, tf2, g, x)) < 1e-9);

    CHECK_THROWS_AS(fault_mode_current(0.1, 0.2, g, x), ValidationError);
}

TEST_CASE("fault mode continuity form starts at the handed-over current") {
    const GridParams g = bench_grid();
    const TransformerParams x = bench_transformer();
    for (double t_f : {0.2501, 0.2534, 0.2567}) {
        const double i0 = normal_mode_current(t_f, g, x);
        CHECK(std::abs(fault_mode_current(t_f, t_f, g, x, i0) - i0) < 1e-12);
    }
}

TEST_CASE("fault mode satisfies its own mesh equation") {
    const GridParams g = bench_grid();
    const TransformerParams x = bench_transformer();
    const double w = g.omega();
    const double r = normal_loop_resistance(g);
    const double l = fault_loop_inductance(g, x);
    const double t_f = 0.011;
    const double i0 = normal_mode_current(t_f, g, x);
    const double h = 1e-6;
    for (double t = t_f + 1e-4; t < t_f + 0.05; t += 0.0023) {
        const double di = (fault_mode_current(t + h, t_f, g, x, i0) -
                           fault_mode_current(t - h, t_f, g, x, i0)) / (2 * h);
        const double residual = g.v_peak() * std::sin(w * t) -
                                l * di - r * fault_mode_current(t, t_f, g, x, i0);
        CHECK(std::abs(residual) / g.v_peak() < 1e-6);
    }
}

TEST_CASE("coupling point divider, bypassed device") {
    // Literal complex-arithmetic oracle.
    const PhasorImpedance z_load{45.0, 3.142};
    const PhasorImpedance z_source{0.1, 0.157};
    const PhasorImpedance z_leak{0.0, 0.534};
    CHECK(pcc_voltage_normal(z_load, z_source, z_leak, 220.0) ==
          doctest::Approx(219.25618959682072).epsilon(1e-12));

    // No series drop -> the full source appears at the coupling point.
    CHECK(pcc_voltage_normal(z_load, {0, 0}, {0, 0}, 220.0) == doctest::Approx(220.0));
    // Collapsed load -> nothing left at the node.
    CHECK(pcc_voltage_normal({0, 0}, z_source, z_leak, 220.0) == doctest::Approx(0.0));
    // Degenerate loop
    CHECK_THROWS_AS(pcc_voltage_normal({0, 0}, {0, 0}, {0, 0}, 220.0), ValidationError);
}

TEST_CASE("coupling point divider, limiting branch inserted") {
    const PhasorImpedance z_line{0.0, 0.0};
    const PhasorImpedance z_fcl{0.0, 25.133};
    const PhasorImpedance z_source{0.1, 0.157};
    const PhasorImpedance z_leak{0.0, 0.534};
    CHECK(pcc_voltage_fault(z_line, z_fcl, z_source, z_leak, 220.0) ==
          doctest::Approx(214.11162268504305).epsilon(1e-12));

    // Unmitigated bolted fault collapses the node voltage.
    CHECK(pcc_voltage_fault({0, 0}, {0, 0}, z_source, z_leak, 220.0) ==
          doctest::Approx(0.0));

    // Sweeping the limiting reactance up pulls the node back toward the source.
    double prev = 0.0;
    for (double x = 1.0; x < 4000.0; x *= 1.9) {
        const double u = pcc_voltage_fault(z_line, {0.0, x}, z_source, z_leak, 220.0);
        CHECK(u > prev);
        prev = u;
    }
    CHECK(prev > 0.999 * 220.0);
}

TEST_CASE("healthy node never sits below the faulted node for stiffer loads") {
    // Holds on the bench-like corner of the parameter space: a short, mostly
    // reactive feeder, an R-dominant load and an inductive limiting branch
    // that is smaller than the load.
    std::mt19937 rng(20260822);
    std::uniform_real_distribution<double> load_r(20.0, 80.0);
    std::uniform_real_distribution<double> load_ratio(0.0, 0.2);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    const PhasorImpedance z_source{0.1, 0.157};
    const PhasorImpedance z_leak{0.0, 0.534};
    for (int k = 0; k < 500; ++k) {
        const double r = load_r(rng);
        const PhasorImpedance z_load{r, load_ratio(rng) * r};
        const PhasorImpedance z_fcl{0.0, frac(rng) * z_load.magnitude()};
        const double u_n = pcc_voltage_normal(z_load, z_source, z_leak, 220.0);
        const double u_f = pcc_voltage_fault({0, 0}, z_fcl, z_source, z_leak, 220.0);
        CHECK(u_n >= u_f);
    }
}

TEST_CASE("grid parameter validation") {
    GridParams g = bench_grid();
    g.frequency = 0.0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = bench_grid();
    g.r_load = -1.0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    CHECK_NOTHROW(bench_grid().validate());
}
