#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qlink/tradespace.hpp"
#include "qlink/units.hpp"

#include <cmath>
#include <random>

using namespace qlink;

TEST_CASE("single-pump SiV to O-band scheme") {
    const ConversionScheme s = plan_single_pump(737.0, 1350.0);
    REQUIRE(s.pump_nm.size() == 1);
    // hand calculation: 1/lambda_p = 1/737 - 1/1350
    const double expected = 1.0 / (1.0 / 737.0 - 1.0 / 1350.0);
    CHECK(s.pump_nm[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(s.pump_nm[0] == doctest::Approx(1623.0).epsilon(5e-4));
    CHECK(s.regime == Regime::AntiStokes);
    CHECK(s.pump_target_separation_thz > 30.0);
    CHECK(s.low_noise);
}

TEST_CASE("symmetric split puts the pump on the boundary") {
    const ConversionScheme s = plan_single_pump(700.0, 1400.0);
    CHECK(s.pump_nm[0] == doctest::Approx(1400.0).epsilon(1e-12));
    CHECK(s.regime == Regime::Boundary);
    CHECK_FALSE(s.low_noise);
}

TEST_CASE("737 to 1550 lands in the Stokes regime") {
    const ConversionScheme s = plan_single_pump(737.0, 1550.0);
    const double expected = 1.0 / (1.0 / 737.0 - 1.0 / 1550.0);
    CHECK(s.pump_nm[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(s.pump_nm[0] == doctest::Approx(1405.0).epsilon(1e-3));
    CHECK(s.regime == Regime::Stokes);
    CHECK_FALSE(s.low_noise);
}

TEST_CASE("non-physical single-pump requests are rejected") {
    CHECK_THROWS_AS(plan_single_pump(737.0, 737.0), std::invalid_argument);
    CHECK_THROWS_AS(plan_single_pump(737.0, 700.0), std::invalid_argument);
    CHECK_THROWS_AS(plan_single_pump(-1.0, 1350.0), std::invalid_argument);
}

TEST_CASE("two-pump scheme arithmetic") {
    const ConversionScheme s = plan_two_pump(493.0, 1310.0, 1064.0);
    REQUIRE(s.pump_nm.size() == 2);
    const double expected = 1.0 / (1.0 / 493.0 - 1.0 / 1310.0 - 1.0 / 1064.0);
    CHECK(s.pump_nm[1] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(s.pump_nm[1] == doctest::Approx(3075.0).epsilon(1e-3));
    CHECK(s.stage_regimes.size() == 2);
}

TEST_CASE("two-pump infeasible when pump1 eats the whole budget") {
    // 1/737 - 1/1310 - 1/1623 < 0
    CHECK_THROWS_AS(plan_two_pump(737.0, 1310.0, 1623.0), std::invalid_argument);
}

TEST_CASE("two-pump with a degenerate second pump reduces to single-pump") {
    const ConversionScheme single = plan_single_pump(737.0, 1350.0);
    // A near-zero-frequency first pump: essentially all energy goes to pump2.
    const ConversionScheme two = plan_two_pump(737.0, 1350.0, 1e12);
    CHECK(two.pump_nm[1] == doctest::Approx(single.pump_nm[0]).epsilon(1e-6));
}

TEST_CASE("energy conservation holds for every emitted scheme") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mem(400.0, 1000.0);
    std::uniform_real_distribution<double> stretch(1.2, 3.0);
    for (int i = 0; i < 500; ++i) {
        const double m = mem(rng);
        const double t = m * stretch(rng);
        const ConversionScheme s = plan_single_pump(m, t);
        double f_sum = frequency_thz(s.target_nm);
        for (double p : s.pump_nm)
            f_sum += frequency_thz(p);
        CHECK(std::abs(frequency_thz(s.memory_nm) - f_sum) < 1e-6);
    }
}

TEST_CASE("regime flips across the pump-equals-target line") {
    ConversionScheme s;
    s.memory_nm = 737.0;
    s.target_nm = 1400.0;
    s.pump_nm = {1300.0}; // pump frequency above target frequency
    classify_regime(s);
    CHECK(s.regime == Regime::Stokes);

    // mirror the pump frequency across the target frequency
    const double f_t = frequency_thz(1400.0);
    const double f_p = frequency_thz(1300.0);
    s.pump_nm = {wavelength_nm(2.0 * f_t - f_p)};
    classify_regime(s);
    CHECK(s.regime == Regime::AntiStokes);
}

TEST_CASE("planner output is a pure function of its inputs") {
    const ConversionScheme a = plan_single_pump(737.0, 1350.0);
    const ConversionScheme b = plan_single_pump(737.0, 1350.0);
    CHECK(a.pump_nm[0] == b.pump_nm[0]);
    CHECK(a.pump_target_separation_thz == b.pump_target_separation_thz);
    CHECK(a.regime == b.regime);
}

TEST_CASE("gain-band feasibility uses closed intervals") {
    ConversionScheme s = plan_single_pump(737.0, 1350.0);
    const std::vector<GainBand> bands = {{"Er", 1530.0, 1630.0}};
    CHECK(feasible_pumps(s, bands).size() == 1);

    // pump exactly on the band edge still hits
    const std::vector<GainBand> edge = {{"edge", s.pump_nm[0], s.pump_nm[0] + 1.0}};
    CHECK(feasible_pumps(s, edge).size() == 1);

    // far-infrared pump misses every telecom band
    const ConversionScheme two = plan_two_pump(493.0, 1310.0, 1064.0);
    ConversionScheme pump2_only = two;
    pump2_only.pump_nm = {two.pump_nm[1]};
    classify_regime(pump2_only);
    const std::vector<GainBand> telecom = {{"Er", 1530.0, 1625.0}};
    CHECK(feasible_pumps(pump2_only, telecom).empty());

    CHECK_THROWS_AS(feasible_pumps(s, {}), std::invalid_argument);
}

TEST_CASE("wavelength-frequency round trip") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> wl(100.0, 5000.0);
    for (int i = 0; i < 1000; ++i) {
        const double l = wl(rng);
        const double back = wavelength_nm(frequency_thz(l));
        CHECK(std::abs(back - l) / l < 1e-9);
    }
}
