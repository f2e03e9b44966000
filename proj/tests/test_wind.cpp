#include "support.hpp"

#include "freqsec/error.hpp"
#include "freqsec/wind.hpp"

#include <doctest.h>

#include <cmath>

using namespace freqsec;
using namespace freqsec::test;

TEST_CASE("power curves at the fixed wind speed")
{
    const WindFleet fleet;
    const PowerCurves curves(fleet);
    const double w = curves.steady_speed();
    CHECK(curves.p_mppt(w) == doctest::Approx(fleet.capacity_factor).epsilon(1e-3));
    CHECK(curves.p_aero(w) == doctest::Approx(curves.p_mppt(w)).epsilon(1e-3));
    CHECK(w >= PowerCurves::kMinSpeed);
    CHECK(w <= PowerCurves::kMaxSpeed);

    // aerodynamic power has a single peak in rotor speed
    int turns = 0;
    double prev = curves.p_aero(PowerCurves::kMinSpeed);
    int dir = 0;
    for (double o = PowerCurves::kMinSpeed + 0.01; o <= PowerCurves::kMaxSpeed; o += 0.01) {
        const double v = curves.p_aero(o);
        const int d = v > prev ? 1 : v < prev ? -1 : 0;
        if (d != 0 && dir != 0 && d != dir) ++turns;
        if (d != 0) dir = d;
        prev = v;
    }
    CHECK(turns == 1);

    // below the optimum, where recovery operates, the torque-limit curve lies above MPPT
    for (double o = 0.5; o < w; o += 0.01) CHECK(curves.p_mt(o) >= curves.p_mppt(o));
    CHECK(PowerCurves::cp(curves.lambda_opt()) == doctest::Approx(curves.cp_max()));
}

TEST_CASE("steady state of the two-mass drivetrain")
{
    const WindFleet fleet;
    const PowerCurves curves(fleet);
    auto s = steady_wind_state(curves, fleet.two_mass);
    const auto s0 = s;
    for (int k = 0; k < 10000; ++k) two_mass_step(s, curves.p_aero(s.omega_rotor), s.p_pre, fleet.two_mass, 50.0, 1e-3);
    CHECK(s.omega_rotor == doctest::Approx(s0.omega_rotor).epsilon(1e-6));
    CHECK(s.omega_gen == doctest::Approx(s0.omega_gen).epsilon(1e-6));
    CHECK(s.twist == doctest::Approx(s0.twist).epsilon(1e-6));
}

TEST_CASE("an electrical step decelerates the generator before the rotor")
{
    const WindFleet fleet;
    const PowerCurves curves(fleet);
    auto s = steady_wind_state(curves, fleet.two_mass);
    const double p_aero = curves.p_aero(s.omega_rotor);
    const double w0 = s.omega_rotor;
    for (int k = 0; k < 50; ++k) two_mass_step(s, p_aero, s.p_pre + 0.1, fleet.two_mass, 50.0, 1e-3);
    CHECK(s.omega_gen < w0);
    CHECK(w0 - s.omega_gen > 10.0 * std::abs(w0 - s.omega_rotor));
    for (int k = 0; k < 2000; ++k) two_mass_step(s, p_aero, s.p_pre + 0.1, fleet.two_mass, 50.0, 1e-3);
    CHECK(s.omega_rotor < w0 - 1e-3);
}

TEST_CASE("uncoupled masses do not transmit the electrical load")
{
    TwoMassParams m;
    m.shaft_stiffness = 0.0;
    m.shaft_damping = 0.0;
    WindState s;
    s.omega_rotor = s.omega_gen = 1.0;
    for (int k = 0; k < 1000; ++k) two_mass_step(s, 0.0, 0.1, m, 50.0, 1e-3);
    CHECK(s.omega_rotor == 1.0);
    CHECK(s.omega_gen < 1.0);
}

TEST_CASE("speed outside the operating range is flagged")
{
    TwoMassParams m;
    WindState s;
    s.omega_rotor = s.omega_gen = 0.31;
    CHECK_THROWS_AS(
        [&] {
            for (int k = 0; k < 100000; ++k) two_mass_step(s, 0.0, 1.0, m, 50.0, 1e-3);
        }(),
        InfeasibleError);
}

TEST_CASE("frequency controller modes")
{
    const WindFleet fleet;
    const PowerCurves curves(fleet);
    const auto& c = fleet.controller;

    SUBCASE("nominal frequency tracks MPPT")
    {
        auto s = steady_wind_state(curves, fleet.two_mass);
        for (int k = 0; k < 100; ++k) {
            const double p = controller_step(s, curves, c, true, 50.0, 50.0);
            CHECK(p == doctest::Approx(curves.p_mppt(s.omega_rotor)));
            CHECK(s.mode == WindMode::Normal);
        }
        CHECK(aggregate_wind_power(s.p_sp, fleet) == doctest::Approx(0.8 * 180.0).epsilon(1e-3));
    }
    SUBCASE("overproduction is proportional and capped")
    {
        auto s = steady_wind_state(curves, fleet.two_mass);
        controller_step(s, curves, c, true, 49.5, 50.0);
        REQUIRE(s.mode == WindMode::Overproduction);
        CHECK(s.p_sp == doctest::Approx(s.p_pre * (1.0 + c.op_gain_per_hz * 0.5)));
        controller_step(s, curves, c, true, 47.5, 50.0);
        CHECK(s.p_sp == doctest::Approx(s.p_pre * (1.0 + c.op_cap)));
        CHECK(s.p_sp <= 1.15 * s.p_pre + 1e-12);
    }
    SUBCASE("disabled controller ignores the frequency")
    {
        auto s = steady_wind_state(curves, fleet.two_mass);
        controller_step(s, curves, c, false, 48.0, 50.0);
        CHECK(s.mode == WindMode::Normal);
        CHECK(s.p_sp == doctest::Approx(s.p_pre));
    }
    SUBCASE("recovery point collapses to MPPT when the curves meet")
    {
        auto s = steady_wind_state(curves, fleet.two_mass);
        s.mode = WindMode::Overproduction;
        s.event_used = true;
        s.omega_mppt = s.omega_rotor + 0.01;  // exit below the optimum, at the steady speed
        for (double x : {0.75, 0.95}) {
            auto t = s;
            auto cx = c;
            cx.recovery_x = x;
            controller_step(t, curves, cx, true, 50.1, 50.0);
            CHECK(t.mode == WindMode::Recovery);
            CHECK(t.p2 == doctest::Approx(curves.p_mppt(t.omega_v)).epsilon(1e-3));
        }
    }
    SUBCASE("the event arms the controller once")
    {
        auto s = steady_wind_state(curves, fleet.two_mass);
        controller_step(s, curves, c, true, 49.5, 50.0);
        s.mode = WindMode::Normal;
        controller_step(s, curves, c, true, 49.5, 50.0);
        CHECK(s.mode == WindMode::Normal);
    }
}

TEST_CASE("fleet aggregation is linear")
{
    WindFleet fleet;
    CHECK(aggregate_wind_power(0.0, fleet) == 0.0);
    CHECK(aggregate_wind_power(0.8, fleet) == doctest::Approx(144.0));
    const double one = aggregate_wind_power(0.6, fleet);
    fleet.n_wt *= 2.0;
    CHECK(aggregate_wind_power(0.6, fleet) == doctest::Approx(2.0 * one));
}
