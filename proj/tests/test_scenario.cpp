#include "support.hpp"

#include "freqsec/error.hpp"
#include "freqsec/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace freqsec;
using namespace freqsec::test;

TEST_CASE("N-1 picks the largest dispatch")
{
    const auto a = make_unit("A", Technology::Steam, 100.0, 20.0, 40.0);
    const auto b = make_unit("B", Technology::Gas, 100.0, 20.0, 40.0);
    const std::vector units{a, b};

    auto c = apply_n1(units, std::vector<double>{60.0, 40.0}, 500.0);
    CHECK(c.unit == "A");
    CHECK(c.imbalance_mw == 60.0);
    CHECK(c.tm_pre - c.tm_post == 2.0 * a.inertia_h * a.rated_power / 500.0);
    CHECK(c.k_u[0] == 0.0);
    CHECK(c.k_u[1] == doctest::Approx(1.0));

    const std::vector swapped{b, a};
    c = apply_n1(swapped, std::vector<double>{50.0, 50.0}, 500.0);
    CHECK(c.unit == "A");

    CHECK_THROWS_AS(apply_n1(std::vector{a}, std::vector<double>{60.0}, 500.0), ValidationError);
}

TEST_CASE("survivor participation renormalizes to one")
{
    const auto& fleet = default_fleet();
    const std::vector<ThermalUnit> units(fleet.units.begin(), fleet.units.begin() + 6);
    const std::vector<double> p{80, 70, 60, 50, 30, 20};
    const auto c = apply_n1(units, p, 500.0);
    double sum = 0.0;
    for (double k : c.k_u) sum += k;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.k_u[static_cast<std::size_t>(c.trip)] == 0.0);
}

TEST_CASE("flat instance")
{
    const auto& fleet = default_fleet();
    const auto inst = flat_instance(fleet, 450.0, 90.0);
    CHECK(inst.hours == 24);
    CHECK(inst.demand == std::vector<double>(24, 450.0));
    CHECK(inst.likely_wind_loss == std::vector<double>(24, 45.0));
    CHECK_THROWS_AS(flat_instance(fleet, 450.0, 200.0), ValidationError);
}

TEST_CASE("peak cell of the default grid")
{
    const auto& fleet = default_fleet();
    const auto& lv = fleet.levels;
    CHECK(lv.demand.back() == 550.0);
    CHECK(lv.wind[3] == 120.0);
    const auto s = build_scenario(fleet, 5, 3);
    REQUIRE(s.feasible);
    CHECK(s.demand == 550.0);
    CHECK(s.wind == 120.0);
    REQUIRE(s.committed.size() >= 2);

    double total = s.wind;
    double largest = 0.0;
    for (double p : s.dispatch) {
        total += p;
        largest = std::max(largest, p);
    }
    CHECK(total == doctest::Approx(550.0).epsilon(1e-12));
    CHECK(s.imbalance_mw == largest);
    CHECK(s.imbalance_pct == doctest::Approx(100.0 * largest / 550.0));

    std::vector<ThermalUnit> on;
    for (auto i : s.committed) on.push_back(fleet.units[i]);
    const auto& tripped = on[static_cast<std::size_t>(s.trip)];
    CHECK(tripped.id == s.tripped_unit);
    CHECK(s.tm_pre == aggregate_inertia(on, fleet.system.s_base));
    CHECK(s.tm_post == s.tm_pre - inertia_contribution(tripped, fleet.system.s_base));

    const auto full = make_case(fleet, s, true);
    CHECK(full.contingency == Contingency::UnitTrip);
    CHECK(full.wind_control);
    const auto base = make_baseline_case(fleet, s, false);
    CHECK(base.contingency == Contingency::ConstantStep);
    CHECK(base.step_mw == doctest::Approx(55.0));
    CHECK_FALSE(base.shedding);
    REQUIRE(base.constant_tm.has_value());
    CHECK(*base.constant_tm == 10.0);
}

TEST_CASE("default grid: 30 cells, spinning reserve covers the largest dispatch, imbalance varies")
{
    const auto& fleet = default_fleet();
    const auto grid = build_grid(fleet);
    REQUIRE(grid.cells.size() == 30);
    CHECK(grid.demand_levels.size() == 6);
    CHECK(grid.wind_levels.size() == 5);
    for (std::size_t k = 1; k < grid.demand_levels.size(); ++k)
        CHECK(grid.demand_levels[k] > grid.demand_levels[k - 1]);
    std::set<long> pct;
    for (const auto& s : grid.cells) {
        CAPTURE(s.row);
        CAPTURE(s.col);
        CHECK(&grid.at(s.row, s.col) == &s);
        if (!s.feasible) continue;
        CHECK(s.schedule.gap <= 0.01 + 1e-12);
        double headroom = 0.0;
        for (std::size_t i = 0; i < s.committed.size(); ++i)
            headroom += fleet.units[s.committed[i]].rated_power - s.dispatch[i];
        CHECK(headroom >= s.imbalance_mw - kBalanceTol);
        pct.insert(std::lround(s.imbalance_pct * 1000.0));
    }
    CHECK(pct.size() >= 2);
}
