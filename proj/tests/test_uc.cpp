#include "support.hpp"

#include "freqsec/error.hpp"
#include "uc_detail.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

using namespace freqsec;
using namespace freqsec::test;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Second enumerator, written without the library's pricing code: one-hour
// starts only, merit-order fill with the reserve cap applied per unit.
struct Reference {
    std::span<const ThermalUnit> units;
    const UCInstance& inst;

    std::optional<double> hour_cost(int h, const std::vector<int>& on) const
    {
        const auto hh = static_cast<std::size_t>(h);
        const double net = inst.demand[hh] - inst.wind_forecast[hh];
        double rated = 0.0;
        for (std::size_t i = 0; i < units.size(); ++i)
            if (on[i]) rated += units[i].rated_power;
        const double headroom = rated - net;
        const double rise = h + 1 < inst.hours ? std::max(0.0, inst.demand[hh + 1] - inst.demand[hh]) : 0.0;
        if (headroom < std::max(rise, inst.likely_wind_loss[hh]) - 1e-9) return std::nullopt;

        struct Piece {
            double mc, width;
            std::size_t unit;
        };
        std::vector<Piece> pieces;
        std::vector<double> p(units.size(), 0.0), room(units.size(), 0.0);
        double left = net, cost = 0.0;
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (!on[i]) continue;
            const auto& u = units[i];
            const double cap = std::min(u.rated_power, headroom);
            if (u.min_power > cap + 1e-9) return std::nullopt;
            p[i] = u.min_power;
            room[i] = cap - u.min_power;
            left -= u.min_power;
            cost += u.no_load_cost + u.cost_segments.front().marginal_cost * u.min_power;
            for (const auto& s : u.cost_segments) pieces.push_back({s.marginal_cost, s.width_mw, i});
        }
        if (left < -1e-9) return std::nullopt;
        std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.mc < b.mc; });
        for (const auto& pc : pieces) {
            if (left <= 1e-12) break;
            const double take = std::min({pc.width, room[pc.unit], left});
            if (take <= 0.0) continue;
            p[pc.unit] += take;
            room[pc.unit] -= take;
            left -= take;
            cost += take * pc.mc;
        }
        if (left > 1e-9) return std::nullopt;
        for (std::size_t i = 0; i < units.size(); ++i)
            if (on[i]) cost += units[i].om_cost * p[i];
        return cost;
    }

    // startup and wear cost of one unit's row, or nullopt if min up/down is broken
    std::optional<double> row_cost(std::size_t i, const std::vector<int>& row) const
    {
        const auto& u = units[i];
        const auto& init = inst.initial[i];
        int state = init.on ? 1 : 0;
        int run = init.hours;
        double cost = 0.0;
        for (int h = 0; h < inst.hours; ++h) {
            const int next = row[static_cast<std::size_t>(h)];
            if (next != state) {
                if (state == 1 && run < u.min_up) return std::nullopt;
                if (state == 0) {
                    if (run < u.min_down) return std::nullopt;
                    double c = 0.0;
                    for (const auto& t : u.startup_types)
                        if (t.min_offline_hours <= run) c = t.cost;
                    cost += c + u.wear_tear_cost;
                }
                state = next;
                run = 1;
            } else {
                ++run;
            }
        }
        return cost;
    }

    double solve() const
    {
        const std::size_t n = units.size();
        const auto T = static_cast<std::size_t>(inst.hours);
        double best = kInf;
        const std::size_t total = std::size_t{1} << (n * T);
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<std::vector<int>> u(n, std::vector<int>(T));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t h = 0; h < T; ++h) u[i][h] = static_cast<int>((code >> (i * T + h)) & 1U);
            double cost = 0.0;
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i) {
                const auto c = row_cost(i, u[i]);
                ok = c.has_value();
                if (ok) cost += *c;
            }
            for (std::size_t h = 0; h < T && ok; ++h) {
                std::vector<int> on(n);
                for (std::size_t i = 0; i < n; ++i) on[i] = u[i][h];
                const auto c = hour_cost(static_cast<int>(h), on);
                ok = c.has_value();
                if (ok) cost += *c;
            }
            if (ok) best = std::min(best, cost);
        }
        return best;
    }
};

void check_reserve_rule(std::span<const ThermalUnit> units, const UCInstance& inst, const UCSolution& sol)
{
    for (int h = 0; h < inst.hours; ++h) {
        const auto hh = static_cast<std::size_t>(h);
        std::vector<double> online;
        double spinning = 0.0;
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (!sol.u[i][hh]) continue;
            online.push_back(sol.p[i][hh]);
            spinning += units[i].rated_power - sol.p[i][hh];
        }
        const double rise = h + 1 < inst.hours ? std::max(0.0, inst.demand[hh + 1] - inst.demand[hh]) : 0.0;
        const double largest = online.empty() ? 0.0 : *std::max_element(online.begin(), online.end());
        const double required = std::max({rise, inst.likely_wind_loss[hh], largest});
        const auto rr = reserve_requirement(inst, h, online);
        CHECK(rr.value == doctest::Approx(required).epsilon(1e-12));
        CHECK(spinning >= required - kBalanceTol);
        CHECK(sol.spinning_reserve[hh] == doctest::Approx(spinning).epsilon(1e-9));
    }
}

void check_balance(const UCInstance& inst, const UCSolution& sol)
{
    for (int h = 0; h < inst.hours; ++h) {
        const auto hh = static_cast<std::size_t>(h);
        double sum = inst.wind_forecast[hh];
        for (const auto& row : sol.p) sum += row[hh];
        CHECK(std::abs(sum - inst.demand[hh]) <= kBalanceTol);
    }
}

struct RandomCase {
    std::vector<ThermalUnit> units;
    UCInstance inst;
};

RandomCase random_case(std::mt19937& rng, const FleetConfig& fleet, int max_units, int max_hours)
{
    RandomCase rc;
    const int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_units - 1));
    const int T = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_hours - 1));
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        auto u = fleet.units[rng() % fleet.units.size()];
        u.id = "U" + std::to_string(i);
        rc.units.push_back(u);
    }
    double cap = 0.0;
    for (const auto& u : rc.units) cap += u.rated_power;
    rc.inst.hours = T;
    for (int h = 0; h < T; ++h) {
        rc.inst.demand.push_back((0.2 + 0.35 * unit01(rng)) * cap);
        rc.inst.wind_forecast.push_back(0.08 * unit01(rng) * cap);
    }
    for (int i = 0; i < n; ++i)
        rc.inst.initial.push_back({unit01(rng) < 0.7, 1 + static_cast<int>(rng() % 10), 0.0});
    complete_defaults(rc.inst);
    return rc;
}

}  // namespace

TEST_CASE("reserve requirement is the largest of its three components")
{
    auto inst = make_instance({100.0, 100.0}, {0.0, 0.0}, 0);
    inst.likely_wind_loss = {20.0, 20.0};
    inst.demand = {100.0, 110.0};
    auto r = reserve_requirement(inst, 0, std::vector<double>{35.0, 12.0});
    CHECK(r.demand_increase == 10.0);
    CHECK(r.wind_loss == 20.0);
    CHECK(r.largest_unit == 35.0);
    CHECK(r.value == 35.0);

    inst.demand = {100.0, 100.0};
    inst.likely_wind_loss = {0.0, 0.0};
    CHECK(reserve_requirement(inst, 0, std::vector<double>{60.0, 10.0}).value == 60.0);

    inst.demand = {100.0, 125.0};
    inst.likely_wind_loss = {15.0, 15.0};
    r = reserve_requirement(inst, 0, std::vector<double>{20.0});
    CHECK(r.value == 25.0);
    // last hour has no further increase
    CHECK(reserve_requirement(inst, 1, std::vector<double>{5.0}).demand_increase == 0.0);
}

TEST_CASE("hourly dispatch")
{
    const auto a = make_unit("A", Technology::Steam, 100.0, 20.0, 40.0);
    SUBCASE("net demand at the minimum")
    {
        const auto d = dispatch_hour(std::vector{a}, 20.0);
        CHECK(d.p[0] == 20.0);
        CHECK(d.fuel_cost == doctest::Approx(50.0 + 40.0 * 20.0));
        CHECK(d.om_cost == doctest::Approx(2.0 * 20.0));
    }
    SUBCASE("net demand at full rating")
    {
        const auto b = make_unit("B", Technology::Gas, 50.0, 10.0, 80.0);
        const auto d = dispatch_hour(std::vector{a, b}, 150.0);
        CHECK(d.p[0] == doctest::Approx(100.0));
        CHECK(d.p[1] == doctest::Approx(50.0));
    }
    SUBCASE("cheaper unit saturates first and matches a 0.1 MW grid search")
    {
        const auto b = make_unit("B", Technology::Gas, 50.0, 10.0, 80.0);
        const std::vector units{a, b};
        for (double net : {40.0, 75.0, 115.0, 135.5}) {
            const auto d = dispatch_hour(units, net);
            if (net - 10.0 <= 100.0) CHECK(d.p[1] == doctest::Approx(10.0));
            double best = kInf;
            for (int k = 0; k <= 400; ++k) {
                const double pb = 10.0 + 0.1 * k;
                const double pa = net - pb;
                if (pb > 50.0 + 1e-9 || pa < 20.0 - 1e-9 || pa > 100.0 + 1e-9) continue;
                best = std::min(best, a.fuel_cost(pa) + b.fuel_cost(pb) + 2.0 * net);
            }
            CHECK(d.fuel_cost + d.om_cost <= best + 1e-9);
            CHECK(d.fuel_cost + d.om_cost >= best - 0.1 * 10.0);  // grid resolution times the price spread
        }
    }
    SUBCASE("outside the committed band")
    {
        CHECK_THROWS_AS(dispatch_hour(std::vector{a}, 10.0), InfeasibleError);
        CHECK_THROWS_AS(dispatch_hour(std::vector{a}, 101.0), InfeasibleError);
    }
}

TEST_CASE("startup cost follows the off-line time")
{
    auto u = make_unit("A", Technology::Steam, 100.0, 20.0, 40.0);
    u.min_down = 1;
    u.startup_types = {{1, 100.0}, {4, 200.0}, {12, 300.0}};
    CHECK(startup_cost(u, 5) == 200.0);
    CHECK(startup_type_index(u, 5) == 1);
    CHECK(startup_cost(u, 4) == 200.0);
    CHECK(startup_cost(u, 3) == 100.0);
    CHECK(startup_cost(u, 12) == 300.0);
    CHECK(startup_cost(u, 40) == 300.0);

    u.startup_types = {{1, 150.0}};
    for (int h = 1; h < 30; ++h) CHECK(startup_cost(u, h) == 150.0);

    u.min_down = 3;
    CHECK_THROWS_AS(startup_cost(u, 2), ValidationError);
}

TEST_CASE("startup trajectory ramps linearly to the minimum output")
{
    auto u = make_unit("A", Technology::Steam, 100.0, 20.0, 40.0);
    u.startup_duration = 2;
    CHECK(startup_trajectory(u) == std::vector<double>{10.0, 20.0});
    u.startup_duration = 1;
    CHECK(startup_trajectory(u).empty());
}

TEST_CASE("a starting unit adds energy but no spinning reserve")
{
    auto a = make_unit("A", Technology::Steam, 200.0, 20.0, 40.0);
    auto b = make_unit("B", Technology::Gas, 60.0, 20.0, 30.0);
    b.startup_duration = 2;
    const std::vector units{a, b};
    auto inst = make_instance({80.0, 80.0, 80.0}, {0.0, 0.0, 0.0}, 2);
    inst.initial[1] = {false, 10, 0.0};
    const auto sol = evaluate_commitment(units, inst, {{1, 1, 1}, {0, 0, 1}});
    REQUIRE(sol.has_value());
    CHECK(sol->p[1][1] == doctest::Approx(10.0));
    CHECK(sol->p[0][1] == doctest::Approx(70.0));
    CHECK(sol->u[1][1] == 0);
    CHECK(sol->spinning_reserve[1] == doctest::Approx(200.0 - 70.0));
    CHECK(validate_solution(units, inst, *sol).empty());
}

TEST_CASE("exact enumeration on hand-sized instances")
{
    SUBCASE("one unit, two hours")
    {
        const auto a = make_unit("A", Technology::Steam, 100.0, 20.0, 40.0);
        const auto inst = make_instance({40.0, 45.0}, {0.0, 0.0}, 1);
        const auto sol = solve_exact(std::vector{a}, inst);
        CHECK(sol.u[0] == std::vector<int>{1, 1});
        CHECK(validate_solution(std::vector{a}, inst, sol).empty());
    }
    SUBCASE("reserve forces a second identical unit")
    {
        const auto a = make_unit("A", Technology::Steam, 100.0, 20.0, 40.0);
        auto b = a;
        b.id = "B";
        const std::vector units{a, b};
        const auto inst = make_instance({60.0, 60.0}, {0.0, 0.0}, 2, {false, 10, 0.0});
        const auto sol = solve_exact(units, inst);
        CHECK(sol.u[0] == std::vector<int>{1, 1});
        CHECK(sol.u[1] == std::vector<int>{1, 1});
        // one unit alone covers the energy but not its own loss
        CHECK_FALSE(evaluate_commitment(units, inst, {{1, 1}, {0, 0}}).has_value());
    }
    SUBCASE("too large for enumeration")
    {
        const auto& fleet = default_fleet();
        const std::vector<ThermalUnit> six(fleet.units.begin(), fleet.units.begin() + 6);
        const auto inst = make_instance(std::vector<double>(4, 200.0), std::vector<double>(4, 0.0), 6);
        CHECK_THROWS_AS(solve_exact(six, inst), TooLargeError);
    }
    SUBCASE("infeasible instance names an hour")
    {
        const auto a = make_unit("A", Technology::Steam, 100.0, 20.0, 40.0);
        const auto inst = make_instance({40.0, 90.0}, {0.0, 0.0}, 1);
        try {
            solve_exact(std::vector{a}, inst);
            FAIL("expected infeasibility");
        } catch (const InfeasibleError& e) {
            CHECK(e.hour() == 1);
        }
    }
}

TEST_CASE("exact enumeration matches an independently coded enumerator")
{
    std::mt19937 rng(20240611);
    int compared = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<ThermalUnit> units;
        std::uniform_real_distribution<double> mc(30.0, 90.0), step(0.2, 3.0), rated(40.0, 120.0);
        for (int i = 0; i < 3; ++i) {
            const double r = rated(rng);
            auto u = make_unit("U" + std::to_string(i), Technology::Gas, r, 0.25 * r, mc(rng), step(rng));
            u.min_up = 1 + static_cast<int>(rng() % 3);
            u.min_down = 1 + static_cast<int>(rng() % 3);
            u.startup_types = {{u.min_down, 100.0 + 50.0 * i}, {u.min_down + 2, 180.0 + 70.0 * i}};
            u.no_load_cost = 20.0 + 10.0 * static_cast<double>(rng() % 5);
            units.push_back(u);
        }
        double cap = 0.0;
        for (const auto& u : units) cap += u.rated_power;
        UCInstance inst;
        inst.hours = 4;
        std::uniform_real_distribution<double> share(0.15, 0.45);
        for (int h = 0; h < 4; ++h) {
            inst.demand.push_back(share(rng) * cap);
            inst.wind_forecast.push_back(0.05 * share(rng) * cap);
        }
        for (int i = 0; i < 3; ++i) inst.initial.push_back({rng() % 2 == 0, 1 + static_cast<int>(rng() % 4), 0.0});
        complete_defaults(inst);

        const double ref = Reference{units, inst}.solve();
        if (!std::isfinite(ref)) {
            CHECK_THROWS_AS(solve_exact(units, inst), InfeasibleError);
            continue;
        }
        const auto sol = solve_exact(units, inst);
        CHECK(sol.total_cost() == doctest::Approx(ref).epsilon(1e-10));
        CHECK(validate_solution(units, inst, sol).empty());
        ++compared;
    }
    CHECK(compared >= 20);
}

TEST_CASE("branch and bound equals exact enumeration on seeded instances")
{
    const auto& fleet = default_fleet();
    std::mt19937 rng(4242);
    int matched = 0, attempts = 0;
    while (matched < 60 && attempts < 2000) {
        ++attempts;
        const auto rc = random_case(rng, fleet, 4, 6);
        UCSolution exact;
        try {
            exact = solve_exact(rc.units, rc.inst);
        } catch (const InfeasibleError&) {
            CHECK_THROWS_AS(solve_bnb(rc.units, rc.inst), InfeasibleError);
            continue;
        }
        const auto bnb = solve_bnb(rc.units, rc.inst);
        CHECK(bnb.status == SolveStatus::Optimal);
        CHECK(std::abs(bnb.total_cost() - exact.total_cost()) <= kCostTol);
        CHECK(validate_solution(rc.units, rc.inst, bnb).empty());
        check_reserve_rule(rc.units, rc.inst, bnb);
        check_balance(rc.inst, bnb);
        ++matched;
    }
    CHECK(matched >= 50);
}

TEST_CASE("Lagrangian bound never exceeds the exact optimum")
{
    const auto& fleet = default_fleet();
    std::mt19937 rng(99);
    int checked = 0;
    for (int trial = 0; trial < 400 && checked < 40; ++trial) {
        const auto rc = random_case(rng, fleet, 4, 5);
        UCSolution exact;
        try {
            exact = solve_exact(rc.units, rc.inst);
        } catch (const InfeasibleError&) {
            continue;
        }
        detail::HourEvaluator eval(rc.units, rc.inst);
        const auto lr = detail::lagrangian_bound(rc.units, rc.inst, eval, exact.total_cost(), 300);
        CHECK(lr.bound <= exact.total_cost() + 1e-6);
        ++checked;
    }
    CHECK(checked >= 30);
}

TEST_CASE("a unit that alone covers the residual demand stays on all day")
{
    auto big = make_unit("BIG", Technology::Steam, 400.0, 50.0, 60.0);
    auto s1 = make_unit("S1", Technology::Gas, 60.0, 10.0, 30.0);
    auto s2 = make_unit("S2", Technology::Gas, 60.0, 10.0, 30.0);
    const std::vector units{big, s1, s2};
    const auto inst = make_instance(std::vector<double>(6, 200.0), std::vector<double>(6, 0.0), 3);
    const auto sol = solve_bnb(units, inst);
    CHECK(sol.u[0] == std::vector<int>(6, 1));
}

TEST_CASE("uniform cost scaling scales the optimum")
{
    const auto& fleet = default_fleet();
    std::mt19937 rng(7);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 5; ++trial) {
        auto rc = random_case(rng, fleet, 4, 5);
        UCSolution base;
        try {
            base = solve_exact(rc.units, rc.inst);
        } catch (const InfeasibleError&) {
            continue;
        }
        auto scaled = rc.units;
        for (auto& u : scaled) {
            for (auto& s : u.cost_segments) s.marginal_cost *= 2.0;
            for (auto& s : u.startup_types) s.cost *= 2.0;
            u.no_load_cost *= 2.0;
            u.om_cost *= 2.0;
            u.wear_tear_cost *= 2.0;
        }
        const auto sol = solve_bnb(scaled, rc.inst);
        CHECK(sol.total_cost() == doctest::Approx(2.0 * base.total_cost()).epsilon(1e-10));
        ++checked;
    }
    CHECK(checked == 5);
}

TEST_CASE("branch and bound dominates random feasible schedules")
{
    const auto& fleet = default_fleet();
    const std::vector<ThermalUnit> units{fleet.units[0], fleet.units[2], fleet.units[4], fleet.units[9],
                                         fleet.units[13]};
    const int T = 8;
    auto inst = make_instance({130, 150, 170, 190, 200, 180, 160, 140}, {20, 25, 30, 30, 25, 20, 20, 15}, 5);
    const auto best = solve_bnb(units, inst);
    REQUIRE(validate_solution(units, inst, best).empty());

    std::mt19937 rng(1000);
    int feasible = 0;
    for (int k = 0; k < 1000; ++k) {
        std::vector<std::vector<int>> u(units.size(), std::vector<int>(T));
        for (auto& row : u) {
            const unsigned style = rng() % 3;
            const int cut = static_cast<int>(rng() % T);
            for (int h = 0; h < T; ++h)
                row[static_cast<std::size_t>(h)] = style == 0 ? 1 : style == 1 ? (h >= cut) : (h < cut || rng() % 2);
        }
        const auto sol = evaluate_commitment(units, inst, u);
        if (!sol) continue;
        ++feasible;
        CHECK(best.total_cost() <= sol->total_cost() + kCostTol);
    }
    CHECK(feasible >= 50);
}

TEST_CASE("default peak day solves within 1 % and meets the reserve rule every hour")
{
    const auto& fleet = default_fleet();
    auto inst = load_instance(data_path("peak_day.json"), fleet.units);
    complete_defaults(inst);
    validate(inst, fleet.units, fleet.wind.installed_capacity);
    BnbOptions opts;
    opts.target_gap = 0.01;
    opts.time_limit_s = 60.0;
    const auto sol = solve_bnb(fleet.units, inst, opts);
    CHECK(sol.gap <= 0.01);
    CHECK(sol.status != SolveStatus::NodeLimit);
    CHECK(sol.lower_bound <= sol.total_cost());
    CHECK(validate_solution(fleet.units, inst, sol).empty());
    check_reserve_rule(fleet.units, inst, sol);
    check_balance(inst, sol);
}

TEST_CASE("validator reports constructed violations")
{
    auto a = make_unit("A", Technology::Steam, 100.0, 20.0, 40.0);
    auto b = make_unit("B", Technology::Gas, 100.0, 20.0, 60.0);
    b.startup_types = {{1, 100.0}, {5, 250.0}};
    const std::vector units{a, b};
    const auto inst = make_instance({40.0, 90.0, 90.0}, {0.0, 0.0, 0.0}, 2);
    auto init = inst;
    init.initial[1] = {false, 8, 0.0};
    const auto sol = solve_exact(units, init);
    REQUIRE(validate_solution(units, init, sol).empty());
    int start = -1;
    for (int h = 0; h < 3; ++h)
        if (sol.startup[1][static_cast<std::size_t>(h)]) start = h;
    REQUIRE(start >= 0);

    SUBCASE("output below minimum")
    {
        auto bad = sol;
        bad.p[0][0] = 10.0;
        bad.p[1][0] += 10.0;
        const auto v = validate_solution(units, init, bad);
        REQUIRE_FALSE(v.empty());
        CHECK(std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.unit == "A" && x.hour == 0; }));
    }
    SUBCASE("mispriced startup")
    {
        auto bad = sol;
        bad.startup_cost[1][static_cast<std::size_t>(start)] += 1.0;
        bad.cost.startup += 1.0;
        const auto v = validate_solution(units, init, bad);
        REQUIRE_FALSE(v.empty());
        CHECK(std::any_of(v.begin(), v.end(), [&](const Violation& x) {
            return x.unit == "B" && x.hour == start && x.message.find("startup") != std::string::npos;
        }));
    }
}

TEST_CASE("instance and solution serialization")
{
    const auto& fleet = default_fleet();
    auto inst = load_instance(data_path("peak_day.json"), fleet.units);
    complete_defaults(inst);
    const auto text = dump_instance(inst, fleet.units);
    const auto again = parse_instance(text, fleet.units);
    CHECK(dump_instance(again, fleet.units) == text);

    const auto a = make_unit("A", Technology::Steam, 100.0, 20.0, 40.0);
    auto b = a;
    b.id = "B";
    const std::vector units{a, b};
    const auto small = make_instance({60.0, 70.0}, {0.0, 5.0}, 2);
    const auto sol = solve_exact(units, small);
    const auto json_text = dump_solution(sol);
    CHECK(dump_solution(parse_solution(json_text)) == json_text);

    const auto csv = solution_csv(sol);
    CHECK(csv.rfind("unit,h0,h1\n", 0) == 0);
    CHECK(csv.find("\nA,") != std::string::npos);
    CHECK(csv.find("\nB,") != std::string::npos);

    CHECK_THROWS_AS(parse_instance("{\"hours\": 2}", units), std::exception);
}
