#include "freqsec/scenario.hpp"

#include "freqsec/error.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace freqsec {

const Scenario& ScenarioGrid::at(int row, int col) const
{
    const int cols = static_cast<int>(wind_levels.size());
    if (row < 0 || col < 0 || row >= static_cast<int>(demand_levels.size()) || col >= cols)
        throw ValidationError("cell (" + std::to_string(row) + "," + std::to_string(col) + ") outside the grid");
    return cells[static_cast<std::size_t>(row * cols + col)];
}

UCInstance flat_instance(const FleetConfig& fleet, double demand, double wind, int hours)
{
    UCInstance inst;
    inst.hours = hours;
    const auto n = static_cast<std::size_t>(hours);
    inst.demand.assign(n, demand);
    inst.wind_forecast.assign(n, wind);
    inst.initial.assign(fleet.units.size(), InitialUnitState{true, 24, 0.0});
    complete_defaults(inst);
    validate(inst, fleet.units, fleet.wind.installed_capacity);
    return inst;
}

N1Case apply_n1(std::span<const ThermalUnit> committed, std::span<const double> dispatch, double s_base)
{
    if (committed.size() != dispatch.size()) throw ValidationError("apply_n1: dispatch size mismatch");
    if (committed.size() < 2) throw ValidationError("N-1 needs at least two committed units");
    N1Case c;
    for (std::size_t i = 0; i < committed.size(); ++i) {
        if (c.trip < 0) {
            c.trip = static_cast<int>(i);
            continue;
        }
        const auto best = static_cast<std::size_t>(c.trip);
        if (dispatch[i] > dispatch[best] || (dispatch[i] == dispatch[best] && committed[i].id < committed[best].id))
            c.trip = static_cast<int>(i);
    }
    const auto t = static_cast<std::size_t>(c.trip);
    c.unit = committed[t].id;
    c.imbalance_mw = dispatch[t];
    c.tm_pre = aggregate_inertia(committed, s_base);
    c.tm_post = c.tm_pre - inertia_contribution(committed[t], s_base);

    std::vector<ThermalUnit> survivors;
    for (std::size_t i = 0; i < committed.size(); ++i)
        if (i != t) survivors.push_back(committed[i]);
    const auto k = participation_factors(survivors);
    c.k_u.assign(committed.size(), 0.0);
    for (std::size_t i = 0, j = 0; i < committed.size(); ++i)
        if (i != t) c.k_u[i] = k[j++];
    return c;
}

Scenario build_scenario(const FleetConfig& fleet, int row, int col, const BnbOptions& opts)
{
    Scenario s;
    s.row = row;
    s.col = col;
    s.demand = fleet.levels.demand.at(static_cast<std::size_t>(row));
    s.wind = fleet.levels.wind.at(static_cast<std::size_t>(col));
    if (s.wind > fleet.wind.installed_capacity)
        throw ValidationError("wind level " + std::to_string(s.wind) + " MW above installed capacity");
    const auto inst = flat_instance(fleet, s.demand, s.wind);
    try {
        s.schedule = solve_bnb(fleet.units, inst, opts);
        if (s.schedule.u.empty()) throw InfeasibleError("no schedule found within the search budget");
    } catch (const InfeasibleError& e) {
        s.error = e.what();
        s.infeasible_hour = e.hour();
        return s;
    }
    const auto h = static_cast<std::size_t>(kRepresentativeHour);
    std::vector<ThermalUnit> on;
    for (std::size_t i = 0; i < fleet.units.size(); ++i) {
        if (s.schedule.u[i][h] == 0) continue;
        s.committed.push_back(i);
        s.dispatch.push_back(s.schedule.p[i][h]);
        on.push_back(fleet.units[i]);
    }
    if (on.size() < 2) {
        s.error = "fewer than two committed units; N-1 not simulable";
        return s;
    }
    const auto n1 = apply_n1(on, s.dispatch, fleet.system.s_base);
    s.trip = n1.trip;
    s.tripped_unit = n1.unit;
    s.imbalance_mw = n1.imbalance_mw;
    s.imbalance_pct = 100.0 * n1.imbalance_mw / s.demand;
    s.tm_pre = n1.tm_pre;
    s.tm_post = n1.tm_post;
    s.feasible = true;
    return s;
}

ScenarioGrid build_grid(const FleetConfig& fleet, const BnbOptions& opts, int jobs)
{
    ScenarioGrid g;
    g.demand_levels = fleet.levels.demand;
    g.wind_levels = fleet.levels.wind;
    for (double w : g.wind_levels)
        if (w > fleet.wind.installed_capacity)
            throw ValidationError("wind level " + std::to_string(w) + " MW above installed capacity");
    const int rows = static_cast<int>(g.demand_levels.size());
    const int cols = static_cast<int>(g.wind_levels.size());
    g.cells.resize(static_cast<std::size_t>(rows * cols));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k = next++; k < rows * cols; k = next++)
            g.cells[static_cast<std::size_t>(k)] = build_scenario(fleet, k / cols, k % cols, opts);
    };
    const int n = std::clamp(jobs, 1, rows * cols);
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return g;
}

namespace {

SimCase common_case(const FleetConfig& fleet, const Scenario& s)
{
    if (!s.feasible) throw ValidationError("scenario (" + std::to_string(s.row) + "," + std::to_string(s.col) +
                                           ") is infeasible: " + s.error);
    SimCase c;
    for (std::size_t i = 0; i < s.committed.size(); ++i) c.units.push_back(fleet.units[s.committed[i]]);
    c.p0 = s.dispatch;
    c.demand = s.demand;
    c.wind = s.wind;
    c.system = fleet.system;
    c.governors = fleet.governors;
    c.wind_fleet = fleet.wind;
    return c;
}

}  // namespace

SimCase make_case(const FleetConfig& fleet, const Scenario& s, bool wind_control)
{
    SimCase c = common_case(fleet, s);
    c.contingency = Contingency::UnitTrip;
    c.trip_unit = s.trip;
    c.wind_control = wind_control;
    return c;
}

SimCase make_baseline_case(const FleetConfig& fleet, const Scenario& s, bool wind_control)
{
    SimCase c = common_case(fleet, s);
    // single reheat-steam machine on the demand base
    ThermalUnit eq;
    eq.id = "EQ";
    eq.plant = Plant::Jinamar;
    eq.tech = Technology::Steam;
    eq.rated_power = 2.0 * s.demand;
    eq.min_power = 0.0;
    eq.inertia_h = kBaselineInertiaH / 2.0;
    eq.droop_r = 2.0 * fleet.governors.r_s;
    double thermal = 0.0;
    for (double p : c.p0) thermal += p;
    c.units = {eq};
    c.p0 = {thermal};
    c.contingency = Contingency::ConstantStep;
    c.step_mw = kBaselineStep * s.demand;
    c.power_base = s.demand;
    c.constant_tm = 2.0 * kBaselineInertiaH;
    c.shedding = false;
    c.wind_control = wind_control;
    return c;
}

}  // namespace freqsec
