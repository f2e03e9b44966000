#pragma once

#include "freqsec/fleet.hpp"
#include "freqsec/freqsim.hpp"
#include "freqsec/uc.hpp"

#include <limits>
#include <string>
#include <vector>

namespace freqsec {

inline constexpr int kRepresentativeHour = 12;

/// One demand x wind pair with the commitment of its representative hour.
struct Scenario {
    int row = 0;  // demand level index
    int col = 0;  // wind level index
    double demand = 0.0;
    double wind = 0.0;
    bool feasible = false;
    std::string error;
    int infeasible_hour = -1;            // first violated hour when the UC has no solution

    UCSolution schedule;
    std::vector<std::size_t> committed;  // fleet indices on-line at the representative hour
    std::vector<double> dispatch;        // MW, aligned with `committed`

    int trip = -1;                       // index into `committed`
    std::string tripped_unit;
    double imbalance_mw = 0.0;
    double imbalance_pct = 0.0;
    double tm_pre = 0.0;
    double tm_post = 0.0;
};

struct ScenarioGrid {
    std::vector<double> demand_levels;
    std::vector<double> wind_levels;
    std::vector<Scenario> cells;  // row-major: demand x wind

    const Scenario& at(int row, int col) const;
};

/// Flat 24 h profile at one demand/wind pair, every unit on-line for a day.
UCInstance flat_instance(const FleetConfig& fleet, double demand, double wind, int hours = 24);

/// Contingency data of a committed set: the unit with the largest
/// dispatch (smaller id on ties) and the inertia before and after.
struct N1Case {
    int trip = -1;
    std::string unit;
    double imbalance_mw = 0.0;
    double tm_pre = 0.0;
    double tm_post = 0.0;
    std::vector<double> k_u;  // participation after the trip, 0 for the tripped unit
};
N1Case apply_n1(std::span<const ThermalUnit> committed, std::span<const double> dispatch, double s_base);

/// Solver settings for grid cells: 1 % target gap and a node budget only,
/// so results never depend on machine speed.
inline BnbOptions grid_solver_options()
{
    BnbOptions o;
    o.target_gap = 0.01;
    o.node_limit = 2'000'000;
    o.time_limit_s = std::numeric_limits<double>::infinity();
    return o;
}

Scenario build_scenario(const FleetConfig& fleet, int row, int col, const BnbOptions& opts = grid_solver_options());
/// Solves every cell; infeasible cells are flagged, not fatal.
ScenarioGrid build_grid(const FleetConfig& fleet, const BnbOptions& opts = grid_solver_options(), int jobs = 1);

/// Full-model run: N-1 trip, shedding, AGC, optional wind control.
SimCase make_case(const FleetConfig& fleet, const Scenario& s, bool wind_control);
/// Simplified comparison: one equivalent reheat-steam machine, constant T_m
/// of a 5 s aggregate inertia on a demand base, a 10 % load step, no shedding.
SimCase make_baseline_case(const FleetConfig& fleet, const Scenario& s, bool wind_control);

inline constexpr double kBaselineInertiaH = 5.0;
inline constexpr double kBaselineStep = 0.10;

}  // namespace freqsec
