#pragma once

#include "freqsec/fleet.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace freqsec {

inline constexpr double kBalanceTol = 1e-6;  // MW
inline constexpr double kCostTol = 1e-6;     // EUR

struct InitialUnitState {
    bool on = true;
    int hours = 24;       // hours already spent in that state (>= 1)
    double output = 0.0;  // MW, informational when on
};

/// Deterministic single-area UC instance. Units are identified by their
/// position in the fleet vector passed alongside.
struct UCInstance {
    int hours = 24;
    std::vector<double> demand;            // MW per hour
    std::vector<double> wind_forecast;     // MW per hour
    std::vector<double> likely_wind_loss;  // MW per hour
    std::vector<InitialUnitState> initial; // per unit
};

/// Fills likely_wind_loss with 50 % of the forecast where absent.
void complete_defaults(UCInstance& inst);
void validate(const UCInstance& inst, std::span<const ThermalUnit> units, double installed_wind = -1.0);

struct ReserveRequirement {
    double value = 0.0;
    double demand_increase = 0.0;
    double wind_loss = 0.0;
    double largest_unit = 0.0;
};

/// Spinning reserve needed at `hour` (0-based) given the dispatch of the
/// units that are on-line (synchronised) in that hour.
ReserveRequirement reserve_requirement(const UCInstance& inst, int hour, std::span<const double> online_dispatch);

struct HourDispatch {
    std::vector<double> p;  // MW, same order as the committed units
    double fuel_cost = 0.0; // EUR for the hour, incl. no-load
    double om_cost = 0.0;   // EUR for the hour
};

/// Least-cost dispatch of the committed units for one hour. Every unit is
/// capped at `unit_cap` MW in addition to its rating.
HourDispatch dispatch_hour(std::span<const ThermalUnit> committed, double net_demand,
                           double unit_cap = std::numeric_limits<double>::infinity());

/// Index of the startup type that applies after `offline_hours` off-line.
std::size_t startup_type_index(const ThermalUnit& unit, int offline_hours);
double startup_cost(const ThermalUnit& unit, int offline_hours);

/// Output ramp of a multi-hour start: min_power * k / D for k = 1..D.
/// The last entry is the first committed hour; the preceding D-1 entries
/// are the non-synchronised trajectory hours. Empty when D <= 1.
std::vector<double> startup_trajectory(const ThermalUnit& unit);

struct CostBreakdown {
    double startup = 0.0;
    double fuel = 0.0;
    double om = 0.0;
    double wear_tear = 0.0;
    double total() const { return startup + fuel + om + wear_tear; }
};

enum class SolveStatus { Optimal, WithinGap, NodeLimit, Infeasible };
std::string_view to_string(SolveStatus s);

struct UCSolution {
    int hours = 0;
    std::vector<std::string> unit_ids;
    std::vector<std::vector<int>> u;              // [unit][hour] 0/1
    std::vector<std::vector<double>> p;           // [unit][hour] MW
    std::vector<std::vector<int>> startup;        // 1 in the first committed hour of a start
    std::vector<std::vector<int>> startup_type;   // -1 or index into unit.startup_types
    std::vector<std::vector<double>> startup_cost;// EUR charged in that hour (type cost only)
    std::vector<double> spinning_reserve;         // MW per hour
    std::vector<double> reserve_required;         // MW per hour
    std::vector<double> reserve_margin;           // spinning - required
    CostBreakdown cost;

    SolveStatus status = SolveStatus::Optimal;
    double lower_bound = 0.0;
    double gap = 0.0;
    long long nodes = 0;

    double total_cost() const { return cost.total(); }
};

/// Per-unit/per-hour operating mode. `Starting` hours follow the startup
/// trajectory: not synchronised, output fixed by the ramp.
enum class UnitMode : std::uint8_t { Off, Starting, On };
using ModeMatrix = std::vector<std::vector<UnitMode>>;  // [unit][hour]

/// Prices a full mode schedule; throws InfeasibleError naming the first
/// hour whose dispatch or reserve cannot be met, ValidationError when the
/// schedule breaks min up/down or trajectory rules.
UCSolution price_schedule(std::span<const ThermalUnit> units, const UCInstance& inst, const ModeMatrix& modes);

/// Derives modes (trajectory hours included) from a 0/1 commitment matrix
/// and prices it. Returns nullopt when the commitment is illegal or infeasible.
std::optional<UCSolution> evaluate_commitment(std::span<const ThermalUnit> units, const UCInstance& inst,
                                              const std::vector<std::vector<int>>& u);

/// Exhaustive enumeration of every legal commitment; small instances only.
UCSolution solve_exact(std::span<const ThermalUnit> units, const UCInstance& inst);

struct BnbOptions {
    double target_gap = 0.0;        // prune nodes that cannot improve by more than this fraction
    double acceptable_gap = 0.01;   // gap at which a budget-limited result still counts as solved
    long long node_limit = 20'000'000;
    double time_limit_s = 40.0;
};

/// Depth-first branch and bound over commitment decisions, hour by hour.
UCSolution solve_bnb(std::span<const ThermalUnit> units, const UCInstance& inst, const BnbOptions& opts = {});

struct Violation {
    std::string unit;  // empty for system-level checks
    int hour = -1;
    std::string message;
};

/// Independent feasibility and pricing audit. Empty result iff the
/// solution is feasible and correctly priced.
std::vector<Violation> validate_solution(std::span<const ThermalUnit> units, const UCInstance& inst,
                                         const UCSolution& sol);

// ------------------------------------------------------------------ I/O

UCInstance parse_instance(std::string_view json_text, std::span<const ThermalUnit> units);
UCInstance load_instance(const std::filesystem::path& path, std::span<const ThermalUnit> units);
std::string dump_instance(const UCInstance& inst, std::span<const ThermalUnit> units);
std::string dump_solution(const UCSolution& sol);
UCSolution parse_solution(std::string_view json_text);
/// unit x hour dispatch matrix, header "unit,h0,h1,...".
std::string solution_csv(const UCSolution& sol);

}  // namespace freqsec
