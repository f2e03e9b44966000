#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace freqsec {

enum class Plant { Tirajana, Jinamar };
enum class Technology { Steam, Gas, Diesel, CombinedCycle };

std::string_view to_string(Plant p);
std::string_view to_string(Technology t);
Plant plant_from_string(std::string_view s);
Technology technology_from_string(std::string_view s);

inline constexpr std::size_t kCostPieces = 10;
inline constexpr std::size_t kShedSteps = 8;

struct CostSegment {
    double width_mw = 0.0;
    double marginal_cost = 0.0;  // EUR/MWh
};

struct StartupType {
    int min_offline_hours = 0;
    double cost = 0.0;  // EUR
};

struct ThermalUnit {
    std::string id;
    Plant plant = Plant::Jinamar;
    Technology tech = Technology::Steam;
    double rated_power = 0.0;  // MW
    double min_power = 0.0;    // MW
    double inertia_h = 0.0;    // s, machine base
    double droop_r = 0.05;     // pu
    double agc_factor = 1.0;
    int min_up = 1;            // h
    int min_down = 1;          // h
    int startup_duration = 1;  // h
    std::vector<StartupType> startup_types;
    std::vector<CostSegment> cost_segments;
    double no_load_cost = 0.0;    // EUR/h
    double om_cost = 0.0;         // EUR/MWh
    double wear_tear_cost = 0.0;  // EUR per start

    /// Cost of running at exactly min_power for one hour, excluding O&M.
    double min_block_cost() const;
    /// Fuel cost of one hour at output p (min_power <= p <= rated_power).
    double fuel_cost(double p) const;
};

/// Governor/turbine block constants per technology. Defaults are the
/// typical Kundur/Neplan values used for the Gran Canaria model.
struct GovernorParams {
    // gas and combined cycle
    double tr_g = 0.05, t1_g = 0.6, t2_g = 0.5, t3_g = 0.01, t4_g = 0.24, td_g = 0.2;
    double r_g = 0.05, r_cc = 0.05, h_g = 5.0, h_cc = 5.0;
    // diesel
    double t1_d = 0.01, t2_d = 0.0, t3_d = 2.0, t4_d = 0.1, t5_d = 0.1, t6_d = 0.1;
    double k_d = 3.0, r_d = 0.05, h_d = 2.45;
    // steam
    double tr_s = 0.2, tsm_s = 0.1, tch_s = 0.3, fh_s = 0.3, trh_s = 7.0, r_s = 0.05, h_s = 5.0;
};

struct LoadShedStep {
    double threshold_hz = 0.0;
    double delay_s = 0.0;
    double shed_peak_mw = 0.0;
    double shed_valley_mw = 0.0;
};

struct LoadShedTable {
    std::array<LoadShedStep, kShedSteps> steps{};
    static LoadShedTable defaults();
};

struct PowerSystem {
    double f0 = 50.0;
    double s_base = 500.0;     // MVA
    double damping_d = 1.0;    // pu power / pu frequency
    std::optional<double> agc_gain_kf;  // MW/Hz; unset -> sized from committed droop gains
    double agc_kf_factor = 1.5;
    double agc_time_tu = 50.0;  // s
    LoadShedTable shed_table = LoadShedTable::defaults();
    double demand_peak = 550.0;
    double demand_valley = 300.0;
};

struct WindControllerParams {
    double op_cap = 0.15;            // fraction of pre-event output
    double recovery_x = 0.95;
    double op_gain_per_hz = 0.15;    // fraction of pre-event output per Hz of deviation
    double trigger_hz = 0.1;         // arm at f0 - trigger_hz
    double exit_speed_fraction = 0.9;  // leave overproduction at this fraction of the MPPT speed
    double recovery_tolerance = 0.002; // back to normal within this fraction of the MPPT speed
};

struct TwoMassParams {
    double h_rotor = 4.0;           // s
    double h_generator = 0.5;       // s
    double shaft_stiffness = 0.3;   // pu torque / electrical rad
    double shaft_damping = 1.5;     // pu torque / pu speed
};

struct WindFleet {
    double n_wt = 90.0;
    double turbine_rating = 2.0;        // MW
    double installed_capacity = 180.0;  // MW
    double wind_speed = 10.25;          // m/s
    double capacity_factor = 0.80;
    WindControllerParams controller;
    TwoMassParams two_mass;
};

struct ScenarioLevels {
    std::vector<double> demand{300, 350, 400, 450, 500, 550};
    std::vector<double> wind{30, 60, 90, 120, 150};
};

/// Everything read from a fleet configuration file.
struct FleetConfig {
    std::vector<ThermalUnit> units;
    PowerSystem system;
    WindFleet wind;
    GovernorParams governors;
    ScenarioLevels levels;
};

void validate(const ThermalUnit& unit);
void validate(const PowerSystem& system);
void validate(const WindFleet& wind);
void validate(const FleetConfig& config);

/// Reads and validates a JSON fleet configuration.
FleetConfig load_fleet(const std::filesystem::path& path);
FleetConfig parse_fleet(std::string_view json_text);
std::string dump_fleet(const FleetConfig& config);

/// Sum of 2*H*S/S_base over the given (committed) units, in seconds.
double aggregate_inertia(std::span<const ThermalUnit> units, double s_base);
/// Inertia contribution of a single unit on the system base.
double inertia_contribution(const ThermalUnit& unit, double s_base);

/// Load shed by one step (1-based) at the given demand, interpolated
/// linearly between the valley and peak columns.
double shed_amount(int step, double demand, const PowerSystem& system);

/// AGC participation factors over the given units; they sum to one.
std::vector<double> participation_factors(std::span<const ThermalUnit> units);

/// Primary-response gain sum(S_i / (R_i f0)) in MW/Hz.
double primary_gain(std::span<const ThermalUnit> units, double f0);

}  // namespace freqsec
