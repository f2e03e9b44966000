#pragma once

#include "freqsec/fleet.hpp"
#include "freqsec/wind.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace freqsec {

/// Swing equation solved for df/dt (Hz/s). Powers in pu of the system
/// base, T_m in seconds, D in pu power per pu frequency.
double swing_rhs(double f, double p_t, double p_j, double p_w, double p_d, double t_m, double damping, double f0);

/// T_m f_pu df/dt - (P_T + P_J + P_w - P_d - D df_pu), pu.
double energy_balance_residual(double f, double dfdt, double p_t, double p_j, double p_w, double p_d, double t_m,
                               double damping, double f0);

/// AGC integral controller; integral holds the time integral of df (Hz s).
struct AgcState {
    double integral = 0.0;
};

/// Reference change in MW per unit for the current integral.
std::vector<double> agc_reference(double integral, std::span<const double> k_u, double k_f, double t_u);
/// Advances the integral by df*dt and returns the new references.
std::vector<double> agc_step(AgcState& s, double df_hz, std::span<const double> k_u, double k_f, double t_u,
                             double dt);

/// Under-frequency relays, one timer per step.
struct RelayState {
    std::array<bool, kShedSteps> breached{};
    std::array<double, kShedSteps> since{};
    std::array<bool, kShedSteps> latched{};
    std::array<double, kShedSteps> latch_time{};
    bool has_last = false;
    double last_t = 0.0;
    double last_f = 0.0;
    double shed_mw = 0.0;
};

/// Evaluates the relays at (t, f); returns the load newly shed in MW.
double load_shed_step(RelayState& s, double f, double t, double demand, const PowerSystem& system);

enum class Contingency { None, UnitTrip, ConstantStep };
std::string_view to_string(Contingency c);

struct SimConfig {
    double dt = 1e-3;
    double t_end = 300.0;
    double trip_time = 1.0;
    double sample_stride = 0.01;
    double preroll = 5.0;
    double collapse_hz = 47.0;
};
void validate(const SimConfig& c);

/// Everything a single run needs: the committed fleet with its dispatch,
/// the operating point and the event.
struct SimCase {
    std::vector<ThermalUnit> units;  // committed units
    std::vector<double> p0;          // MW
    double demand = 0.0;             // MW
    double wind = 0.0;               // MW, pre-event wind output
    Contingency contingency = Contingency::UnitTrip;
    int trip_unit = -1;              // index into units
    double step_mw = 0.0;            // load step for ConstantStep
    std::optional<double> constant_tm;  // hold T_m fixed (s)
    std::optional<double> power_base;   // MVA; system.s_base when unset
    bool shedding = true;
    bool agc = true;
    bool wind_control = false;
    PowerSystem system;
    GovernorParams governors;
    WindFleet wind_fleet;
};

struct TimeSeries {
    std::vector<double> t, f, p_t, p_j, p_w, p_d, shed, t_m;  // powers in MW
    std::size_t size() const { return t.size(); }
    void push(double t_, double f_, double pt, double pj, double pw, double pd, double sh, double tm);
};

struct ModeChange {
    double t;
    WindMode mode;
};

struct SimResult {
    TimeSeries ts;
    bool collapsed = false;
    double collapse_time = 0.0;
    double trip_time = 0.0;
    double tm_pre = 0.0;
    double tm_post = 0.0;
    double imbalance_mw = 0.0;
    double k_f = 0.0;  // MW/Hz
    double power_base = 0.0;
    double max_residual = 0.0;
    double preroll_max_dfdt = 0.0;
    // wind
    double wind_units = 0.0;  // equivalent number of turbines
    double wind_p_pre = 0.0;  // pu
    double omega_mppt = 0.0;
    double final_omega = 0.0;
    double max_op_fraction = 0.0;   // largest (P_sp - P_pre)/P_pre
    double min_wind_mw = 0.0;       // smallest wind output after the event
    std::vector<ModeChange> modes;
    RelayState relays;
};

/// Fixed-step RK4 run: steady-state initialization with a pre-roll check,
/// the event at trip_time, then integration to t_end (or collapse).
SimResult simulate(const SimCase& c, const SimConfig& cfg);

/// CSV with header t,f,P_T,P_J,P_w,P_d,shed,T_m; shortest round-trip numbers.
std::string timeseries_csv(const TimeSeries& ts);
TimeSeries parse_timeseries_csv(std::string_view text);
/// Every effective parameter of the run as JSON.
std::string run_metadata(const SimCase& c, const SimConfig& cfg, const SimResult& r);

/// Shortest round-trip decimal representation.
std::string format_number(double v);

}  // namespace freqsec
