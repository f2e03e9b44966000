#pragma once

#include "freqsec/fleet.hpp"

#include <vector>

namespace freqsec {

/// Power curves of the equivalent turbine at the fleet's fixed wind speed,
/// pu of turbine rating versus rotor speed in pu.
class PowerCurves {
public:
    static constexpr double kMinSpeed = 0.3;
    static constexpr double kMaxSpeed = 1.3;
    static constexpr double kResolution = 0.001;

    explicit PowerCurves(const WindFleet& fleet);

    /// Power coefficient at zero pitch.
    static double cp(double tip_speed_ratio);

    double lambda_opt() const { return lambda_opt_; }
    double cp_max() const { return cp_max_; }
    /// Optimum rotor speed at the fixed wind speed.
    double omega_opt() const { return omega_opt_; }

    double p_mppt(double omega) const { return omega * omega * omega; }
    /// Aerodynamic power; doubles as the maximum-torque limit curve.
    double p_aero(double omega) const;
    double p_mt(double omega) const { return p_aero(omega); }

    /// Speed where the tabulated aerodynamic power meets the MPPT curve.
    double steady_speed() const;

private:
    double lambda_opt_ = 0.0;
    double cp_max_ = 0.0;
    double omega_opt_ = 0.0;
    std::vector<double> table_;  // p_aero at kMinSpeed + k*kResolution
};

enum class WindMode { Normal, Overproduction, Recovery };
std::string_view to_string(WindMode m);

struct WindState {
    double omega_rotor = 1.0;
    double omega_gen = 1.0;
    double twist = 0.0;   // shaft twist, electrical rad
    double p_sp = 0.0;    // electrical setpoint, pu
    WindMode mode = WindMode::Normal;
    double omega_mppt = 1.0;  // pre-event optimum speed
    double p_pre = 0.0;       // pre-event output, pu
    double omega_v = 0.0;     // rotor speed at overproduction exit
    double p2 = 0.0;          // recovery start point
    bool event_used = false;
};

/// Equilibrium at the steady MPPT speed of `curves`.
WindState steady_wind_state(const PowerCurves& curves, const TwoMassParams& m);

/// Two-mass drivetrain derivatives for x = {omega_rotor, omega_gen, twist}.
void two_mass_rhs(const double* x, double p_aero, double p_elec, const TwoMassParams& m, double f0, double* dx);
/// Shaft torque in pu.
double shaft_torque(const double* x, const TwoMassParams& m);

/// One RK4 step of the drivetrain with constant aerodynamic and electrical power.
void two_mass_step(WindState& s, double p_aero, double p_elec, const TwoMassParams& m, double f0, double dt);

/// Setpoint for the current mode at rotor speed `omega` and frequency f.
double wind_setpoint(const WindState& s, const PowerCurves& curves, const WindControllerParams& c, double omega,
                     double f, double f0);

/// Mode transitions at a step boundary, then the setpoint. With the
/// controller disabled the turbine stays in MPPT.
double controller_step(WindState& s, const PowerCurves& curves, const WindControllerParams& c, bool enabled,
                       double f, double f0);

/// Fleet output in MW for a per-unit electrical output of the equivalent turbine.
double aggregate_wind_power(double p_elec_pu, const WindFleet& fleet);

}  // namespace freqsec
