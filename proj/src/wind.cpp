#include "freqsec/wind.hpp"

#include "freqsec/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace freqsec {

double PowerCurves::cp(double lambda)
{
    if (lambda <= 0.0) return 0.0;
    const double inv_li = 1.0 / lambda - 0.035;
    return 0.5176 * (116.0 * inv_li - 5.0) * std::exp(-21.0 * inv_li) + 0.0068 * lambda;
}

PowerCurves::PowerCurves(const WindFleet& fleet)
{
    // golden-section search for the peak of cp
    double a = 2.0, b = 16.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    while (b - a > 1e-12) {
        if (cp(c) > cp(d)) b = d;
        else a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    lambda_opt_ = 0.5 * (a + b);
    cp_max_ = cp(lambda_opt_);
    omega_opt_ = std::cbrt(fleet.capacity_factor);

    const auto n = static_cast<std::size_t>(std::lround((kMaxSpeed - kMinSpeed) / kResolution)) + 1;
    table_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = kMinSpeed + static_cast<double>(k) * kResolution;
        table_[k] = fleet.capacity_factor * cp(lambda_opt_ * w / omega_opt_) / cp_max_;
    }
}

double PowerCurves::p_aero(double omega) const
{
    const double s = (std::clamp(omega, kMinSpeed, kMaxSpeed) - kMinSpeed) / kResolution;
    const auto k = std::min(static_cast<std::size_t>(s), table_.size() - 2);
    const double frac = s - static_cast<double>(k);
    return table_[k] + frac * (table_[k + 1] - table_[k]);
}

double PowerCurves::steady_speed() const
{
    // p_aero - p_mppt changes sign once around the optimum
    double lo = 0.5 * omega_opt_, hi = std::min(kMaxSpeed, 1.5 * omega_opt_);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (p_aero(mid) > p_mppt(mid)) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::string_view to_string(WindMode m)
{
    switch (m) {
    case WindMode::Normal: return "normal";
    case WindMode::Overproduction: return "overproduction";
    case WindMode::Recovery: return "recovery";
    }
    return "?";
}

WindState steady_wind_state(const PowerCurves& curves, const TwoMassParams& m)
{
    WindState s;
    const double w = curves.steady_speed();
    s.omega_rotor = s.omega_gen = s.omega_mppt = w;
    s.p_pre = s.p_sp = curves.p_mppt(w);
    s.twist = m.shaft_stiffness > 0.0 ? curves.p_aero(w) / w / m.shaft_stiffness : 0.0;
    return s;
}

double shaft_torque(const double* x, const TwoMassParams& m)
{
    return m.shaft_stiffness * x[2] + m.shaft_damping * (x[0] - x[1]);
}

void two_mass_rhs(const double* x, double p_aero, double p_elec, const TwoMassParams& m, double f0, double* dx)
{
    const double tsh = shaft_torque(x, m);
    dx[0] = (p_aero / x[0] - tsh) / (2.0 * m.h_rotor);
    dx[1] = (tsh - p_elec / x[1]) / (2.0 * m.h_generator);
    dx[2] = 2.0 * std::numbers::pi * f0 * (x[0] - x[1]);
}

void two_mass_step(WindState& s, double p_aero, double p_elec, const TwoMassParams& m, double f0, double dt)
{
    double x[3] = {s.omega_rotor, s.omega_gen, s.twist};
    double k1[3], k2[3], k3[3], k4[3], t[3];
    two_mass_rhs(x, p_aero, p_elec, m, f0, k1);
    for (int i = 0; i < 3; ++i) t[i] = x[i] + 0.5 * dt * k1[i];
    two_mass_rhs(t, p_aero, p_elec, m, f0, k2);
    for (int i = 0; i < 3; ++i) t[i] = x[i] + 0.5 * dt * k2[i];
    two_mass_rhs(t, p_aero, p_elec, m, f0, k3);
    for (int i = 0; i < 3; ++i) t[i] = x[i] + dt * k3[i];
    two_mass_rhs(t, p_aero, p_elec, m, f0, k4);
    for (int i = 0; i < 3; ++i) x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    s.omega_rotor = x[0];
    s.omega_gen = x[1];
    s.twist = x[2];
    if (!(x[0] >= PowerCurves::kMinSpeed && x[0] <= PowerCurves::kMaxSpeed && x[1] >= PowerCurves::kMinSpeed &&
          x[1] <= PowerCurves::kMaxSpeed))
        throw InfeasibleError("wind turbine speed left [0.3, 1.3] pu");
}

double wind_setpoint(const WindState& s, const PowerCurves& curves, const WindControllerParams& c, double omega,
                     double f, double f0)
{
    switch (s.mode) {
    case WindMode::Normal:
        return std::clamp(curves.p_mppt(omega), 0.0, 1.0);
    case WindMode::Overproduction: {
        const double boost = std::min(c.op_gain_per_hz * std::abs(f - f0), c.op_cap);
        return std::clamp(s.p_pre * (1.0 + boost), 0.0, 1.0 + c.op_cap);
    }
    case WindMode::Recovery: {
        const double span = s.omega_mppt - s.omega_v;
        const double w = span > 0.0 ? (omega - s.omega_v) / span : 1.0;
        const double p = s.p2 + w * (s.p_pre - s.p2);
        return std::clamp(p, std::min(s.p2, s.p_pre), std::max(s.p2, s.p_pre));
    }
    }
    return 0.0;
}

double controller_step(WindState& s, const PowerCurves& curves, const WindControllerParams& c, bool enabled,
                       double f, double f0)
{
    const double df = f - f0;
    const double w = s.omega_rotor;
    if (enabled) {
        switch (s.mode) {
        case WindMode::Normal:
            if (!s.event_used && df < -c.trigger_hz) {
                s.mode = WindMode::Overproduction;
                s.event_used = true;
            }
            break;
        case WindMode::Overproduction:
            if (w <= c.exit_speed_fraction * s.omega_mppt || df >= 0.0) {
                s.omega_v = w;
                s.p2 = curves.p_mppt(w) + c.recovery_x * (curves.p_mt(w) - curves.p_mppt(w));
                s.mode = w < s.omega_mppt ? WindMode::Recovery : WindMode::Normal;
            }
            break;
        case WindMode::Recovery:
            if (w >= (1.0 - c.recovery_tolerance) * s.omega_mppt) s.mode = WindMode::Normal;
            break;
        }
    }
    s.p_sp = wind_setpoint(s, curves, c, w, f, f0);
    return s.p_sp;
}

double aggregate_wind_power(double p_elec_pu, const WindFleet& fleet)
{
    return fleet.n_wt * fleet.turbine_rating * p_elec_pu;
}

}  // namespace freqsec
