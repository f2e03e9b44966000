#include "freqsec/freqsim.hpp"

#include "freqsec/error.hpp"
#include "freqsec/governor.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace freqsec {

double swing_rhs(double f, double p_t, double p_j, double p_w, double p_d, double t_m, double damping, double f0)
{
    const double df_pu = (f - f0) / f0;
    return f0 * (p_t + p_j + p_w - p_d - damping * df_pu) / (t_m * f / f0);
}

double energy_balance_residual(double f, double dfdt, double p_t, double p_j, double p_w, double p_d, double t_m,
                               double damping, double f0)
{
    const double df_pu = (f - f0) / f0;
    return t_m * (f / f0) * (dfdt / f0) - (p_t + p_j + p_w - p_d - damping * df_pu);
}

std::vector<double> agc_reference(double integral, std::span<const double> k_u, double k_f, double t_u)
{
    std::vector<double> out(k_u.size());
    for (std::size_t i = 0; i < k_u.size(); ++i) out[i] = -k_u[i] * k_f * integral / t_u;
    return out;
}

std::vector<double> agc_step(AgcState& s, double df_hz, std::span<const double> k_u, double k_f, double t_u,
                             double dt)
{
    s.integral += df_hz * dt;
    return agc_reference(s.integral, k_u, k_f, t_u);
}

double load_shed_step(RelayState& s, double f, double t, double demand, const PowerSystem& system)
{
    double added = 0.0;
    for (std::size_t k = 0; k < kShedSteps; ++k) {
        if (s.latched[k]) continue;
        const auto& step = system.shed_table.steps[k];
        if (f < step.threshold_hz) {
            if (!s.breached[k]) {
                s.breached[k] = true;
                s.since[k] = t;
                if (s.has_last && s.last_f >= step.threshold_hz && s.last_f > f)
                    s.since[k] = s.last_t + (s.last_f - step.threshold_hz) / (s.last_f - f) * (t - s.last_t);
            }
            if (t - s.since[k] >= step.delay_s - 1e-12) {
                s.latched[k] = true;
                s.latch_time[k] = t;
                const double mw = shed_amount(static_cast<int>(k) + 1, demand, system);
                s.shed_mw += mw;
                added += mw;
            }
        } else {
            s.breached[k] = false;
        }
    }
    s.has_last = true;
    s.last_t = t;
    s.last_f = f;
    return added;
}

std::string_view to_string(Contingency c)
{
    switch (c) {
    case Contingency::None: return "none";
    case Contingency::UnitTrip: return "unit_trip";
    case Contingency::ConstantStep: return "constant_step";
    }
    return "?";
}

void validate(const SimConfig& c)
{
    if (!(c.dt > 0.0 && c.dt <= 0.01)) throw ValidationError("dt must lie in (0, 0.01] s");
    if (!(c.trip_time > 0.0 && c.t_end > c.trip_time)) throw ValidationError("requires t_end > trip_time > 0");
    if (!(c.sample_stride >= c.dt)) throw ValidationError("sample stride must be at least dt");
    if (!(c.preroll >= 0.0)) throw ValidationError("pre-roll must be >= 0");
    const double steps = c.trip_time / c.dt;
    if (std::abs(steps - std::round(steps)) > 1e-6)
        throw ValidationError("trip_time must be a multiple of dt");
}

void TimeSeries::push(double t_, double f_, double pt, double pj, double pw, double pd, double sh, double tm)
{
    t.push_back(t_);
    f.push_back(f_);
    p_t.push_back(pt);
    p_j.push_back(pj);
    p_w.push_back(pw);
    p_d.push_back(pd);
    shed.push_back(sh);
    t_m.push_back(tm);
}

namespace {

struct UnitSlot {
    ThermalGovernor gov;
    std::size_t offset;
    double p0;
    double rating;
    bool tirajana;
    bool alive = true;
    double k_u = 0.0;
};

struct Powers {
    double p_t = 0.0, p_j = 0.0, p_w = 0.0, p_d = 0.0;
    double p_sp = 0.0;
};

class Engine {
public:
    Engine(const SimCase& c, const SimConfig& cfg) : c_(c), cfg_(cfg), curves_(c.wind_fleet)
    {
        validate(cfg);
        const std::size_t n = c.units.size();
        if (c.p0.size() != n) throw ValidationError("simulation case: one dispatch value per committed unit");
        if (n == 0) throw ValidationError("simulation case: no committed units");
        if (c.contingency == Contingency::UnitTrip && (c.trip_unit < 0 || c.trip_unit >= static_cast<int>(n)))
            throw ValidationError("simulation case: trip unit out of range");

        double supply = c.wind;
        for (double p : c.p0) supply += p;
        if (std::abs(supply - c.demand) > 1e-6)
            throw ValidationError("unbalanced schedule: generation exceeds demand by " +
                                  std::to_string(supply - c.demand) + " MW");

        if (c.shedding) shed_amount(1, c.demand, c.system);  // demand must lie in the shedding table's band

        f0_ = c.system.f0;
        base_ = c.power_base.value_or(c.system.s_base);
        std::size_t off = 2;
        for (std::size_t i = 0; i < n; ++i) {
            ThermalGovernor g(c.units[i], c.governors, c.p0[i], cfg.dt);
            slots_.push_back({g, off, c.p0[i], c.units[i].rated_power, c.units[i].plant == Plant::Tirajana});
            off += static_cast<std::size_t>(g.size());
        }
        wind_off_ = off;
        dim_ = off + 3;

        k_f_ = c.system.agc_gain_kf.value_or(c.system.agc_kf_factor * primary_gain(c.units, f0_));
        renormalize();
        tm_ = c.constant_tm.value_or(inertia());

        if (c.wind > 0.0) {
            wind_state_ = steady_wind_state(curves_, c.wind_fleet.two_mass);
            wind_units_ = c.wind / (c.wind_fleet.turbine_rating * wind_state_.p_pre);
            if (c.wind > c.wind_fleet.installed_capacity + 1e-9)
                throw ValidationError("wind output above installed capacity");
        }
    }

    SimResult run()
    {
        SimResult r;
        r.power_base = base_;
        r.k_f = k_f_;
        r.tm_pre = tm_;
        r.tm_post = tm_;
        r.trip_time = cfg_.trip_time;
        r.wind_units = wind_units_;
        r.wind_p_pre = wind_state_.p_pre;
        r.omega_mppt = wind_state_.omega_mppt;

        r.preroll_max_dfdt = preroll();
        if (r.preroll_max_dfdt >= 1e-6)
            throw ValidationError("initial state not in equilibrium: |df/dt| reached " +
                                  std::to_string(r.preroll_max_dfdt) + " Hz/s during pre-roll");

        reset();
        const long long steps = std::llround(cfg_.t_end / cfg_.dt);
        const long long trip_step = std::llround(cfg_.trip_time / cfg_.dt);
        const long long stride = std::max(1LL, std::llround(cfg_.sample_stride / cfg_.dt));
        r.min_wind_mw = c_.wind;

        record(r, 0.0);
        for (long long k = 0; k < steps; ++k) {
            if (k == trip_step) apply_event(r);
            advance();
            const double t = static_cast<double>(k + 1) * cfg_.dt;
            const double f = x_[0];
            if (!std::isfinite(f) || f <= 0.0) throw InfeasibleError("frequency diverged");
            if (events_on_) {
                if (c_.shedding) shed_ += load_shed_step(relays_, f, t, c_.demand, c_.system);
                if (wind_units_ > 0.0) {
                    wind_state_.omega_rotor = x_[wind_off_];
                    wind_state_.omega_gen = x_[wind_off_ + 1];
                    wind_state_.twist = x_[wind_off_ + 2];
                    const auto before = wind_state_.mode;
                    controller_step(wind_state_, curves_, c_.wind_fleet.controller, c_.wind_control, f, f0_);
                    if (wind_state_.mode != before) r.modes.push_back({t, wind_state_.mode});
                    check_speed();
                }
            }
            const bool collapse = f < cfg_.collapse_hz;
            if (collapse || (k + 1) % stride == 0 || k + 1 == steps) record(r, t);
            if (events_on_ && wind_units_ > 0.0) track_wind(r);
            if (collapse) {
                r.collapsed = true;
                r.collapse_time = t;
                break;
            }
        }
        r.relays = relays_;
        r.final_omega = wind_units_ > 0.0 ? x_[wind_off_] : 0.0;
        return r;
    }

private:
    double inertia() const
    {
        double tm = 0.0;
        for (std::size_t i = 0; i < slots_.size(); ++i)
            if (slots_[i].alive) tm += 2.0 * c_.units[i].inertia_h * c_.units[i].rated_power / base_;
        return tm;
    }

    void renormalize()
    {
        std::vector<ThermalUnit> alive;
        for (std::size_t i = 0; i < slots_.size(); ++i)
            if (slots_[i].alive) alive.push_back(c_.units[i]);
        const auto k = participation_factors(alive);
        std::size_t j = 0;
        for (auto& s : slots_) s.k_u = s.alive ? k[j++] : 0.0;
    }

    void reset()
    {
        x_.assign(dim_, 0.0);
        x_[0] = f0_;
        for (auto& s : slots_) s.gov.reset_history();
        if (wind_units_ > 0.0) {
            x_[wind_off_] = wind_state_.omega_rotor;
            x_[wind_off_ + 1] = wind_state_.omega_gen;
            x_[wind_off_ + 2] = wind_state_.twist;
        } else {
            x_[wind_off_] = x_[wind_off_ + 1] = 1.0;
        }
        extra_load_ = 0.0;
        shed_ = 0.0;
        relays_ = RelayState{};
    }

    double preroll()
    {
        reset();
        events_on_ = false;
        const long long steps = std::llround(cfg_.preroll / cfg_.dt);
        double worst = 0.0;
        std::vector<double> dx(dim_);
        for (long long k = 0; k < steps; ++k) {
            advance();
            rhs(x_.data(), 0.0, dx.data(), nullptr);
            worst = std::max(worst, std::abs(dx[0]));
        }
        events_on_ = true;
        return worst;
    }

    void apply_event(SimResult& r)
    {
        switch (c_.contingency) {
        case Contingency::None:
            break;
        case Contingency::UnitTrip: {
            auto& s = slots_[static_cast<std::size_t>(c_.trip_unit)];
            s.alive = false;
            r.imbalance_mw = s.p0;
            renormalize();
            if (!c_.constant_tm) tm_ -= inertia_contribution(c_.units[static_cast<std::size_t>(c_.trip_unit)], base_);
            break;
        }
        case Contingency::ConstantStep:
            extra_load_ = c_.step_mw;
            r.imbalance_mw = c_.step_mw;
            break;
        }
        r.tm_post = tm_;
    }

    void rhs(const double* x, double c, double* dx, Powers* out) const
    {
        const double f = x[0];
        const double df = f - f0_;
        const double z = x[1];
        Powers p;
        for (const auto& s : slots_) {
            const double* xs = x + s.offset;
            double* dxs = dx + s.offset;
            if (!s.alive) {
                for (int k = 0; k < s.gov.size(); ++k) dxs[k] = 0.0;
                continue;
            }
            const double dpref = c_.agc ? -s.k_u * k_f_ * z / c_.system.agc_time_tu : 0.0;
            s.gov.derivative(xs, s.gov.input(df, dpref, f0_), dxs);
            const double mw = s.p0 + s.gov.output(xs, c) * s.rating;
            (s.tirajana ? p.p_t : p.p_j) += mw / base_;
        }
        const double* xw = x + wind_off_;
        if (wind_units_ > 0.0) {
            const double psp = wind_setpoint(wind_state_, curves_, c_.wind_fleet.controller, xw[0], f, f0_);
            two_mass_rhs(xw, curves_.p_aero(xw[0]), psp, c_.wind_fleet.two_mass, f0_, dx + wind_off_);
            p.p_sp = psp;
            p.p_w = wind_units_ * c_.wind_fleet.turbine_rating * psp / base_;
        } else {
            dx[wind_off_] = dx[wind_off_ + 1] = dx[wind_off_ + 2] = 0.0;
        }
        p.p_d = (c_.demand + extra_load_ - shed_) / base_;
        dx[0] = swing_rhs(f, p.p_t, p.p_j, p.p_w, p.p_d, tm_, c_.system.damping_d, f0_);
        dx[1] = c_.agc ? df : 0.0;
        if (out) *out = p;
    }

    void advance()
    {
        const double h = cfg_.dt;
        k1_.resize(dim_), k2_.resize(dim_), k3_.resize(dim_), k4_.resize(dim_), tmp_.resize(dim_);
        rhs(x_.data(), 0.0, k1_.data(), nullptr);
        for (std::size_t i = 0; i < dim_; ++i) tmp_[i] = x_[i] + 0.5 * h * k1_[i];
        rhs(tmp_.data(), 0.5, k2_.data(), nullptr);
        for (std::size_t i = 0; i < dim_; ++i) tmp_[i] = x_[i] + 0.5 * h * k2_[i];
        rhs(tmp_.data(), 0.5, k3_.data(), nullptr);
        for (std::size_t i = 0; i < dim_; ++i) tmp_[i] = x_[i] + h * k3_[i];
        rhs(tmp_.data(), 1.0, k4_.data(), nullptr);
        for (std::size_t i = 0; i < dim_; ++i) x_[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        for (auto& s : slots_) s.gov.commit(x_.data() + s.offset);
    }

    void record(SimResult& r, double t)
    {
        std::vector<double> dx(dim_);
        Powers p;
        rhs(x_.data(), 0.0, dx.data(), &p);
        const double res = energy_balance_residual(x_[0], dx[0], p.p_t, p.p_j, p.p_w, p.p_d, tm_,
                                                   c_.system.damping_d, f0_);
        r.max_residual = std::max(r.max_residual, std::abs(res));
        r.ts.push(t, x_[0], p.p_t * base_, p.p_j * base_, p.p_w * base_, p.p_d * base_, shed_, tm_);
    }

    void track_wind(SimResult& r)
    {
        const double psp = wind_state_.p_sp;
        if (wind_state_.p_pre > 0.0)
            r.max_op_fraction = std::max(r.max_op_fraction, (psp - wind_state_.p_pre) / wind_state_.p_pre);
        r.min_wind_mw = std::min(r.min_wind_mw, wind_units_ * c_.wind_fleet.turbine_rating * psp);
    }

    void check_speed() const
    {
        for (int k = 0; k < 2; ++k) {
            const double w = x_[wind_off_ + static_cast<std::size_t>(k)];
            if (!(w >= PowerCurves::kMinSpeed && w <= PowerCurves::kMaxSpeed))
                throw InfeasibleError("wind turbine speed left [0.3, 1.3] pu");
        }
    }

    const SimCase& c_;
    SimConfig cfg_;
    PowerCurves curves_;
    double f0_ = 50.0;
    double base_ = 1.0;
    std::vector<UnitSlot> slots_;
    std::size_t wind_off_ = 0;
    std::size_t dim_ = 0;
    double k_f_ = 0.0;
    double tm_ = 0.0;
    WindState wind_state_;
    double wind_units_ = 0.0;

    std::vector<double> x_, k1_, k2_, k3_, k4_, tmp_;
    double extra_load_ = 0.0;
    double shed_ = 0.0;
    RelayState relays_;
    bool events_on_ = true;
};

}  // namespace

SimResult simulate(const SimCase& c, const SimConfig& cfg)
{
    Engine e(c, cfg);
    return e.run();
}

std::string format_number(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string timeseries_csv(const TimeSeries& ts)
{
    std::string out = "t,f,P_T,P_J,P_w,P_d,shed,T_m\n";
    out.reserve(ts.size() * 120);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double row[] = {ts.t[i], ts.f[i], ts.p_t[i], ts.p_j[i], ts.p_w[i], ts.p_d[i], ts.shed[i], ts.t_m[i]};
        for (std::size_t k = 0; k < 8; ++k) {
            if (k) out += ',';
            out += format_number(row[k]);
        }
        out += '\n';
    }
    return out;
}

TimeSeries parse_timeseries_csv(std::string_view text)
{
    TimeSeries ts;
    std::size_t pos = text.find('\n');
    if (pos == std::string_view::npos || text.substr(0, pos) != "t,f,P_T,P_J,P_w,P_d,shed,T_m")
        throw ParseError("time series: unexpected header");
    ++pos;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        double v[8];
        const char* p = line.data();
        const char* e = line.data() + line.size();
        for (int k = 0; k < 8; ++k) {
            auto r = std::from_chars(p, e, v[k]);
            if (r.ec != std::errc{}) throw ParseError("time series: bad number");
            p = r.ptr;
            if (k < 7) {
                if (p == e || *p != ',') throw ParseError("time series: expected 8 columns");
                ++p;
            }
        }
        ts.push(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]);
    }
    return ts;
}

std::string run_metadata(const SimCase& c, const SimConfig& cfg, const SimResult& r)
{
    using nlohmann::json;
    const auto& sys = c.system;
    const auto& g = c.governors;
    const auto& w = c.wind_fleet;
    json units = json::array();
    for (std::size_t i = 0; i < c.units.size(); ++i) {
        const auto& u = c.units[i];
        units.push_back({{"id", u.id},
                         {"plant", to_string(u.plant)},
                         {"tech", to_string(u.tech)},
                         {"rated_power", u.rated_power},
                         {"min_power", u.min_power},
                         {"dispatch", c.p0[i]},
                         {"inertia_h", u.inertia_h},
                         {"droop_r", u.droop_r},
                         {"agc_factor", u.agc_factor}});
    }
    json shed = json::array();
    const bool in_band = c.demand >= sys.demand_valley && c.demand <= sys.demand_peak;
    for (std::size_t k = 0; k < kShedSteps; ++k) {
        const auto& st = sys.shed_table.steps[k];
        shed.push_back({{"step", k + 1},
                        {"threshold_hz", st.threshold_hz},
                        {"delay_s", st.delay_s},
                        {"amount_mw", in_band ? json(shed_amount(static_cast<int>(k) + 1, c.demand, sys)) : json(nullptr)},
                        {"latched", r.relays.latched[k]},
                        {"latch_time", r.relays.latched[k] ? json(r.relays.latch_time[k]) : json(nullptr)}});
    }
    json modes = json::array();
    for (const auto& m : r.modes) modes.push_back({{"t", m.t}, {"mode", to_string(m.mode)}});
    json j{
        {"config",
         {{"dt", cfg.dt},
          {"t_end", cfg.t_end},
          {"trip_time", cfg.trip_time},
          {"sample_stride", cfg.sample_stride},
          {"preroll", cfg.preroll},
          {"collapse_hz", cfg.collapse_hz},
          {"integrator", "rk4"}}},
        {"system",
         {{"f0", sys.f0},
          {"s_base", sys.s_base},
          {"power_base", r.power_base},
          {"damping_d", sys.damping_d},
          {"agc_enabled", c.agc},
          {"agc_gain_kf", r.k_f},
          {"agc_kf_factor", sys.agc_kf_factor},
          {"agc_time_tu", sys.agc_time_tu},
          {"shedding_enabled", c.shedding},
          {"demand_peak", sys.demand_peak},
          {"demand_valley", sys.demand_valley}}},
        {"governors",
         {{"TR_g", g.tr_g}, {"T1_g", g.t1_g}, {"T2_g", g.t2_g}, {"T3_g", g.t3_g}, {"T4_g", g.t4_g},
          {"TD_g", g.td_g}, {"T1_d", g.t1_d}, {"T2_d", g.t2_d}, {"T3_d", g.t3_d}, {"T4_d", g.t4_d},
          {"T5_d", g.t5_d}, {"T6_d", g.t6_d}, {"K_d", g.k_d}, {"TR_s", g.tr_s}, {"TSM_s", g.tsm_s},
          {"TCH_s", g.tch_s}, {"FH_s", g.fh_s}, {"TRH_s", g.trh_s}}},
        {"wind",
         {{"output_mw", c.wind},
          {"equivalent_turbines", r.wind_units},
          {"turbine_rating", w.turbine_rating},
          {"installed_capacity", w.installed_capacity},
          {"wind_speed", w.wind_speed},
          {"capacity_factor", w.capacity_factor},
          {"control", c.wind_control},
          {"op_cap", w.controller.op_cap},
          {"op_gain_per_hz", w.controller.op_gain_per_hz},
          {"trigger_hz", w.controller.trigger_hz},
          {"recovery_x", w.controller.recovery_x},
          {"exit_speed_fraction", w.controller.exit_speed_fraction},
          {"recovery_tolerance", w.controller.recovery_tolerance},
          {"h_rotor", w.two_mass.h_rotor},
          {"h_generator", w.two_mass.h_generator},
          {"shaft_stiffness", w.two_mass.shaft_stiffness},
          {"shaft_damping", w.two_mass.shaft_damping},
          {"p_pre_pu", r.wind_p_pre},
          {"omega_mppt", r.omega_mppt},
          {"final_omega", r.final_omega},
          {"max_op_fraction", r.max_op_fraction},
          {"min_output_mw", r.min_wind_mw},
          {"modes", modes}}},
        {"case",
         {{"demand", c.demand},
          {"contingency", to_string(c.contingency)},
          {"tripped_unit", c.contingency == Contingency::UnitTrip ? json(c.units[static_cast<std::size_t>(c.trip_unit)].id)
                                                                   : json(nullptr)},
          {"step_mw", c.step_mw},
          {"constant_tm", c.constant_tm ? json(*c.constant_tm) : json(nullptr)},
          {"imbalance_mw", r.imbalance_mw},
          {"tm_pre", r.tm_pre},
          {"tm_post", r.tm_post},
          {"units", units}}},
        {"load_shedding", shed},
        {"result",
         {{"collapsed", r.collapsed},
          {"collapse_time", r.collapsed ? json(r.collapse_time) : json(nullptr)},
          {"shed_mw", r.relays.shed_mw},
          {"samples", r.ts.size()},
          {"max_energy_residual", r.max_residual},
          {"preroll_max_dfdt", r.preroll_max_dfdt}}},
        {"columns",
         {{"t", "s"}, {"f", "Hz"}, {"P_T", "MW"}, {"P_J", "MW"}, {"P_w", "MW"}, {"P_d", "MW"}, {"shed", "MW"},
          {"T_m", "s"}}}};
    return j.dump(2) + "\n";
}

}  // namespace freqsec
