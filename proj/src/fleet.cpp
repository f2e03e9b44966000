#include "freqsec/fleet.hpp"

#include "freqsec/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace freqsec {

using nlohmann::json;

std::string_view to_string(Plant p)
{
    return p == Plant::Tirajana ? "Tirajana" : "Jinamar";
}

std::string_view to_string(Technology t)
{
    switch (t) {
    case Technology::Steam: return "steam";
    case Technology::Gas: return "gas";
    case Technology::Diesel: return "diesel";
    case Technology::CombinedCycle: return "combined_cycle";
    }
    return "?";
}

Plant plant_from_string(std::string_view s)
{
    if (s == "Tirajana") return Plant::Tirajana;
    if (s == "Jinamar") return Plant::Jinamar;
    throw ParseError("unknown plant '" + std::string(s) + "'");
}

Technology technology_from_string(std::string_view s)
{
    if (s == "steam") return Technology::Steam;
    if (s == "gas") return Technology::Gas;
    if (s == "diesel") return Technology::Diesel;
    if (s == "combined_cycle") return Technology::CombinedCycle;
    throw ParseError("unknown technology '" + std::string(s) + "'");
}

double ThermalUnit::min_block_cost() const
{
    const double c1 = cost_segments.empty() ? 0.0 : cost_segments.front().marginal_cost;
    return no_load_cost + c1 * min_power;
}

double ThermalUnit::fuel_cost(double p) const
{
    double cost = min_block_cost();
    double remaining = p - min_power;
    for (const auto& seg : cost_segments) {
        if (remaining <= 0.0) break;
        const double take = std::min(seg.width_mw, remaining);
        cost += take * seg.marginal_cost;
        remaining -= take;
    }
    return cost;
}

LoadShedTable LoadShedTable::defaults()
{
    LoadShedTable t;
    t.steps = {{
        {48.9, 0.1, 14.6, 5.8},
        {48.9, 0.2, 16.2, 7.0},
        {48.8, 0.4, 17.1, 8.6},
        {48.8, 0.6, 41.1, 18.8},
        {48.5, 0.1, 8.0, 4.1},
        {48.5, 0.2, 27.3, 11.8},
        {48.4, 0.4, 17.5, 7.7},
        {48.1, 0.1, 17.9, 9.7},
    }};
    return t;
}

namespace {

[[noreturn]] void fail(const std::string& who, const std::string& msg)
{
    throw ValidationError(who + ": " + msg);
}

}  // namespace

void validate(const ThermalUnit& u)
{
    const std::string who = "unit '" + u.id + "'";
    if (u.id.empty()) fail("unit", "empty id");
    if (!(u.min_power > 0.0 && u.min_power <= u.rated_power))
        fail(who, "requires 0 < min_power <= rated_power");
    if (!(u.inertia_h > 0.0)) fail(who, "inertia_h must be positive");
    if (!(u.droop_r > 0.0 && u.droop_r <= 1.0)) fail(who, "droop_r must lie in (0, 1]");
    if (!(u.agc_factor >= 0.0)) fail(who, "agc_factor must be >= 0");
    if (u.min_up < 1 || u.min_down < 1) fail(who, "min_up and min_down must be >= 1 h");
    if (u.startup_duration < 1) fail(who, "startup_duration must be >= 1 h");
    if (u.cost_segments.size() != kCostPieces)
        fail(who, "cost curve must be discretized by exactly ten pieces (got " +
                      std::to_string(u.cost_segments.size()) + ")");
    double width = 0.0;
    for (std::size_t k = 0; k < u.cost_segments.size(); ++k) {
        const auto& s = u.cost_segments[k];
        if (s.width_mw < 0.0) fail(who, "negative cost segment width");
        if (s.marginal_cost < 0.0) fail(who, "negative marginal cost");
        if (k > 0 && s.marginal_cost < u.cost_segments[k - 1].marginal_cost)
            fail(who, "cost segments must have non-decreasing marginal cost (convexity)");
        width += s.width_mw;
    }
    if (std::abs(width - (u.rated_power - u.min_power)) > 1e-6)
        fail(who, "cost segment widths must sum to rated_power - min_power");
    if (u.startup_types.empty()) fail(who, "at least one startup type is required");
    for (std::size_t k = 1; k < u.startup_types.size(); ++k) {
        if (u.startup_types[k].min_offline_hours <= u.startup_types[k - 1].min_offline_hours)
            fail(who, "startup types must have strictly increasing min_offline_hours");
        if (u.startup_types[k].cost < u.startup_types[k - 1].cost)
            fail(who, "startup type costs must be non-decreasing");
    }
    if (u.startup_types.front().min_offline_hours > u.min_down)
        fail(who, "first startup type must apply from min_down hours off-line");
    if (u.startup_types.front().cost < 0.0) fail(who, "negative startup cost");
    if (u.no_load_cost < 0.0 || u.om_cost < 0.0 || u.wear_tear_cost < 0.0)
        fail(who, "cost terms must be non-negative");
}

void validate(const PowerSystem& s)
{
    if (!(s.f0 > 0.0)) fail("system", "f0 must be positive");
    if (!(s.s_base > 0.0)) fail("system", "S_base must be positive");
    if (!(s.damping_d >= 0.0)) fail("system", "damping_D must be >= 0");
    if (s.agc_gain_kf && !(*s.agc_gain_kf >= 0.0)) fail("system", "agc_gain_Kf must be >= 0");
    if (!(s.agc_kf_factor >= 0.0)) fail("system", "agc_kf_factor must be >= 0");
    if (!(s.agc_time_tu > 0.0)) fail("system", "agc_time_Tu must be positive");
    if (!(s.demand_valley < s.demand_peak)) fail("system", "demand_valley must be below demand_peak");
    for (std::size_t k = 0; k < kShedSteps; ++k) {
        const auto& st = s.shed_table.steps[k];
        const std::string who = "load shedding step " + std::to_string(k + 1);
        if (!(st.threshold_hz <= s.f0)) fail(who, "threshold above f0");
        if (!(st.delay_s > 0.0)) fail(who, "delay must be positive");
        if (!(st.shed_peak_mw > 0.0 && st.shed_valley_mw > 0.0)) fail(who, "shed amounts must be positive");
    }
}

void validate(const WindFleet& w)
{
    if (!(w.n_wt >= 0.0 && w.turbine_rating > 0.0)) fail("wind", "n_WT >= 0 and turbine_rating > 0 required");
    if (std::abs(w.installed_capacity - w.n_wt * w.turbine_rating) > 1e-6)
        fail("wind", "installed_capacity must equal n_WT * turbine_rating");
    if (!(w.capacity_factor > 0.0 && w.capacity_factor <= 1.0))
        fail("wind", "capacity_factor must lie in (0, 1]");
    if (!(w.wind_speed > 0.0)) fail("wind", "wind_speed must be positive");
    const auto& c = w.controller;
    if (!(c.op_cap > 0.0 && c.op_cap <= 1.0)) fail("wind", "op_cap must lie in (0, 1]");
    if (!(c.recovery_x > 0.0 && c.recovery_x < 1.0)) fail("wind", "recovery_x must lie in (0, 1)");
    if (!(c.op_gain_per_hz >= 0.0)) fail("wind", "op_gain_per_hz must be >= 0");
    if (!(c.trigger_hz >= 0.0)) fail("wind", "trigger_hz must be >= 0");
    if (!(c.exit_speed_fraction > 0.3 && c.exit_speed_fraction < 1.0))
        fail("wind", "exit_speed_fraction must lie in (0.3, 1)");
    if (!(c.recovery_tolerance > 0.0 && c.recovery_tolerance < 0.01))
        fail("wind", "recovery_tolerance must lie in (0, 0.01)");
    const auto& m = w.two_mass;
    if (!(m.h_rotor > 0.0 && m.h_generator > 0.0)) fail("wind", "two-mass inertias must be positive");
    if (!(m.shaft_stiffness >= 0.0 && m.shaft_damping >= 0.0))
        fail("wind", "shaft stiffness and damping must be >= 0");
}

void validate(const FleetConfig& c)
{
    if (c.units.empty()) fail("fleet", "no thermal units");
    for (const auto& u : c.units) validate(u);
    for (std::size_t i = 0; i < c.units.size(); ++i)
        for (std::size_t j = i + 1; j < c.units.size(); ++j)
            if (c.units[i].id == c.units[j].id) fail("fleet", "duplicate unit id '" + c.units[i].id + "'");
    validate(c.system);
    validate(c.wind);
    const auto increasing = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    if (c.levels.demand.empty() || c.levels.wind.empty()) fail("scenario_levels", "empty level list");
    if (!increasing(c.levels.demand) || !increasing(c.levels.wind))
        fail("scenario_levels", "levels must be strictly increasing");
}

// ---------------------------------------------------------------- JSON

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out)
{
    if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

template <typename T>
T read_req(const json& j, const char* key, const std::string& where)
{
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + ": missing key '" + key + "'");
    return it->get<T>();
}

double default_h(Technology t, const GovernorParams& g)
{
    switch (t) {
    case Technology::Steam: return g.h_s;
    case Technology::Gas: return g.h_g;
    case Technology::Diesel: return g.h_d;
    case Technology::CombinedCycle: return g.h_cc;
    }
    return 0.0;
}

double default_r(Technology t, const GovernorParams& g)
{
    switch (t) {
    case Technology::Steam: return g.r_s;
    case Technology::Gas: return g.r_g;
    case Technology::Diesel: return g.r_d;
    case Technology::CombinedCycle: return g.r_cc;
    }
    return 0.0;
}

GovernorParams parse_governors(const json& j)
{
    GovernorParams g;
    read_opt(j, "TR_g", g.tr_g);
    read_opt(j, "T1_g", g.t1_g);
    read_opt(j, "T2_g", g.t2_g);
    read_opt(j, "T3_g", g.t3_g);
    read_opt(j, "T4_g", g.t4_g);
    read_opt(j, "TD_g", g.td_g);
    read_opt(j, "R_g", g.r_g);
    read_opt(j, "R_cc", g.r_cc);
    read_opt(j, "H_g", g.h_g);
    read_opt(j, "H_cc", g.h_cc);
    read_opt(j, "T1_d", g.t1_d);
    read_opt(j, "T2_d", g.t2_d);
    read_opt(j, "T3_d", g.t3_d);
    read_opt(j, "T4_d", g.t4_d);
    read_opt(j, "T5_d", g.t5_d);
    read_opt(j, "T6_d", g.t6_d);
    read_opt(j, "K_d", g.k_d);
    read_opt(j, "R_d", g.r_d);
    read_opt(j, "H_d", g.h_d);
    read_opt(j, "TR_s", g.tr_s);
    read_opt(j, "TSM_s", g.tsm_s);
    read_opt(j, "TCH_s", g.tch_s);
    read_opt(j, "FH_s", g.fh_s);
    read_opt(j, "TRH_s", g.trh_s);
    read_opt(j, "R_s", g.r_s);
    read_opt(j, "H_s", g.h_s);
    return g;
}

json dump_governors(const GovernorParams& g)
{
    return json{{"TR_g", g.tr_g}, {"T1_g", g.t1_g}, {"T2_g", g.t2_g}, {"T3_g", g.t3_g},
                {"T4_g", g.t4_g}, {"TD_g", g.td_g}, {"R_g", g.r_g}, {"R_cc", g.r_cc},
                {"H_g", g.h_g}, {"H_cc", g.h_cc}, {"T1_d", g.t1_d}, {"T2_d", g.t2_d},
                {"T3_d", g.t3_d}, {"T4_d", g.t4_d}, {"T5_d", g.t5_d}, {"T6_d", g.t6_d},
                {"K_d", g.k_d}, {"R_d", g.r_d}, {"H_d", g.h_d}, {"TR_s", g.tr_s},
                {"TSM_s", g.tsm_s}, {"TCH_s", g.tch_s}, {"FH_s", g.fh_s}, {"TRH_s", g.trh_s}, {"R_s", g.r_s}, {"H_s", g.h_s}};
}

ThermalUnit parse_unit(const json& j, const GovernorParams& g)
{
    ThermalUnit u;
    u.id = read_req<std::string>(j, "id", "unit");
    const std::string where = "unit '" + u.id + "'";
    u.plant = plant_from_string(read_req<std::string>(j, "plant", where));
    u.tech = technology_from_string(read_req<std::string>(j, "tech", where));
    u.rated_power = read_req<double>(j, "rated_power", where);
    u.min_power = read_req<double>(j, "min_power", where);
    u.inertia_h = default_h(u.tech, g);
    u.droop_r = default_r(u.tech, g);
    read_opt(j, "inertia_h", u.inertia_h);
    read_opt(j, "droop_r", u.droop_r);
    read_opt(j, "agc_factor", u.agc_factor);
    read_opt(j, "min_up", u.min_up);
    read_opt(j, "min_down", u.min_down);
    read_opt(j, "startup_duration", u.startup_duration);
    for (const auto& st : read_req<json>(j, "startup_types", where)) {
        if (!st.is_array() || st.size() != 2) throw ParseError(where + ": startup type must be [hours, cost]");
        u.startup_types.push_back({st[0].get<int>(), st[1].get<double>()});
    }
    for (const auto& seg : read_req<json>(j, "cost_segments", where)) {
        if (!seg.is_array() || seg.size() != 2) throw ParseError(where + ": cost segment must be [width, cost]");
        u.cost_segments.push_back({seg[0].get<double>(), seg[1].get<double>()});
    }
    read_opt(j, "no_load_cost", u.no_load_cost);
    read_opt(j, "om_cost", u.om_cost);
    read_opt(j, "wear_tear_cost", u.wear_tear_cost);
    return u;
}

json dump_unit(const ThermalUnit& u)
{
    json st = json::array();
    for (const auto& s : u.startup_types) st.push_back({s.min_offline_hours, s.cost});
    json seg = json::array();
    for (const auto& s : u.cost_segments) seg.push_back({s.width_mw, s.marginal_cost});
    return json{{"id", u.id},
                {"plant", to_string(u.plant)},
                {"tech", to_string(u.tech)},
                {"rated_power", u.rated_power},
                {"min_power", u.min_power},
                {"inertia_h", u.inertia_h},
                {"droop_r", u.droop_r},
                {"agc_factor", u.agc_factor},
                {"min_up", u.min_up},
                {"min_down", u.min_down},
                {"startup_duration", u.startup_duration},
                {"startup_types", st},
                {"cost_segments", seg},
                {"no_load_cost", u.no_load_cost},
                {"om_cost", u.om_cost},
                {"wear_tear_cost", u.wear_tear_cost}};
}

PowerSystem parse_system(const json& j)
{
    PowerSystem s;
    read_opt(j, "f0", s.f0);
    read_opt(j, "s_base", s.s_base);
    read_opt(j, "damping_d", s.damping_d);
    if (auto it = j.find("agc_gain_kf"); it != j.end() && !it->is_null()) s.agc_gain_kf = it->get<double>();
    read_opt(j, "agc_kf_factor", s.agc_kf_factor);
    read_opt(j, "agc_time_tu", s.agc_time_tu);
    read_opt(j, "demand_peak", s.demand_peak);
    read_opt(j, "demand_valley", s.demand_valley);
    if (auto it = j.find("load_shedding"); it != j.end()) {
        if (!it->is_array() || it->size() != kShedSteps)
            throw ParseError("system.load_shedding must list exactly 8 steps");
        for (std::size_t k = 0; k < kShedSteps; ++k) {
            const auto& r = (*it)[k];
            const std::string where = "load_shedding[" + std::to_string(k) + "]";
            s.shed_table.steps[k] = {read_req<double>(r, "threshold_hz", where), read_req<double>(r, "delay_s", where),
                                     read_req<double>(r, "shed_peak_mw", where),
                                     read_req<double>(r, "shed_valley_mw", where)};
        }
    }
    return s;
}

json dump_system(const PowerSystem& s)
{
    json shed = json::array();
    for (const auto& st : s.shed_table.steps)
        shed.push_back({{"threshold_hz", st.threshold_hz},
                        {"delay_s", st.delay_s},
                        {"shed_peak_mw", st.shed_peak_mw},
                        {"shed_valley_mw", st.shed_valley_mw}});
    json j{{"f0", s.f0},
           {"s_base", s.s_base},
           {"damping_d", s.damping_d},
           {"agc_kf_factor", s.agc_kf_factor},
           {"agc_time_tu", s.agc_time_tu},
           {"demand_peak", s.demand_peak},
           {"demand_valley", s.demand_valley},
           {"load_shedding", shed}};
    j["agc_gain_kf"] = s.agc_gain_kf ? json(*s.agc_gain_kf) : json(nullptr);
    return j;
}

WindFleet parse_wind(const json& j)
{
    WindFleet w;
    read_opt(j, "n_wt", w.n_wt);
    read_opt(j, "turbine_rating", w.turbine_rating);
    w.installed_capacity = w.n_wt * w.turbine_rating;
    read_opt(j, "installed_capacity", w.installed_capacity);
    read_opt(j, "wind_speed", w.wind_speed);
    read_opt(j, "capacity_factor", w.capacity_factor);
    if (auto it = j.find("controller"); it != j.end()) {
        auto& c = w.controller;
        read_opt(*it, "op_cap", c.op_cap);
        read_opt(*it, "recovery_x", c.recovery_x);
        read_opt(*it, "op_gain_per_hz", c.op_gain_per_hz);
        read_opt(*it, "trigger_hz", c.trigger_hz);
        read_opt(*it, "exit_speed_fraction", c.exit_speed_fraction);
        read_opt(*it, "recovery_tolerance", c.recovery_tolerance);
    }
    if (auto it = j.find("two_mass"); it != j.end()) {
        auto& m = w.two_mass;
        read_opt(*it, "h_rotor", m.h_rotor);
        read_opt(*it, "h_generator", m.h_generator);
        read_opt(*it, "shaft_stiffness", m.shaft_stiffness);
        read_opt(*it, "shaft_damping", m.shaft_damping);
    }
    return w;
}

json dump_wind(const WindFleet& w)
{
    const auto& c = w.controller;
    const auto& m = w.two_mass;
    return json{{"n_wt", w.n_wt},
                {"turbine_rating", w.turbine_rating},
                {"installed_capacity", w.installed_capacity},
                {"wind_speed", w.wind_speed},
                {"capacity_factor", w.capacity_factor},
                {"controller",
                 {{"op_cap", c.op_cap},
                  {"recovery_x", c.recovery_x},
                  {"op_gain_per_hz", c.op_gain_per_hz},
                  {"trigger_hz", c.trigger_hz},
                  {"exit_speed_fraction", c.exit_speed_fraction},
                  {"recovery_tolerance", c.recovery_tolerance}}},
                {"two_mass",
                 {{"h_rotor", m.h_rotor},
                  {"h_generator", m.h_generator},
                  {"shaft_stiffness", m.shaft_stiffness},
                  {"shaft_damping", m.shaft_damping}}}};
}

}  // namespace

FleetConfig parse_fleet(std::string_view text)
{
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("fleet config: ") + e.what());
    }
    FleetConfig c;
    try {
        if (auto it = j.find("governors"); it != j.end()) c.governors = parse_governors(*it);
        if (auto it = j.find("system"); it != j.end()) c.system = parse_system(*it);
        if (auto it = j.find("wind"); it != j.end()) c.wind = parse_wind(*it);
        if (auto it = j.find("scenario_levels"); it != j.end()) {
            read_opt(*it, "demand", c.levels.demand);
            read_opt(*it, "wind", c.levels.wind);
        }
        for (const auto& ju : read_req<json>(j, "units", "fleet config")) c.units.push_back(parse_unit(ju, c.governors));
    } catch (const json::exception& e) {
        throw ParseError(std::string("fleet config: ") + e.what());
    }
    validate(c);
    return c;
}

FleetConfig load_fleet(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open fleet config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_fleet(ss.str());
}

std::string dump_fleet(const FleetConfig& c)
{
    json units = json::array();
    for (const auto& u : c.units) units.push_back(dump_unit(u));
    json j{{"system", dump_system(c.system)},
           {"governors", dump_governors(c.governors)},
           {"wind", dump_wind(c.wind)},
           {"scenario_levels", {{"demand", c.levels.demand}, {"wind", c.levels.wind}}},
           {"units", units}};
    return j.dump(2);
}

// ---------------------------------------------------------------- physics helpers

double inertia_contribution(const ThermalUnit& unit, double s_base)
{
    return 2.0 * unit.inertia_h * unit.rated_power / s_base;
}

double aggregate_inertia(std::span<const ThermalUnit> units, double s_base)
{
    if (!(s_base > 0.0)) throw ValidationError("aggregate_inertia: S_base must be positive");
    if (units.empty()) throw ValidationError("aggregate_inertia: no synchronous units committed");
    double tm = 0.0;
    for (const auto& u : units) tm += inertia_contribution(u, s_base);
    return tm;
}

double shed_amount(int step, double demand, const PowerSystem& system)
{
    if (step < 1 || step > static_cast<int>(kShedSteps))
        throw ValidationError("shed_amount: step must be in 1..8");
    const double lo = system.demand_valley;
    const double hi = system.demand_peak;
    if (demand < lo - 1e-9 || demand > hi + 1e-9)
        throw ValidationError("shed_amount: demand " + std::to_string(demand) + " MW outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const auto& st = system.shed_table.steps[static_cast<std::size_t>(step - 1)];
    if (demand >= hi) return st.shed_peak_mw;
    if (demand <= lo) return st.shed_valley_mw;
    const double w = (demand - lo) / (hi - lo);
    return st.shed_valley_mw + w * (st.shed_peak_mw - st.shed_valley_mw);
}

std::vector<double> participation_factors(std::span<const ThermalUnit> units)
{
    std::vector<double> k(units.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < units.size(); ++i) {
        k[i] = units[i].agc_factor * units[i].rated_power / units[i].droop_r;
        total += k[i];
    }
    if (total <= 0.0) {
        // nobody flagged for AGC: share equally
        std::fill(k.begin(), k.end(), units.empty() ? 0.0 : 1.0 / static_cast<double>(units.size()));
        return k;
    }
    for (auto& v : k) v /= total;
    return k;
}

double primary_gain(std::span<const ThermalUnit> units, double f0)
{
    double g = 0.0;
    for (const auto& u : units) g += u.rated_power / (u.droop_r * f0);
    return g;
}

}  // namespace freqsec
