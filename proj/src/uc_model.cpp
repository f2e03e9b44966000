#include "freqsec/error.hpp"
#include "freqsec/uc.hpp"
#include "uc_detail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace freqsec {

namespace {

double demand_increase(const UCInstance& inst, int h)
{
    if (h + 1 >= inst.hours) return 0.0;
    const auto i = static_cast<std::size_t>(h);
    return std::max(0.0, inst.demand[i + 1] - inst.demand[i]);
}

}  // namespace

void complete_defaults(UCInstance& inst)
{
    if (inst.likely_wind_loss.empty()) {
        inst.likely_wind_loss.resize(inst.wind_forecast.size());
        std::transform(inst.wind_forecast.begin(), inst.wind_forecast.end(), inst.likely_wind_loss.begin(),
                       [](double w) { return 0.5 * w; });
    }
}

void validate(const UCInstance& inst, std::span<const ThermalUnit> units, double installed_wind)
{
    const auto T = static_cast<std::size_t>(inst.hours);
    if (inst.hours < 1) throw ValidationError("instance: horizon must be at least one hour");
    if (inst.demand.size() != T || inst.wind_forecast.size() != T || inst.likely_wind_loss.size() != T)
        throw ValidationError("instance: demand, wind_forecast and likely_wind_loss must have one value per hour");
    if (inst.initial.size() != units.size())
        throw ValidationError("instance: initial state required for every unit");
    for (std::size_t h = 0; h < T; ++h) {
        if (!(inst.demand[h] > 0.0))
            throw ValidationError("instance: demand must be positive (hour " + std::to_string(h) + ")");
        if (inst.wind_forecast[h] < 0.0 || inst.likely_wind_loss[h] < 0.0)
            throw ValidationError("instance: negative wind value (hour " + std::to_string(h) + ")");
        if (installed_wind >= 0.0 && inst.wind_forecast[h] > installed_wind + 1e-9)
            throw ValidationError("instance: wind forecast above installed capacity (hour " + std::to_string(h) + ")");
    }
    for (std::size_t i = 0; i < units.size(); ++i) {
        const auto& s = inst.initial[i];
        if (s.hours < 1)
            throw ValidationError("instance: initial hours of '" + units[i].id + "' must be >= 1");
    }
}

ReserveRequirement reserve_requirement(const UCInstance& inst, int hour, std::span<const double> online_dispatch)
{
    ReserveRequirement r;
    r.demand_increase = demand_increase(inst, hour);
    r.wind_loss = std::max(0.0, inst.likely_wind_loss[static_cast<std::size_t>(hour)]);
    for (double p : online_dispatch) r.largest_unit = std::max(r.largest_unit, p);
    r.value = std::max({r.demand_increase, r.wind_loss, r.largest_unit});
    return r;
}

HourDispatch dispatch_hour(std::span<const ThermalUnit> committed, double net_demand, double unit_cap)
{
    HourDispatch d;
    d.p.assign(committed.size(), 0.0);
    double sum_min = 0.0;
    double sum_max = 0.0;
    for (const auto& u : committed) {
        if (u.min_power > unit_cap + kBalanceTol)
            throw InfeasibleError("dispatch: min_power of '" + u.id + "' exceeds the reserve cap of " +
                                  std::to_string(unit_cap) + " MW");
        sum_min += u.min_power;
        sum_max += std::min(u.rated_power, unit_cap);
    }
    if (net_demand < sum_min - kBalanceTol)
        throw InfeasibleError("dispatch: net demand " + std::to_string(net_demand) +
                              " MW below the committed minimum output " + std::to_string(sum_min) + " MW");
    if (net_demand > sum_max + kBalanceTol)
        throw InfeasibleError("dispatch: net demand " + std::to_string(net_demand) +
                              " MW above the committed maximum output " + std::to_string(sum_max) + " MW");

    struct Piece {
        double price;
        std::size_t unit;
        std::size_t seg;
    };
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < committed.size(); ++i) {
        d.p[i] = committed[i].min_power;
        for (std::size_t k = 0; k < committed[i].cost_segments.size(); ++k)
            pieces.push_back({committed[i].cost_segments[k].marginal_cost + committed[i].om_cost, i, k});
    }
    std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.price < b.price; });

    double remaining = net_demand - sum_min;
    for (const auto& pc : pieces) {
        if (remaining <= 0.0) break;
        const auto& u = committed[pc.unit];
        const double room = std::min(u.rated_power, unit_cap) - d.p[pc.unit];
        const double take = std::min({u.cost_segments[pc.seg].width_mw, room, remaining});
        if (take <= 0.0) continue;
        d.p[pc.unit] += take;
        remaining -= take;
    }
    for (std::size_t i = 0; i < committed.size(); ++i) {
        d.fuel_cost += committed[i].fuel_cost(d.p[i]);
        d.om_cost += committed[i].om_cost * d.p[i];
    }
    return d;
}

std::size_t startup_type_index(const ThermalUnit& unit, int offline_hours)
{
    if (offline_hours < unit.min_down)
        throw ValidationError("startup of '" + unit.id + "' after " + std::to_string(offline_hours) +
                              " h off-line violates min_down " + std::to_string(unit.min_down) + " h");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < unit.startup_types.size(); ++k)
        if (unit.startup_types[k].min_offline_hours <= offline_hours) idx = k;
    return idx;
}

double startup_cost(const ThermalUnit& unit, int offline_hours)
{
    return unit.startup_types[startup_type_index(unit, offline_hours)].cost;
}

std::vector<double> startup_trajectory(const ThermalUnit& unit)
{
    std::vector<double> out;
    if (unit.startup_duration <= 1) return out;
    const double d = static_cast<double>(unit.startup_duration);
    for (int k = 1; k <= unit.startup_duration; ++k) out.push_back(unit.min_power * k / d);
    return out;
}

std::string_view to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::WithinGap: return "within_gap";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::Infeasible: return "infeasible";
    }
    return "?";
}

// ------------------------------------------------------------ detail

namespace detail {

UnitStatus initial_status(const InitialUnitState& s)
{
    return {s.on ? UnitMode::On : UnitMode::Off, s.hours, 0};
}

int options(const ThermalUnit& u, const UnitStatus& prev, int h, int horizon, std::array<Option, 3>& out)
{
    const int dur = u.startup_duration;
    const bool traj_fits = dur >= 2 && h + dur - 1 <= horizon - 1;
    const double wear = u.wear_tear_cost;
    int n = 0;
    switch (prev.mode) {
    case UnitMode::On:
        out[n++] = {{UnitMode::On, prev.hours + 1, 0}, 0.0};
        if (prev.hours >= u.min_up) {
            out[n++] = {{UnitMode::Off, 1, 0}, 0.0};
            if (traj_fits && dur - 1 >= u.min_down)
                out[n++] = {{UnitMode::Starting, 1, 0}, startup_cost(u, dur - 1) + wear};
        }
        break;
    case UnitMode::Off:
        out[n++] = {{UnitMode::Off, prev.hours + 1, 0}, 0.0};
        if (dur <= 1) {
            if (prev.hours >= u.min_down) out[n++] = {{UnitMode::On, 1, 0}, startup_cost(u, prev.hours) + wear};
        } else if (traj_fits && prev.hours + dur - 1 >= u.min_down) {
            out[n++] = {{UnitMode::Starting, 1, prev.hours}, startup_cost(u, prev.hours + dur - 1) + wear};
        }
        break;
    case UnitMode::Starting:
        if (prev.hours < dur - 1)
            out[n++] = {{UnitMode::Starting, prev.hours + 1, prev.off_before}, 0.0};
        else
            out[n++] = {{UnitMode::On, 1, 0}, 0.0};
        break;
    }
    return n;
}

double trajectory_output(const ThermalUnit& u, const UnitStatus& s)
{
    return u.min_power * s.hours / static_cast<double>(u.startup_duration);
}

HourEvaluator::HourEvaluator(std::span<const ThermalUnit> units, const UCInstance& inst) : units_(units)
{
    if (units.size() > 32) throw TooLargeError("UC search supports at most 32 units");
    for (std::uint32_t i = 0; i < units.size(); ++i) {
        const auto& u = units[i];
        for (const auto& s : u.cost_segments)
            if (s.width_mw > 0.0) segs_.push_back({s.marginal_cost + u.om_cost, s.width_mw, i});
        fixed_.push_back(u.min_block_cost() + u.om_cost * u.min_power);
    }
    std::stable_sort(segs_.begin(), segs_.end(), [](const Seg& a, const Seg& b) { return a.price < b.price; });
    for (int h = 0; h < inst.hours; ++h) {
        const auto i = static_cast<std::size_t>(h);
        net_demand_.push_back(inst.demand[i] - inst.wind_forecast[i]);
        base_reserve_.push_back(std::max(demand_increase(inst, h), std::max(0.0, inst.likely_wind_loss[i])));
    }
}

double HourEvaluator::evaluate(int h, std::uint32_t mask, double trajectory_mw, std::vector<double>* p) const
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double nd = net_demand(h) - trajectory_mw;
    const double r0 = base_reserve(h);
    if (p) p->assign(units_.size(), 0.0);
    double sum_rated = 0.0, sum_min = 0.0, max_min = 0.0, cost = 0.0;
    for (std::uint32_t i = 0; i < units_.size(); ++i) {
        if (!(mask >> i & 1u)) continue;
        sum_rated += units_[i].rated_power;
        sum_min += units_[i].min_power;
        max_min = std::max(max_min, units_[i].min_power);
        cost += fixed_[i];
    }
    const double cap = sum_rated - nd;  // headroom; also the largest-unit bound
    if (cap < r0 - kBalanceTol || sum_min > nd + kBalanceTol || max_min > cap + kBalanceTol) return inf;
    if (mask == 0) return std::abs(nd) <= kBalanceTol ? 0.0 : inf;

    std::array<double, 32> room{};
    double capacity = 0.0;
    for (std::uint32_t i = 0; i < units_.size(); ++i) {
        if (!(mask >> i & 1u)) continue;
        room[i] = std::max(0.0, std::min(units_[i].rated_power, cap) - units_[i].min_power);
        capacity += room[i];
        if (p) (*p)[i] = units_[i].min_power;
    }
    double remaining = nd - sum_min;
    if (remaining > capacity + kBalanceTol) return inf;
    for (const auto& s : segs_) {
        if (remaining <= 0.0) break;
        if (!(mask >> s.unit & 1u)) continue;
        const double take = std::min({s.width, room[s.unit], remaining});
        if (take <= 0.0) continue;
        room[s.unit] -= take;
        remaining -= take;
        cost += take * s.price;
        if (p) (*p)[s.unit] += take;
    }
    return cost;
}

double HourEvaluator::relaxed(int h, std::uint32_t mask, double max_traj_mw, double traj_price) const
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (max_traj_mw <= 0.0) return evaluate(h, mask, 0.0);
    const double nd = net_demand(h);
    double sum_rated = 0.0, sum_min = 0.0, max_min = 0.0, fixed = 0.0;
    for (std::uint32_t i = 0; i < units_.size(); ++i) {
        if (!(mask >> i & 1u)) continue;
        sum_rated += units_[i].rated_power;
        sum_min += units_[i].min_power;
        max_min = std::max(max_min, units_[i].min_power);
        fixed += fixed_[i];
    }
    const double lo = std::max(nd - max_traj_mw, sum_min);
    const double hi = std::min(nd, sum_rated - std::max(base_reserve(h), max_min));
    if (lo > hi + kBalanceTol) return inf;

    // Load segments cheaper than the trajectory price as far as allowed,
    // but at least up to `lo`; the trajectory covers the rest of nd.
    double d = sum_min;
    double cost = fixed;
    for (const auto& s : segs_) {
        if (!(mask >> s.unit & 1u)) continue;
        const bool must = d < lo;
        if (!must && (s.price >= traj_price || d >= hi)) break;
        const double limit = must && s.price >= traj_price ? lo : hi;
        const double take = std::min(s.width, limit - d);
        if (take <= 0.0) continue;
        d += take;
        cost += take * s.price;
    }
    if (d < lo - kBalanceTol) return inf;
    return cost + std::max(0.0, nd - d) * traj_price;
}

double HourEvaluator::capped(int h, std::uint32_t mask, double max_traj_mw, double traj_price) const
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double at_zero = evaluate(h, mask, 0.0);
    if (max_traj_mw <= 0.0) return at_zero;
    const double loose = relaxed(h, mask, max_traj_mw, traj_price);
    if (!std::isfinite(loose) || loose >= at_zero) return std::min(loose, at_zero);

    double sum_min = 0.0, top_price = 0.0;
    std::size_t online = 0;
    for (std::uint32_t i = 0; i < units_.size(); ++i)
        if (mask >> i & 1u) {
            sum_min += units_[i].min_power;
            ++online;
        }
    for (const auto& s : segs_)
        if (mask >> s.unit & 1u) top_price = std::max(top_price, s.price);
    const auto g = [&](double t) { return evaluate(h, mask, t) + t * traj_price; };

    // feasible trajectory outputs form an interval [a, b]; small t fails on reserve
    const double b = std::min(max_traj_mw, net_demand(h) - sum_min);
    if (b < 0.0 || !std::isfinite(g(b))) return loose;
    double a = 0.0;
    double slack = 0.0;
    if (!std::isfinite(at_zero)) {
        double x = 0.0, y = b;
        while (y - x > 1e-7) {
            const double m = 0.5 * (x + y);
            (std::isfinite(g(m)) ? y : x) = m;
        }
        a = y;
        slack = y - x;
    }
    // golden section on the convex cost
    constexpr double r = 0.6180339887498949;
    double x = a, y = b;
    double best = std::min(g(a), g(b));
    double c = y - r * (y - x), d = x + r * (y - x);
    double gc = g(c), gd = g(d);
    while (y - x > 1e-7) {
        best = std::min({best, gc, gd});
        if (gc <= gd) {
            y = d;
            d = c;
            gd = gc;
            c = y - r * (y - x);
            gc = g(c);
        } else {
            x = c;
            c = d;
            gc = gd;
            d = x + r * (y - x);
            gd = g(d);
        }
    }
    best = std::min({best, gc, gd});
    const double lipschitz = traj_price + static_cast<double>(online + 1) * top_price;
    const double bound = best - lipschitz * std::max(y - x, slack) - 1e-9 * std::abs(best);
    return std::clamp(bound, loose, std::isfinite(at_zero) ? at_zero : inf);
}

std::string HourEvaluator::infeasibility_reason(int h, std::uint32_t mask, double trajectory_mw) const
{
    const double nd = net_demand(h) - trajectory_mw;
    double sum_rated = 0.0, sum_min = 0.0;
    for (std::uint32_t i = 0; i < units_.size(); ++i)
        if (mask >> i & 1u) {
            sum_rated += units_[i].rated_power;
            sum_min += units_[i].min_power;
        }
    if (sum_min > nd + kBalanceTol)
        return "committed minimum output " + std::to_string(sum_min) + " MW exceeds net demand " +
               std::to_string(nd) + " MW";
    if (sum_rated - nd < base_reserve(h) - kBalanceTol)
        return "spinning reserve " + std::to_string(sum_rated - nd) + " MW below requirement " +
               std::to_string(base_reserve(h)) + " MW";
    return "net demand " + std::to_string(nd) + " MW cannot be served while keeping reserve for the largest unit";
}

}  // namespace detail

// ------------------------------------------------------------ pricing

UCSolution price_schedule(std::span<const ThermalUnit> units, const UCInstance& inst, const ModeMatrix& modes)
{
    const std::size_t n = units.size();
    const int T = inst.hours;
    if (modes.size() != n) throw ValidationError("schedule: one mode row per unit required");
    const detail::HourEvaluator eval(units, inst);

    UCSolution sol;
    sol.hours = T;
    const auto TT = static_cast<std::size_t>(T);
    for (const auto& u : units) sol.unit_ids.push_back(u.id);
    sol.u.assign(n, std::vector<int>(TT, 0));
    sol.p.assign(n, std::vector<double>(TT, 0.0));
    sol.startup.assign(n, std::vector<int>(TT, 0));
    sol.startup_type.assign(n, std::vector<int>(TT, -1));
    sol.startup_cost.assign(n, std::vector<double>(TT, 0.0));

    std::vector<std::vector<detail::UnitStatus>> status(n, std::vector<detail::UnitStatus>(TT));
    for (std::size_t i = 0; i < n; ++i) {
        if (modes[i].size() != TT) throw ValidationError("schedule: one mode per hour required");
        detail::UnitStatus prev = detail::initial_status(inst.initial[i]);
        for (int h = 0; h < T; ++h) {
            std::array<detail::Option, 3> opts;
            const int k = detail::options(units[i], prev, h, T, opts);
            const auto want = modes[i][static_cast<std::size_t>(h)];
            const auto* hit = std::find_if(opts.begin(), opts.begin() + k,
                                           [&](const detail::Option& o) { return o.next.mode == want; });
            if (hit == opts.begin() + k)
                throw ValidationError("schedule: illegal transition for '" + units[i].id + "' at hour " +
                                      std::to_string(h));
            const auto hh = static_cast<std::size_t>(h);
            status[i][hh] = hit->next;
            // record the start in the first synchronised hour
            const bool starts_now = hit->next.mode == UnitMode::On && prev.mode != UnitMode::On;
            if (starts_now) {
                const int offline = prev.mode == UnitMode::Off ? prev.hours
                                                               : prev.off_before + units[i].startup_duration - 1;
                const auto idx = startup_type_index(units[i], offline);
                sol.startup[i][hh] = 1;
                sol.startup_type[i][hh] = static_cast<int>(idx);
                sol.startup_cost[i][hh] = units[i].startup_types[idx].cost;
                sol.cost.startup += units[i].startup_types[idx].cost;
                sol.cost.wear_tear += units[i].wear_tear_cost;
            }
            prev = hit->next;
        }
    }

    sol.spinning_reserve.assign(TT, 0.0);
    sol.reserve_required.assign(TT, 0.0);
    sol.reserve_margin.assign(TT, 0.0);
    std::vector<double> p;
    for (int h = 0; h < T; ++h) {
        const auto hh = static_cast<std::size_t>(h);
        std::uint32_t mask = 0;
        double traj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = status[i][hh];
            if (s.mode == UnitMode::On) mask |= 1u << i;
            if (s.mode == UnitMode::Starting) {
                const double mw = detail::trajectory_output(units[i], s);
                traj += mw;
                sol.p[i][hh] = mw;
                sol.cost.fuel += mw * units[i].cost_segments.front().marginal_cost;
                sol.cost.om += mw * units[i].om_cost;
            }
        }
        if (!std::isfinite(eval.evaluate(h, mask, traj, &p)))
            throw InfeasibleError("hour " + std::to_string(h) + ": " + eval.infeasibility_reason(h, mask, traj), h);
        std::vector<double> online;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask >> i & 1u)) continue;
            sol.u[i][hh] = 1;
            sol.p[i][hh] = p[i];
            sol.cost.fuel += units[i].fuel_cost(p[i]);
            sol.cost.om += units[i].om_cost * p[i];
            sol.spinning_reserve[hh] += units[i].rated_power - p[i];
            online.push_back(p[i]);
        }
        sol.reserve_required[hh] = reserve_requirement(inst, h, online).value;
        sol.reserve_margin[hh] = sol.spinning_reserve[hh] - sol.reserve_required[hh];
    }
    return sol;
}

namespace detail {

std::optional<ModeMatrix> commitment_modes(std::span<const ThermalUnit> units, const UCInstance& inst,
                                           const std::vector<std::vector<int>>& u)
{
    const int T = inst.hours;
    ModeMatrix modes(units.size(), std::vector<UnitMode>(static_cast<std::size_t>(T), UnitMode::Off));
    for (std::size_t i = 0; i < units.size(); ++i) {
        bool was_on = inst.initial[i].on;
        for (int h = 0; h < T; ++h) {
            const auto hh = static_cast<std::size_t>(h);
            const bool on = u[i][hh] != 0;
            if (on) modes[i][hh] = UnitMode::On;
            if (on && !was_on && units[i].startup_duration >= 2) {
                const int first = h - (units[i].startup_duration - 1);
                if (first < 0) return std::nullopt;
                for (int k = first; k < h; ++k) {
                    const auto kk = static_cast<std::size_t>(k);
                    if (u[i][kk] != 0) return std::nullopt;
                    modes[i][kk] = UnitMode::Starting;
                }
            }
            was_on = on;
        }
    }
    return modes;
}

}  // namespace detail

std::optional<UCSolution> evaluate_commitment(std::span<const ThermalUnit> units, const UCInstance& inst,
                                              const std::vector<std::vector<int>>& u)
{
    const auto modes = detail::commitment_modes(units, inst, u);
    if (!modes) return std::nullopt;
    try {
        return price_schedule(units, inst, *modes);
    } catch (const InfeasibleError&) {
        return std::nullopt;
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

// ------------------------------------------------------------ audit

std::vector<Violation> validate_solution(std::span<const ThermalUnit> units, const UCInstance& inst,
                                         const UCSolution& sol)
{
    std::vector<Violation> out;
    const std::size_t n = units.size();
    const int T = inst.hours;
    const auto TT = static_cast<std::size_t>(T);
    auto report = [&](const std::string& unit, int h, std::string msg) { out.push_back({unit, h, std::move(msg)}); };

    const auto shape_ok = [&](const auto& m) {
        return m.size() == n && std::all_of(m.begin(), m.end(), [&](const auto& row) { return row.size() == TT; });
    };
    if (sol.hours != T || !shape_ok(sol.u) || !shape_ok(sol.p) || !shape_ok(sol.startup) ||
        !shape_ok(sol.startup_type) || !shape_ok(sol.startup_cost)) {
        report("", -1, "solution dimensions do not match the instance");
        return out;
    }

    CostBreakdown expect;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& unit = units[i];
        const auto& id = unit.id;
        std::vector<bool> trajectory(TT, false);

        // runs, starts and trajectories
        int run_len = inst.initial[i].hours;
        bool run_on = inst.initial[i].on;
        bool run_from_start = true;  // current run began before the horizon
        for (int h = 0; h <= T; ++h) {
            const bool on = h < T && sol.u[i][static_cast<std::size_t>(h)] != 0;
            if (h < T && (sol.u[i][static_cast<std::size_t>(h)] & ~1) != 0) report(id, h, "commitment not binary");
            if (h == T || on != run_on) {
                if (h < T) {
                    if (run_on && run_len < unit.min_up)
                        report(id, h, "on-run of " + std::to_string(run_len) + " h shorter than min_up");
                    if (!run_on && run_len < unit.min_down)
                        report(id, h, "off-run of " + std::to_string(run_len) + " h shorter than min_down");
                    if (on) {
                        // start at h after run_len hours off-line
                        const auto hh = static_cast<std::size_t>(h);
                        const int dur = unit.startup_duration;
                        if (dur >= 2) {
                            const auto ramp = startup_trajectory(unit);
                            if (h - (dur - 1) < 0 || (!run_from_start && run_len < dur - 1) ||
                                (run_from_start && h < dur - 1)) {
                                report(id, h, "startup trajectory does not fit before the start");
                            } else {
                                for (int k = 1; k < dur; ++k) {
                                    const auto th = static_cast<std::size_t>(h - dur + k);
                                    trajectory[th] = true;
                                    if (std::abs(sol.p[i][th] - ramp[static_cast<std::size_t>(k - 1)]) > kBalanceTol)
                                        report(id, static_cast<int>(th), "trajectory output differs from the ramp");
                                    expect.fuel += ramp[static_cast<std::size_t>(k - 1)] *
                                                   unit.cost_segments.front().marginal_cost;
                                }
                            }
                        }
                        if (run_len >= unit.min_down) {
                            const auto idx = startup_type_index(unit, run_len);
                            const double c = unit.startup_types[idx].cost;
                            expect.startup += c;
                            expect.wear_tear += unit.wear_tear_cost;
                            if (sol.startup[i][hh] != 1) report(id, h, "start not flagged");
                            if (sol.startup_type[i][hh] != static_cast<int>(idx))
                                report(id, h, "startup type mispriced: expected type " + std::to_string(idx + 1));
                            if (std::abs(sol.startup_cost[i][hh] - c) > kCostTol)
                                report(id, h, "startup cost mispriced: expected " + std::to_string(c) + " EUR");
                        }
                    }
                }
                run_on = on;
                run_len = 1;
                run_from_start = false;
            } else {
                ++run_len;
            }
        }

        for (int h = 0; h < T; ++h) {
            const auto hh = static_cast<std::size_t>(h);
            const bool on = sol.u[i][hh] != 0;
            const bool started = on && (h == 0 ? !inst.initial[i].on : sol.u[i][hh - 1] == 0);
            const double p = sol.p[i][hh];
            if (!started && (sol.startup[i][hh] != 0 || sol.startup_cost[i][hh] != 0.0))
                report(id, h, "startup charged without a start");
            if (on) {
                if (p < unit.min_power - kBalanceTol) report(id, h, "output below min_power while committed");
                if (p > unit.rated_power + kBalanceTol) report(id, h, "output above rated_power");
                expect.fuel += unit.fuel_cost(p);
            } else if (!trajectory[hh] && std::abs(p) > kBalanceTol) {
                report(id, h, "output while off-line");
            }
            expect.om += unit.om_cost * p;
        }
    }

    for (int h = 0; h < T; ++h) {
        const auto hh = static_cast<std::size_t>(h);
        double supply = inst.wind_forecast[hh];
        double spinning = 0.0;
        std::vector<double> online;
        for (std::size_t i = 0; i < n; ++i) {
            supply += sol.p[i][hh];
            if (sol.u[i][hh] != 0) {
                spinning += units[i].rated_power - sol.p[i][hh];
                online.push_back(sol.p[i][hh]);
            }
        }
        if (std::abs(supply - inst.demand[hh]) > kBalanceTol)
            report("", h, "power balance off by " + std::to_string(supply - inst.demand[hh]) + " MW");
        const auto req = reserve_requirement(inst, h, online);
        if (spinning < req.value - kBalanceTol)
            report("", h, "spinning reserve " + std::to_string(spinning) + " MW below requirement " +
                              std::to_string(req.value) + " MW");
    }

    const auto close = [](double a, double b) { return std::abs(a - b) <= kCostTol + 1e-12 * std::abs(b); };
    if (!close(sol.cost.startup, expect.startup)) report("", -1, "startup cost total mispriced");
    if (!close(sol.cost.fuel, expect.fuel)) report("", -1, "fuel cost total mispriced");
    if (!close(sol.cost.om, expect.om)) report("", -1, "O&M cost total mispriced");
    if (!close(sol.cost.wear_tear, expect.wear_tear)) report("", -1, "wear-and-tear cost total mispriced");
    return out;
}

}  // namespace freqsec
