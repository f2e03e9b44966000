#include "uc_detail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace freqsec::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// statuses beyond these lengths behave identically
UnitStatus saturate(const ThermalUnit& u, UnitStatus s)
{
    int off_cap = u.min_down;
    for (const auto& t : u.startup_types) off_cap = std::max(off_cap, t.min_offline_hours);
    switch (s.mode) {
    case UnitMode::On: s.hours = std::min(s.hours, u.min_up); break;
    case UnitMode::Off: s.hours = std::min(s.hours, off_cap); break;
    case UnitMode::Starting: s.off_before = 0; break;
    }
    return s;
}

using Key = std::tuple<int, int>;
Key key_of(const UnitStatus& s) { return {static_cast<int>(s.mode), s.hours}; }

struct UnitPlan {
    double value = 0.0;
    std::vector<int> u;      // 0/1 per hour
    std::vector<double> p;   // on-line output per hour, MW
    std::vector<double> traj;  // trajectory output per hour, MW
};

// exact minimum of one unit's priced schedule by dynamic programming over statuses
UnitPlan plan_unit(const ThermalUnit& un, const UnitStatus& init, int T, std::span<const double> lambda,
                   std::span<const double> out_price, std::span<const double> credit)
{
    struct Node {
        UnitStatus s;
        double value;
        int parent;
        double p;
    };
    std::vector<std::vector<Node>> layers(static_cast<std::size_t>(T));
    const double traj_price = un.cost_segments.front().marginal_cost + un.om_cost;

    // best output for a price, evaluated at the breakpoints of the convex cost
    const auto dispatch = [&](double price, double& best_p) {
        double p = un.min_power;
        double best = un.fuel_cost(p) + (un.om_cost - price) * p;
        best_p = p;
        for (const auto& seg : un.cost_segments) {
            if (seg.width_mw <= 0.0) continue;
            p = std::min(un.rated_power, p + seg.width_mw);
            const double v = un.fuel_cost(p) + (un.om_cost - price) * p;
            if (v < best) best = v, best_p = p;
        }
        return best;
    };

    std::vector<Node> prev{{saturate(un, init), 0.0, -1, 0.0}};
    for (int h = 0; h < T; ++h) {
        const auto hh = static_cast<std::size_t>(h);
        std::map<Key, std::size_t> index;
        auto& layer = layers[hh];
        double on_value = 0.0, on_p = 0.0;
        bool on_done = false;
        for (std::size_t k = 0; k < prev.size(); ++k) {
            std::array<Option, 3> opts;
            const int n = options(un, prev[k].s, h, T, opts);
            for (int c = 0; c < n; ++c) {
                const auto next = saturate(un, opts[static_cast<std::size_t>(c)].next);
                double stage = 0.0, p = 0.0;
                if (next.mode == UnitMode::On) {
                    if (!on_done) {
                        on_value = dispatch(out_price[hh], on_p) - credit[hh];
                        on_done = true;
                    }
                    stage = on_value;
                    p = on_p;
                } else if (next.mode == UnitMode::Starting) {
                    const double q = trajectory_output(un, next);
                    stage = (traj_price - lambda[hh]) * q;
                }
                const double v = prev[k].value + opts[static_cast<std::size_t>(c)].startup_cost + stage;
                const auto [it, fresh] = index.try_emplace(key_of(next), layer.size());
                if (fresh) layer.push_back({next, v, static_cast<int>(k), p});
                else if (v < layer[it->second].value) layer[it->second] = {next, v, static_cast<int>(k), p};
            }
        }
        prev = layer;
    }

    UnitPlan plan;
    plan.u.assign(static_cast<std::size_t>(T), 0);
    plan.p.assign(static_cast<std::size_t>(T), 0.0);
    plan.traj.assign(static_cast<std::size_t>(T), 0.0);
    if (prev.empty()) {
        plan.value = kInf;
        return plan;
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < prev.size(); ++k)
        if (prev[k].value < prev[best].value) best = k;
    plan.value = prev[best].value;
    int idx = static_cast<int>(best);
    for (int h = T - 1; h >= 0; --h) {
        const auto& node = layers[static_cast<std::size_t>(h)][static_cast<std::size_t>(idx)];
        const auto hh = static_cast<std::size_t>(h);
        if (node.s.mode == UnitMode::On) plan.u[hh] = 1, plan.p[hh] = node.p;
        if (node.s.mode == UnitMode::Starting) plan.traj[hh] = trajectory_output(un, node.s);
        idx = node.parent;
    }
    return plan;
}

}  // namespace

LagrangeResult lagrangian_bound(std::span<const ThermalUnit> units, const UCInstance& inst,
                                const HourEvaluator& eval, double upper, int iterations)
{
    const std::size_t n = units.size();
    const int T = inst.hours;
    const auto TT = static_cast<std::size_t>(T);
    LagrangeResult res;
    if (n == 0 || T == 0) return res;

    // balance price starts at the merit-order marginal cost of each hour
    std::vector<std::pair<double, double>> merit;
    for (const auto& u : units)
        for (const auto& s : u.cost_segments) merit.push_back({s.marginal_cost + u.om_cost, s.width_mw});
    std::sort(merit.begin(), merit.end());
    double total_min = 0.0;
    for (const auto& u : units) total_min += u.min_power;

    std::vector<double> lambda(TT), mu(TT, 0.0);
    std::vector<std::vector<double>> nu(n, std::vector<double>(TT, 0.0));
    for (std::size_t h = 0; h < TT; ++h) {
        double left = eval.net_demand(static_cast<int>(h)) - total_min;
        lambda[h] = merit.empty() ? 0.0 : merit.front().first;
        for (const auto& [price, width] : merit) {
            lambda[h] = price;
            left -= width;
            if (left <= 0.0) break;
        }
    }

    std::vector<UnitStatus> init;
    for (const auto& s : inst.initial) init.push_back(initial_status(s));

    const double ub = std::isfinite(upper) ? upper : kInf;
    double theta = 1.0;
    int stall = 0;
    std::vector<double> out_price(TT), credit(TT), v_sum(TT);
    std::vector<UnitPlan> plans(n);
    std::vector<double> g_lambda(TT), g_mu(TT);
    std::vector<std::vector<double>> g_nu(n, std::vector<double>(TT));

    for (int it = 0; it < iterations; ++it) {
        for (std::size_t h = 0; h < TT; ++h) {
            v_sum[h] = 0.0;
            for (std::size_t i = 0; i < n; ++i) v_sum[h] += nu[i][h];
        }
        double value = 0.0;
        for (std::size_t h = 0; h < TT; ++h)
            value += lambda[h] * eval.net_demand(static_cast<int>(h)) + mu[h] * eval.base_reserve(static_cast<int>(h));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t h = 0; h < TT; ++h) {
                out_price[h] = lambda[h] - mu[h] - nu[i][h] - v_sum[h];
                credit[h] = (mu[h] + v_sum[h]) * units[i].rated_power;
            }
            plans[i] = plan_unit(units[i], init[i], T, lambda, out_price, credit);
            value += plans[i].value;
        }
        if (!std::isfinite(value)) return res;

        if (value > res.bound + 1e-9 * std::abs(value)) {
            res.bound = value;
            stall = 0;
        } else if (++stall >= 10) {
            theta *= 0.5;
            stall = 0;
        }
        if (it % 5 == 0 || it + 1 == iterations) {
            std::vector<std::vector<int>> u(n);
            for (std::size_t i = 0; i < n; ++i) u[i] = plans[i].u;
            if (std::find(res.commitments.begin(), res.commitments.end(), u) == res.commitments.end())
                res.commitments.push_back(std::move(u));
        }

        double norm = 0.0;
        for (std::size_t h = 0; h < TT; ++h) {
            double sum_p = 0.0, sum_traj = 0.0, sum_rated = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sum_p += plans[i].p[h];
                sum_traj += plans[i].traj[h];
                sum_rated += plans[i].u[h] ? units[i].rated_power : 0.0;
            }
            g_lambda[h] = eval.net_demand(static_cast<int>(h)) - sum_p - sum_traj;
            g_mu[h] = eval.base_reserve(static_cast<int>(h)) + sum_p - sum_rated;
            if (mu[h] <= 0.0 && g_mu[h] < 0.0) g_mu[h] = 0.0;
            norm += g_lambda[h] * g_lambda[h] + g_mu[h] * g_mu[h];
            for (std::size_t i = 0; i < n; ++i) {
                g_nu[i][h] = plans[i].p[h] + sum_p - sum_rated;
                if (nu[i][h] <= 0.0 && g_nu[i][h] < 0.0) g_nu[i][h] = 0.0;
                norm += g_nu[i][h] * g_nu[i][h];
            }
        }
        if (norm < 1e-12) break;  // relaxed plan satisfies every dualised constraint
        const double target = std::isfinite(ub) ? ub : value + 0.05 * std::abs(value) + 1.0;
        const double step = theta * std::max(target - value, 1e-6 * std::abs(value)) / norm;
        for (std::size_t h = 0; h < TT; ++h) {
            lambda[h] += step * g_lambda[h];
            mu[h] = std::max(0.0, mu[h] + step * g_mu[h]);
            for (std::size_t i = 0; i < n; ++i) nu[i][h] = std::max(0.0, nu[i][h] + step * g_nu[i][h]);
        }
    }
    return res;
}

}  // namespace freqsec::detail
