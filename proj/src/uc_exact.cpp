#include "freqsec/error.hpp"
#include "freqsec/uc.hpp"
#include "uc_detail.hpp"

#include <cmath>
#include <limits>

namespace freqsec {

namespace {

constexpr long long kExactNodeLimit = 50'000'000;

struct Enumerator {
    std::span<const ThermalUnit> units;
    const UCInstance& inst;
    detail::HourEvaluator eval;
    std::size_t n;
    int T;

    std::vector<std::vector<detail::UnitStatus>> path;  // [hour][unit]

    double best = std::numeric_limits<double>::infinity();
    ModeMatrix best_modes;
    ModeMatrix modes;
    long long nodes = 0;
    int deepest = 0;  // first hour no branch could get past

    Enumerator(std::span<const ThermalUnit> u, const UCInstance& in)
        : units(u), inst(in), eval(u, in), n(u.size()), T(in.hours),
          path(static_cast<std::size_t>(in.hours), std::vector<detail::UnitStatus>(u.size())),
          modes(u.size(), std::vector<UnitMode>(static_cast<std::size_t>(in.hours)))
    {
    }

    bool lexically_smaller(const ModeMatrix& a, const ModeMatrix& b) const
    {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t h = 0; h < a[i].size(); ++h) {
                const int ua = a[i][h] == UnitMode::On, ub = b[i][h] == UnitMode::On;
                if (ua != ub) return ua < ub;
            }
        return false;
    }

    void hour(int h, double cost_so_far)
    {
        if (h == T) {
            const double tol = 1e-9 * std::max(1.0, std::abs(best));
            if (best_modes.empty() || cost_so_far < best - tol ||
                (cost_so_far <= best + tol && lexically_smaller(modes, best_modes))) {
                best = std::min(best, cost_so_far);
                best_modes = modes;
            }
            return;
        }
        const auto hh = static_cast<std::size_t>(h);
        std::vector<std::array<detail::Option, 3>> local(n);
        std::vector<int> count(n);
        for (std::size_t i = 0; i < n; ++i) {
            detail::UnitStatus p = h > 0 ? path[hh - 1][i] : detail::initial_status(inst.initial[i]);
            count[i] = detail::options(units[i], p, h, T, local[i]);
        }
        std::vector<int> idx(n, 0);
        while (true) {
            if (++nodes > kExactNodeLimit) throw TooLargeError("exact UC enumeration exceeded the node budget");
            std::uint32_t mask = 0;
            double traj = 0.0, traj_cost = 0.0, start_cost = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& o = local[i][static_cast<std::size_t>(idx[i])];
                path[hh][i] = o.next;
                modes[i][hh] = o.next.mode;
                start_cost += o.startup_cost;
                if (o.next.mode == UnitMode::On) mask |= 1u << i;
                if (o.next.mode == UnitMode::Starting) {
                    const double mw = detail::trajectory_output(units[i], o.next);
                    traj += mw;
                    traj_cost += mw * (units[i].cost_segments.front().marginal_cost + units[i].om_cost);
                }
            }
            const double c = eval.evaluate(h, mask, traj);
            if (std::isfinite(c)) {
                deepest = std::max(deepest, h + 1);
                hour(h + 1, cost_so_far + c + traj_cost + start_cost);
            }
            std::size_t k = 0;
            while (k < n && ++idx[k] == count[k]) idx[k++] = 0;
            if (k == n) break;
        }
    }
};

}  // namespace

UCSolution solve_exact(std::span<const ThermalUnit> units, const UCInstance& inst)
{
    if (units.size() > 5 || inst.hours > 8)
        throw TooLargeError("exact UC enumeration is limited to 5 units and 8 hours");
    Enumerator e(units, inst);
    e.hour(0, 0.0);
    if (!std::isfinite(e.best)) {
        const int h = std::min(e.deepest, inst.hours - 1);
        std::uint32_t all = 0;
        for (std::size_t i = 0; i < units.size(); ++i) all |= 1u << i;
        throw InfeasibleError("hour " + std::to_string(h) + ": no feasible commitment; " +
                                  e.eval.infeasibility_reason(h, all, 0.0),
                              h);
    }
    auto sol = price_schedule(units, inst, e.best_modes);
    sol.status = SolveStatus::Optimal;
    sol.lower_bound = sol.total_cost();
    sol.gap = 0.0;
    sol.nodes = e.nodes;
    return sol;
}

}  // namespace freqsec
