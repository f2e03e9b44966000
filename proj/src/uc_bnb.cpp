#include "freqsec/error.hpp"
#include "freqsec/uc.hpp"
#include "uc_detail.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

namespace freqsec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxUnits = 18;
constexpr std::size_t kScanLimit = 2048;
constexpr int kLagrangeIterations = 300;

struct Entry {
    double bound;
    std::uint32_t mask;
};

// Cheapest subsets of one hour in bound order; every other subset costs at least `tail`.
struct Table {
    std::vector<Entry> head;
    double tail = std::numeric_limits<double>::infinity();
};

enum class Force : std::uint8_t { Free, On, NotOn };

class Search {
public:
    using Matrix = std::vector<std::vector<int>>;

    Search(std::span<const ThermalUnit> units, const UCInstance& inst, const BnbOptions& opts)
        : units_(units), inst_(inst), opts_(opts), eval_(units, inst), n_(units.size()), T_(inst.hours),
          status_(static_cast<std::size_t>(inst.hours), std::vector<detail::UnitStatus>(units.size()))
    {
        for (const auto& s : inst.initial) initial_.push_back(detail::initial_status(s));
        build_tables();
    }

    // stationary commitments of the cheapest subsets, and the cheapest subset hour by hour
    void seed()
    {
        constexpr std::size_t kPerHour = 8;
        const std::uint32_t count = 1u << n_;
        std::vector<std::uint32_t> candidates;
        std::vector<std::uint32_t> best_of_key;
        std::vector<Entry> costs(count);
        for (const auto& key : keys_) {
            for (std::uint32_t m = 0; m < count; ++m) costs[m] = {eval_.evaluate(key.hour, m, 0.0), m};
            const auto top = std::min<std::size_t>(kPerHour, count);
            std::partial_sort(costs.begin(), costs.begin() + static_cast<std::ptrdiff_t>(top), costs.end(),
                              [](const Entry& a, const Entry& b) {
                                  return a.bound != b.bound ? a.bound < b.bound : a.mask < b.mask;
                              });
            best_of_key.push_back(costs.front().mask);
            for (std::size_t k = 0; k < top; ++k)
                if (std::isfinite(costs[k].bound) &&
                    std::find(candidates.begin(), candidates.end(), costs[k].mask) == candidates.end())
                    candidates.push_back(costs[k].mask);
        }
        Matrix u(n_, std::vector<int>(static_cast<std::size_t>(T_)));
        const auto attempt = [&](auto mask_of) {
            for (std::size_t i = 0; i < n_; ++i)
                for (int h = 0; h < T_; ++h) u[i][static_cast<std::size_t>(h)] = (mask_of(h) >> i) & 1u;
            try_commitment(u);
        };
        for (auto m : candidates) attempt([m](int) { return m; });
        attempt([&](int h) { return best_of_key[table_of_[static_cast<std::size_t>(h)]]; });
        complete(u);
    }

    // relaxed commitments made legal and feasible, then the best one polished
    void seed_from(const std::vector<Matrix>& commitments)
    {
        for (auto u : commitments) complete(u);
        if (!best_u_.empty()) improve(best_u_);
    }

    // prices a commitment; keeps it as incumbent when cheaper
    bool try_commitment(const Matrix& u)
    {
        const auto modes = detail::commitment_modes(units_, inst_, u);
        if (!modes) return false;
        try {
            const double cost = price_schedule(units_, inst_, *modes).total_cost();
            if (cost >= incumbent - 1e-9) return false;
            incumbent = cost;
            best_modes = *modes;
            best_u_ = u;
            return true;
        } catch (const InfeasibleError&) {
        } catch (const ValidationError&) {
        }
        return false;
    }

    // bends one unit's row to its up/down times: short gaps filled, short runs extended
    void repair(std::size_t i, std::vector<int>& row) const
    {
        const auto& un = units_[i];
        const auto& init = inst_.initial[i];
        const int gap_min = std::max(un.min_down, un.startup_duration - 1);
        const auto at = [&](int h) -> int& { return row[static_cast<std::size_t>(h)]; };
        for (int pass = 0; pass < 2 * T_; ++pass) {
            const auto before = row;
            if (init.on) {
                for (int h = 0; h < std::min(T_, un.min_up - init.hours); ++h) at(h) = 1;
            } else {
                const int wait = std::max(un.startup_duration - 1, un.min_down - init.hours);
                for (int h = 0; h < std::min(T_, wait); ++h) at(h) = 0;
            }
            bool was_on = init.on;
            int run = init.on ? init.hours : 0;
            int last_on = init.on ? 0 : -1;  // first hour after the last on-run, -1 when none yet
            for (int h = 0; h < T_; ++h) {
                if (at(h)) {
                    if (!was_on && last_on >= 0 && h - last_on < gap_min)
                        for (int k = last_on; k < h; ++k) at(k) = 1;
                    run = was_on || (last_on >= 0 && h - last_on < gap_min) ? run + 1 : 1;
                    was_on = true;
                } else {
                    if (was_on && run < un.min_up) {
                        at(h) = 1;
                        ++run;
                        continue;
                    }
                    if (was_on) last_on = h;
                    was_on = false;
                }
            }
            if (row == before) break;
        }
    }

    // repairs every row, then adds units in merit order at the first failing hour
    bool complete(Matrix& u)
    {
        std::vector<std::size_t> order(n_);
        for (std::size_t i = 0; i < n_; ++i) order[i] = i;
        const auto avg = [&](std::size_t i) { return units_[i].fuel_cost(units_[i].rated_power) / units_[i].rated_power; };
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return avg(a) < avg(b); });
        for (std::size_t i = 0; i < n_; ++i) repair(i, u[i]);
        for (int guard = 0; guard < static_cast<int>(n_) * T_; ++guard) {
            const auto modes = detail::commitment_modes(units_, inst_, u);
            if (!modes) return false;
            int bad = -1;
            try {
                price_schedule(units_, inst_, *modes);
            } catch (const InfeasibleError& e) {
                bad = e.hour();
            } catch (const ValidationError&) {
                return false;
            }
            if (bad < 0) return try_commitment(u);
            const auto b = static_cast<std::size_t>(bad);
            bool added = false;
            for (auto i : order) {
                if (u[i][b]) continue;
                auto row = u[i];
                row[b] = 1;
                repair(i, row);
                if (!row[b]) continue;
                u[i] = row;
                added = true;
                break;
            }
            if (!added) return false;
        }
        return false;
    }

    // first-improvement descent: switch a block of up to kBlock hours of one unit on or off
    void improve(Matrix u)
    {
        constexpr int kBlock = 8;
        bool better = true;
        while (better) {
            better = false;
            for (std::size_t i = 0; i < n_; ++i)
                for (int h = 0; h < T_; ++h)
                    for (int len = 1; len <= kBlock && h + len <= T_; ++len)
                        for (int v = 0; v < 2; ++v) {
                            auto& row = u[i];
                            bool changes = false;
                            for (int k = h; k < h + len; ++k) changes |= row[static_cast<std::size_t>(k)] != v;
                            if (!changes) continue;
                            const auto saved = row;
                            for (int k = h; k < h + len; ++k) row[static_cast<std::size_t>(k)] = v;
                            if (try_commitment(u)) better = true;
                            else row = saved;
                        }
        }
    }

    void run()
    {
        start_ = std::chrono::steady_clock::now();
        visit(0, 0, 0.0);
    }

    // first hour for which no subset of units is feasible, -1 when none
    int hopeless_hour() const
    {
        for (int h = 0; h < T_; ++h)
            if (plain_[table_of_[static_cast<std::size_t>(h)]].head.empty()) return h;
        return -1;
    }

    const detail::HourEvaluator& evaluator() const { return eval_; }

    double incumbent = kInf;
    ModeMatrix best_modes;
    double pruned_lb = kInf;     // smallest bound among nodes dropped by the gap rule
    double unexplored_lb = kInf; // smallest bound left behind when stopping early
    long long nodes = 0;
    bool stopped = false;
    int deepest = 0;
    double root_bound = -kInf;

private:
    void build_tables()
    {
        // hours with the same net demand and reserve share their tables
        for (int h = 0; h < T_; ++h) {
            const bool traj_possible = h <= T_ - 2;
            std::size_t k = 0;
            while (k < keys_.size() && !(keys_[k].nd == eval_.net_demand(h) &&
                                         keys_[k].reserve == eval_.base_reserve(h) && keys_[k].traj == traj_possible))
                ++k;
            if (k == keys_.size()) {
                keys_.push_back({eval_.net_demand(h), eval_.base_reserve(h), traj_possible, h});
                plain_.emplace_back();
                amortized_.emplace_back();
                build_table(h, false, plain_.back());
                build_table(h, true, amortized_.back());
            }
            table_of_.push_back(k);
        }
    }

    // Subsets keyed by a cheap bound; the tight one is computed only when a
    // subset reaches the front of the queue.
    void build_table(int h, bool amortize, Table& tab) const
    {
        struct Item {
            double bound;
            std::uint32_t mask;
            bool tight;
            bool operator>(const Item& o) const
            {
                return bound != o.bound ? bound > o.bound : (tight != o.tight ? tight < o.tight : mask > o.mask);
            }
        };
        const std::uint32_t count = 1u << n_;
        const bool traj_possible = h <= T_ - 2;
        std::vector<Item> items;
        items.reserve(count);
        std::vector<double> max_traj(count, 0.0), price(count, kInf);
        for (std::uint32_t m = 0; m < count; ++m) {
            if (traj_possible) {
                for (std::size_t i = 0; i < n_; ++i) {
                    const auto& u = units_[i];
                    if ((m >> i & 1u) || u.startup_duration < 2) continue;
                    const double q = u.min_power * (u.startup_duration - 1) / u.startup_duration;
                    double c = u.cost_segments.front().marginal_cost + u.om_cost;
                    // a start costs at least its cheapest type, spread over D-1 hours of ramp
                    if (amortize) c += (u.startup_types.front().cost + u.wear_tear_cost) / (u.startup_duration - 1) / q;
                    max_traj[m] += q;
                    price[m] = std::min(price[m], c);
                }
            }
            if (max_traj[m] > 0.0) items.push_back({eval_.relaxed(h, m, max_traj[m], price[m]), m, false});
            else items.push_back({eval_.evaluate(h, m, 0.0), m, true});
        }
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue(std::greater<>{}, std::move(items));
        while (!queue.empty() && tab.head.size() < kScanLimit) {
            auto top = queue.top();
            if (!std::isfinite(top.bound)) break;
            queue.pop();
            if (top.tight) {
                tab.head.push_back({top.bound, top.mask});
                continue;
            }
            top.bound = eval_.capped(h, top.mask, max_traj[top.mask], price[top.mask]);
            top.tight = true;
            queue.push(top);
        }
        tab.tail = queue.empty() ? kInf : queue.top().bound;
    }

    double query(int h, std::uint32_t must_on, std::uint32_t must_off, bool paid_start) const
    {
        const auto& tab = (paid_start ? plain_ : amortized_)[table_of_[static_cast<std::size_t>(h)]];
        for (const auto& e : tab.head)
            if ((e.mask & must_on) == must_on && (e.mask & must_off) == 0) return e.bound;
        return tab.tail;
    }

    // what the status at anchor hour implies for j hours later
    Force forced(const ThermalUnit& u, const detail::UnitStatus& s, int j) const
    {
        switch (s.mode) {
        case UnitMode::On:
            return j <= u.min_up - s.hours ? Force::On : Force::Free;
        case UnitMode::Off:
            return j <= std::max(u.min_down - s.hours, u.startup_duration - 1) ? Force::NotOn : Force::Free;
        case UnitMode::Starting: {
            const int rest = u.startup_duration - 1 - s.hours;
            if (j <= rest) return Force::NotOn;
            return j <= rest + u.min_up ? Force::On : Force::Free;
        }
        }
        return Force::Free;
    }

    // bound on the cost of hours from `h` on; units < `decided` already fixed for hour h
    double future_bound(int h, std::size_t decided) const
    {
        double total = 0.0;
        for (int t = h; t < T_; ++t) {
            std::uint32_t on = 0, off = 0;
            bool paid = false;  // a start already charged still ramps at t
            for (std::size_t i = 0; i < n_; ++i) {
                Force f;
                const bool fixed = i < decided;
                const auto& s = fixed ? status_[static_cast<std::size_t>(h)][i]
                                      : (h > 0 ? status_[static_cast<std::size_t>(h - 1)][i] : initial_[i]);
                const int j = fixed ? t - h : t - h + 1;
                if (j == 0) f = s.mode == UnitMode::On ? Force::On : Force::NotOn;
                else f = forced(units_[i], s, j);
                if (s.mode == UnitMode::Starting && j <= units_[i].startup_duration - 1 - s.hours) paid = true;
                if (f == Force::On) on |= 1u << i;
                if (f == Force::NotOn) off |= 1u << i;
            }
            total += query(t, on, off, paid);
            if (!std::isfinite(total)) return kInf;
        }
        return total;
    }

    // exact cost of hour h once every unit is decided, trajectories included
    double hour_cost(int h) const
    {
        const auto& row = status_[static_cast<std::size_t>(h)];
        std::uint32_t mask = 0;
        double traj = 0.0, traj_cost = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (row[i].mode == UnitMode::On) mask |= 1u << i;
            if (row[i].mode == UnitMode::Starting) {
                const double mw = detail::trajectory_output(units_[i], row[i]);
                traj += mw;
                traj_cost += mw * (units_[i].cost_segments.front().marginal_cost + units_[i].om_cost);
            }
        }
        return eval_.evaluate(h, mask, traj) + traj_cost;
    }

    bool out_of_budget()
    {
        if (nodes >= opts_.node_limit) return true;
        if ((nodes & 1023) == 0) {
            const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
            if (el.count() > opts_.time_limit_s) return true;
        }
        return false;
    }

    void record_incumbent(double cost)
    {
        if (cost >= incumbent) return;
        incumbent = cost;
        best_modes.assign(n_, std::vector<UnitMode>(static_cast<std::size_t>(T_)));
        for (std::size_t i = 0; i < n_; ++i)
            for (int h = 0; h < T_; ++h)
                best_modes[i][static_cast<std::size_t>(h)] = status_[static_cast<std::size_t>(h)][i].mode;
    }

    void visit(int h, std::size_t i, double acc)
    {
        if (h == T_) {
            record_incumbent(acc);
            return;
        }
        const auto hh = static_cast<std::size_t>(h);
        const auto& prev = h > 0 ? status_[hh - 1][i] : initial_[i];
        std::array<detail::Option, 3> opts;
        const int k = detail::options(units_[i], prev, h, T_, opts);

        struct Child {
            double lb;
            double acc;
            int idx;
        };
        std::array<Child, 3> kids;
        const bool last = i + 1 == n_;
        for (int c = 0; c < k; ++c) {
            status_[hh][i] = opts[static_cast<std::size_t>(c)].next;
            double a = acc + opts[static_cast<std::size_t>(c)].startup_cost;
            double lb;
            if (last) {
                a += hour_cost(h);
                lb = std::isfinite(a) ? a + future_bound(h + 1, 0) : kInf;
            } else {
                lb = a + future_bound(h, i + 1);
            }
            kids[static_cast<std::size_t>(c)] = {lb, a, c};
        }
        std::sort(kids.begin(), kids.begin() + k, [](const Child& x, const Child& y) { return x.lb < y.lb; });

        for (int c = 0; c < k; ++c) {
            const auto& kid = kids[static_cast<std::size_t>(c)];
            if (!std::isfinite(kid.lb)) break;
            if (stopped) {
                unexplored_lb = std::min(unexplored_lb, kid.lb);
                continue;
            }
            if (kid.lb >= incumbent - 1e-9) continue;
            if (opts_.target_gap > 0.0 && kid.lb >= incumbent * (1.0 - opts_.target_gap)) {
                pruned_lb = std::min(pruned_lb, kid.lb);
                continue;
            }
            if (out_of_budget()) {
                stopped = true;
                unexplored_lb = std::min(unexplored_lb, kid.lb);
                continue;
            }
            ++nodes;
            status_[hh][i] = opts[static_cast<std::size_t>(kid.idx)].next;
            if (last) {
                deepest = std::max(deepest, h + 1);
                visit(h + 1, 0, kid.acc);
            } else {
                visit(h, i + 1, kid.acc);
            }
        }
    }

    std::span<const ThermalUnit> units_;
    const UCInstance& inst_;
    BnbOptions opts_;
    detail::HourEvaluator eval_;
    std::size_t n_;
    int T_;
    std::vector<detail::UnitStatus> initial_;
    std::vector<std::vector<detail::UnitStatus>> status_;  // [hour][unit]
    struct HourKey {
        double nd;
        double reserve;
        bool traj;
        int hour;  // first hour with this key
    };
    std::vector<HourKey> keys_;
    std::vector<std::size_t> table_of_;  // hour -> table index
    std::vector<Table> plain_;           // trajectory energy at its fuel price
    std::vector<Table> amortized_;       // ... plus the start cost it implies
    std::chrono::steady_clock::time_point start_;
    Matrix best_u_;  // commitment of the incumbent when found by a heuristic
};

}  // namespace

UCSolution solve_bnb(std::span<const ThermalUnit> units, const UCInstance& inst, const BnbOptions& opts)
{
    if (units.size() > kMaxUnits)
        throw TooLargeError("branch and bound supports at most " + std::to_string(kMaxUnits) + " units");
    if (units.empty()) throw ValidationError("branch and bound needs at least one unit");

    Search s(units, inst, opts);
    s.seed();
    const auto lr = detail::lagrangian_bound(units, inst, s.evaluator(), s.incumbent, kLagrangeIterations);
    s.seed_from(lr.commitments);
    s.root_bound = lr.bound;
    const bool proven = std::isfinite(s.incumbent) &&
                        (opts.target_gap > 0.0 ? lr.bound >= s.incumbent * (1.0 - opts.target_gap)
                                               : lr.bound >= s.incumbent);
    if (proven) s.pruned_lb = lr.bound;
    else s.run();

    if (!std::isfinite(s.incumbent)) {
        if (s.stopped) {
            UCSolution none;
            none.hours = inst.hours;
            none.status = SolveStatus::NodeLimit;
            none.lower_bound = s.unexplored_lb;
            none.gap = kInf;
            none.nodes = s.nodes;
            return none;
        }
        int h = s.hopeless_hour();
        if (h < 0) h = std::min(s.deepest, inst.hours - 1);
        std::uint32_t all = 0;
        for (std::size_t i = 0; i < units.size(); ++i) all |= 1u << i;
        throw InfeasibleError("hour " + std::to_string(h) + ": no feasible commitment; " +
                                  s.evaluator().infeasibility_reason(h, all, 0.0),
                              h);
    }

    auto sol = price_schedule(units, inst, s.best_modes);
    const double ub = sol.total_cost();
    const double lb = std::min(ub, std::max({s.root_bound, std::min(s.pruned_lb, s.unexplored_lb)}));
    sol.lower_bound = lb;
    sol.gap = ub > 0.0 ? (ub - lb) / ub : 0.0;
    sol.nodes = s.nodes;
    if (s.stopped)
        sol.status = sol.gap <= opts.acceptable_gap ? SolveStatus::WithinGap : SolveStatus::NodeLimit;
    else
        sol.status = sol.gap > 1e-12 ? SolveStatus::WithinGap : SolveStatus::Optimal;
    return sol;
}

}  // namespace freqsec
