#include "freqsec/error.hpp"
#include "freqsec/fleet.hpp"
#include "freqsec/freqsim.hpp"
#include "freqsec/metrics.hpp"
#include "freqsec/scenario.hpp"
#include "freqsec/sweep.hpp"
#include "freqsec/uc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#ifndef FREQSEC_DATA_DIR
#define FREQSEC_DATA_DIR "data"
#endif

using namespace freqsec;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& detail)
{
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

const FleetConfig& fleet()
{
    static const FleetConfig f = load_fleet(std::string(FREQSEC_DATA_DIR) + "/fleet.json");
    return f;
}

ThermalUnit unit(const std::string& id, Technology tech, double rated, double r)
{
    ThermalUnit u;
    u.id = id;
    u.tech = tech;
    u.rated_power = rated;
    u.min_power = 0.2 * rated;
    u.inertia_h = tech == Technology::Diesel ? 2.45 : 5.0;
    u.droop_r = r;
    u.startup_types = {{1, 100.0}};
    for (std::size_t k = 0; k < kCostPieces; ++k)
        u.cost_segments.push_back({(rated - u.min_power) / kCostPieces, 40.0 + static_cast<double>(k)});
    return u;
}

void criterion_1()
{
    const auto t0 = Clock::now();
    const auto s = build_scenario(fleet(), 2, 1);
    const auto c = make_baseline_case(fleet(), s, false);
    const auto r = simulate(c, SimConfig{});
    const auto m = run_metrics(r.ts, r.trip_time);
    const double t = seconds_since(t0);
    const bool pass = std::abs(m.nadir - 49.4) <= 0.1 && std::abs(m.rocof_abs - 0.5) <= 0.1 && t < 5.0;
    report(1, pass, fmt("baseline nadir %.4f Hz, |RoCoF| %.4f Hz/s, %.2f s", m.nadir, m.rocof_abs, t));
}

void criterion_2()
{
    const double reference[kShedSteps][4] = {
        {48.9, 0.1, 14.6, 5.8}, {48.9, 0.2, 16.2, 7.0},  {48.8, 0.4, 17.1, 8.6}, {48.8, 0.6, 41.1, 18.8},
        {48.5, 0.1, 8.0, 4.1},  {48.5, 0.2, 27.3, 11.8}, {48.4, 0.4, 17.5, 7.7}, {48.1, 0.1, 17.9, 9.7},
    };
    const auto& sys = fleet().system;
    int matched = 0;
    for (std::size_t k = 0; k < kShedSteps; ++k) {
        const auto& st = sys.shed_table.steps[k];
        matched += st.threshold_hz == reference[k][0];
        matched += st.delay_s == reference[k][1];
        matched += st.shed_peak_mw == reference[k][2];
        matched += st.shed_valley_mw == reference[k][3];
    }
    const double peak_two = shed_amount(1, 550.0, sys) + shed_amount(2, 550.0, sys);
    report(2, matched == 32 && std::abs(peak_two - 30.8) < 1e-9,
           fmt("%.0f/32 table cells, two-step peak shed %.4f MW", matched, peak_two));
}

bool reserve_rule_holds(std::span<const ThermalUnit> units, const UCInstance& inst, const UCSolution& sol)
{
    for (int h = 0; h < inst.hours; ++h) {
        const auto hh = static_cast<std::size_t>(h);
        double spinning = 0.0, largest = 0.0, total = inst.wind_forecast[hh];
        for (std::size_t i = 0; i < units.size(); ++i) {
            total += sol.p[i][hh];
            if (!sol.u[i][hh]) continue;
            spinning += units[i].rated_power - sol.p[i][hh];
            largest = std::max(largest, sol.p[i][hh]);
        }
        const double rise = h + 1 < inst.hours ? std::max(0.0, inst.demand[hh + 1] - inst.demand[hh]) : 0.0;
        const double required = std::max({rise, inst.likely_wind_loss[hh], largest});
        if (spinning < required - kBalanceTol) return false;
        if (std::abs(total - inst.demand[hh]) > kBalanceTol) return false;
    }
    return true;
}

void criterion_3()
{
    std::mt19937 rng(20240607);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int matched = 0, compared = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 200 && compared < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int hours = 2 + static_cast<int>(rng() % 5);
        std::vector<ThermalUnit> units;
        double cap = 0.0;
        for (int i = 0; i < n; ++i) {
            auto u = fleet().units[rng() % fleet().units.size()];
            u.id = "U" + std::to_string(i);
            cap += u.rated_power;
            units.push_back(u);
        }
        UCInstance inst;
        inst.hours = hours;
        for (int h = 0; h < hours; ++h) {
            inst.demand.push_back((0.2 + 0.35 * u01(rng)) * cap);
            inst.wind_forecast.push_back(0.08 * u01(rng) * cap);
        }
        for (int i = 0; i < n; ++i) inst.initial.push_back({u01(rng) < 0.7, 1 + static_cast<int>(rng() % 10), 0.0});
        complete_defaults(inst);
        UCSolution exact;
        try {
            exact = solve_exact(units, inst);
        } catch (const InfeasibleError&) {
            continue;
        }
        ++compared;
        const auto bnb = solve_bnb(units, inst);
        const double diff = std::abs(bnb.total_cost() - exact.total_cost());
        worst = std::max(worst, diff);
        if (bnb.status == SolveStatus::Optimal && diff <= 1e-6 && reserve_rule_holds(units, inst, bnb)) ++matched;
    }

    const auto t0 = Clock::now();
    const auto inst = load_instance(std::string(FREQSEC_DATA_DIR) + "/peak_day.json", fleet().units);
    BnbOptions opts;
    opts.target_gap = 0.01;
    opts.time_limit_s = 60.0;
    const auto sol = solve_bnb(fleet().units, inst, opts);
    const double t = seconds_since(t0);
    const bool big_ok = !sol.u.empty() && sol.gap <= 0.01 && t < 60.0 && reserve_rule_holds(fleet().units, inst, sol);
    report(3, matched >= 50 && matched == compared && big_ok,
           fmt("%.0f/%.0f seeded instances equal exact (worst diff %.2e);", matched, compared, worst) +
               fmt(" 16x24 day gap %.5f in %.2f s", sol.gap, t));
}

void criterion_4()
{
    struct Case {
        std::vector<ThermalUnit> units;
        std::vector<double> p0;
        double step, expected;
    };
    const std::vector<Case> cases{
        {{unit("S1", Technology::Steam, 100, 0.05), unit("S2", Technology::Steam, 100, 0.05)}, {60, 60}, 20.0,
         -50.0 * 0.04 / 9.0},
        {{unit("S1", Technology::Steam, 80, 0.05), unit("G1", Technology::Gas, 40, 0.05),
          unit("C1", Technology::CombinedCycle, 120, 0.05)},
         {50, 20, 70},
         15.0,
         -50.0 * 0.03 / 10.6},
        {{unit("S1", Technology::Steam, 80, 0.05), unit("D1", Technology::Diesel, 20, 0.05),
          unit("D2", Technology::Diesel, 25, 0.04), unit("G1", Technology::Gas, 40, 0.05)},
         {50, 10, 12, 20},
         10.0,
         -50.0 * 0.02 / 7.85},
    };
    double worst = 0.0;
    for (const auto& c : cases) {
        SimCase sc;
        sc.units = c.units;
        sc.p0 = c.p0;
        sc.demand = std::accumulate(c.p0.begin(), c.p0.end(), 0.0);
        sc.contingency = Contingency::ConstantStep;
        sc.step_mw = c.step;
        sc.shedding = false;
        sc.agc = false;
        const auto r = simulate(sc, SimConfig{});
        const double df = r.ts.f.back() - 50.0;
        worst = std::max(worst, std::abs(df - c.expected) / std::abs(c.expected));
    }
    report(4, worst <= 0.01, fmt("worst relative droop error %.2e over 3 fleets", worst));
}

std::vector<const RunRecord*> runs(const SweepResult& r, bool baseline)
{
    std::vector<const RunRecord*> out;
    for (const auto& c : r.cells)
        for (int wc = 0; wc < 2; ++wc)
            if (c.scenario.feasible) out.push_back(baseline ? &c.baseline[wc] : &c.full[wc]);
    return out;
}

void criterion_5(const SweepResult& r)
{
    double worst = 0.0;
    int bad = 0, n = 0;
    for (bool b : {false, true})
        for (const auto* rec : runs(r, b)) {
            ++n;
            if (!rec->ok || rec->metrics.collapsed) {
                ++bad;
                continue;
            }
            worst = std::max(worst, std::abs(rec->metrics.final_df));
        }
    report(5, bad == 0 && worst < 5e-3, fmt("max |df(t_end)| %.3e Hz over %.0f runs, %.0f failed", worst, n, bad));
}

void criterion_6(const SweepResult& r)
{
    int exact = 0, cells = 0, base_zero = 0, base_n = 0;
    for (const auto& c : r.cells) {
        if (!c.scenario.feasible) continue;
        ++cells;
        std::vector<ThermalUnit> on;
        for (auto i : c.scenario.committed) on.push_back(fleet().units[i]);
        const auto& tripped = on[static_cast<std::size_t>(c.scenario.trip)];
        bool ok = true;
        for (const auto& rec : c.full) {
            const double expected = rec.result.tm_pre - 2.0 * tripped.inertia_h * tripped.rated_power /
                                                           fleet().system.s_base;
            ok = ok && rec.ok && rec.result.tm_pre == aggregate_inertia(on, fleet().system.s_base) &&
                 rec.result.tm_post == expected && rec.result.ts.t_m.back() == expected;
        }
        exact += ok;
        for (const auto& rec : c.baseline) {
            ++base_n;
            base_zero += rec.ok && rec.metrics.inertia_change == 0.0;
        }
    }
    report(6, cells == 30 && exact == cells && base_zero == base_n,
           fmt("post-trip inertia exact in %.0f/%.0f cells; baseline inertia change 0 in %.0f/%.0f runs", exact,
               cells, base_zero, base_n));
}

void criterion_7(const SweepResult& r)
{
    int more = 0, less = 0, n = 0;
    for (const auto& c : r.cells) {
        if (!c.scenario.feasible || !c.full[0].ok || !c.full[1].ok) continue;
        ++n;
        more += c.full[1].metrics.shed > c.full[0].metrics.shed + 1e-9;
        less += c.full[1].metrics.shed < c.full[0].metrics.shed - 1e-9;
    }
    const auto& s = r.summary;
    const bool a = more == 0 && less >= 1;
    const bool b = s.nadir[1].mean > s.nadir[0].mean;
    bool c = true;
    for (int wc = 0; wc < 2; ++wc)
        c = c && s.nadir[wc].variance > s.base_nadir[wc].variance && s.rocof[wc].variance > s.base_rocof[wc].variance;
    report(7, a && b && c,
           fmt("(a) shed up in %.0f, down in %.0f of %.0f cells; (b) mean nadir %.4f -> ", more, less, n,
               s.nadir[0].mean) +
               fmt("%.4f Hz; (c) nadir var %.3e vs %.3e, ", s.nadir[1].mean, s.nadir[0].variance,
                   s.base_nadir[0].variance) +
               fmt("rocof var %.3e vs %.3e", s.rocof[0].variance, s.base_rocof[0].variance));
}

void criterion_8(const SweepResult& r, const SweepResult& again)
{
    double residual = 0.0;
    for (bool b : {false, true})
        for (const auto* rec : runs(r, b))
            if (rec->ok) residual = std::max(residual, rec->result.max_residual);

    double worst_dt = 0.0;
    for (auto [row, col] : {std::pair{5, 3}, std::pair{0, 0}, std::pair{3, 2}}) {
        const auto& s = r.cells[static_cast<std::size_t>(row) * r.wind_levels.size() + static_cast<std::size_t>(col)]
                            .scenario;
        if (!s.feasible) continue;
        for (bool wc : {false, true}) {
            const auto c = make_case(fleet(), s, wc);
            SimConfig fine;
            fine.dt = 0.5e-3;
            SimConfig coarse;
            const auto a = simulate(c, coarse);
            const auto b = simulate(c, fine);
            worst_dt = std::max(worst_dt, std::abs(nadir(a.ts, a.trip_time) - nadir(b.ts, b.trip_time)));
        }
    }
    const bool identical = cells_csv(r) == cells_csv(again) && summary_csv(r.summary) == summary_csv(again.summary);
    bool series_identical = true;
    for (std::size_t k = 0; k < r.cells.size(); ++k)
        for (int wc = 0; wc < 2; ++wc)
            series_identical = series_identical && timeseries_csv(r.cells[k].full[wc].result.ts) ==
                                                       timeseries_csv(again.cells[k].full[wc].result.ts);
    report(8, worst_dt < 1e-3 && residual < 1e-8 && identical && series_identical,
           fmt("nadir change on halving dt %.2e Hz; max residual %.2e; reruns identical: ", worst_dt, residual) +
               (identical && series_identical ? "yes" : "no"));
}

void criterion_9(const SweepResult& r)
{
    double op = 0.0, omega_err = 0.0;
    int n = 0;
    for (const auto* rec : runs(r, false)) {
        if (!rec->ok || !rec->sim_case.wind_control) continue;
        ++n;
        op = std::max(op, rec->result.max_op_fraction);
        omega_err = std::max(omega_err, std::abs(rec->result.final_omega / rec->result.omega_mppt - 1.0));
    }

    // same cell, two recovery points
    const auto& s = r.cells[static_cast<std::size_t>(5) * r.wind_levels.size() + 3].scenario;
    double dip[2] = {0.0, 0.0};
    int k = 0;
    for (double x : {0.75, 0.95}) {
        FleetConfig f = fleet();
        f.wind.controller.recovery_x = x;
        const auto res = simulate(make_case(f, s, true), SimConfig{});
        dip[k++] = res.wind_p_pre * res.wind_units * f.wind.turbine_rating - res.min_wind_mw;
    }
    report(9, op <= 0.15 + 1e-12 && dip[1] < dip[0] && omega_err <= 0.01 && n > 0,
           fmt("max overproduction %.4f; wind dip x=0.75 %.3f MW, x=0.95 %.3f MW; ", op, dip[0], dip[1]) +
               fmt("max |omega/omega_mppt - 1| %.2e", omega_err));
}

}  // namespace

int main()
{
    try {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();

        SweepOptions opts;
        opts.jobs = 4;
        const auto t0 = Clock::now();
        const auto sweep = run_sweep(fleet(), opts);
        const double t_sweep = seconds_since(t0);
        opts.jobs = 1;
        const auto again = run_sweep(fleet(), opts);

        criterion_5(sweep);
        criterion_6(sweep);
        criterion_7(sweep);
        criterion_8(sweep, again);
        criterion_9(sweep);
        report(10, t_sweep < 600.0 && sweep.cells.size() == 30,
               fmt("sweep of %.0f cells x 2 settings (with baselines) in %.1f s using 4 workers",
                   static_cast<double>(sweep.cells.size()), t_sweep));
    } catch (const std::exception& e) {
        std::printf("error: %s\n", e.what());
        return 1;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
