// freqsec: unit commitment, frequency transients and scenario sweeps.

#include "freqsec/error.hpp"
#include "freqsec/metrics.hpp"
#include "freqsec/scenario.hpp"
#include "freqsec/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#ifndef FREQSEC_DEFAULT_CONFIG
#define FREQSEC_DEFAULT_CONFIG "data/fleet.json"
#endif
#ifndef FREQSEC_DEFAULT_INSTANCE
#define FREQSEC_DEFAULT_INSTANCE "data/peak_day.json"
#endif

namespace fs = std::filesystem;
using namespace freqsec;

namespace {

enum Exit : int { kOk = 0, kIo = 1, kInfeasible = 2, kGapNotMet = 3, kCollapse = 4 };

constexpr const char* kOutEnv = "FREQSEC_OUT";

struct Common {
    std::string config = FREQSEC_DEFAULT_CONFIG;
    std::string out;
    std::string cell;
};

fs::path out_dir(const Common& c)
{
    if (!c.out.empty()) return c.out;
    if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') return env;
    return "out";
}

std::pair<int, int> parse_cell(const std::string& s, const FleetConfig& fleet)
{
    int r = -1, c = -1;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%d,%d%c", &r, &c, &extra) != 2)
        throw ValidationError("--cell expects ROW,COL (zero-based), got '" + s + "'");
    const int rows = static_cast<int>(fleet.levels.demand.size());
    const int cols = static_cast<int>(fleet.levels.wind.size());
    if (r < 0 || c < 0 || r >= rows || c >= cols)
        throw ValidationError("cell " + s + " outside the " + std::to_string(rows) + "x" + std::to_string(cols) +
                              " grid");
    return {r, c};
}

void print_solution(const UCSolution& sol)
{
    std::printf("status=%s total_cost=%s lower_bound=%s gap=%s nodes=%lld\n",
                std::string(to_string(sol.status)).c_str(), format_number(sol.total_cost()).c_str(),
                format_number(sol.lower_bound).c_str(), format_number(sol.gap).c_str(), sol.nodes);
    std::printf("cost startup=%s fuel=%s om=%s wear_tear=%s\n", format_number(sol.cost.startup).c_str(),
                format_number(sol.cost.fuel).c_str(), format_number(sol.cost.om).c_str(),
                format_number(sol.cost.wear_tear).c_str());
    for (int h = 0; h < sol.hours; ++h) {
        const auto hh = static_cast<std::size_t>(h);
        std::printf("hour=%d spinning_mw=%s required_mw=%s margin_mw=%s\n", h,
                    format_number(sol.spinning_reserve[hh]).c_str(), format_number(sol.reserve_required[hh]).c_str(),
                    format_number(sol.reserve_margin[hh]).c_str());
    }
}

int cmd_uc(const Common& common, const std::string& instance_path, const BnbOptions& opts)
{
    const auto fleet = load_fleet(common.config);
    UCInstance inst;
    std::string stem = "uc";
    if (!common.cell.empty()) {
        const auto [r, c] = parse_cell(common.cell, fleet);
        inst = flat_instance(fleet, fleet.levels.demand[static_cast<std::size_t>(r)],
                             fleet.levels.wind[static_cast<std::size_t>(c)]);
        stem = "uc_r" + std::to_string(r) + "c" + std::to_string(c);
    } else {
        inst = load_instance(instance_path, fleet.units);
        complete_defaults(inst);
        validate(inst, fleet.units, fleet.wind.installed_capacity);
    }
    const auto sol = solve_bnb(fleet.units, inst, opts);
    if (sol.u.empty()) {
        std::fprintf(stderr, "error: no schedule found within the node budget\n");
        return kGapNotMet;
    }
    const auto dir = out_dir(common);
    write_file(dir / (stem + ".json"), dump_solution(sol));
    write_file(dir / (stem + ".csv"), solution_csv(sol));
    print_solution(sol);
    for (const auto& v : validate_solution(fleet.units, inst, sol))
        std::fprintf(stderr, "warning: %s hour %d: %s\n", v.unit.c_str(), v.hour, v.message.c_str());
    if (sol.status == SolveStatus::NodeLimit) {
        std::fprintf(stderr, "error: gap %s above the acceptable %s\n", format_number(sol.gap).c_str(),
                     format_number(opts.acceptable_gap).c_str());
        return kGapNotMet;
    }
    return kOk;
}

struct SimFlags {
    std::string wind_control = "off";
    bool baseline = false;
    std::optional<double> dt, t_end, stride;
};

SimConfig sim_config(const SimFlags& f, SimConfig cfg)
{
    if (f.dt) cfg.dt = *f.dt;
    if (f.t_end) cfg.t_end = *f.t_end;
    if (f.stride) cfg.sample_stride = *f.stride;
    validate(cfg);
    return cfg;
}

int cmd_simulate(const Common& common, const SimFlags& flags)
{
    const auto fleet = load_fleet(common.config);
    if (common.cell.empty()) throw ValidationError("simulate needs --cell ROW,COL");
    const auto [r, c] = parse_cell(common.cell, fleet);
    const auto cfg = sim_config(flags, SimConfig{});
    const bool wc = flags.wind_control == "on";

    const auto s = build_scenario(fleet, r, c);
    if (!s.feasible) throw InfeasibleError("cell " + common.cell + ": " + s.error, s.infeasible_hour);
    const auto sc = flags.baseline ? make_baseline_case(fleet, s, wc) : make_case(fleet, s, wc);
    const auto res = simulate(sc, cfg);
    auto m = run_metrics(res.ts, res.trip_time, sc.system.f0);
    m.collapsed = res.collapsed;

    const auto dir = out_dir(common);
    const auto stem = run_stem(r, c, flags.baseline, wc);
    write_file(dir / (stem + ".csv"), timeseries_csv(res.ts));
    write_file(dir / (stem + ".json"), run_metadata(sc, cfg, res));
    std::printf("cell=%d,%d model=%s wind_control=%s nadir_hz=%s rocof_hz_s=%s shed_mw=%s inertia_change_s=%s "
                "final_df_hz=%s collapsed=%d\n",
                r, c, flags.baseline ? "baseline" : "full", wc ? "on" : "off", format_number(m.nadir).c_str(),
                format_number(m.rocof).c_str(), format_number(m.shed).c_str(),
                format_number(m.inertia_change).c_str(), format_number(m.final_df).c_str(), m.collapsed ? 1 : 0);
    if (res.collapsed) {
        std::fprintf(stderr, "error: frequency collapse below %s Hz at t=%s s\n", format_number(cfg.collapse_hz).c_str(),
                     format_number(res.collapse_time).c_str());
        return kCollapse;
    }
    return kOk;
}

int cmd_sweep(const Common& common, const SimFlags& flags, int jobs, bool series)
{
    const auto fleet = load_fleet(common.config);
    SweepOptions opts;
    opts.sim = sim_config(flags, SweepOptions::default_sim());
    opts.jobs = jobs;
    const auto res = run_sweep(fleet, opts);
    write_sweep(res, out_dir(common), series);
    std::fputs(summary_table(res.summary).c_str(), stdout);
    int failed = 0;
    for (const auto& c : res.cells) {
        for (const RunRecord* rec : {&c.full[0], &c.full[1], &c.baseline[0], &c.baseline[1]}) {
            if (rec->ok && !rec->metrics.collapsed) continue;
            ++failed;
            std::fprintf(stderr, "cell %d,%d: %s\n", c.scenario.row, c.scenario.col,
                         rec->ok ? "frequency collapse" : rec->error.c_str());
        }
    }
    std::printf("cells=%zu runs=%zu failed_or_collapsed=%d\n", res.cells.size(), res.cells.size() * 4, failed);
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Frequency security of an isolated thermal + wind system"};
    app.require_subcommand(1);
    Common common;
    SimFlags flags;
    std::string instance = FREQSEC_DEFAULT_INSTANCE;
    BnbOptions bnb;
    bnb.target_gap = 0.01;
    bnb.time_limit_s = 60.0;
    int jobs = 1;
    bool no_series = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "Fleet configuration (JSON)")->capture_default_str();
        sub->add_option("--out", common.out, std::string("Output directory (default: $") + kOutEnv + " or ./out)");
    };
    const auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--dt", flags.dt, "Integration step, s (default 0.001)");
        sub->add_option("--t-end", flags.t_end, "Simulated time, s (default 300)");
        sub->add_option("--stride", flags.stride, "Sampling interval of the written series, s");
    };

    auto* uc = app.add_subcommand("uc", "Solve a unit commitment instance");
    add_common(uc);
    uc->add_option("--instance", instance, "UC instance (JSON)")->capture_default_str();
    uc->add_option("--cell", common.cell, "Solve the flat day of grid cell ROW,COL instead of --instance");
    uc->add_option("--gap", bnb.target_gap, "Target relative gap")->capture_default_str();
    uc->add_option("--node-limit", bnb.node_limit, "Branch-and-bound node budget")->capture_default_str();
    uc->add_option("--time-limit", bnb.time_limit_s, "Wall-clock budget, s")->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "Simulate the N-1 event of one grid cell");
    add_common(sim);
    add_sim(sim);
    sim->add_option("--cell", common.cell, "Grid cell ROW,COL (zero-based: demand level, wind level)")->required();
    sim->add_option("--wind-control", flags.wind_control, "Wind frequency controller")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    sim->add_flag("--baseline", flags.baseline, "Constant-inertia 10 % step comparison model");

    auto* sweep = app.add_subcommand("sweep", "Run every cell with and without wind control");
    add_common(sweep);
    add_sim(sweep);
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_flag("--no-series", no_series, "Skip the per-run series files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kIo;
    }

    try {
        if (*uc) return cmd_uc(common, instance, bnb);
        if (*sim) return cmd_simulate(common, flags);
        if (*sweep) return cmd_sweep(common, flags, jobs, !no_series);
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        if (e.hour() >= 0) std::fprintf(stderr, "violated hour: %d\n", e.hour());
        return kInfeasible;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\nsee --help for usage\n", e.what());
        return kIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIo;
    }
    return kIo;
}
