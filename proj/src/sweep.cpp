#include "freqsec/sweep.hpp"

#include "freqsec/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

namespace freqsec {

namespace {

void run_one(RunRecord& rec, const SimCase& c, const SimConfig& cfg)
{
    try {
        rec.sim_case = c;
        rec.result = simulate(c, cfg);
        rec.metrics = run_metrics(rec.result.ts, rec.result.trip_time, c.system.f0);
        rec.metrics.collapsed = rec.result.collapsed;
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
}

template <class F>
void parallel_for(int count, int jobs, F body)
{
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k = next++; k < count; k = next++) body(k);
    };
    const int n = std::clamp(jobs, 1, std::max(count, 1));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

std::string csv_number(double v) { return std::isfinite(v) ? format_number(v) : ""; }

std::string csv_quoted(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

double metric_value(const RunRecord& r, PlotMetric m)
{
    if (!r.ok || !r.metrics.valid) return std::nan("");
    switch (m) {
    case PlotMetric::Nadir: return r.metrics.nadir;
    case PlotMetric::Rocof: return r.metrics.rocof;
    case PlotMetric::Shed: return r.metrics.shed;
    }
    return std::nan("");
}

}  // namespace

SweepResult run_sweep(const FleetConfig& fleet, const SweepOptions& opts)
{
    validate(opts.sim);
    SweepResult r;
    r.sim = opts.sim;
    const auto grid = build_grid(fleet, opts.solver, opts.jobs);
    r.demand_levels = grid.demand_levels;
    r.wind_levels = grid.wind_levels;
    r.cells.resize(grid.cells.size());
    for (std::size_t k = 0; k < grid.cells.size(); ++k) r.cells[k].scenario = grid.cells[k];

    const int runs = static_cast<int>(r.cells.size()) * 4;
    parallel_for(runs, opts.jobs, [&](int k) {
        auto& cell = r.cells[static_cast<std::size_t>(k / 4)];
        const int kind = k % 4;
        const bool baseline = kind >= 2;
        const bool wc = kind % 2 == 1;
        auto& rec = baseline ? cell.baseline[wc] : cell.full[wc];
        if (!cell.scenario.feasible) {
            rec.error = cell.scenario.error;
            return;
        }
        const auto c = baseline ? make_baseline_case(fleet, cell.scenario, wc) : make_case(fleet, cell.scenario, wc);
        run_one(rec, c, opts.sim);
    });

    std::vector<CellMetrics> metrics;
    for (const auto& c : r.cells)
        if (c.scenario.feasible) metrics.push_back(cell_metrics(c));
    r.summary = summarize(metrics);
    return r;
}

CellMetrics cell_metrics(const CellRecord& cell)
{
    CellMetrics m;
    for (int k = 0; k < 2; ++k) {
        if (cell.full[k].ok) m.full[k] = cell.full[k].metrics;
        if (cell.baseline[k].ok) m.baseline[k] = cell.baseline[k].metrics;
    }
    return m;
}

std::string cells_csv(const SweepResult& r)
{
    std::string out = "row,col,demand_mw,wind_mw,feasible,uc_status,uc_gap,committed,tripped_unit,imbalance_mw,"
                      "imbalance_pct,tm_pre_s,tm_post_s";
    const char* runs[] = {"full_off", "full_on", "base_off", "base_on"};
    for (const char* run : runs)
        for (const char* f : {"nadir_hz", "rocof_hz_s", "shed_mw", "inertia_change_s", "final_df_hz", "collapsed"})
            out += std::string(",") + run + "_" + f;
    out += ",error\n";

    for (const auto& c : r.cells) {
        const auto& s = c.scenario;
        std::string committed;
        for (std::size_t i = 0; i < s.committed.size(); ++i)
            committed += (i ? ";" : "") + s.schedule.unit_ids.at(s.committed[i]);
        out += std::to_string(s.row) + ',' + std::to_string(s.col) + ',' + format_number(s.demand) + ',' +
               format_number(s.wind) + ',' + (s.feasible ? "1" : "0") + ',';
        out += s.schedule.u.empty() ? std::string(",,") : std::string(to_string(s.schedule.status)) + ',' +
                                                          csv_number(s.schedule.gap) + ',';
        out += committed + ',' + s.tripped_unit + ',';
        if (s.feasible)
            out += format_number(s.imbalance_mw) + ',' + format_number(s.imbalance_pct) + ',' +
                   format_number(s.tm_pre) + ',' + format_number(s.tm_post);
        else
            out += ",,,";
        std::string error = s.error;
        for (const RunRecord* rec : {&c.full[0], &c.full[1], &c.baseline[0], &c.baseline[1]}) {
            if (rec->ok) {
                const auto& m = rec->metrics;
                out += ',' + format_number(m.nadir) + ',' + format_number(m.rocof) + ',' + format_number(m.shed) + ',' +
                       format_number(m.inertia_change) + ',' + format_number(m.final_df) + ',' +
                       (m.collapsed ? "1" : "0");
            } else {
                out += ",,,,,,";
                if (error.empty()) error = rec->error;
            }
        }
        out += ',' + (error.empty() ? std::string() : csv_quoted(error)) + '\n';
    }
    return out;
}

std::string_view to_string(PlotMetric m)
{
    switch (m) {
    case PlotMetric::Nadir: return "nadir";
    case PlotMetric::Rocof: return "rocof";
    case PlotMetric::Shed: return "shed";
    }
    return "?";
}

std::string plot_matrix_csv(const SweepResult& r, PlotMetric m, bool wind_control)
{
    std::string out = "demand_mw\\wind_mw";
    for (double w : r.wind_levels) out += ',' + format_number(w);
    out += '\n';
    const std::size_t cols = r.wind_levels.size();
    for (std::size_t i = 0; i < r.demand_levels.size(); ++i) {
        out += format_number(r.demand_levels[i]);
        for (std::size_t j = 0; j < cols; ++j)
            out += ',' + csv_number(metric_value(r.cells[i * cols + j].full[wind_control], m));
        out += '\n';
    }
    return out;
}

std::string plot_matrix_dat(const SweepResult& r, PlotMetric m, bool wind_control)
{
    // first row: column count then the x (wind) coordinates; each next row: y (demand) then values
    const std::size_t cols = r.wind_levels.size();
    std::string out = std::to_string(cols);
    for (double w : r.wind_levels) out += ' ' + format_number(w);
    out += '\n';
    for (std::size_t i = 0; i < r.demand_levels.size(); ++i) {
        out += format_number(r.demand_levels[i]);
        for (std::size_t j = 0; j < cols; ++j) {
            const double v = metric_value(r.cells[i * cols + j].full[wind_control], m);
            out += ' ' + (std::isfinite(v) ? format_number(v) : std::string("NaN"));
        }
        out += '\n';
    }
    return out;
}

std::string run_stem(int row, int col, bool baseline, bool wind_control)
{
    return "r" + std::to_string(row) + "c" + std::to_string(col) + (baseline ? "_base_" : "_full_") +
           (wind_control ? "on" : "off");
}

void write_file(const std::filesystem::path& path, std::string_view text)
{
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_sweep(const SweepResult& r, const std::filesystem::path& dir, bool series)
{
    write_file(dir / "cells.csv", cells_csv(r));
    write_file(dir / "summary.txt", summary_table(r.summary));
    write_file(dir / "summary.csv", summary_csv(r.summary));
    for (auto m : {PlotMetric::Nadir, PlotMetric::Rocof, PlotMetric::Shed})
        for (bool wc : {false, true}) {
            const std::string stem = "plot_" + std::string(to_string(m)) + (wc ? "_on" : "_off");
            write_file(dir / "plots" / (stem + ".csv"), plot_matrix_csv(r, m, wc));
            write_file(dir / "plots" / (stem + ".dat"), plot_matrix_dat(r, m, wc));
        }
    if (!series) return;
    for (const auto& c : r.cells)
        for (int b = 0; b < 2; ++b)
            for (int wc = 0; wc < 2; ++wc) {
                const auto& rec = b ? c.baseline[wc] : c.full[wc];
                if (!rec.ok) continue;
                const auto stem = run_stem(c.scenario.row, c.scenario.col, b == 1, wc == 1);
                write_file(dir / "series" / (stem + ".csv"), timeseries_csv(rec.result.ts));
                write_file(dir / "series" / (stem + ".json"), run_metadata(rec.sim_case, r.sim, rec.result));
            }
}

}  // namespace freqsec
