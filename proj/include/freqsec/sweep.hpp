#pragma once

#include "freqsec/metrics.hpp"
#include "freqsec/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace freqsec {

/// One simulation of a cell; `ok` false when it could not be set up or run.
struct RunRecord {
    bool ok = false;
    std::string error;
    SimCase sim_case;
    SimResult result;
    RunMetrics metrics;
};

/// A cell with its four runs, indexed [without, with] wind control.
struct CellRecord {
    Scenario scenario;
    RunRecord full[2];
    RunRecord baseline[2];
};

struct SweepOptions {
    SimConfig sim = default_sim();
    BnbOptions solver = grid_solver_options();
    int jobs = 1;

    /// Coarser sampling than a single run keeps 120 series files small.
    static SimConfig default_sim()
    {
        SimConfig c;
        c.sample_stride = 0.1;
        return c;
    }
};

struct SweepResult {
    std::vector<double> demand_levels;
    std::vector<double> wind_levels;
    std::vector<CellRecord> cells;  // row-major: demand x wind
    SimConfig sim;
    Summary summary;
};

/// Solves every cell, then runs full and baseline models with and without
/// wind control. Failures are recorded per run; the sweep always completes.
SweepResult run_sweep(const FleetConfig& fleet, const SweepOptions& opts);

/// Metrics of the runs that completed; used by the summary.
CellMetrics cell_metrics(const CellRecord& cell);

/// One line per cell: operating point, contingency and the four runs' metrics.
std::string cells_csv(const SweepResult& r);

enum class PlotMetric { Nadir, Rocof, Shed };
std::string_view to_string(PlotMetric m);

/// Demand x wind matrix of one metric; empty fields for missing runs.
std::string plot_matrix_csv(const SweepResult& r, PlotMetric m, bool wind_control);
/// Same matrix in gnuplot's nonuniform matrix layout (NaN for missing runs).
std::string plot_matrix_dat(const SweepResult& r, PlotMetric m, bool wind_control);

/// File stem of one run, e.g. r2c3_full_on.
std::string run_stem(int row, int col, bool baseline, bool wind_control);

/// Writes cells.csv, summary.txt, summary.csv, plot matrices and, when
/// `series` is set, every run's series CSV and metadata JSON under series/.
void write_sweep(const SweepResult& r, const std::filesystem::path& dir, bool series = true);

/// Writes `text` to `path`, creating parent directories; throws IoError.
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace freqsec
