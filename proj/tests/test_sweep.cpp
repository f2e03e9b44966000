#include "support.hpp"

#include "freqsec/error.hpp"
#include "freqsec/sweep.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace freqsec;
using namespace freqsec::test;

namespace {

RunRecord record(double nadir, double rocof, double shed)
{
    RunRecord r;
    r.ok = true;
    r.metrics.valid = true;
    r.metrics.nadir = nadir;
    r.metrics.rocof = rocof;
    r.metrics.rocof_abs = std::abs(rocof);
    r.metrics.shed = shed;
    return r;
}

SweepResult toy()
{
    SweepResult r;
    r.demand_levels = {450.0};
    r.wind_levels = {60.0, 90.0};
    r.cells.resize(2);
    for (int j = 0; j < 2; ++j) {
        auto& s = r.cells[static_cast<std::size_t>(j)].scenario;
        s.row = 0;
        s.col = j;
        s.demand = 450.0;
        s.wind = r.wind_levels[static_cast<std::size_t>(j)];
    }
    r.cells[0].scenario.feasible = true;
    r.cells[0].full[0] = record(48.75, -1.25, 30.8);
    r.cells[0].full[1] = record(48.875, -1.0, 14.6);
    r.cells[1].scenario.feasible = false;
    r.cells[1].scenario.error = "no \"feasible\" schedule";
    return r;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("run stems")
{
    CHECK(run_stem(2, 3, false, true) == "r2c3_full_on");
    CHECK(run_stem(0, 4, true, false) == "r0c4_base_off");
}

TEST_CASE("plot matrices")
{
    const auto r = toy();
    CHECK(plot_matrix_csv(r, PlotMetric::Nadir, false) == "demand_mw\\wind_mw,60,90\n450,48.75,\n");
    CHECK(plot_matrix_csv(r, PlotMetric::Shed, true) == "demand_mw\\wind_mw,60,90\n450,14.6,\n");
    CHECK(plot_matrix_dat(r, PlotMetric::Rocof, false) == "2 60 90\n450 -1.25 NaN\n");
}

TEST_CASE("cells table")
{
    const auto csv = cells_csv(toy());
    std::istringstream in(csv);
    std::string header, first, second, extra;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, second);
    CHECK_FALSE(std::getline(in, extra));
    CHECK(header.rfind("row,col,demand_mw,wind_mw,feasible,", 0) == 0);
    CHECK(header.find("full_off_nadir_hz") != std::string::npos);
    CHECK(header.find("base_on_collapsed") != std::string::npos);
    CHECK(first.rfind("0,0,450,60,1,", 0) == 0);
    CHECK(first.find("48.75") != std::string::npos);
    CHECK(second.rfind("0,1,450,90,0,", 0) == 0);
    CHECK(second.find("\"no \"\"feasible\"\" schedule\"") != std::string::npos);

    auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    CHECK(count(first) == count(header));
}

TEST_CASE("write_file reports unwritable paths")
{
    const auto dir = std::filesystem::temp_directory_path() / "freqsec_test_sweep";
    std::filesystem::remove_all(dir);
    write_file(dir / "a" / "b.txt", "x\n");
    CHECK(slurp(dir / "a" / "b.txt") == "x\n");
    write_file(dir / "blocker", "");
    CHECK_THROWS_AS(write_file(dir / "blocker" / "c.txt", "y"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("written outputs match the records")
{
    const auto& fleet = default_fleet();
    SweepResult r;
    r.demand_levels = {fleet.levels.demand[2]};
    r.wind_levels = {fleet.levels.wind[1]};
    r.sim = SweepOptions::default_sim();
    r.cells.resize(1);
    auto& cell = r.cells[0];
    cell.scenario = build_scenario(fleet, 2, 1);
    REQUIRE(cell.scenario.feasible);
    for (int wc = 0; wc < 2; ++wc) {
        auto& rec = cell.full[wc];
        rec.sim_case = make_case(fleet, cell.scenario, wc == 1);
        rec.result = simulate(rec.sim_case, r.sim);
        rec.metrics = run_metrics(rec.result.ts, rec.result.trip_time);
        rec.ok = true;
    }
    const std::vector<CellMetrics> cm{cell_metrics(cell)};
    r.summary = summarize(cm);

    const auto dir = std::filesystem::temp_directory_path() / "freqsec_test_sweep_out";
    std::filesystem::remove_all(dir);
    write_sweep(r, dir);
    for (const char* f : {"cells.csv", "summary.txt", "summary.csv", "plots/plot_nadir_off.csv",
                          "plots/plot_shed_on.dat", "series/r2c1_full_off.csv", "series/r2c1_full_on.json"})
        CHECK_MESSAGE(std::filesystem::exists(dir / f), f);
    CHECK_FALSE(std::filesystem::exists(dir / "series/r2c1_base_off.csv"));

    // metrics recomputed from the written series agree with the summary
    for (int wc = 0; wc < 2; ++wc) {
        const auto ts = parse_timeseries_csv(slurp(dir / "series" / (run_stem(2, 1, false, wc == 1) + ".csv")));
        const auto m = run_metrics(ts, cell.full[wc].result.trip_time);
        CHECK(m.nadir == doctest::Approx(r.summary.nadir[wc].mean).epsilon(1e-9));
        CHECK(m.rocof_abs == doctest::Approx(r.summary.rocof[wc].mean).epsilon(1e-9));
        CHECK(m.shed == doctest::Approx(r.summary.shed[wc].mean).epsilon(1e-9));
    }
    std::filesystem::remove_all(dir);
}
