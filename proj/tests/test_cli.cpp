#include "support.hpp"

#include "freqsec/sweep.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace freqsec;
using namespace freqsec::test;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + (env.empty() ? "" : " ") + FREQSEC_CLI + std::string(" ") + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), p)) r.out += buf.data();
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double field(const std::string& out, const std::string& key)
{
    const auto pos = out.find(key + "=");
    REQUIRE(pos != std::string::npos);
    return std::stod(out.substr(pos + key.size() + 1));
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name)
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

FleetConfig small_fleet()
{
    FleetConfig f = default_fleet();
    f.units = {make_unit("A", Technology::Steam, 100.0, 20.0, 40.0), make_unit("B", Technology::Gas, 80.0, 15.0, 55.0),
               make_unit("C", Technology::Diesel, 25.0, 5.0, 90.0, 2.0)};
    f.units[1].startup_types = {{1, 60.0}, {4, 140.0}};
    return f;
}

}  // namespace

TEST_CASE("usage and I/O errors exit with 1")
{
    CHECK(run("").code == 1);
    CHECK(run("simulate --cell 9,9").code == 1);
    CHECK(run("uc --config /nonexistent/fleet.json").code == 1);
    CHECK(run("uc --instance /nonexistent/day.json").code == 1);
    CHECK(run("--help").code == 0);
}

TEST_CASE("infeasible instance exits with 2 and names the hour")
{
    TempDir dir("freqsec_cli_infeasible");
    const auto fleet = small_fleet();
    write_file(dir.path / "fleet.json", dump_fleet(fleet));
    const auto inst = make_instance({100.0, 105.0, 210.0}, {10.0, 10.0, 10.0}, fleet.units.size());
    write_file(dir.path / "day.json", dump_instance(inst, fleet.units));
    const auto r = run("uc --config " + (dir.path / "fleet.json").string() + " --instance " +
                       (dir.path / "day.json").string() + " --out " + (dir.path / "out").string());
    CHECK(r.code == 2);
    INFO(r.out);
    CHECK(r.out.find("violated hour: 2") != std::string::npos);
}

TEST_CASE("small instance matches the exact optimum and writes both formats")
{
    TempDir dir("freqsec_cli_uc");
    const auto fleet = small_fleet();
    write_file(dir.path / "fleet.json", dump_fleet(fleet));
    auto inst = make_instance({70.0, 100.0, 120.0, 90.0, 50.0}, {20.0, 25.0, 20.0, 15.0, 10.0}, fleet.units.size());
    inst.initial[1] = {false, 3, 0.0};
    inst.initial[2] = {false, 6, 0.0};
    write_file(dir.path / "day.json", dump_instance(inst, fleet.units));
    const auto r = run("uc --gap 0 --config " + (dir.path / "fleet.json").string() + " --instance " +
                       (dir.path / "day.json").string() + " --out " + (dir.path / "out").string());
    INFO(r.out);
    REQUIRE(r.code == 0);
    const auto exact = solve_exact(fleet.units, inst);
    const auto sol = parse_solution(slurp(dir.path / "out" / "uc.json"));
    CHECK(sol.total_cost() == doctest::Approx(exact.total_cost()).epsilon(1e-9));
    CHECK(field(r.out, "total_cost") == doctest::Approx(exact.total_cost()).epsilon(1e-6));
    CHECK(slurp(dir.path / "out" / "uc.csv").rfind("unit,h0,h1", 0) == 0);
    CHECK(r.out.find("hour=4 spinning_mw=") != std::string::npos);
}

TEST_CASE("simulate: baseline, determinism, shared pre-trip segment, output directory")
{
    TempDir dir("freqsec_cli_sim");
    const auto a = dir.path / "a";
    const auto b = dir.path / "b";

    auto r = run("simulate --cell 2,1 --baseline --out " + a.string());
    INFO(r.out);
    REQUIRE(r.code == 0);
    CHECK(field(r.out, "nadir_hz") == doctest::Approx(49.39).epsilon(0.1 / 49.39));
    CHECK(fs::exists(a / "r2c1_base_off.csv"));
    CHECK(fs::exists(a / "r2c1_base_off.json"));

    REQUIRE(run("simulate --cell 2,1 --out " + a.string()).code == 0);
    REQUIRE(run("simulate --cell 2,1", "FREQSEC_OUT=" + b.string()).code == 0);
    const auto first = slurp(a / "r2c1_full_off.csv");
    CHECK_FALSE(first.empty());
    CHECK(first == slurp(b / "r2c1_full_off.csv"));
    CHECK(slurp(a / "r2c1_full_off.json") == slurp(b / "r2c1_full_off.json"));
    CHECK(first.rfind("t,f,P_T,P_J,P_w,P_d,shed,T_m\n", 0) == 0);

    // --out wins over the environment
    REQUIRE(run("simulate --cell 2,1 --wind-control on --out " + a.string(), "FREQSEC_OUT=" + b.string()).code == 0);
    CHECK(fs::exists(a / "r2c1_full_on.csv"));
    CHECK_FALSE(fs::exists(b / "r2c1_full_on.csv"));

    const auto on = parse_timeseries_csv(slurp(a / "r2c1_full_on.csv"));
    const auto off = parse_timeseries_csv(first);
    const double trip = SimConfig{}.trip_time;
    REQUIRE(on.t.size() == off.t.size());
    std::size_t compared = 0;
    for (std::size_t k = 0; k < on.t.size() && on.t[k] < trip; ++k, ++compared) {
        CHECK(on.f[k] == off.f[k]);
        CHECK(on.p_w[k] == off.p_w[k]);
    }
    CHECK(compared > 0);
}
