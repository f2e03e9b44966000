#include "freqsec/error.hpp"
#include "freqsec/uc.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace freqsec {

using nlohmann::json;

UCInstance parse_instance(std::string_view text, std::span<const ThermalUnit> units)
{
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("UC instance: ") + e.what());
    }
    UCInstance inst;
    try {
        inst.demand = j.at("demand").get<std::vector<double>>();
        inst.hours = j.value("hours", static_cast<int>(inst.demand.size()));
        inst.wind_forecast = j.value("wind_forecast", std::vector<double>(inst.demand.size(), 0.0));
        if (auto it = j.find("likely_wind_loss"); it != j.end() && !it->is_null())
            inst.likely_wind_loss = it->get<std::vector<double>>();
        inst.initial.assign(units.size(), InitialUnitState{});
        if (auto it = j.find("initial"); it != j.end()) {
            for (const auto& [id, js] : it->items()) {
                auto pos = std::find_if(units.begin(), units.end(), [&](const ThermalUnit& u) { return u.id == id; });
                if (pos == units.end()) throw ParseError("UC instance: initial state for unknown unit '" + id + "'");
                auto& s = inst.initial[static_cast<std::size_t>(pos - units.begin())];
                s.on = js.value("on", s.on);
                s.hours = js.value("hours", s.hours);
                s.output = js.value("output", s.output);
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("UC instance: ") + e.what());
    }
    complete_defaults(inst);
    validate(inst, units);
    return inst;
}

UCInstance load_instance(const std::filesystem::path& path, std::span<const ThermalUnit> units)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open UC instance '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str(), units);
}

std::string dump_instance(const UCInstance& inst, std::span<const ThermalUnit> units)
{
    json init = json::object();
    for (std::size_t i = 0; i < units.size() && i < inst.initial.size(); ++i) {
        const auto& s = inst.initial[i];
        init[units[i].id] = {{"on", s.on}, {"hours", s.hours}, {"output", s.output}};
    }
    json j{{"hours", inst.hours},
           {"demand", inst.demand},
           {"wind_forecast", inst.wind_forecast},
           {"likely_wind_loss", inst.likely_wind_loss},
           {"initial", init}};
    return j.dump(2) + "\n";
}

std::string dump_solution(const UCSolution& sol)
{
    json units = json::array();
    for (std::size_t i = 0; i < sol.unit_ids.size(); ++i) {
        units.push_back({{"id", sol.unit_ids[i]},
                         {"u", sol.u[i]},
                         {"p", sol.p[i]},
                         {"startup", sol.startup[i]},
                         {"startup_type", sol.startup_type[i]},
                         {"startup_cost", sol.startup_cost[i]}});
    }
    const auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    json j{{"status", std::string(to_string(sol.status))},
           {"hours", sol.hours},
           {"total_cost", sol.total_cost()},
           {"cost",
            {{"startup", sol.cost.startup}, {"fuel", sol.cost.fuel}, {"om", sol.cost.om},
             {"wear_tear", sol.cost.wear_tear}}},
           {"lower_bound", num(sol.lower_bound)},
           {"gap", num(sol.gap)},
           {"nodes", sol.nodes},
           {"spinning_reserve", sol.spinning_reserve},
           {"reserve_required", sol.reserve_required},
           {"reserve_margin", sol.reserve_margin},
           {"units", units}};
    return j.dump(2) + "\n";
}

UCSolution parse_solution(std::string_view text)
{
    UCSolution s;
    try {
        const json j = json::parse(text);
        const auto st = j.at("status").get<std::string>();
        if (st == "optimal") s.status = SolveStatus::Optimal;
        else if (st == "within_gap") s.status = SolveStatus::WithinGap;
        else if (st == "node_limit") s.status = SolveStatus::NodeLimit;
        else if (st == "infeasible") s.status = SolveStatus::Infeasible;
        else throw ParseError("UC solution: unknown status '" + st + "'");
        s.hours = j.at("hours").get<int>();
        const auto& c = j.at("cost");
        s.cost = {c.at("startup").get<double>(), c.at("fuel").get<double>(), c.at("om").get<double>(),
                  c.at("wear_tear").get<double>()};
        const auto opt = [](const json& v) {
            return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
        };
        s.lower_bound = opt(j.at("lower_bound"));
        s.gap = opt(j.at("gap"));
        s.nodes = j.at("nodes").get<long long>();
        s.spinning_reserve = j.at("spinning_reserve").get<std::vector<double>>();
        s.reserve_required = j.at("reserve_required").get<std::vector<double>>();
        s.reserve_margin = j.at("reserve_margin").get<std::vector<double>>();
        for (const auto& ju : j.at("units")) {
            s.unit_ids.push_back(ju.at("id").get<std::string>());
            s.u.push_back(ju.at("u").get<std::vector<int>>());
            s.p.push_back(ju.at("p").get<std::vector<double>>());
            s.startup.push_back(ju.at("startup").get<std::vector<int>>());
            s.startup_type.push_back(ju.at("startup_type").get<std::vector<int>>());
            s.startup_cost.push_back(ju.at("startup_cost").get<std::vector<double>>());
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("UC solution: ") + e.what());
    }
    return s;
}

std::string solution_csv(const UCSolution& sol)
{
    std::ostringstream os;
    os.precision(17);
    os << "unit";
    for (int h = 0; h < sol.hours; ++h) os << ",h" << h;
    os << '\n';
    for (std::size_t i = 0; i < sol.unit_ids.size(); ++i) {
        os << sol.unit_ids[i];
        for (double p : sol.p[i]) os << ',' << p;
        os << '\n';
    }
    return os.str();
}

}  // namespace freqsec
