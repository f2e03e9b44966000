#pragma once

#include "freqsec/fleet.hpp"
#include "freqsec/uc.hpp"

#include <string>
#include <vector>

#ifndef FREQSEC_DATA_DIR
#define FREQSEC_DATA_DIR "data"
#endif

namespace freqsec::test {

inline std::string data_path(const std::string& name) { return std::string(FREQSEC_DATA_DIR) + "/" + name; }

inline const FleetConfig& default_fleet()
{
    static const FleetConfig fleet = load_fleet(data_path("fleet.json"));
    return fleet;
}

/// Unit with ten equal segments of rising marginal cost starting at `mc`.
inline ThermalUnit make_unit(const std::string& id, Technology tech, double rated, double min_power, double mc,
                             double step = 1.0)
{
    ThermalUnit u;
    u.id = id;
    u.tech = tech;
    u.rated_power = rated;
    u.min_power = min_power;
    u.inertia_h = tech == Technology::Diesel ? 2.45 : 5.0;
    u.droop_r = 0.05;
    u.startup_types = {{1, 100.0}};
    const double w = (rated - min_power) / static_cast<double>(kCostPieces);
    for (std::size_t k = 0; k < kCostPieces; ++k) u.cost_segments.push_back({w, mc + step * static_cast<double>(k)});
    u.no_load_cost = 50.0;
    u.om_cost = 2.0;
    u.wear_tear_cost = 20.0;
    return u;
}

inline UCInstance make_instance(std::vector<double> demand, std::vector<double> wind, std::size_t units,
                                InitialUnitState init = {true, 24, 0.0})
{
    UCInstance inst;
    inst.hours = static_cast<int>(demand.size());
    inst.demand = std::move(demand);
    inst.wind_forecast = std::move(wind);
    inst.initial.assign(units, init);
    complete_defaults(inst);
    return inst;
}

}  // namespace freqsec::test
