#pragma once

// Shared machinery of the UC solvers: per-unit status transitions and a
// mask-based hourly evaluator. Not part of the public interface.

#include "freqsec/uc.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace freqsec::detail {

struct UnitStatus {
    UnitMode mode = UnitMode::Off;
    int hours = 0;       // On/Off: length of the current run so far; Starting: trajectory step (1-based)
    int off_before = 0;  // Starting: off-line hours accumulated when the trajectory began
};

struct Option {
    UnitStatus next;
    double startup_cost = 0.0;  // type cost + wear and tear, charged at the decision
};

UnitStatus initial_status(const InitialUnitState& s);

/// Legal statuses at hour `h` given the status at h-1. At most three.
int options(const ThermalUnit& unit, const UnitStatus& prev, int h, int horizon, std::array<Option, 3>& out);

/// Trajectory output (MW) of a unit in `Starting` status.
double trajectory_output(const ThermalUnit& unit, const UnitStatus& s);

/// Modes of a 0/1 commitment, trajectory hours placed before each start;
/// nullopt when a start has no room for its trajectory.
std::optional<ModeMatrix> commitment_modes(std::span<const ThermalUnit> units, const UCInstance& inst,
                                           const std::vector<std::vector<int>>& u);

/// Hourly dispatch over a subset given by bitmask; segments pre-sorted
/// by effective marginal cost (fuel + O&M).

class HourEvaluator {
public:
    HourEvaluator(std::span<const ThermalUnit> units, const UCInstance& inst);

    double base_reserve(int h) const { return base_reserve_[static_cast<std::size_t>(h)]; }
    double net_demand(int h) const { return net_demand_[static_cast<std::size_t>(h)]; }

    /// Fuel + O&M cost of the on-line units for hour h after subtracting
    /// `trajectory_mw` from the net demand. +inf when infeasible. When `p`
    /// is given it receives the dispatch of every unit (0 for off units).
    double evaluate(int h, std::uint32_t mask, double trajectory_mw, std::vector<double>* p = nullptr) const;

    /// Lower bound of the hourly cost when the trajectory output of
    /// non-synchronised units is unknown but at most `max_traj_mw`, priced
    /// no cheaper than `traj_price` per MWh.
    double relaxed(int h, std::uint32_t mask, double max_traj_mw, double traj_price) const;

    /// Tighter bound keeping the largest-unit reserve cap: minimises the
    /// hourly cost, convex in the trajectory output, by golden section.
    double capped(int h, std::uint32_t mask, double max_traj_mw, double traj_price) const;

    /// Human-readable reason why `mask` cannot serve hour h.
    std::string infeasibility_reason(int h, std::uint32_t mask, double trajectory_mw) const;

private:
    struct Seg {
        double price;
        double width;
        std::uint32_t unit;
    };
    std::span<const ThermalUnit> units_;
    std::vector<Seg> segs_;
    std::vector<double> net_demand_;
    std::vector<double> base_reserve_;
    std::vector<double> fixed_;  // min-block cost + O&M at min power
};

struct LagrangeResult {
    double bound = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::vector<int>>> commitments;  // distinct relaxed commitments met on the way
};

/// Lower bound from dualising balance, spinning reserve and the largest-unit
/// cap; each unit's priced schedule is solved exactly. Subgradient steps aim
/// at `upper` (a known schedule cost, or +inf).
LagrangeResult lagrangian_bound(std::span<const ThermalUnit> units, const UCInstance& inst,
                                const HourEvaluator& eval, double upper, int iterations);

}  // namespace freqsec::detail
