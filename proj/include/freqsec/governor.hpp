#pragma once

#include "freqsec/fleet.hpp"

#include <array>
#include <vector>

namespace freqsec {

/// Governor + turbine transfer-function chain of one thermal unit, in
/// deviation form around its dispatch p0. Output is the mechanical power
/// deviation in pu of the unit rating.
///
/// The state vector lives outside the object so the simulator can pack
/// all units into one RK4 vector; the object holds parameters and, for
/// the gas/combined-cycle chain, the transport-delay history.
class ThermalGovernor {
public:
    static constexpr int kMaxStates = 5;
    using State = std::array<double, kMaxStates>;

    ThermalGovernor(const ThermalUnit& unit, const GovernorParams& params, double p0_mw, double dt);

    int size() const { return n_; }
    Technology technology() const { return tech_; }
    double rating() const { return rating_; }
    double droop() const { return r_; }

    /// Governor input: -df/(f0 R) + dPref/S, pu of unit base.
    double input(double df_hz, double dpref_mw, double f0) const;
    void derivative(const double* x, double u, double* dx) const;
    /// Clamped output at stage offset c (0, 0.5 or 1 step) of the current step.
    double output(const double* x, double c) const;
    /// Records the end-of-step value for the transport delay.
    void commit(const double* x);
    void reset_history();

    /// Self-contained RK4 step with internal state; returns the output.
    double step(double df_hz, double dpref_mw, double f0);
    const State& state() const { return own_; }

    double lower() const { return lo_; }
    double upper() const { return hi_; }

private:
    double chain_output(const double* x) const;
    double delayed(double c) const;

    Technology tech_;
    int n_ = 0;
    double rating_;
    double r_;
    double lo_, hi_;
    double dt_;
    // steam
    double tr_s_ = 0, tsm_ = 0, tch_ = 0, fh_ = 0, trh_ = 0;
    // gas / combined cycle
    double tr_g_ = 0, t1_g_ = 0, t2_g_ = 0, t3_g_ = 0, t4_g_ = 0, td_ = 0;
    // diesel
    double t1_d_ = 0, t2_d_ = 0, t3_d_ = 0, t4_d_ = 0, t5_d_ = 0, t6_d_ = 0, k_d_ = 0;

    std::vector<double> hist_;  // ring buffer of chain output at step boundaries
    std::size_t head_ = 0;      // index of the newest entry
    State own_{};
};

}  // namespace freqsec
