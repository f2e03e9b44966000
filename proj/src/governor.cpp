#include "freqsec/governor.hpp"

#include "freqsec/error.hpp"

#include <algorithm>
#include <cmath>

namespace freqsec {

ThermalGovernor::ThermalGovernor(const ThermalUnit& unit, const GovernorParams& g, double p0_mw, double dt)
    : tech_(unit.tech), rating_(unit.rated_power), r_(unit.droop_r), dt_(dt)
{
    lo_ = (unit.min_power - p0_mw) / rating_;
    hi_ = (unit.rated_power - p0_mw) / rating_;
    if (lo_ > 1e-9 || hi_ < -1e-9)
        throw ValidationError("unit '" + unit.id + "': dispatch outside [min_power, rated_power]");
    lo_ = std::min(lo_, 0.0);
    hi_ = std::max(hi_, 0.0);

    const auto positive = [&](double v, const char* name) {
        if (!(v > 0.0)) throw ValidationError(std::string("governor time constant ") + name + " must be positive");
    };
    switch (tech_) {
    case Technology::Steam:
        n_ = 4;
        tr_s_ = g.tr_s, tsm_ = g.tsm_s, tch_ = g.tch_s, fh_ = g.fh_s, trh_ = g.trh_s;
        positive(tr_s_, "TR_s"), positive(tsm_, "TSM_s"), positive(tch_, "TCH_s"), positive(trh_, "TRH_s");
        if (fh_ < 0.0 || fh_ > 1.0) throw ValidationError("high-pressure fraction FH_s must lie in [0, 1]");
        break;
    case Technology::Gas:
    case Technology::CombinedCycle:
        n_ = 3;
        tr_g_ = g.tr_g, t1_g_ = g.t1_g, t2_g_ = g.t2_g, t3_g_ = g.t3_g, t4_g_ = g.t4_g, td_ = g.td_g;
        positive(tr_g_, "TR_g"), positive(t1_g_, "T1_g"), positive(t4_g_, "T4_g");
        if (t2_g_ < 0.0 || t3_g_ < 0.0 || td_ < 0.0) throw ValidationError("gas lead/delay constants must be >= 0");
        if (td_ > 0.0 && td_ < dt_ * (1.0 - 1e-9))
            throw ValidationError("transport delay TD_g shorter than the integration step");
        break;
    case Technology::Diesel:
        n_ = 5;
        t1_d_ = g.t1_d, t2_d_ = g.t2_d, t3_d_ = g.t3_d, t4_d_ = g.t4_d, t5_d_ = g.t5_d, t6_d_ = g.t6_d;
        k_d_ = g.k_d;
        positive(t1_d_, "T1_d"), positive(t5_d_, "T5_d"), positive(t6_d_, "T6_d");
        if (t2_d_ < 0.0 || t3_d_ < 0.0 || t4_d_ < 0.0) throw ValidationError("diesel lead constants must be >= 0");
        break;
    }
    if (td_ > 0.0) hist_.assign(static_cast<std::size_t>(std::ceil(td_ / dt_)) + 3, 0.0);
}

double ThermalGovernor::input(double df_hz, double dpref_mw, double f0) const
{
    return -df_hz / (f0 * r_) + dpref_mw / rating_;
}

void ThermalGovernor::derivative(const double* x, double u, double* dx) const
{
    switch (tech_) {
    case Technology::Steam:
        dx[0] = (u - x[0]) / tr_s_;
        dx[1] = (x[0] - x[1]) / tsm_;
        dx[2] = (x[1] - x[2]) / tch_;
        dx[3] = (x[2] - x[3]) / trh_;
        break;
    case Technology::Gas:
    case Technology::CombinedCycle: {
        dx[0] = (u - x[0]) / tr_g_;
        dx[1] = (x[0] - x[1]) / t1_g_;
        const double o1 = x[1] + t2_g_ / t1_g_ * (x[0] - x[1]);
        dx[2] = (o1 - x[2]) / t4_g_;
        break;
    }
    case Technology::Diesel: {
        const double e = r_ * (u - x[4]);
        double box;
        if (t2_d_ > 0.0) {
            dx[0] = x[1];
            dx[1] = (e - x[0] - t1_d_ * x[1]) / (t1_d_ * t2_d_);
            box = x[0] + t3_d_ * x[1];
        } else {
            dx[0] = (e - x[0]) / t1_d_;
            dx[1] = 0.0;
            box = x[0] + t3_d_ * dx[0];
        }
        dx[2] = k_d_ * box;
        dx[3] = (x[2] - x[3]) / t5_d_;
        const double ll = x[3] + t4_d_ / t5_d_ * (x[2] - x[3]);
        dx[4] = (ll - x[4]) / t6_d_;
        break;
    }
    }
}

double ThermalGovernor::chain_output(const double* x) const
{
    switch (tech_) {
    case Technology::Steam: return fh_ * x[2] + (1.0 - fh_) * x[3];
    case Technology::Gas:
    case Technology::CombinedCycle: {
        const double o1 = x[1] + t2_g_ / t1_g_ * (x[0] - x[1]);
        return x[2] + t3_g_ / t4_g_ * (o1 - x[2]);
    }
    case Technology::Diesel: return x[4];
    }
    return 0.0;
}

double ThermalGovernor::delayed(double c) const
{
    const double back = td_ / dt_ - c;
    const double kf = std::floor(back);
    const double frac = back - kf;
    const std::size_t cap = hist_.size();
    const auto k = std::min(static_cast<std::size_t>(std::max(kf, 0.0)), cap - 2);
    const double a = hist_[(head_ + cap - k) % cap];
    const double b = hist_[(head_ + cap - k - 1) % cap];
    return a + frac * (b - a);
}

double ThermalGovernor::output(const double* x, double c) const
{
    const double y = td_ > 0.0 ? delayed(c) : chain_output(x);
    return std::clamp(y, lo_, hi_);
}

void ThermalGovernor::commit(const double* x)
{
    if (hist_.empty()) return;
    head_ = (head_ + 1) % hist_.size();
    hist_[head_] = chain_output(x);
}

void ThermalGovernor::reset_history()
{
    std::fill(hist_.begin(), hist_.end(), 0.0);
    head_ = 0;
    own_ = {};
}

double ThermalGovernor::step(double df_hz, double dpref_mw, double f0)
{
    const double u = input(df_hz, dpref_mw, f0);
    State k1{}, k2{}, k3{}, k4{}, tmp{};
    const double* x = own_.data();
    derivative(x, u, k1.data());
    for (int i = 0; i < n_; ++i) tmp[i] = x[i] + 0.5 * dt_ * k1[i];
    derivative(tmp.data(), u, k2.data());
    for (int i = 0; i < n_; ++i) tmp[i] = x[i] + 0.5 * dt_ * k2[i];
    derivative(tmp.data(), u, k3.data());
    for (int i = 0; i < n_; ++i) tmp[i] = x[i] + dt_ * k3[i];
    derivative(tmp.data(), u, k4.data());
    for (int i = 0; i < n_; ++i) own_[i] += dt_ / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    commit(own_.data());
    return output(own_.data(), 0.0);
}

}  // namespace freqsec
