#include "freqsec/metrics.hpp"

#include "freqsec/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace freqsec {

double frequency_at(const TimeSeries& ts, double t)
{
    if (ts.size() == 0 || t < ts.t.front() - 1e-9 || t > ts.t.back() + 1e-9)
        throw ValidationError("time " + std::to_string(t) + " s outside the series");
    auto it = std::lower_bound(ts.t.begin(), ts.t.end(), t);
    auto k = static_cast<std::size_t>(it - ts.t.begin());
    if (k < ts.size() && std::abs(ts.t[k] - t) <= 1e-9) return ts.f[k];
    if (k > 0 && std::abs(ts.t[k - 1] - t) <= 1e-9) return ts.f[k - 1];
    if (k == 0 || k >= ts.size()) return k == 0 ? ts.f.front() : ts.f.back();
    const double w = (t - ts.t[k - 1]) / (ts.t[k] - ts.t[k - 1]);
    return ts.f[k - 1] + w * (ts.f[k] - ts.f[k - 1]);
}

double nadir(const TimeSeries& ts, double trip_time)
{
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (ts.t[i] >= trip_time - 1e-9) m = std::min(m, ts.f[i]);
    if (!std::isfinite(m)) throw ValidationError("series ends before the event");
    return m;
}

double rocof(const TimeSeries& ts, double trip_time)
{
    return (frequency_at(ts, trip_time + kRocofTo) - frequency_at(ts, trip_time + kRocofFrom)) /
           (kRocofTo - kRocofFrom);
}

double shed_total(const TimeSeries& ts)
{
    return ts.size() ? ts.shed.back() : 0.0;
}

RunMetrics run_metrics(const TimeSeries& ts, double trip_time, double f0)
{
    RunMetrics m;
    if (ts.size() == 0) return m;
    m.nadir = nadir(ts, trip_time);
    m.collapsed = false;
    if (ts.t.back() >= trip_time + kRocofTo - 1e-9) {
        m.rocof = rocof(ts, trip_time);
        m.rocof_abs = std::abs(m.rocof);
    }
    m.shed = shed_total(ts);
    m.inertia_change = ts.t_m.front() - ts.t_m.back();
    m.final_df = ts.f.back() - f0;
    m.valid = true;
    return m;
}

Stat mean_variance(std::span<const double> v)
{
    Stat s;
    s.n = v.size();
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    for (double x : v) s.variance += (x - s.mean) * (x - s.mean);
    s.variance /= static_cast<double>(v.size());
    return s;
}

Summary summarize(std::span<const CellMetrics> cells)
{
    Summary s;
    for (int k = 0; k < 2; ++k) {
        std::vector<double> nad, roc, in, sh, bn, br, bi, bs;
        for (const auto& c : cells) {
            if (c.full[k].valid) {
                nad.push_back(c.full[k].nadir);
                roc.push_back(c.full[k].rocof_abs);
                in.push_back(c.full[k].inertia_change);
                sh.push_back(c.full[k].shed);
            }
            if (c.baseline[k].valid) {
                bn.push_back(c.baseline[k].nadir);
                br.push_back(c.baseline[k].rocof_abs);
                bi.push_back(c.baseline[k].inertia_change);
                bs.push_back(c.baseline[k].shed);
            }
        }
        s.nadir[k] = mean_variance(nad);
        s.rocof[k] = mean_variance(roc);
        s.inertia[k] = mean_variance(in);
        s.shed[k] = mean_variance(sh);
        s.base_nadir[k] = mean_variance(bn);
        s.base_rocof[k] = mean_variance(br);
        s.base_inertia[k] = mean_variance(bi);
        s.base_shed[k] = mean_variance(bs);
    }
    s.cells = cells.size();
    return s;
}

namespace {

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string pad(std::string s, std::size_t w, bool left = false)
{
    if (s.size() >= w) return s;
    return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
}

}  // namespace

std::string summary_table(const Summary& s)
{
    const std::size_t c0 = 21, c1 = 20, cn = 11;
    std::string out;
    out += pad("", c0 + c1) + pad("Without wind control", 2 * cn + 2) + pad("With wind control", 2 * cn + 2) + "\n";
    out += pad("", c0 + c1) + pad("mu", cn) + pad("sigma^2", cn + 2) + pad("mu", cn) + pad("sigma^2", cn + 2) + "\n";
    out += std::string(c0 + c1 + 4 * cn + 4, '-') + "\n";

    const auto row = [&](const char* group, const char* name, const Stat* st, const char* mf, const char* vf) {
        std::string line = pad(group, c0, true) + pad(name, c1, true);
        for (int k = 0; k < 2; ++k) {
            if (st == nullptr || st[k].n == 0) line += pad("---", cn) + pad("---", cn + 2);
            else line += pad(fmt(mf, st[k].mean), cn) + pad(fmt(vf, st[k].variance), cn + 2);
        }
        out += line + "\n";
    };
    row("Proposed analysis", "nadir (Hz)", s.nadir, "%.3f", "%.4g");
    row("", "RoCoF (Hz/s)", s.rocof, "%.3f", "%.4g");
    row("", "Inertia change (s)", s.inertia, "%.3f", "%.4g");
    row("", "Load shedding (MW)", s.shed, "%.2f", "%.4g");
    out += std::string(c0 + c1 + 4 * cn + 4, '-') + "\n";
    row("Previous approaches", "nadir (Hz)", s.base_nadir, "%.3f", "%.4g");
    row("", "RoCoF (Hz/s)", s.base_rocof, "%.3f", "%.4g");
    row("", "Inertia change (s)", nullptr, "", "");
    row("", "Load shedding (MW)", nullptr, "", "");
    out += std::string(c0 + c1 + 4 * cn + 4, '-') + "\n";
    return out;
}

std::string summary_csv(const Summary& s)
{
    std::string out = "metric,model,setting,mean,variance,n\n";
    const auto add = [&](const char* metric, const char* model, const Stat* st) {
        for (int k = 0; k < 2; ++k) {
            out += std::string(metric) + ',' + model + ',' + (k ? "with" : "without") + ',' +
                   format_number(st[k].mean) + ',' + format_number(st[k].variance) + ',' + std::to_string(st[k].n) +
                   '\n';
        }
    };
    add("nadir_hz", "full", s.nadir);
    add("rocof_hz_s", "full", s.rocof);
    add("inertia_change_s", "full", s.inertia);
    add("shed_mw", "full", s.shed);
    add("nadir_hz", "baseline", s.base_nadir);
    add("rocof_hz_s", "baseline", s.base_rocof);
    add("inertia_change_s", "baseline", s.base_inertia);
    add("shed_mw", "baseline", s.base_shed);
    return out;
}

}  // namespace freqsec
