#pragma once

#include "freqsec/freqsim.hpp"

#include <span>
#include <string>
#include <vector>

namespace freqsec {

inline constexpr double kRocofFrom = 0.3;  // s after the event
inline constexpr double kRocofTo = 0.5;

/// Linear interpolation of f at time t.
double frequency_at(const TimeSeries& ts, double t);

/// Minimum frequency at or after trip_time.
double nadir(const TimeSeries& ts, double trip_time);
/// (f(trip+0.5) - f(trip+0.3)) / 0.2, Hz/s; negative for under-frequency.
double rocof(const TimeSeries& ts, double trip_time);
/// Final latched shed, MW.
double shed_total(const TimeSeries& ts);

struct RunMetrics {
    bool valid = false;
    bool collapsed = false;
    double nadir = 0.0;
    double rocof = 0.0;      // signed
    double rocof_abs = 0.0;
    double shed = 0.0;
    double inertia_change = 0.0;  // T_m before the event minus after
    double final_df = 0.0;        // Hz at the last sample
};

RunMetrics run_metrics(const TimeSeries& ts, double trip_time, double f0 = 50.0);

struct Stat {
    double mean = 0.0;
    double variance = 0.0;  // population variance
    std::size_t n = 0;
};
Stat mean_variance(std::span<const double> values);

/// Table layout: four metrics for the full model and the baseline, each
/// with and without wind control.
struct Summary {
    Stat nadir[2], rocof[2], inertia[2], shed[2];                   // full model: [without, with]
    Stat base_nadir[2], base_rocof[2], base_inertia[2], base_shed[2];  // baseline
    std::size_t cells = 0;
};

/// Per-cell metrics feeding the summary; runs that are not valid are skipped.
struct CellMetrics {
    RunMetrics full[2];      // [without, with] wind control
    RunMetrics baseline[2];
};

Summary summarize(std::span<const CellMetrics> cells);

/// Aligned text table: models x metrics, with and without wind control.
std::string summary_table(const Summary& s);
/// metric,model,setting,mean,variance,n
std::string summary_csv(const Summary& s);

}  // namespace freqsec
