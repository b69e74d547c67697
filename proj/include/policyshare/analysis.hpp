#pragma once

// Post-hoc analysis of metrics series: tail line fit of the mean-distance
// curve, the convergence threshold where the data joins that line, and small
// statistics used to compare sweep cells.

#include <cstdint>
#include <span>

#include "policyshare/metrics.hpp"

namespace policyshare {

struct AnalysisParams {
    double tail_fraction = 0.2;
    double band_multiplier = 3.0;
};

struct TailFit {
    double slope = 0.0;      // asymptotic mean velocity
    double intercept = 0.0;
    double tail_fraction = 0.0;
    double residual_scale = 0.0;  // RMS residual over the tail window
    std::size_t tail_begin = 0;   // index of the first row in the window

    double at(double t) const { return intercept + slope * t; }
};

struct ConvergenceReport {
    std::uint64_t threshold_tick = 0;
    double terminal_speed = 0.0;
    bool converged = false;
    // Number of times the curve enters the band going forward in time. More
    // than one means the data ran alongside the fit line before settling and
    // the threshold may be an artifact.
    std::size_t band_entries = 0;
    bool ambiguous = false;
};

TailFit tail_fit(std::span<const double> t, std::span<const double> d, double tail_fraction);
TailFit tail_fit(const MetricsSeries& series, double tail_fraction);

ConvergenceReport convergence_threshold(std::span<const double> t, std::span<const double> d,
                                        const TailFit& fit, double band_multiplier);
ConvergenceReport convergence_threshold(const MetricsSeries& series, const TailFit& fit,
                                        double band_multiplier);

// tail_fit followed by convergence_threshold.
ConvergenceReport analyze_series(const MetricsSeries& series, const AnalysisParams& params = {});

double sharing_ratio(double sharing_speed, double independent_speed);

// Spearman rank correlation of ys against xs; tied values share their mean rank.
double trend_stat(std::span<const double> xs, std::span<const double> ys);

}  // namespace policyshare
