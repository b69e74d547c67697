#include "policyshare/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "policyshare/errors.hpp"

namespace policyshare {

namespace {

constexpr std::size_t kMinFitPoints = 10;

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

TailFit tail_fit(std::span<const double> t, std::span<const double> d, double tail_fraction) {
    if (t.size() != d.size()) throw InputDomainError("tail_fit: tick and distance lengths differ");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
        throw InputDomainError("tail_fit: tail_fraction must lie in (0, 1)");
    }
    const std::size_t n = t.size();
    if (static_cast<double>(n) * tail_fraction < static_cast<double>(kMinFitPoints) - 1e-9) {
        throw InputDomainError("tail_fit: series has " + std::to_string(n) +
                               " rows, too few for a tail fit on " + std::to_string(kMinFitPoints) +
                               " points");
    }
    const auto window = std::max<std::size_t>(
        kMinFitPoints, static_cast<std::size_t>(std::ceil(static_cast<double>(n) * tail_fraction - 1e-9)));
    const std::size_t begin = n - window;

    double mt = 0.0, md = 0.0;
    for (std::size_t i = begin; i < n; ++i) {
        mt += t[i];
        md += d[i];
    }
    mt /= static_cast<double>(window);
    md /= static_cast<double>(window);
    double stt = 0.0, std_ = 0.0;
    for (std::size_t i = begin; i < n; ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        std_ += (t[i] - mt) * (d[i] - md);
    }
    if (!(stt > 0.0)) throw InputDomainError("tail_fit: ticks are constant over the tail window");

    TailFit fit;
    fit.slope = std_ / stt;
    fit.intercept = md - fit.slope * mt;
    fit.tail_fraction = tail_fraction;
    fit.tail_begin = begin;
    double ss = 0.0;
    for (std::size_t i = begin; i < n; ++i) {
        const double r = d[i] - fit.at(t[i]);
        ss += r * r;
    }
    fit.residual_scale = std::sqrt(ss / static_cast<double>(window));
    return fit;
}

TailFit tail_fit(const MetricsSeries& series, double tail_fraction) {
    const auto t = series.ticks();
    const auto d = series.distances();
    return tail_fit(t, d, tail_fraction);
}

ConvergenceReport convergence_threshold(std::span<const double> t, std::span<const double> d,
                                        const TailFit& fit, double band_multiplier) {
    ConvergenceReport report;
    report.terminal_speed = fit.slope;
    const std::size_t n = t.size();
    if (n == 0) return report;

    double max_abs = 0.0;
    for (double v : d) max_abs = std::max(max_abs, std::abs(v));
    const double band = band_multiplier * std::max(fit.residual_scale, 1e-9 * max_abs);

    std::vector<bool> inside(n);
    for (std::size_t i = 0; i < n; ++i) inside[i] = std::abs(d[i] - fit.at(t[i])) <= band;

    for (std::size_t i = 0; i < n; ++i) {
        if (inside[i] && (i == 0 || !inside[i - 1])) ++report.band_entries;
    }
    report.ambiguous = report.band_entries > 1;

    // Last sustained entry: walk back from the end while the data stays in band.
    std::size_t first = n;
    while (first > 0 && inside[first - 1]) --first;
    if (first == n) {
        report.threshold_tick = static_cast<std::uint64_t>(t[n - 1]);
        return report;
    }
    report.threshold_tick = static_cast<std::uint64_t>(t[first]);
    report.converged = first < fit.tail_begin;
    return report;
}

ConvergenceReport convergence_threshold(const MetricsSeries& series, const TailFit& fit,
                                        double band_multiplier) {
    const auto t = series.ticks();
    const auto d = series.distances();
    return convergence_threshold(t, d, fit, band_multiplier);
}

ConvergenceReport analyze_series(const MetricsSeries& series, const AnalysisParams& params) {
    const auto t = series.ticks();
    const auto d = series.distances();
    const TailFit fit = tail_fit(t, d, params.tail_fraction);
    return convergence_threshold(t, d, fit, params.band_multiplier);
}

double sharing_ratio(double sharing_speed, double independent_speed) {
    if (!(independent_speed > 0.0)) {
        throw InputDomainError("sharing_ratio: independent speed must be positive");
    }
    return sharing_speed / independent_speed;
}

double trend_stat(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InputDomainError("trend_stat: xs and ys differ in length");
    if (xs.size() < 3) throw InputDomainError("trend_stat: needs at least 3 points");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InputDomainError("trend_stat: xs must be distinct");
    }
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double n = static_cast<double>(xs.size());
    const double mean = (n + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace policyshare
