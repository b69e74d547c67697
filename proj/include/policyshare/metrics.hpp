#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace policyshare {

struct MetricsRow {
    std::uint64_t tick = 0;
    double mean_distance = 0.0;  // cumulative distance per agent
    double mean_velocity = 0.0;  // distance per agent per tick since the previous row
    std::uint64_t events = 0;    // running totals from here on
    std::uint64_t broadcasts = 0;
    std::uint64_t assimilations = 0;
    double coordination = 0.0;
    std::vector<double> mean_policy;  // wide variant only: state-major, N actions per state
};

struct MetricsSeries {
    std::size_t n_sectors = 4;
    bool wide = false;
    std::vector<MetricsRow> rows;

    std::vector<double> ticks() const;
    std::vector<double> distances() const;
};

// Floats are printed with 9 significant digits.
std::string format_real(double v);

void write_metrics_csv(const MetricsSeries& series, std::ostream& out);
void write_metrics_csv(const MetricsSeries& series, const std::filesystem::path& path);

// Reads the narrow or wide layout; throws InputDomainError on malformed input.
MetricsSeries read_metrics_csv(std::istream& in);
MetricsSeries read_metrics_csv(const std::filesystem::path& path);

}  // namespace policyshare
