#include "policyshare/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "policyshare/errors.hpp"

namespace policyshare {

namespace {

constexpr const char* kNarrowHeader =
    "tick,mean_distance,mean_velocity,events,broadcasts,assimilations,coordination";
constexpr std::size_t kNarrowColumns = 7;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double to_real(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputDomainError("metrics CSV line " + std::to_string(line_no) +
                               ": expected a real number, got '" + s + "'");
    }
}

std::uint64_t to_count(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputDomainError("metrics CSV line " + std::to_string(line_no) +
                               ": expected a non-negative integer, got '" + s + "'");
    }
}

}  // namespace

std::vector<double> MetricsSeries::ticks() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(static_cast<double>(r.tick));
    return out;
}

std::vector<double> MetricsSeries::distances() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.mean_distance);
    return out;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_metrics_csv(const MetricsSeries& series, std::ostream& out) {
    const std::size_t n_states = std::size_t{1} << series.n_sectors;
    out << kNarrowHeader;
    if (series.wide) {
        for (std::size_t s = 0; s < n_states; ++s) {
            for (std::size_t a = 0; a < series.n_sectors; ++a) out << ",pi_s" << s << "_a" << a;
        }
    }
    out << '\n';
    for (const auto& r : series.rows) {
        out << r.tick << ',' << format_real(r.mean_distance) << ',' << format_real(r.mean_velocity)
            << ',' << r.events << ',' << r.broadcasts << ',' << r.assimilations << ','
            << format_real(r.coordination);
        if (series.wide) {
            for (double p : r.mean_policy) out << ',' << format_real(p);
        }
        out << '\n';
    }
}

void write_metrics_csv(const MetricsSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw SimulationError("cannot write metrics file " + path.string());
    write_metrics_csv(series, out);
}

MetricsSeries read_metrics_csv(std::istream& in) {
    MetricsSeries series;
    std::string line;
    if (!std::getline(in, line)) throw InputDomainError("metrics CSV is empty");
    if (line.rfind(kNarrowHeader, 0) != 0) {
        throw InputDomainError("metrics CSV header mismatch: '" + line + "'");
    }
    const auto header = split_csv_line(line);
    const std::size_t extra = header.size() - kNarrowColumns;
    if (extra > 0) {
        series.wide = true;
        std::size_t n = 1;
        while (n < 31 && (std::size_t{1} << n) * n < extra) ++n;
        if ((std::size_t{1} << n) * n != extra) {
            throw InputDomainError("metrics CSV: wide column count does not match any sensor count");
        }
        series.n_sectors = n;
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw InputDomainError("metrics CSV line " + std::to_string(line_no) + ": expected " +
                                   std::to_string(header.size()) + " columns");
        }
        MetricsRow row;
        row.tick = to_count(cells[0], line_no);
        row.mean_distance = to_real(cells[1], line_no);
        row.mean_velocity = to_real(cells[2], line_no);
        row.events = to_count(cells[3], line_no);
        row.broadcasts = to_count(cells[4], line_no);
        row.assimilations = to_count(cells[5], line_no);
        row.coordination = to_real(cells[6], line_no);
        for (std::size_t c = kNarrowColumns; c < cells.size(); ++c) {
            row.mean_policy.push_back(to_real(cells[c], line_no));
        }
        series.rows.push_back(std::move(row));
    }
    return series;
}

MetricsSeries read_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputDomainError("cannot open metrics file " + path.string());
    return read_metrics_csv(in);
}

}  // namespace policyshare
