#include "policyshare/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "policyshare/config.hpp"
#include "policyshare/errors.hpp"

namespace policyshare {

namespace {

constexpr const char* kAggregateHeader =
    "rho,p,arena,seed,threshold_tick,terminal_speed,converged,coordination_final,agents,policy,status";

std::string policy_name(PolicyKind k) {
    return k == PolicyKind::Softmax ? "softmax" : "epsilon_greedy";
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

auto sort_key(const AggregateRow& r) { return std::tie(r.arena, r.agents, r.p, r.policy, r.seed); }

void sort_rows(std::vector<AggregateRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const AggregateRow& a, const AggregateRow& b) { return sort_key(a) < sort_key(b); });
}

AggregateRow describe(const SimConfig& c) {
    AggregateRow row;
    row.rho = c.arena.density();
    row.p = c.sharing_enabled ? c.share.p : 0.0;
    row.arena = arena_label(c.arena);
    row.seed = c.seed;
    row.agents = c.arena.agent_count;
    row.policy = policy_name(c.policy_kind);
    return row;
}

}  // namespace

std::vector<SimConfig> SweepSpec::cells() const {
    const std::vector<std::string> arena_axis = arenas.empty() ? std::vector<std::string>{""} : arenas;
    const std::vector<std::size_t> agent_axis =
        agents.empty() ? std::vector<std::size_t>{base.arena.agent_count} : agents;
    const std::vector<double> p_axis = share_p.empty() ? std::vector<double>{base.share.p} : share_p;
    const std::vector<PolicyKind> policy_axis =
        policies.empty() ? std::vector<PolicyKind>{base.policy_kind} : policies;
    const std::vector<std::uint64_t> seed_axis = seeds.empty() ? std::vector<std::uint64_t>{base.seed} : seeds;

    const std::size_t total =
        arena_axis.size() * agent_axis.size() * p_axis.size() * policy_axis.size() * seed_axis.size();
    if (total > max_cells) {
        throw ConfigError("sweep has " + std::to_string(total) + " cells, over the budget of " +
                          std::to_string(max_cells));
    }

    std::vector<SimConfig> out;
    out.reserve(total);
    for (const auto& arena : arena_axis) {
        for (std::size_t m : agent_axis) {
            for (double p : p_axis) {
                for (PolicyKind kind : policy_axis) {
                    for (std::uint64_t seed : seed_axis) {
                        SimConfig c = base;
                        if (!arena.empty()) apply_arena_preset(c, arena);
                        c.arena.agent_count = m;
                        c.share.p = p;
                        c.policy_kind = kind;
                        c.seed = seed;
                        c.validate();
                        out.push_back(c);
                    }
                }
            }
        }
    }
    return out;
}

std::vector<std::string> sweep_preset_names() {
    return {"small-arena", "large-arena", "desk", "algorithm-comparison"};
}

SweepSpec sweep_preset(const std::string& name) {
    SweepSpec spec;
    spec.base.arena.agent_radius = 10.0;
    spec.base.motion = MotionParams::defaults_for(10.0);
    spec.base.max_ticks = 2'000'000;
    spec.seeds = {1, 2, 3, 4, 5};
    spec.share_p = {0.0, 0.25, 0.5, 1.0};
    spec.policies = {PolicyKind::Softmax};
    if (name == "small-arena") {
        spec.arenas = {"small"};
        spec.agents = {3, 5, 8, 10, 13, 15, 18, 20, 23, 25};
    } else if (name == "large-arena") {
        spec.arenas = {"large"};
        spec.agents = {3, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
    } else if (name == "desk") {
        spec.arenas = {"small"};
        spec.agents = {3, 20};
    } else if (name == "algorithm-comparison") {
        spec.arenas = {"small"};
        spec.agents = {3};
        spec.share_p = {0.0};
        spec.policies = {PolicyKind::Softmax, PolicyKind::EpsilonGreedy};
    } else {
        std::string known;
        for (const auto& n : sweep_preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown sweep preset '" + name + "' (known: " + known + ")");
    }
    apply_arena_preset(spec.base, spec.arenas.front());
    return spec;
}

SweepSpec parse_sweep_text(const std::string& text) {
    std::istringstream in(text);
    const auto entries = read_entries(in);
    SweepSpec spec;
    std::vector<ConfigEntry> base_entries;

    auto fail = [](const ConfigEntry& e, const std::string& expected) {
        throw ConfigError("line " + std::to_string(e.line) + ": key '" + e.key + "' expects " + expected +
                          ", got '" + e.value + "'");
    };
    auto real = [&](const ConfigEntry& e, const std::string& s) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail(e, "real numbers");
        return v;
    };
    auto count = [&](const ConfigEntry& e, const std::string& s) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail(e, "non-negative integers");
        return v;
    };

    for (const auto& e : entries) {
        const auto items = split_list(e.value);
        if (e.key == "share_p") {
            for (const auto& s : items) {
                const double p = real(e, s);
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw ConfigError("line " + std::to_string(e.line) + ": range error: share_p value " + s +
                                      " must lie in [0, 1]");
                }
                spec.share_p.push_back(p);
            }
        } else if (e.key == "agents") {
            for (const auto& s : items) spec.agents.push_back(count(e, s));
        } else if (e.key == "arena") {
            for (const auto& s : items) {
                if (s != "small" && s != "large") fail(e, "small or large");
                spec.arenas.push_back(s);
            }
        } else if (e.key == "policy") {
            for (const auto& s : items) {
                if (s == "softmax") spec.policies.push_back(PolicyKind::Softmax);
                else if (s == "epsilon_greedy") spec.policies.push_back(PolicyKind::EpsilonGreedy);
                else fail(e, "softmax or epsilon_greedy");
            }
        } else if (e.key == "seed") {
            for (const auto& s : items) {
                const auto dots = s.find("..");
                if (dots == std::string::npos) {
                    spec.seeds.push_back(count(e, s));
                } else {
                    const auto lo = count(e, s.substr(0, dots));
                    const auto hi = count(e, s.substr(dots + 2));
                    if (hi < lo) fail(e, "an ascending range a..b");
                    for (auto v = lo; v <= hi; ++v) spec.seeds.push_back(v);
                }
            }
        } else if (e.key == "max_cells") {
            spec.max_cells = count(e, e.value);
        } else if (e.key == "tail_fraction") {
            spec.analysis.tail_fraction = real(e, e.value);
            if (!(spec.analysis.tail_fraction > 0.0 && spec.analysis.tail_fraction < 1.0)) {
                fail(e, "a real in (0, 1)");
            }
        } else if (e.key == "band_multiplier") {
            spec.analysis.band_multiplier = real(e, e.value);
            if (!(spec.analysis.band_multiplier > 0.0)) fail(e, "a positive real");
        } else {
            base_entries.push_back(e);
        }
    }
    spec.base = config_from_entries(base_entries);
    return spec;
}

SweepSpec parse_sweep(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_sweep_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string cell_name(const SimConfig& c) {
    char agents[16];
    std::snprintf(agents, sizeof agents, "M%03zu", c.arena.agent_count);
    return arena_label(c.arena) + "_" + agents + "_p" + format_shortest(c.share.p) + "_" +
           policy_name(c.policy_kind) + "_seed" + std::to_string(c.seed);
}

AggregateRow analyze_run(const SimConfig& config, const MetricsSeries& series,
                         const AnalysisParams& params) {
    AggregateRow row = describe(config);
    const ConvergenceReport report = analyze_series(series, params);
    row.threshold_tick = report.threshold_tick;
    row.terminal_speed = report.terminal_speed;
    row.converged = report.converged;
    row.coordination_final = series.rows.empty() ? 0.0 : series.rows.back().coordination;
    return row;
}

MetricsSeries run_to_directory(const SimConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_manifest(config, out_dir / "manifest.txt");
    MetricsSeries series = run(config);
    write_metrics_csv(series, out_dir / "metrics.csv");
    return series;
}

std::vector<AggregateRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                                    std::size_t parallelism) {
    const std::vector<SimConfig> cells = spec.cells();
    std::vector<AggregateRow> rows(cells.size());
    std::filesystem::create_directories(out_dir / "runs");

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const SimConfig& c = cells[i];
            try {
                const auto series = run_to_directory(c, out_dir / "runs" / cell_name(c));
                rows[i] = analyze_run(c, series, spec.analysis);
            } catch (const std::exception& e) {
                rows[i] = describe(c);
                rows[i].status = sanitize(std::string("error: ") + e.what());
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(parallelism, cells.size()));
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();

    sort_rows(rows);
    write_aggregate_csv(rows, out_dir / "aggregate.csv");
    return rows;
}

std::vector<AggregateRow> analyze_directory(const std::filesystem::path& in_dir,
                                            const AnalysisParams& params) {
    if (!std::filesystem::is_directory(in_dir)) {
        throw ConfigError("input directory " + in_dir.string() + " does not exist");
    }
    std::vector<std::filesystem::path> manifests;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(in_dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "manifest.txt") {
            manifests.push_back(entry.path());
        }
    }
    std::sort(manifests.begin(), manifests.end());
    std::vector<AggregateRow> rows;
    for (const auto& manifest : manifests) {
        const SimConfig config = read_manifest(manifest);
        try {
            const auto series = read_metrics_csv(manifest.parent_path() / "metrics.csv");
            rows.push_back(analyze_run(config, series, params));
        } catch (const std::exception& e) {
            AggregateRow row = describe(config);
            row.status = sanitize(std::string("error: ") + e.what());
            rows.push_back(row);
        }
    }
    sort_rows(rows);
    return rows;
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
    out << kAggregateHeader << '\n';
    for (const auto& r : rows) {
        out << format_real(r.rho) << ',' << format_real(r.p) << ',' << r.arena << ',' << r.seed << ','
            << r.threshold_tick << ',' << format_real(r.terminal_speed) << ','
            << (r.converged ? "true" : "false") << ',' << format_real(r.coordination_final) << ','
            << r.agents << ',' << r.policy << ',' << r.status << '\n';
    }
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw SimulationError("cannot write aggregate file " + path.string());
    write_aggregate_csv(rows, out);
}

std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputDomainError("cannot open aggregate file " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kAggregateHeader) {
        throw InputDomainError("aggregate CSV header mismatch in " + path.string());
    }
    std::vector<AggregateRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11) {
            throw InputDomainError("aggregate CSV line " + std::to_string(line_no) + ": expected 11 columns");
        }
        try {
            AggregateRow r;
            r.rho = std::stod(cells[0]);
            r.p = std::stod(cells[1]);
            r.arena = cells[2];
            r.seed = std::stoull(cells[3]);
            r.threshold_tick = std::stoull(cells[4]);
            r.terminal_speed = std::stod(cells[5]);
            r.converged = cells[6] == "true";
            r.coordination_final = std::stod(cells[7]);
            r.agents = std::stoull(cells[8]);
            r.policy = cells[9];
            r.status = cells[10];
            rows.push_back(r);
        } catch (const std::logic_error&) {
            throw InputDomainError("aggregate CSV line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return rows;
}

}  // namespace policyshare
