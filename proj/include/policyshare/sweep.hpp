#pragma once

// Parameter sweeps: Cartesian grids over (arena, agents, p, policy, seed),
// parallel execution with deterministic output, and the aggregate analysis
// CSV.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "policyshare/analysis.hpp"
#include "policyshare/engine.hpp"

namespace policyshare {

struct SweepSpec {
    SimConfig base;
    std::vector<std::string> arenas;  // "small" / "large"; empty keeps base geometry
    std::vector<std::size_t> agents;
    std::vector<double> share_p;
    std::vector<PolicyKind> policies;
    std::vector<std::uint64_t> seeds;
    std::size_t max_cells = 10'000;
    AnalysisParams analysis;

    // Every cell's configuration, in canonical order. Throws ConfigError when
    // the grid exceeds max_cells or a cell is invalid.
    std::vector<SimConfig> cells() const;
};

// Presets: small-arena, large-arena, desk, algorithm-comparison.
SweepSpec sweep_preset(const std::string& name);
std::vector<std::string> sweep_preset_names();

// key=value file; share_p, agents, arena, policy and seed take comma-separated
// lists (seed also accepts a..b). max_cells, tail_fraction and
// band_multiplier tune the sweep; every other key sets the base config.
SweepSpec parse_sweep(const std::filesystem::path& path);
SweepSpec parse_sweep_text(const std::string& text);

struct AggregateRow {
    double rho = 0.0;
    double p = 0.0;
    std::string arena;
    std::uint64_t seed = 0;
    std::uint64_t threshold_tick = 0;
    double terminal_speed = 0.0;
    bool converged = false;
    double coordination_final = 0.0;
    std::size_t agents = 0;
    std::string policy;
    std::string status = "ok";
};

std::string cell_name(const SimConfig& config);

AggregateRow analyze_run(const SimConfig& config, const MetricsSeries& series,
                         const AnalysisParams& params);

// Runs one configuration and writes metrics.csv and manifest.txt into out_dir.
MetricsSeries run_to_directory(const SimConfig& config, const std::filesystem::path& out_dir);

// Writes runs/<cell>/{metrics.csv,manifest.txt} and aggregate.csv under
// out_dir. A failing cell is reported in its aggregate row's status.
std::vector<AggregateRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                                    std::size_t parallelism);

// Re-analyzes every run directory (manifest.txt + metrics.csv) under in_dir.
std::vector<AggregateRow> analyze_directory(const std::filesystem::path& in_dir,
                                            const AnalysisParams& params = {});

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);
std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path);

}  // namespace policyshare
