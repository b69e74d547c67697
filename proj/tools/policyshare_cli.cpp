// Command-line harness: single runs, parameter sweeps and re-analysis.
//
//   policyshare run     --config PATH --out DIR [overrides]
//   policyshare sweep   (--preset NAME | --config PATH) --out DIR --jobs K [overrides]
//   policyshare analyze --in DIR --out FILE
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "policyshare/config.hpp"
#include "policyshare/errors.hpp"
#include "policyshare/sweep.hpp"

namespace {

using namespace policyshare;

constexpr int kConfigExit = 1;
constexpr int kRuntimeExit = 2;

struct OverrideFlags {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> ticks;
    std::optional<double> share_p;
    std::optional<std::size_t> agents;
    std::optional<std::string> arena;

    void attach(CLI::App* app) {
        app->add_option("--seed", seed, "RNG seed");
        app->add_option("--ticks", ticks, "Number of simulation ticks");
        app->add_option("--share-p", share_p, "Policy broadcast probability in [0, 1]");
        app->add_option("--agents", agents, "Number of agents");
        app->add_option("--arena", arena, "Arena preset")->check(CLI::IsMember({"small", "large"}));
    }

    Overrides to_overrides() const { return {seed, ticks, share_p, agents, arena}; }
};

void print_report(const AggregateRow& row) {
    std::printf("rho=%s p=%s threshold_tick=%llu terminal_speed=%s converged=%s coordination=%s\n",
                format_real(row.rho).c_str(), format_real(row.p).c_str(),
                static_cast<unsigned long long>(row.threshold_tick), format_real(row.terminal_speed).c_str(),
                row.converged ? "true" : "false", format_real(row.coordination_final).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-agent Q-learning simulator with policy sharing"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    OverrideFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "Run one simulation");
    run_cmd->add_option("--config", config_path, "key=value config file (defaults if omitted)");
    run_cmd->add_option("--out", out_dir, "Output directory")->required();
    run_flags.attach(run_cmd);

    std::string preset;
    std::string sweep_config;
    std::string sweep_out;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    OverrideFlags sweep_flags;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
    auto* preset_opt = sweep_cmd->add_option("--preset", preset, "Built-in sweep preset");
    auto* sweep_cfg_opt = sweep_cmd->add_option("--config", sweep_config, "Sweep grid file");
    preset_opt->excludes(sweep_cfg_opt);
    sweep_cmd->add_option("--out", sweep_out, "Output directory")->required();
    sweep_cmd->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    sweep_flags.attach(sweep_cmd);

    std::string analyze_in;
    std::string analyze_out;
    AnalysisParams analysis;
    auto* analyze_cmd = app.add_subcommand("analyze", "Analyze run directories into an aggregate CSV");
    analyze_cmd->add_option("--in", analyze_in, "Directory holding run outputs")->required();
    analyze_cmd->add_option("--out", analyze_out, "Aggregate CSV path")->required();
    analyze_cmd->add_option("--tail-fraction", analysis.tail_fraction, "Tail window fraction")
        ->check(CLI::Range(0.0, 1.0));
    analyze_cmd->add_option("--band-multiplier", analysis.band_multiplier, "Residual band multiplier")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigExit;
    }

    try {
        if (*run_cmd) {
            SimConfig config = config_path.empty() ? parse_config_text("") : parse_config(config_path);
            apply_overrides(config, run_flags.to_overrides());
            const auto series = run_to_directory(config, out_dir);
            print_report(analyze_run(config, series, AnalysisParams{}));
        } else if (*sweep_cmd) {
            if (preset.empty() && sweep_config.empty()) {
                std::cerr << "sweep: one of --preset or --config is required\n";
                return kConfigExit;
            }
            SweepSpec spec = preset.empty() ? parse_sweep(sweep_config) : sweep_preset(preset);
            const Overrides o = sweep_flags.to_overrides();
            if (o.seed) spec.seeds = {*o.seed};
            if (o.ticks) spec.base.max_ticks = *o.ticks;
            if (o.share_p) {
                if (!(*o.share_p >= 0.0 && *o.share_p <= 1.0)) throw ConfigError("--share-p must lie in [0, 1]");
                spec.share_p = {*o.share_p};
            }
            if (o.agents) spec.agents = {*o.agents};
            if (o.arena) spec.arenas = {*o.arena};
            (void)spec.cells();
            const auto rows = run_sweep(spec, sweep_out, jobs);
            std::size_t failed = 0;
            for (const auto& r : rows) failed += r.status != "ok";
            std::printf("%zu cells, %zu failed; aggregate written to %s\n", rows.size(), failed,
                        (std::filesystem::path(sweep_out) / "aggregate.csv").c_str());
            if (failed > 0) return kRuntimeExit;
        } else if (*analyze_cmd) {
            const auto rows = analyze_directory(analyze_in, analysis);
            write_aggregate_csv(rows, std::filesystem::path(analyze_out));
            std::printf("%zu runs analyzed; aggregate written to %s\n", rows.size(), analyze_out.c_str());
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kRuntimeExit;
    }
    return 0;
}
