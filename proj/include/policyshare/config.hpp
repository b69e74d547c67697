#pragma once

// Flat key=value run configuration, manifests, and command-line overrides.
//
// Recognized keys (defaults in parentheses):
//   arena            small | large preset, sets arena_side to 15R or 20R
//   arena_side       L (150)             agent_radius  R (10)
//   agents           M (20)              sectors       N (4)
//   speed            v (R/10)            angular_speed omega (pi/20)
//   contact_tolerance (R/100)           slide  true | false (true)
//   gamma (0.9)  tau (0.5)  epsilon (0.1)
//   policy           softmax | epsilon_greedy (softmax)
//   value_mode       sum | weighted (sum)
//   cost  C (1)      gain  k (0.1)
//   share_p (0)      sharing  true | false (true)
//   ticks (2000000)  seed (1)  metrics_stride (1000)  wide_metrics (false)
// Blank lines and lines starting with '#' are ignored.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "policyshare/engine.hpp"

namespace policyshare {

inline constexpr const char* kCodeVersion = "0.1.0";

struct ConfigEntry {
    std::size_t line = 0;
    std::string key;
    std::string value;
};

std::vector<ConfigEntry> read_entries(std::istream& in);

// Manifest-only keys (density, arena_label, code_version) are accepted and
// ignored when `allow_manifest_keys` is set, rejected otherwise.
SimConfig config_from_entries(const std::vector<ConfigEntry>& entries,
                              bool allow_manifest_keys = false);

SimConfig parse_config_text(const std::string& text);
SimConfig parse_config(const std::filesystem::path& path);

// "small" for L/R = 15, "large" for L/R = 20, "custom" otherwise.
std::string arena_label(const ArenaSpec& arena);
void apply_arena_preset(SimConfig& config, const std::string& name);

// Shortest decimal text that reads back to the same double.
std::string format_shortest(double v);

std::vector<std::pair<std::string, std::string>> manifest_entries(const SimConfig& config);
void write_manifest(const SimConfig& config, std::ostream& out);
void write_manifest(const SimConfig& config, const std::filesystem::path& path);
SimConfig read_manifest(const std::filesystem::path& path);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> ticks;
    std::optional<double> share_p;
    std::optional<std::size_t> agents;
    std::optional<std::string> arena;
};

// Applies overrides and re-validates.
void apply_overrides(SimConfig& config, const Overrides& overrides);

}  // namespace policyshare
