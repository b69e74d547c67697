#include "policyshare/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "policyshare/errors.hpp"

namespace policyshare {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const ConfigEntry& e, const std::string& expected) {
    throw ConfigError("line " + std::to_string(e.line) + ": key '" + e.key + "' expects " + expected +
                      ", got '" + e.value + "'");
}

double parse_real(const ConfigEntry& e) {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) bad_value(e, "a real number");
    return v;
}

std::uint64_t parse_count(const ConfigEntry& e) {
    std::uint64_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) bad_value(e, "a non-negative integer");
    return v;
}

bool parse_bool(const ConfigEntry& e) {
    static const std::set<std::string> yes{"true", "1", "on", "yes"};
    static const std::set<std::string> no{"false", "0", "off", "no"};
    if (yes.count(e.value)) return true;
    if (no.count(e.value)) return false;
    bad_value(e, "a boolean (true/false)");
}

double in_range(const ConfigEntry& e, double v, double lo, double hi, const std::string& what) {
    if (!(v >= lo && v <= hi)) {
        throw ConfigError("line " + std::to_string(e.line) + ": range error: key '" + e.key + "'=" +
                          e.value + " must lie in " + what);
    }
    return v;
}

double positive(const ConfigEntry& e, double v) {
    if (!(v > 0.0)) {
        throw ConfigError("line " + std::to_string(e.line) + ": range error: key '" + e.key +
                          "' must be positive, got " + e.value);
    }
    return v;
}

const std::set<std::string> kManifestKeys{"density", "arena_label", "code_version"};

std::string policy_name(PolicyKind k) {
    return k == PolicyKind::Softmax ? "softmax" : "epsilon_greedy";
}

}  // namespace

std::vector<ConfigEntry> read_entries(std::istream& in) {
    std::vector<ConfigEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value, got '" + body + "'");
        }
        entries.push_back({line_no, trim(body.substr(0, eq)), trim(body.substr(eq + 1))});
    }
    return entries;
}

std::string format_shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string arena_label(const ArenaSpec& arena) {
    const double ratio = arena.side_length / arena.agent_radius;
    if (std::abs(ratio - 15.0) < 1e-9) return "small";
    if (std::abs(ratio - 20.0) < 1e-9) return "large";
    return "custom";
}

void apply_arena_preset(SimConfig& config, const std::string& name) {
    if (name == "small") config.arena.side_length = 15.0 * config.arena.agent_radius;
    else if (name == "large") config.arena.side_length = 20.0 * config.arena.agent_radius;
    else throw ConfigError("unknown arena preset '" + name + "' (expected small or large)");
}

SimConfig config_from_entries(const std::vector<ConfigEntry>& entries, bool allow_manifest_keys) {
    SimConfig config;
    std::optional<double> speed, angular_speed, contact_tolerance, side;
    std::optional<std::string> preset;
    std::set<std::string> seen;

    const std::map<std::string, std::function<void(const ConfigEntry&)>> handlers{
        {"arena", [&](const ConfigEntry& e) {
             if (e.value != "small" && e.value != "large") bad_value(e, "small or large");
             preset = e.value;
         }},
        {"arena_side", [&](const ConfigEntry& e) { side = positive(e, parse_real(e)); }},
        {"agent_radius", [&](const ConfigEntry& e) { config.arena.agent_radius = positive(e, parse_real(e)); }},
        {"agents", [&](const ConfigEntry& e) {
             const auto v = parse_count(e);
             if (v < 1) throw ConfigError("line " + std::to_string(e.line) + ": range error: agents must be >= 1");
             config.arena.agent_count = v;
         }},
        {"speed", [&](const ConfigEntry& e) { speed = positive(e, parse_real(e)); }},
        {"angular_speed", [&](const ConfigEntry& e) { angular_speed = positive(e, parse_real(e)); }},
        {"contact_tolerance", [&](const ConfigEntry& e) { contact_tolerance = positive(e, parse_real(e)); }},
        {"sectors", [&](const ConfigEntry& e) {
             config.n_sectors = static_cast<std::size_t>(in_range(e, static_cast<double>(parse_count(e)), 2, 16, "[2, 16]"));
         }},
        {"gamma", [&](const ConfigEntry& e) { config.rl.gamma = in_range(e, parse_real(e), 0, 1, "[0, 1]"); }},
        {"tau", [&](const ConfigEntry& e) { config.rl.tau = positive(e, parse_real(e)); }},
        {"epsilon", [&](const ConfigEntry& e) { config.rl.epsilon = in_range(e, parse_real(e), 0, 1, "[0, 1]"); }},
        {"policy", [&](const ConfigEntry& e) {
             if (e.value == "softmax") config.policy_kind = PolicyKind::Softmax;
             else if (e.value == "epsilon_greedy") config.policy_kind = PolicyKind::EpsilonGreedy;
             else bad_value(e, "softmax or epsilon_greedy");
         }},
        {"value_mode", [&](const ConfigEntry& e) {
             if (e.value == "sum") config.share.value_mode = ValueMode::Sum;
             else if (e.value == "weighted") config.share.value_mode = ValueMode::PolicyWeighted;
             else bad_value(e, "sum or weighted");
         }},
        {"cost", [&](const ConfigEntry& e) { config.reward.c = positive(e, parse_real(e)); }},
        {"gain", [&](const ConfigEntry& e) { config.reward.k_gain = positive(e, parse_real(e)); }},
        {"share_p", [&](const ConfigEntry& e) { config.share.p = in_range(e, parse_real(e), 0, 1, "[0, 1]"); }},
        {"sharing", [&](const ConfigEntry& e) { config.sharing_enabled = parse_bool(e); }},
        {"slide", [&](const ConfigEntry& e) { config.motion.slide = parse_bool(e); }},
        {"ticks", [&](const ConfigEntry& e) {
             config.max_ticks = parse_count(e);
             if (config.max_ticks == 0) throw ConfigError("line " + std::to_string(e.line) + ": range error: ticks must be > 0");
         }},
        {"seed", [&](const ConfigEntry& e) { config.seed = parse_count(e); }},
        {"metrics_stride", [&](const ConfigEntry& e) {
             config.metrics_stride = parse_count(e);
             if (config.metrics_stride == 0) throw ConfigError("line " + std::to_string(e.line) + ": range error: metrics_stride must be > 0");
         }},
        {"wide_metrics", [&](const ConfigEntry& e) { config.wide_metrics = parse_bool(e); }},
    };

    for (const auto& e : entries) {
        if (!seen.insert(e.key).second) {
            throw ConfigError("line " + std::to_string(e.line) + ": duplicate key '" + e.key + "'");
        }
        if (kManifestKeys.count(e.key)) {
            if (allow_manifest_keys) continue;
            throw ConfigError("line " + std::to_string(e.line) + ": key '" + e.key +
                              "' is written by the harness and cannot be set");
        }
        const auto it = handlers.find(e.key);
        if (it == handlers.end()) {
            throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
        }
        it->second(e);
    }

    const double r = config.arena.agent_radius;
    if (preset) apply_arena_preset(config, *preset);
    else config.arena.side_length = 15.0 * r;
    if (side) config.arena.side_length = *side;
    const MotionParams defaults = MotionParams::defaults_for(r);
    config.motion.speed = speed.value_or(defaults.speed);
    config.motion.angular_speed = angular_speed.value_or(defaults.angular_speed);
    config.motion.contact_tolerance = contact_tolerance.value_or(defaults.contact_tolerance);
    config.validate();
    return config;
}

SimConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return config_from_entries(read_entries(in));
}

SimConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
        return config_from_entries(read_entries(in));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::vector<std::pair<std::string, std::string>> manifest_entries(const SimConfig& c) {
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    return {
        {"arena_side", format_shortest(c.arena.side_length)},
        {"agent_radius", format_shortest(c.arena.agent_radius)},
        {"agents", std::to_string(c.arena.agent_count)},
        {"speed", format_shortest(c.motion.speed)},
        {"angular_speed", format_shortest(c.motion.angular_speed)},
        {"contact_tolerance", format_shortest(c.motion.contact_tolerance)},
        {"sectors", std::to_string(c.n_sectors)},
        {"gamma", format_shortest(c.rl.gamma)},
        {"tau", format_shortest(c.rl.tau)},
        {"epsilon", format_shortest(c.rl.epsilon)},
        {"policy", policy_name(c.policy_kind)},
        {"value_mode", c.share.value_mode == ValueMode::Sum ? "sum" : "weighted"},
        {"cost", format_shortest(c.reward.c)},
        {"gain", format_shortest(c.reward.k_gain)},
        {"share_p", format_shortest(c.share.p)},
        {"sharing", b(c.sharing_enabled)},
        {"slide", b(c.motion.slide)},
        {"ticks", std::to_string(c.max_ticks)},
        {"seed", std::to_string(c.seed)},
        {"metrics_stride", std::to_string(c.metrics_stride)},
        {"wide_metrics", b(c.wide_metrics)},
        {"density", format_shortest(c.arena.density())},
        {"arena_label", arena_label(c.arena)},
        {"code_version", kCodeVersion},
    };
}

void write_manifest(const SimConfig& config, std::ostream& out) {
    for (const auto& [k, v] : manifest_entries(config)) out << k << '=' << v << '\n';
}

void write_manifest(const SimConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw SimulationError("cannot write manifest " + path.string());
    write_manifest(config, out);
}

SimConfig read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest " + path.string());
    return config_from_entries(read_entries(in), true);
}

void apply_overrides(SimConfig& config, const Overrides& o) {
    if (o.seed) config.seed = *o.seed;
    if (o.ticks) config.max_ticks = *o.ticks;
    if (o.share_p) {
        if (!(*o.share_p >= 0.0 && *o.share_p <= 1.0)) {
            throw ConfigError("--share-p must lie in [0, 1]");
        }
        config.share.p = *o.share_p;
    }
    if (o.agents) config.arena.agent_count = *o.agents;
    if (o.arena) apply_arena_preset(config, *o.arena);
    config.validate();
}

}  // namespace policyshare
