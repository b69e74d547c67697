#pragma once

// Event-driven simulation loop. Each tick advances the physics; every agent
// with an event then closes its pending action with one Q-learning update,
// refreshes its policy, may broadcast that policy to touching agents, and
// starts its next action.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "policyshare/arena.hpp"
#include "policyshare/metrics.hpp"
#include "policyshare/random.hpp"
#include "policyshare/rl_core.hpp"
#include "policyshare/sharing.hpp"

namespace policyshare {

struct RewardParams {
    double c = 1.0;       // per-action cost
    double k_gain = 0.1;  // reward per unit distance

    void validate() const;
    double reward(double distance) const { return -c + k_gain * distance; }
};

enum class PolicyKind : std::uint8_t { Softmax, EpsilonGreedy };

struct SimConfig {
    ArenaSpec arena;
    MotionParams motion = MotionParams::defaults_for(10.0);
    RlParams rl;
    RewardParams reward;
    ShareParams share;
    bool sharing_enabled = true;
    std::size_t n_sectors = 4;
    PolicyKind policy_kind = PolicyKind::Softmax;
    std::uint64_t max_ticks = 2'000'000;
    std::uint64_t seed = 1;
    std::uint64_t metrics_stride = 1000;
    bool wide_metrics = false;

    void validate() const;
};

// Everything known about one processed event; handed to an optional observer.
struct EventRecord {
    std::uint64_t tick = 0;
    std::size_t agent = 0;
    EventKind kind = EventKind::WallCollision;
    bool updated = false;  // false for an event with no pending action
    StateId state;         // s_t of the closed action (valid when updated)
    ActionId action;       // a_t of the closed action (valid when updated)
    double distance = 0.0; // D of the closed action
    double reward = 0.0;
    StateId next_state;
    ActionId next_action;
    BroadcastRecord broadcast;
};

struct RunStats {
    std::uint64_t events = 0;
    std::uint64_t updates = 0;
    std::uint64_t actions_started = 0;
    std::uint64_t broadcasts = 0;
    std::uint64_t assimilations = 0;
};

// Fraction of agents whose greedy action agrees with the population's modal
// greedy action, averaged over all 2^N states.
double coordination_score(std::span<const AgentMind> agents, std::size_t n_sectors);

class Simulation {
public:
    using Observer = std::function<void(const EventRecord&)>;

    explicit Simulation(SimConfig config);

    // Places agents and starts each one's first action (no update).
    // Idempotent; tick() calls it when needed.
    void bootstrap();
    // Advances one tick and processes its events.
    void tick();
    // Runs until max_ticks, recording metrics every stride ticks (and at 0).
    MetricsSeries run();

    void set_observer(Observer observer) { observer_ = std::move(observer); }

    const SimConfig& config() const { return config_; }
    std::uint64_t current_tick() const { return tick_; }
    const World& world() const { return world_; }
    World& world() { return world_; }
    std::span<const AgentMind> minds() const { return minds_; }
    std::span<AgentMind> minds() { return minds_; }
    const RunStats& stats() const { return stats_; }

    // Longest an action may stay pending before the run is declared stuck.
    std::uint64_t watchdog_limit() const;

    MetricsRow snapshot() const;

private:
    void refresh_policy_row(AgentMind& mind, StateId s) const;
    void start_action(std::size_t agent, StateId s);
    void process_event(const CollisionEvent& event);
    void check_watchdog() const;

    SimConfig config_;
    World world_;
    std::vector<AgentMind> minds_;
    std::vector<RandomStream> rngs_;
    RunStats stats_;
    std::uint64_t tick_ = 0;
    bool bootstrapped_ = false;
    double last_mean_distance_ = 0.0;
    std::uint64_t last_row_tick_ = 0;
    Observer observer_;
};

// Convenience wrapper: Simulation(config).run().
MetricsSeries run(const SimConfig& config);

}  // namespace policyshare
