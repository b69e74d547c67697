#pragma once

// Probabilistic post-event policy broadcast with fitness-gated assimilation.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "policyshare/random.hpp"
#include "policyshare/rl_core.hpp"

namespace policyshare {

// The learning half of an agent. The pending triple binds an action to the
// event that will close it.
struct AgentMind {
    struct Pending {
        StateId state;
        ActionId action;
        double distance_at_start = 0.0;
        std::uint64_t start_tick = 0;
    };

    QTable q;
    Policy policy;
    std::optional<Pending> pending;
};

struct ShareParams {
    double p = 0.0;  // broadcast probability per event
    ValueMode value_mode = ValueMode::Sum;

    void validate() const;
};

struct BroadcastRecord {
    std::uint64_t tick = 0;
    std::size_t source = 0;
    bool fired = false;  // the gating draw fell below p
    std::vector<std::size_t> recipients;
    std::vector<std::size_t> assimilated;  // subset of recipients
};

// Draws one uniform from `rng`. Below p, every neighbor whose table the
// source dominates receives a deep copy of the source's Q-values, visit
// counts and policy. Neighbors are visited in ascending index order.
BroadcastRecord maybe_broadcast(std::size_t source, std::span<const std::size_t> neighbors,
                                std::span<AgentMind> agents, const ShareParams& params,
                                RandomStream& rng, std::uint64_t tick);

}  // namespace policyshare
