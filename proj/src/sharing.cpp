#include "policyshare/sharing.hpp"

#include <algorithm>
#include <string>

#include "policyshare/errors.hpp"

namespace policyshare {

void ShareParams::validate() const {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InputDomainError("share probability must lie in [0, 1], got " + std::to_string(p));
    }
}

BroadcastRecord maybe_broadcast(std::size_t source, std::span<const std::size_t> neighbors,
                                std::span<AgentMind> agents, const ShareParams& params,
                                RandomStream& rng, std::uint64_t tick) {
    BroadcastRecord record;
    record.tick = tick;
    record.source = source;
    if (!(rng.uniform() < params.p)) return record;
    record.fired = true;

    std::vector<std::size_t> order(neighbors.begin(), neighbors.end());
    std::sort(order.begin(), order.end());
    const AgentMind& from = agents[source];
    for (std::size_t b : order) {
        if (b == source) continue;
        record.recipients.push_back(b);
        AgentMind& to = agents[b];
        if (policy_dominates(from.q, from.policy, to.q, to.policy, params.value_mode)) {
            to.q = from.q;
            to.policy = from.policy;
            record.assimilated.push_back(b);
        }
    }
    return record;
}

}  // namespace policyshare
