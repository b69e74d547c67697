#include "policyshare/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "policyshare/errors.hpp"

namespace policyshare {

void RewardParams::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("reward cost C must be positive");
    if (!(k_gain > 0.0) || !std::isfinite(k_gain)) throw ConfigError("reward gain k must be positive");
}

void SimConfig::validate() const {
    arena.validate();
    motion.validate(arena);
    try {
        rl.validate();
        share.validate();
    } catch (const InputDomainError& e) {
        throw ConfigError(e.what());
    }
    reward.validate();
    if (n_sectors < 2 || n_sectors > 16) throw ConfigError("sectors must lie in [2, 16]");
    if (max_ticks == 0) throw ConfigError("ticks must be positive");
    if (metrics_stride == 0) throw ConfigError("metrics_stride must be positive");
}

double coordination_score(std::span<const AgentMind> agents, std::size_t n_sectors) {
    if (agents.empty()) throw InputDomainError("coordination_score needs at least one agent");
    const std::size_t n_states = std::size_t{1} << n_sectors;
    std::vector<std::size_t> votes(n_sectors);
    std::vector<std::uint32_t> choice(agents.size());
    double total = 0.0;
    for (std::uint32_t s = 0; s < n_states; ++s) {
        std::fill(votes.begin(), votes.end(), 0);
        for (std::size_t i = 0; i < agents.size(); ++i) {
            choice[i] = agents[i].q.argmax(StateId{s}).value;
            ++votes[choice[i]];
        }
        const auto mode = std::max_element(votes.begin(), votes.end());
        total += static_cast<double>(*mode) / static_cast<double>(agents.size());
    }
    return total / static_cast<double>(n_states);
}

Simulation::Simulation(SimConfig config) : config_(std::move(config)) { config_.validate(); }

std::uint64_t Simulation::watchdog_limit() const {
    const auto& m = config_.motion;
    // A slide can run as slow as a quarter of the forward speed.
    const double travel = m.slide ? 4.0 * std::numbers::sqrt2 * config_.arena.side_length
                                  : config_.arena.side_length;
    return static_cast<std::uint64_t>(std::ceil(travel / m.speed)) +
           static_cast<std::uint64_t>(std::ceil(kTwoPi / m.angular_speed));
}

void Simulation::bootstrap() {
    if (bootstrapped_) return;
    bootstrapped_ = true;
    const std::size_t m = config_.arena.agent_count;

    RandomStream placement(config_.seed, kPlacementStream);
    world_ = place_agents(config_.arena, config_.n_sectors, config_.motion, placement);

    rngs_.clear();
    rngs_.reserve(m);
    minds_.assign(m, AgentMind{});
    for (std::size_t i = 0; i < m; ++i) {
        rngs_.emplace_back(config_.seed, agent_stream(i));
        AgentMind& mind = minds_[i];
        mind.q = QTable::for_sectors(config_.n_sectors);
        mind.policy = config_.policy_kind == PolicyKind::Softmax
                          ? softmax_policy(mind.q, config_.rl.tau)
                          : epsilon_greedy_policy(mind.q, config_.rl.epsilon);
    }
    for (std::size_t i = 0; i < m; ++i) {
        start_action(i, sense_state(i, world_, config_.arena, config_.motion, config_.n_sectors));
    }
}

void Simulation::refresh_policy_row(AgentMind& mind, StateId s) const {
    if (config_.policy_kind == PolicyKind::Softmax) {
        softmax_row(mind.q, s, config_.rl.tau, mind.policy.row(s));
    } else {
        epsilon_greedy_row(mind.q, s, config_.rl.epsilon, mind.policy.row(s));
    }
}

void Simulation::start_action(std::size_t agent, StateId s) {
    AgentMind& mind = minds_[agent];
    AgentBody& body = world_[agent];
    const ActionId a = sample_action(mind.policy, s, rngs_[agent]);
    if (a == kForward) begin_forward(body);
    else begin_rotation(body, a.value, config_.n_sectors);
    mind.pending = AgentMind::Pending{s, a, body.cumulative_distance, tick_};
    ++stats_.actions_started;
}

void Simulation::process_event(const CollisionEvent& event) {
    const std::size_t i = event.agent;
    AgentMind& mind = minds_[i];
    const AgentBody& body = world_[i];

    EventRecord record;
    record.tick = tick_;
    record.agent = i;
    record.kind = event.kind;
    record.next_state = sense_state(i, world_, config_.arena, config_.motion, config_.n_sectors);

    if (mind.pending) {
        const auto& pending = *mind.pending;
        record.updated = true;
        record.state = pending.state;
        record.action = pending.action;
        record.distance = body.cumulative_distance - pending.distance_at_start;
        record.reward = config_.reward.reward(record.distance);
        q_update(mind.q, pending.state, pending.action, record.reward, record.next_state, config_.rl);
        if (!std::isfinite(mind.q.q(pending.state, pending.action))) {
            throw SimulationError("non-finite Q-value for agent " + std::to_string(i) + " at tick " +
                                  std::to_string(tick_));
        }
        refresh_policy_row(mind, pending.state);
        ++stats_.updates;
        mind.pending.reset();
    }

    if (config_.sharing_enabled) {
        const auto neighbors = touching_agents(i, world_, config_.arena, config_.motion);
        record.broadcast = maybe_broadcast(i, neighbors, minds_, config_.share, rngs_[i], tick_);
        if (record.broadcast.fired) ++stats_.broadcasts;
        stats_.assimilations += record.broadcast.assimilated.size();
    } else {
        // Keeps the stream aligned with a p = 0 run.
        (void)rngs_[i].uniform();
    }

    start_action(i, record.next_state);
    record.next_action = mind.pending->action;
    ++stats_.events;
    if (observer_) observer_(record);
}

void Simulation::check_watchdog() const {
    const std::uint64_t limit = watchdog_limit();
    for (std::size_t i = 0; i < minds_.size(); ++i) {
        const auto& pending = minds_[i].pending;
        if (pending && tick_ - pending->start_tick > limit) {
            throw SimulationError("agent " + std::to_string(i) + " has waited " +
                                  std::to_string(tick_ - pending->start_tick) +
                                  " ticks for an event at tick " + std::to_string(tick_));
        }
    }
}

void Simulation::tick() {
    bootstrap();
    ++tick_;
    std::vector<CollisionEvent> events;
    try {
        events = step_bodies(world_, config_.arena, config_.motion, config_.n_sectors);
    } catch (const PhysicsError& e) {
        throw PhysicsError(std::string(e.what()) + " (tick " + std::to_string(tick_) + ", seed " +
                           std::to_string(config_.seed) + ")");
    }
    for (const auto& ev : events) process_event(ev);
    check_watchdog();
}

MetricsRow Simulation::snapshot() const {
    MetricsRow row;
    row.tick = tick_;
    const double m = static_cast<double>(world_.size());
    double total = 0.0;
    for (const auto& b : world_) total += b.cumulative_distance;
    row.mean_distance = total / m;
    row.mean_velocity = tick_ > last_row_tick_
                            ? (row.mean_distance - last_mean_distance_) /
                                  static_cast<double>(tick_ - last_row_tick_)
                            : 0.0;
    row.events = stats_.events;
    row.broadcasts = stats_.broadcasts;
    row.assimilations = stats_.assimilations;
    row.coordination = coordination_score(minds_, config_.n_sectors);
    if (config_.wide_metrics) {
        const std::size_t n_states = std::size_t{1} << config_.n_sectors;
        row.mean_policy.assign(n_states * config_.n_sectors, 0.0);
        for (const auto& mind : minds_) {
            for (std::uint32_t s = 0; s < n_states; ++s) {
                auto r = mind.policy.row(StateId{s});
                for (std::size_t a = 0; a < r.size(); ++a) row.mean_policy[s * config_.n_sectors + a] += r[a];
            }
        }
        for (double& p : row.mean_policy) p /= m;
    }
    return row;
}

MetricsSeries Simulation::run() {
    bootstrap();
    MetricsSeries series;
    series.n_sectors = config_.n_sectors;
    series.wide = config_.wide_metrics;
    auto record = [&] {
        MetricsRow row = snapshot();
        last_mean_distance_ = row.mean_distance;
        last_row_tick_ = row.tick;
        series.rows.push_back(std::move(row));
    };
    if (tick_ == 0) record();
    while (tick_ < config_.max_ticks) {
        tick();
        if (tick_ % config_.metrics_stride == 0) record();
    }
    return series;
}

MetricsSeries run(const SimConfig& config) { return Simulation(config).run(); }

}  // namespace policyshare
