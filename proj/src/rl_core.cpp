#include "policyshare/rl_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "policyshare/errors.hpp"

namespace policyshare {

void RlParams::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw InputDomainError("gamma must lie in [0, 1], got " + std::to_string(gamma));
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw InputDomainError("tau must be a positive finite real, got " + std::to_string(tau));
    }
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw InputDomainError("epsilon must lie in [0, 1], got " + std::to_string(epsilon));
    }
}

QTable::QTable(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states),
      n_actions_(n_actions),
      q_(n_states * n_actions, 0.0),
      visits_(n_states * n_actions, 0) {
    if (n_states == 0 || n_actions == 0) {
        throw InputDomainError("QTable needs at least one state and one action");
    }
}

QTable QTable::for_sectors(std::size_t n_sectors) {
    return QTable(std::size_t{1} << n_sectors, n_sectors);
}

std::size_t QTable::index(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s.value) * n_actions_ + a.value;
}

double QTable::max_q(StateId s) const {
    auto r = row(s);
    return *std::max_element(r.begin(), r.end());
}

ActionId QTable::argmax(StateId s) const {
    auto r = row(s);
    // max_element returns the first maximizer.
    return ActionId{static_cast<std::uint32_t>(std::max_element(r.begin(), r.end()) - r.begin())};
}

bool QTable::all_finite() const {
    return std::all_of(q_.begin(), q_.end(), [](double v) { return std::isfinite(v); });
}

Policy::Policy(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states), n_actions_(n_actions), probs_(n_states * n_actions, 0.0) {}

double alpha_for(const QTable& q, StateId s, ActionId a) {
    return 1.0 / (static_cast<double>(q.visits(s, a)) + 1.0);
}

namespace {

void check_indices(const QTable& q, StateId s, ActionId a) {
    if (s.value >= q.n_states() || a.value >= q.n_actions()) {
        throw InputDomainError("state/action index out of range for Q-table");
    }
}

}  // namespace

void q_update(QTable& q, StateId s, ActionId a, double reward, StateId s_next,
              const RlParams& params) {
    check_indices(q, s, a);
    check_indices(q, s_next, kForward);
    if (!std::isfinite(reward)) {
        throw InputDomainError("q_update: reward must be finite");
    }
    const double alpha = alpha_for(q, s, a);
    double& value = q.q(s, a);
    value += alpha * (reward + params.gamma * q.max_q(s_next) - value);
    ++q.visits(s, a);
}

void softmax_row(const QTable& q, StateId s, double tau, std::span<double> out) {
    if (!(tau > 0.0)) {
        throw InputDomainError("softmax temperature must be positive");
    }
    auto r = q.row(s);
    const double top = *std::max_element(r.begin(), r.end());
    double total = 0.0;
    for (std::size_t a = 0; a < r.size(); ++a) {
        out[a] = std::exp((r[a] - top) / tau);
        total += out[a];
    }
    for (double& p : out) p /= total;
}

void epsilon_greedy_row(const QTable& q, StateId s, double epsilon, std::span<double> out) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw InputDomainError("epsilon must lie in [0, 1]");
    }
    const double base = epsilon / static_cast<double>(q.n_actions());
    std::fill(out.begin(), out.end(), base);
    out[q.argmax(s).value] = 1.0 - epsilon + base;
}

Policy softmax_policy(const QTable& q, double tau) {
    Policy p(q.n_states(), q.n_actions());
    for (std::uint32_t s = 0; s < q.n_states(); ++s) softmax_row(q, StateId{s}, tau, p.row(StateId{s}));
    return p;
}

Policy epsilon_greedy_policy(const QTable& q, double epsilon) {
    Policy p(q.n_states(), q.n_actions());
    for (std::uint32_t s = 0; s < q.n_states(); ++s) {
        epsilon_greedy_row(q, StateId{s}, epsilon, p.row(StateId{s}));
    }
    return p;
}

double state_value(const QTable& q, StateId s) {
    double v = 0.0;
    for (double x : q.row(s)) v += x;
    return v;
}

double weighted_state_value(const QTable& q, const Policy& policy, StateId s) {
    auto qs = q.row(s);
    auto ps = policy.row(s);
    double v = 0.0;
    for (std::size_t a = 0; a < qs.size(); ++a) v += ps[a] * qs[a];
    return v;
}

bool policy_dominates(const QTable& qa, const QTable& qb) {
    if (!qa.same_shape(qb)) {
        throw InputDomainError("policy_dominates: Q-table dimensions differ");
    }
    for (std::uint32_t s = 0; s < qa.n_states(); ++s) {
        if (state_value(qa, StateId{s}) < state_value(qb, StateId{s})) return false;
    }
    return true;
}

bool policy_dominates(const QTable& qa, const Policy& pa, const QTable& qb, const Policy& pb,
                      ValueMode mode) {
    if (mode == ValueMode::Sum) return policy_dominates(qa, qb);
    if (!qa.same_shape(qb) || pa.n_states() != qa.n_states() || pb.n_states() != qb.n_states()) {
        throw InputDomainError("policy_dominates: table dimensions differ");
    }
    for (std::uint32_t s = 0; s < qa.n_states(); ++s) {
        if (weighted_state_value(qa, pa, StateId{s}) < weighted_state_value(qb, pb, StateId{s})) {
            return false;
        }
    }
    return true;
}

ActionId sample_action(const Policy& policy, StateId s, RandomStream& rng) {
    auto r = policy.row(s);
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t a = 0; a < r.size(); ++a) {
        if (r[a] <= 0.0) continue;
        cumulative += r[a];
        last_positive = a;
        if (u < cumulative) return ActionId{static_cast<std::uint32_t>(a)};
    }
    // Row sums a hair under 1 can leave u above the final cumulative value.
    return ActionId{static_cast<std::uint32_t>(last_positive)};
}

}  // namespace policyshare
