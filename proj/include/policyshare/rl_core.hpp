#pragma once

// Tabular Q-learning kernel: action-value tables with visit counts, the
// harmonic learning-rate schedule, softmax / epsilon-greedy policy
// improvement and the value-based policy ordering used for assimilation.

#include <cstdint>
#include <span>
#include <vector>

#include "policyshare/random.hpp"

namespace policyshare {

// Sensor bitmask: bit n is set iff sensor wedge n touches an object.
struct StateId {
    std::uint32_t value = 0;
    friend bool operator==(StateId, StateId) = default;
};

// 0 moves forward, n in [1, N-1] rotates the heading by 2*pi*n/N.
struct ActionId {
    std::uint32_t value = 0;
    friend bool operator==(ActionId, ActionId) = default;
};

inline constexpr ActionId kForward{0};

struct RlParams {
    double gamma = 0.9;
    double tau = 0.5;
    double epsilon = 0.1;

    void validate() const;
};

// How a state's fitness is measured when comparing two tables.
enum class ValueMode {
    Sum,             // V(s) = sum_a Q(s,a)
    PolicyWeighted,  // V(s) = sum_a pi(s,a) Q(s,a)
};

class QTable {
public:
    QTable() = default;
    QTable(std::size_t n_states, std::size_t n_actions);

    // Table for an agent with `n_sectors` sensors: 2^N states, N actions.
    static QTable for_sectors(std::size_t n_sectors);

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    double q(StateId s, ActionId a) const { return q_[index(s, a)]; }
    double& q(StateId s, ActionId a) { return q_[index(s, a)]; }
    std::uint64_t visits(StateId s, ActionId a) const { return visits_[index(s, a)]; }
    std::uint64_t& visits(StateId s, ActionId a) { return visits_[index(s, a)]; }

    std::span<const double> row(StateId s) const {
        return {q_.data() + static_cast<std::size_t>(s.value) * n_actions_, n_actions_};
    }

    double max_q(StateId s) const;
    // Lowest ActionId among the maximizers.
    ActionId argmax(StateId s) const;

    bool all_finite() const;
    bool same_shape(const QTable& other) const {
        return n_states_ == other.n_states_ && n_actions_ == other.n_actions_;
    }

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    std::size_t index(StateId s, ActionId a) const;

    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> q_;
    std::vector<std::uint64_t> visits_;
};

class Policy {
public:
    Policy() = default;
    Policy(std::size_t n_states, std::size_t n_actions);

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    double prob(StateId s, ActionId a) const {
        return probs_[static_cast<std::size_t>(s.value) * n_actions_ + a.value];
    }
    std::span<const double> row(StateId s) const {
        return {probs_.data() + static_cast<std::size_t>(s.value) * n_actions_, n_actions_};
    }
    std::span<double> row(StateId s) {
        return {probs_.data() + static_cast<std::size_t>(s.value) * n_actions_, n_actions_};
    }

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> probs_;
};

// Learning rate for the next visit of (s,a): 1 / (k + 1) where k is the
// number of visits so far.
double alpha_for(const QTable& q, StateId s, ActionId a);

void q_update(QTable& q, StateId s, ActionId a, double reward, StateId s_next,
              const RlParams& params);

Policy softmax_policy(const QTable& q, double tau);
Policy epsilon_greedy_policy(const QTable& q, double epsilon);

// Single-row variants; write the distribution for state `s` into `out`.
void softmax_row(const QTable& q, StateId s, double tau, std::span<double> out);
void epsilon_greedy_row(const QTable& q, StateId s, double epsilon, std::span<double> out);

double state_value(const QTable& q, StateId s);
double weighted_state_value(const QTable& q, const Policy& policy, StateId s);

// true iff V_a(s) >= V_b(s) for every state.
bool policy_dominates(const QTable& qa, const QTable& qb);
bool policy_dominates(const QTable& qa, const Policy& pa, const QTable& qb, const Policy& pb,
                      ValueMode mode);

// Inverse-CDF draw over ascending ActionId; consumes exactly one uniform.
ActionId sample_action(const Policy& policy, StateId s, RandomStream& rng);

}  // namespace policyshare
