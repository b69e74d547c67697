#pragma once

// Shared test fixtures: small deterministic MDPs and a Q-learning driver that
// explores them with uniformly random (state, action) pairs.

#include <algorithm>
#include <cmath>
#include <tuple>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "policyshare/random.hpp"
#include "policyshare/rl_core.hpp"

namespace fixture {

using oracle::Mdp;
inline constexpr int X = Mdp::kAbsorbing;

// Three-state corridor; moving right from the last state reaches the goal.
inline Mdp corridor() {
    return {3, 2, {{1, 0}, {2, 0}, {X, 1}}, {{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}};
}

// Five states, three actions, branching toward two exits with mixed-sign
// rewards.
inline Mdp branching() {
    return {5, 3,
            {{1, 2, 0}, {3, 4, 0}, {4, X, 1}, {X, 4, 1}, {X, X, 2}},
            {{-0.5, -0.2, -1.0}, {0.3, -0.1, -0.4}, {-0.7, 0.2, 0.1}, {2.0, -0.3, 0.0}, {1.0, -1.0, 0.5}}};
}

// Four states on a ring with a per-move cost and one exit. Cycles are
// available but never optimal.
inline Mdp ring_with_exit() {
    return {4, 3,
            {{1, 3, 0}, {2, 0, 1}, {3, 1, X}, {0, 2, 3}},
            {{-1.0, -1.0, -2.0}, {-1.0, -1.0, -2.0}, {-1.0, -1.0, 5.0}, {-1.0, -1.0, -2.0}}};
}

struct LearnResult {
    policyshare::QTable q;
    double max_error = 0.0;
};

enum class Schedule {
    UniformRandom,   // independent uniform (s, a) draws
    BackwardSweeps,  // full sweeps, states nearest the exit (under Q*) first
};

// Greedy steps from each state to absorption under the oracle's Q*.
inline std::vector<std::size_t> steps_to_exit(const Mdp& mdp, const std::vector<std::vector<double>>& star) {
    std::vector<std::size_t> steps(mdp.n_states);
    for (std::size_t s0 = 0; s0 < mdp.n_states; ++s0) {
        std::size_t s = s0, n = 0;
        while (true) {
            const auto& row = star[s];
            const auto a = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
            ++n;
            if (mdp.next[s][a] == X || n > mdp.n_states) break;
            s = static_cast<std::size_t>(mdp.next[s][a]);
        }
        steps[s0] = n;
    }
    return steps;
}

// Runs `updates` Q-learning steps under the given exploration schedule. The
// absorbing outcome maps to an extra state whose row stays zero.
inline LearnResult learn(const Mdp& mdp, double gamma, std::uint64_t updates, std::uint64_t seed,
                         Schedule schedule = Schedule::UniformRandom) {
    using namespace policyshare;
    QTable q(mdp.n_states + 1, mdp.n_actions);
    const RlParams params{gamma, 0.5, 0.1};
    RandomStream rng(seed, 0);
    const auto absorbing = static_cast<std::uint32_t>(mdp.n_states);
    const auto star = oracle::value_iteration(mdp, gamma);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> sweep;
    const auto steps = steps_to_exit(mdp, star);
    for (std::size_t n = 1; n <= mdp.n_states + 1; ++n) {
        for (std::uint32_t s = 0; s < mdp.n_states; ++s) {
            if (steps[s] != n) continue;
            for (std::uint32_t a = 0; a < mdp.n_actions; ++a) sweep.emplace_back(s, a);
        }
    }

    for (std::uint64_t k = 0; k < updates; ++k) {
        std::uint32_t s = 0, a = 0;
        if (schedule == Schedule::UniformRandom) {
            s = static_cast<std::uint32_t>(rng.uniform() * static_cast<double>(mdp.n_states));
            a = static_cast<std::uint32_t>(rng.uniform() * static_cast<double>(mdp.n_actions));
        } else {
            std::tie(s, a) = sweep[k % sweep.size()];
        }
        const int n = mdp.next[s][a];
        const std::uint32_t next = n == X ? absorbing : static_cast<std::uint32_t>(n);
        q_update(q, StateId{s}, ActionId{a}, mdp.reward[s][a], StateId{next}, params);
    }
    double err = 0.0;
    for (std::uint32_t s = 0; s < mdp.n_states; ++s) {
        for (std::uint32_t a = 0; a < mdp.n_actions; ++a) {
            err = std::max(err, std::abs(q.q(StateId{s}, ActionId{a}) - star[s][a]));
        }
    }
    return {std::move(q), err};
}

}  // namespace fixture
