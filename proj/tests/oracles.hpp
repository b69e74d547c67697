#pragma once

// Independent reference computations for the tests. Nothing in here calls
// into the library under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace oracle {

// Deterministic MDP. next[s][a] == kAbsorbing ends the episode with value 0.
struct Mdp {
    static constexpr int kAbsorbing = -1;
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<std::vector<int>> next;
    std::vector<std::vector<double>> reward;
};

// Q* by plain value iteration, run to a fixed point.
inline std::vector<std::vector<double>> value_iteration(const Mdp& mdp, double gamma) {
    std::vector<std::vector<double>> q(mdp.n_states, std::vector<double>(mdp.n_actions, 0.0));
    for (int sweep = 0; sweep < 100000; ++sweep) {
        double delta = 0.0;
        auto fresh = q;
        for (std::size_t s = 0; s < mdp.n_states; ++s) {
            for (std::size_t a = 0; a < mdp.n_actions; ++a) {
                const int n = mdp.next[s][a];
                double future = 0.0;
                if (n != Mdp::kAbsorbing) future = *std::max_element(q[n].begin(), q[n].end());
                fresh[s][a] = mdp.reward[s][a] + gamma * future;
                delta = std::max(delta, std::abs(fresh[s][a] - q[s][a]));
            }
        }
        q = fresh;
        if (delta < 1e-15) break;
    }
    return q;
}

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
};

// Textbook least squares on centered sums.
inline Line ols(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

// Average rank of every element (1-based), found by enumerating every
// ordering of the indices and averaging positions over the sorted ones.
inline std::vector<double> brute_force_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> sum(v.size(), 0.0);
    double count = 0.0;
    do {
        bool sorted = true;
        for (std::size_t k = 1; k < idx.size(); ++k) sorted = sorted && v[idx[k - 1]] <= v[idx[k]];
        if (!sorted) continue;
        count += 1.0;
        for (std::size_t k = 0; k < idx.size(); ++k) sum[idx[k]] += static_cast<double>(k + 1);
    } while (std::next_permutation(idx.begin(), idx.end()));
    for (double& s : sum) s /= count;
    return sum;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle
