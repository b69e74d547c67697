#pragma once

#include <cstdint>
#include <random>

namespace policyshare {

// Seeded 64-bit stream. Streams with the same seed but different ids are
// independent, so adding agents never reshuffles the draws of existing ones.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id) {
        std::seed_seq seq{
            static_cast<std::uint32_t>(seed),
            static_cast<std::uint32_t>(seed >> 32),
            static_cast<std::uint32_t>(stream_id),
            static_cast<std::uint32_t>(stream_id >> 32),
            0x9E3779B9u};
        engine_.seed(seq);
    }

    // Uniform in [0, 1) with 53 random bits. Bit-exact across platforms,
    // unlike std::uniform_real_distribution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

// Stream 0 is reserved for placement; agent i draws from stream i + 1.
inline constexpr std::uint64_t kPlacementStream = 0;
inline constexpr std::uint64_t agent_stream(std::size_t agent) { return agent + 1; }

}  // namespace policyshare
