#pragma once

#include <cstdint>
#include <random>

namespace tocc {

/// Seeded pseudo-random stream. The pair (seed, stream_id) fully determines
/// the sequence; different stream ids give statistically independent
/// sequences. Not safe to share across threads: derive one stream per task.
class RngStream {
public:
    RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const { return stream_id_; }

    /// Child stream for sub-task `index`; depends only on (seed, stream_id, index).
    [[nodiscard]] RngStream derive(std::uint64_t index) const;

    double normal();
    double uniform(double lo = 0.0, double hi = 1.0);
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace tocc
