#pragma once

#include <cstdint>

namespace qjump {

/// Counter-based uniform stream keyed by (seed, trajectory_index).
///
/// Draw k is splitmix64(key + (k + 1) * 0x9e3779b97f4a7c15) where
/// key = splitmix64(seed ^ splitmix64(index + 0x9e3779b97f4a7c15)).
/// Uniform doubles take the top 53 bits. This definition is part of the
/// reproducibility contract and must not change.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t trajectory_index);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double next_uniform();

    std::uint64_t draws() const { return counter_; }

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace qjump
