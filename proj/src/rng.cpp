#include "qjump/rng.hpp"

namespace qjump {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t RngStream::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t trajectory_index)
    : key_(mix(seed ^ mix(trajectory_index + kGolden))) {}

std::uint64_t RngStream::next_u64() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
}

double RngStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace qjump
