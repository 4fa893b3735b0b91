#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace hestonlab {

/// Deterministic standard-normal source for one (seed, stream_id) pair.
///
/// Substreams are seeded by passing (seed, stream_id) through SplitMix64, so
/// path i of a simulation depends only on its own index and never on thread
/// scheduling. Normals come from a Box-Muller transform on mt19937_64 output;
/// both are fully specified, unlike std::normal_distribution.
class RandomSource {
public:
    RandomSource(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Uniform on the half-open interval (0, 1].
    double uniform();

    /// Standard normal N(0, 1).
    double normal();

    void fill_normal(std::span<double> out);

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace hestonlab
