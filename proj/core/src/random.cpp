#include "hestonlab/random.hpp"

#include <cmath>
#include <numbers>

namespace hestonlab {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x632BE59BD9B4E019ULL))) {}

double RandomSource::uniform() {
    // 53 random mantissa bits, shifted to exclude zero.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double RandomSource::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

void RandomSource::fill_normal(std::span<double> out) {
    for (auto& z : out) z = normal();
}

}  // namespace hestonlab
