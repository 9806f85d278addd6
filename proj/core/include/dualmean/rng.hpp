#pragma once

#include <cstdint>
#include <random>

namespace dualmean {

/// SplitMix64 finalizer. Used to derive independent stream seeds; a single
/// global sequential stream would make results depend on execution order.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of one replication stream: a keyed mix of the master seed and the
/// stream index, independent of which thread runs the stream.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Replication-local generator. The engine is the standard 64-bit Mersenne
/// twister (its output sequence is fully specified), with hand-rolled
/// distributions so that a given seed yields the same draws everywhere.
class StreamRng {
public:
    explicit StreamRng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_unit() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    /// Normal draw via the Box-Muller pair; the second value of each pair is
    /// cached, so draw order is part of the stream contract.
    double next_normal(double mean, double sd);

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::mt19937_64 eng_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace dualmean
