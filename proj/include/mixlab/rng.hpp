#pragma once

#include <array>
#include <cstdint>

namespace mixlab {

/// Seed for every stochastic operation. Any 64-bit value is accepted;
/// identical seeds give identical streams.
struct Seed {
    std::uint64_t value = 0;
};

namespace detail {

/// SplitMix64 step, used both for seeding expansion and for deriving
/// sub-stream seeds from (seed, index...) tuples.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

/// Derive a child seed from a parent seed and a tag sequence, e.g.
/// (epoch, batch, index). Each tag is absorbed through a SplitMix64 step.
template <typename... Tags>
Seed derive_seed(Seed parent, Tags... tags) {
    std::uint64_t s = parent.value;
    (void)detail::splitmix64(s);
    ((s ^= detail::splitmix64(s) + static_cast<std::uint64_t>(tags)), ...);
    std::uint64_t out = s;
    return Seed{detail::splitmix64(out)};
}

/// Deterministic random stream: xoshiro256** engine seeded via SplitMix64
/// expansion of the 64-bit seed (four state words drawn in order).
/// Normal variates come from Box-Muller pairs built from two consecutive
/// 64-bit draws; both values of a pair are consumed in order before the
/// next pair is generated.
///
/// Not thread-safe; each concurrent task should own its own stream.
class RandomStream {
public:
    explicit RandomStream(Seed seed) {
        std::uint64_t s = seed.value;
        for (auto& word : state_) word = detail::splitmix64(s);
        // all-zero state is invalid for xoshiro
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_double_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal draw (Box-Muller).
    double next_normal();

    /// Uniform integer in [0, n), n >= 1. Fixed-point multiply mapping.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace mixlab
