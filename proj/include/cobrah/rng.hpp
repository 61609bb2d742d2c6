#ifndef COBRAH_RNG_HPP
#define COBRAH_RNG_HPP

#include <cstdint>
#include <random>

namespace cobrah {

using Rng = std::mt19937_64;

enum class StreamPurpose : std::uint64_t {
    Cohort = 1,
    Reward = 2,
    Policy = 3,
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Seed for one independent stream, keyed by (base seed, replication, arm, purpose).
/// Changing any component gives an unrelated stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t replication, std::uint64_t arm,
                                 StreamPurpose purpose) {
    std::uint64_t h = detail::splitmix64(base);
    h = detail::splitmix64(h ^ replication);
    h = detail::splitmix64(h ^ (arm + 0x632be59bd9b4e019ULL));
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    return h;
}

inline Rng make_stream(std::uint64_t base, std::uint64_t replication, std::uint64_t arm,
                       StreamPurpose purpose) {
    return Rng(derive_seed(base, replication, arm, purpose));
}

}  // namespace cobrah

#endif
