#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace ttab {

// SplitMix64 step. Used to spread user seeds and derive substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over bytes. Stable across platforms; used for config digests and
// sweep child-seed derivation.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/**
 * Deterministic random stream.
 *
 * Wraps mt19937_64 but generates bounded ints and unit doubles by hand so a
 * stream's output is identical across standard library implementations.
 * Reruns with the same seed must reproduce output files byte for byte, which
 * rules out std::uniform_int_distribution and friends.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound) without modulo bias (Lemire's method).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::next_below: bound must be positive");
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform integer in [lo, hi], both ends inclusive.
    int uniform_int(int lo, int hi) {
        if (lo > hi) throw std::invalid_argument("Rng::uniform_int: empty range");
        const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        return static_cast<int>(static_cast<std::int64_t>(lo) + static_cast<std::int64_t>(next_below(span)));
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Child stream keyed on the original seed, not the current state, so the
    // same (seed, stream) pair always names the same substream.
    Rng derive(std::uint64_t stream) const {
        return Rng(splitmix64(seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1))));
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace ttab
