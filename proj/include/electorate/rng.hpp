#pragma once
// Seed derivation and uniform mapping shared by every randomized component.
// All randomness in the library flows through mt19937_64 (fully specified by
// the standard) plus the helpers here, so runs are reproducible across
// platforms for a fixed seed.

#include <cstdint>
#include <random>
#include <vector>

namespace electorate {

// splitmix64 finalizer; decorrelates nearby seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Independent stream seed for (base seed, stream index).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(seed ^ mix64(stream));
}

// Uniform in the open interval (0,1); never returns 0 or 1.
inline double uniform01(std::mt19937_64& gen) noexcept {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

// Bounded draw in [0, n). Modulo bias is ~n/2^64, irrelevant at our sizes.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) noexcept {
    return gen() % n;
}

// In-place Fisher-Yates. std::shuffle is implementation-defined; this is not.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& gen) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(gen, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace electorate
