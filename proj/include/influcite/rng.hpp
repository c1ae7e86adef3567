#pragma once

#include <cstdint>
#include <random>
#include <vector>

// Seeded randomness helpers. std::shuffle and the standard distributions are
// implementation-defined, so anything that must reproduce byte-identical
// output across toolchains goes through these instead.
namespace influcite::rng {

// Derives an independent stream seed from a base seed (splitmix64 step).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform integer in [0, n) by rejection sampling; n must be > 0.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0, 1).
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Fisher-Yates shuffle with the bounded draw above.
template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& gen) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded(gen, i));
        std::swap(items[i - 1], items[j]);
    }
}

// Sample k distinct indexes from [0, n) without replacement, in draw order.
inline std::vector<std::size_t> sample_without_replacement(std::mt19937_64& gen,
                                                           std::size_t n,
                                                           std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(bounded(gen, n - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

}  // namespace influcite::rng
