// Deterministic RNG. std::mt19937_64 is pinned by the standard, but the
// distributions are not, so normal/uniform/shuffle are spelled out here to
// keep runs bit-identical across standard libraries.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace matter {

class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // [0, n)
    uint64_t next_below(uint64_t n) { return n ? gen_() % n : 0; }

    // Box-Muller, one value per call (the spare is dropped for simplicity).
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // Fisher-Yates.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    Rng fork() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ull); }

  private:
    std::mt19937_64 gen_;
};

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
    return fnv1a64(s.data(), s.size(), h);
}

}  // namespace matter
