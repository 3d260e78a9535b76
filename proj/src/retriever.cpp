#include "matter/retriever.hpp"

#include <cmath>

#include "matter/error.hpp"
#include "matter/rng.hpp"
#include "matter/text.hpp"

namespace matter {

namespace {

uint64_t mix(uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

std::string Retriever::id() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(mix(seed)));
    return name + "-d" + std::to_string(d_r) + "-" + buf;
}

RetrieverEmbedding Retriever::embed(const std::string& text) const {
    const auto tokens = split_tokens(text);
    if (tokens.empty()) throw InputError("retriever: cannot embed empty text");
    std::vector<double> acc(static_cast<size_t>(d_r), 0.0);
    for (const auto& tok : tokens) {
        const uint64_t h = mix(fnv1a64(tok) ^ seed);
        const size_t bucket = static_cast<size_t>((h >> 1) % static_cast<uint64_t>(d_r));
        acc[bucket] += (h & 1) ? 1.0 : -1.0;
    }
    double norm_sq = 0.0;
    for (double v : acc) norm_sq += v * v;
    if (norm_sq == 0.0) {
        // signs cancelled exactly; fall back to a single deterministic bucket
        acc[static_cast<size_t>(mix(fnv1a64(text) ^ seed) % static_cast<uint64_t>(d_r))] = 1.0;
        norm_sq = 1.0;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : acc) v *= inv;
    return RetrieverEmbedding{std::move(acc)};
}

Retriever Retriever::hashed_bag(int d_r) {
    if (d_r < 1) throw ConfigError("retriever dimensionality must be >= 1");
    Retriever r;
    r.d_r = d_r;
    return r;
}

}  // namespace matter
