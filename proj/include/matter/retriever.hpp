// Frozen off-the-shelf retriever: deterministic hashed bag-of-tokens
// embedding. Holds no differentiable parameters by construction, so no
// training code path can ever update it.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace matter {

struct RetrieverEmbedding {
    std::vector<double> vector;  // unit L2 norm
};

struct Retriever {
    std::string name = "hashed-bag";
    int d_r = 64;
    uint64_t seed = 0x5eedba65eedba601ull;

    // "name-dNN-hash" string baked into index files so an index and the
    // retriever answering queries can be cross-checked.
    std::string id() const;

    RetrieverEmbedding embed(const std::string& text) const;

    static Retriever hashed_bag(int d_r);
};

}  // namespace matter
