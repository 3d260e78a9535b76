// Hierarchical navigable small-world graph over unit-norm keys, searched by
// maximum inner product (distance = 1 - dot).
#pragma once

#include <cstdint>
#include <vector>

namespace matter {

class HnswGraph {
  public:
    struct BuildParams {
        int M = 16;
        int ef_construction = 100;
        uint64_t seed = 0x9e3779b97f4a7c15ull;
    };

    HnswGraph() = default;

    // `keys` is an n x dim row-major matrix; rows must outlive the graph.
    void build(const double* keys, int n, int dim, const BuildParams& params);

    // Top-k row indices by inner product with `query`, best first.
    // `ef` is the beam width at the base layer (clamped to >= k).
    std::vector<int> search(const double* query, int k, int ef) const;

    bool built() const { return n_ > 0; }
    int size() const { return n_; }
    int max_level() const { return max_level_; }

    // flat serialization (adjacency + levels); keys are stored elsewhere
    std::vector<uint8_t> serialize() const;
    void deserialize(const uint8_t* data, size_t len, const double* keys, int n, int dim);

  private:
    double dist(const double* a, const double* b) const;
    // Beam search in one level; returns (dist, node) pairs, nearest first.
    std::vector<std::pair<double, int>> search_level(const double* query, int entry, int ef,
                                                     int level) const;
    std::vector<int>& neighbors(int node, int level);
    const std::vector<int>& neighbors(int node, int level) const;

    const double* keys_ = nullptr;
    int n_ = 0;
    int dim_ = 0;
    int M_ = 16;
    int max_level_ = -1;
    int entry_ = -1;
    std::vector<int> levels_;                            // per node
    std::vector<std::vector<std::vector<int>>> links_;   // [node][level] -> neighbor ids
};

}  // namespace matter
