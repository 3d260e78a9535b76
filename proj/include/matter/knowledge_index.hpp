// Per-source (retriever key, record id) store with quota-based MIPS search.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "matter/hnsw.hpp"
#include "matter/records.hpp"
#include "matter/retriever.hpp"

namespace matter {

struct ScoredId {
    int64_t id = 0;
    double score = 0.0;  // inner product; distance = 1 - score
    SourceType source = SourceType::QA;
};

struct RetrievalResult {
    std::array<std::vector<ScoredId>, 2> per_source;  // indexed by SourceType
    std::vector<ScoredId> overall;                    // merged rank order

    const std::vector<ScoredId>& of(SourceType t) const {
        return per_source[static_cast<size_t>(t)];
    }
    size_t total() const { return overall.size(); }
};

using Quotas = std::map<SourceType, int>;

class KnowledgeIndex {
  public:
    struct Source {
        std::vector<int64_t> ids;   // ascending
        std::vector<double> keys;   // n x d_r row-major, unit-norm rows
        int size() const { return static_cast<int>(ids.size()); }
    };

    int d_r = 0;
    std::string retriever_id;
    std::array<Source, 2> sources;
    std::array<std::unique_ptr<HnswGraph>, 2> graphs;  // built on demand

    const Source& of(SourceType t) const { return sources[static_cast<size_t>(t)]; }
    Source& of(SourceType t) { return sources[static_cast<size_t>(t)]; }
    int total_keys() const { return sources[0].size() + sources[1].size(); }
    uint64_t key_hash() const;  // over both key matrices, for frozen-ness checks
};

// One unit-norm key per record; QA records embed their "question answer"
// text, PRG records their "title content" text.
KnowledgeIndex build_index(const std::vector<KnowledgeRecord>& records, const Retriever& retriever);

// Rebuild of the key side only under a different frozen retriever; the
// memory store is untouched by construction (reader and retriever decoupled).
KnowledgeIndex swap_retriever(const std::vector<KnowledgeRecord>& records,
                              const Retriever& new_retriever);

struct AnnParams {
    int M = 16;
    int ef_construction = 100;
};

void build_ann_graphs(KnowledgeIndex& index, const AnnParams& params = {});

// Exact flat MIPS, top-quota per source. Ties break by ascending record id.
RetrievalResult search(const RetrieverEmbedding& query, const KnowledgeIndex& index,
                       const Quotas& quotas);

// Navigable-small-world search; requires build_ann_graphs first.
RetrievalResult search_approx(const RetrieverEmbedding& query, const KnowledgeIndex& index,
                              const Quotas& quotas, int ef_search);

void save_index(const std::string& path, const KnowledgeIndex& index);
KnowledgeIndex load_index(const std::string& path);

}  // namespace matter
