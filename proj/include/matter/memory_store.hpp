// Builds fixed-length neural memories from templated knowledge and persists
// them as the value side of the knowledge pool. A memory is the first l rows
// of the layer-j encoding of the rendered record; the templates prepend
// exactly l special tokens, so those rows sit at the special-token positions.
#pragma once

#include <array>
#include <atomic>
#include <cstdio>
#include <functional>
#include <thread>
#include <unordered_map>

#include "matter/knowledge_index.hpp"
#include "matter/model.hpp"

namespace matter {

template <class S>
NeuralMemoryT<S> build_memory(const KnowledgeRecord& rec, const ModelConfig& cfg,
                              const ParamsT<S>& params, const Vocab& vocab) {
    const std::string rendered = render_record(rec);
    const std::vector<int> tokens = encode(vocab, rendered);
    if (static_cast<int>(tokens.size()) < cfg.l)
        throw InputError("build_memory: record " + std::to_string(rec.id) +
                         " renders to fewer than l tokens");
    NeuralMemoryT<S> mem;
    mem.record_id = rec.id;
    mem.source_type = rec.type;
    mem.vectors = slice_rows(encode_prefix(tokens, cfg, params).hidden, 0, cfg.l);
    return mem;
}

class MemoryStore {
  public:
    int l = 0;
    int d_model = 0;
    int float_width = 4;  // bytes per stored scalar: 4 or 8
    uint64_t checkpoint_hash = 0;

    struct Block {
        std::vector<int64_t> ids;  // ascending
        std::vector<float> f32;    // n * l * d_model, used when float_width == 4
        std::vector<double> f64;   // used when float_width == 8
    };
    std::array<Block, 2> blocks;  // indexed by SourceType

    int size() const {
        return static_cast<int>(blocks[0].ids.size() + blocks[1].ids.size());
    }
    bool contains(int64_t id) const { return where_.count(id) > 0; }

    void index_rows() {
        where_.clear();
        for (size_t s = 0; s < 2; ++s)
            for (size_t row = 0; row < blocks[s].ids.size(); ++row)
                where_.emplace(blocks[s].ids[row], std::make_pair(static_cast<int>(s), static_cast<int>(row)));
    }

    template <class S>
    NeuralMemoryT<S> lookup(int64_t id) const {
        auto it = where_.find(id);
        if (it == where_.end())
            throw ConsistencyError("memory store: record " + std::to_string(id) +
                                   " not present (index/store drift)");
        const auto [src, row] = it->second;
        const Block& b = blocks[static_cast<size_t>(src)];
        const int64_t n = static_cast<int64_t>(l) * d_model;
        std::vector<S> data(static_cast<size_t>(n));
        if (float_width == 4)
            for (int64_t i = 0; i < n; ++i) data[static_cast<size_t>(i)] = static_cast<S>(b.f32[static_cast<size_t>(row * n + i)]);
        else
            for (int64_t i = 0; i < n; ++i) data[static_cast<size_t>(i)] = static_cast<S>(b.f64[static_cast<size_t>(row * n + i)]);
        NeuralMemoryT<S> mem;
        mem.record_id = id;
        mem.source_type = static_cast<SourceType>(src);
        mem.vectors = make_tensor<S>({l, d_model}, std::move(data));
        return mem;
    }

    // Serialized footprint in bytes (header + id table + vector blocks).
    uint64_t byte_size() const {
        uint64_t n_vec = 0;
        for (const auto& b : blocks)
            n_vec += b.ids.size() * static_cast<uint64_t>(l) * d_model;
        return kHeaderBytes + (blocks[0].ids.size() + blocks[1].ids.size()) * sizeof(int64_t) +
               n_vec * static_cast<uint64_t>(float_width);
    }

    bool operator==(const MemoryStore& o) const {
        return l == o.l && d_model == o.d_model && float_width == o.float_width &&
               checkpoint_hash == o.checkpoint_hash &&
               blocks[0].ids == o.blocks[0].ids && blocks[1].ids == o.blocks[1].ids &&
               blocks[0].f32 == o.blocks[0].f32 && blocks[1].f32 == o.blocks[1].f32 &&
               blocks[0].f64 == o.blocks[0].f64 && blocks[1].f64 == o.blocks[1].f64;
    }

    static constexpr uint64_t kHeaderBytes = 4 + 4 + 4 + 4 + 4 + 8 + 8 + 8;

  private:
    std::unordered_map<int64_t, std::pair<int, int>> where_;
};

// Deterministic batch build over ascending record ids; memory vectors are a
// pure function of (record, params), so rows fan out across threads.
// Progress is reported every 1000 records.
template <class S>
MemoryStore build_store(const std::vector<KnowledgeRecord>& records, const ModelConfig& cfg,
                        const ParamsT<S>& params, const Vocab& vocab, uint64_t checkpoint_hash,
                        int threads = 0, bool verbose = false) {
    MemoryStore store;
    store.l = cfg.l;
    store.d_model = cfg.d_model;
    store.float_width = static_cast<int>(sizeof(S));
    store.checkpoint_hash = checkpoint_hash;

    std::vector<const KnowledgeRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const KnowledgeRecord* a, const KnowledgeRecord* b) { return a->id < b->id; });
    for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i]->id == sorted[i - 1]->id)
            throw IngestionError("build_store: duplicate record id " + std::to_string(sorted[i]->id));

    const int64_t stride = static_cast<int64_t>(cfg.l) * cfg.d_model;
    std::array<std::vector<const KnowledgeRecord*>, 2> per_source;
    for (const KnowledgeRecord* r : sorted) per_source[static_cast<size_t>(r->type)].push_back(r);
    for (size_t s = 0; s < 2; ++s) {
        auto& block = store.blocks[s];
        for (const KnowledgeRecord* r : per_source[s]) block.ids.push_back(r->id);
        if (store.float_width == 4)
            block.f32.assign(per_source[s].size() * static_cast<size_t>(stride), 0.0f);
        else
            block.f64.assign(per_source[s].size() * static_cast<size_t>(stride), 0.0);
    }

    std::atomic<size_t> done{0};
    std::function<void(size_t, size_t, size_t)> work = [&](size_t src, size_t begin, size_t end) {
        auto& block = store.blocks[src];
        for (size_t row = begin; row < end; ++row) {
            const auto mem = build_memory(*per_source[src][row], cfg, params, vocab);
            const auto& vals = mem.vectors->value;
            if (store.float_width == 4)
                for (int64_t i = 0; i < stride; ++i)
                    block.f32[row * static_cast<size_t>(stride) + static_cast<size_t>(i)] = static_cast<float>(vals[static_cast<size_t>(i)]);
            else
                for (int64_t i = 0; i < stride; ++i)
                    block.f64[row * static_cast<size_t>(stride) + static_cast<size_t>(i)] = static_cast<double>(vals[static_cast<size_t>(i)]);
            const size_t n = ++done;
            if (verbose && n % 1000 == 0)
                std::fprintf(stderr, "build_store: %zu/%zu memories\n", n, sorted.size());
        }
    };
    const int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    for (size_t s = 0; s < 2; ++s) {
        const size_t n = per_source[s].size();
        if (n == 0) continue;
        const size_t per = (n + static_cast<size_t>(n_threads) - 1) / static_cast<size_t>(n_threads);
        std::vector<std::thread> pool;
        for (size_t begin = 0; begin < n; begin += per)
            pool.emplace_back(work, s, begin, std::min(n, begin + per));
        for (auto& th : pool) th.join();
    }
    store.index_rows();
    return store;
}

// ---- store file ("MMEM") -------------------------------------------------

void save_store(const std::string& path, const MemoryStore& store);
MemoryStore load_store(const std::string& path);

// Step 2 of retrieval: gather the memories of the ranked result, in overall
// rank order, ready for cross-encoding.
template <class S>
std::vector<NeuralMemoryT<S>> fetch_memories(const RetrievalResult& result,
                                             const MemoryStore& store) {
    std::vector<NeuralMemoryT<S>> out;
    out.reserve(result.overall.size());
    for (const auto& hit : result.overall) out.push_back(store.lookup<S>(hit.id));
    return out;
}

}  // namespace matter
