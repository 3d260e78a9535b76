#include "matter/knowledge_index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>

#include "matter/error.hpp"
#include "matter/rng.hpp"

namespace matter {

namespace {

constexpr char kMagic[4] = {'M', 'I', 'D', 'X'};
constexpr uint32_t kVersion = 1;

// Sequential dot product. Both exact search and the test oracles sum in
// index order, so scores compare bit-for-bit.
double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

bool rank_before(const ScoredId& a, const ScoredId& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.id != b.id) return a.id < b.id;
    return static_cast<int>(a.source) < static_cast<int>(b.source);
}

void merge_overall(RetrievalResult& result) {
    result.overall.clear();
    for (const auto& src : result.per_source)
        result.overall.insert(result.overall.end(), src.begin(), src.end());
    std::sort(result.overall.begin(), result.overall.end(), rank_before);
}

}  // namespace

uint64_t KnowledgeIndex::key_hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& src : sources) {
        h = fnv1a64(src.ids.data(), src.ids.size() * sizeof(int64_t), h);
        h = fnv1a64(src.keys.data(), src.keys.size() * sizeof(double), h);
    }
    return h;
}

KnowledgeIndex build_index(const std::vector<KnowledgeRecord>& records, const Retriever& retriever) {
    KnowledgeIndex index;
    index.d_r = retriever.d_r;
    index.retriever_id = retriever.id();

    std::vector<const KnowledgeRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const KnowledgeRecord* a, const KnowledgeRecord* b) { return a->id < b->id; });

    std::set<int64_t> seen;
    for (const KnowledgeRecord* r : sorted) {
        if (!seen.insert(r->id).second)
            throw IngestionError("build_index: duplicate record id " + std::to_string(r->id));
        auto& src = index.of(r->type);
        src.ids.push_back(r->id);
        const auto emb = retriever.embed(raw_text(*r));
        src.keys.insert(src.keys.end(), emb.vector.begin(), emb.vector.end());
    }
    return index;
}

KnowledgeIndex swap_retriever(const std::vector<KnowledgeRecord>& records,
                              const Retriever& new_retriever) {
    return build_index(records, new_retriever);
}

void build_ann_graphs(KnowledgeIndex& index, const AnnParams& params) {
    for (size_t s = 0; s < 2; ++s) {
        auto& src = index.sources[s];
        if (src.size() == 0) {
            index.graphs[s].reset();
            continue;
        }
        auto graph = std::make_unique<HnswGraph>();
        HnswGraph::BuildParams bp;
        bp.M = params.M;
        bp.ef_construction = params.ef_construction;
        bp.seed = 0x9e3779b97f4a7c15ull ^ (s + 1);
        graph->build(src.keys.data(), src.size(), index.d_r, bp);
        index.graphs[s] = std::move(graph);
    }
}

RetrievalResult search(const RetrieverEmbedding& query, const KnowledgeIndex& index,
                       const Quotas& quotas) {
    if (static_cast<int>(query.vector.size()) != index.d_r)
        throw ConfigError("search: query dimensionality does not match index");
    RetrievalResult result;
    for (const auto& [source, quota] : quotas) {
        const auto& src = index.of(source);
        const int n = src.size();
        const int take = std::min(quota, n);
        if (take <= 0) continue;
        std::vector<ScoredId> scored(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            scored[static_cast<size_t>(i)] = {src.ids[static_cast<size_t>(i)],
                                              dot(query.vector.data(),
                                                  src.keys.data() + static_cast<int64_t>(i) * index.d_r,
                                                  index.d_r),
                                              source};
        std::partial_sort(scored.begin(), scored.begin() + take, scored.end(), rank_before);
        scored.resize(static_cast<size_t>(take));
        result.per_source[static_cast<size_t>(source)] = std::move(scored);
    }
    merge_overall(result);
    return result;
}

RetrievalResult search_approx(const RetrieverEmbedding& query, const KnowledgeIndex& index,
                              const Quotas& quotas, int ef_search) {
    if (static_cast<int>(query.vector.size()) != index.d_r)
        throw ConfigError("search_approx: query dimensionality does not match index");
    RetrievalResult result;
    for (const auto& [source, quota] : quotas) {
        const auto& src = index.of(source);
        if (src.size() == 0 || quota <= 0) continue;
        const auto& graph = index.graphs[static_cast<size_t>(source)];
        if (!graph || !graph->built())
            throw StateError("search_approx: ANN graph not built for source " +
                             std::string(source_name(source)));
        const int take = std::min(quota, src.size());
        auto rows = graph->search(query.vector.data(), take, ef_search);
        std::vector<ScoredId> scored;
        scored.reserve(rows.size());
        for (int row : rows)
            scored.push_back({src.ids[static_cast<size_t>(row)],
                              dot(query.vector.data(),
                                  src.keys.data() + static_cast<int64_t>(row) * index.d_r, index.d_r),
                              source});
        std::sort(scored.begin(), scored.end(), rank_before);
        result.per_source[static_cast<size_t>(source)] = std::move(scored);
    }
    merge_overall(result);
    return result;
}

namespace {

template <class T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::ifstream& in, const char* what) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError(std::string("index file: truncated ") + what);
    return v;
}

}  // namespace

void save_index(const std::string& path, const KnowledgeIndex& index) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write index file: " + path);
    out.write(kMagic, 4);
    write_pod<uint32_t>(out, kVersion);
    write_pod<uint32_t>(out, static_cast<uint32_t>(index.d_r));
    write_pod<uint32_t>(out, static_cast<uint32_t>(index.retriever_id.size()));
    out.write(index.retriever_id.data(), static_cast<std::streamsize>(index.retriever_id.size()));
    for (const auto& src : index.sources) {
        write_pod<uint64_t>(out, static_cast<uint64_t>(src.ids.size()));
        out.write(reinterpret_cast<const char*>(src.ids.data()),
                  static_cast<std::streamsize>(src.ids.size() * sizeof(int64_t)));
        out.write(reinterpret_cast<const char*>(src.keys.data()),
                  static_cast<std::streamsize>(src.keys.size() * sizeof(double)));
    }
    for (const auto& graph : index.graphs) {
        const uint8_t has = graph && graph->built() ? 1 : 0;
        write_pod<uint8_t>(out, has);
        if (has) {
            auto blob = graph->serialize();
            write_pod<uint64_t>(out, static_cast<uint64_t>(blob.size()));
            out.write(reinterpret_cast<const char*>(blob.data()),
                      static_cast<std::streamsize>(blob.size()));
        }
    }
    if (!out) throw FormatError("index file: write failed: " + path);
}

KnowledgeIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open index file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("index file: bad magic: " + path);
    if (read_pod<uint32_t>(in, "version") != kVersion)
        throw FormatError("index file: unsupported version");
    KnowledgeIndex index;
    index.d_r = static_cast<int>(read_pod<uint32_t>(in, "d_r"));
    const auto id_len = read_pod<uint32_t>(in, "retriever id");
    index.retriever_id.resize(id_len);
    in.read(index.retriever_id.data(), id_len);
    for (auto& src : index.sources) {
        const auto n = read_pod<uint64_t>(in, "source count");
        src.ids.resize(n);
        in.read(reinterpret_cast<char*>(src.ids.data()),
                static_cast<std::streamsize>(n * sizeof(int64_t)));
        src.keys.resize(n * static_cast<uint64_t>(index.d_r));
        in.read(reinterpret_cast<char*>(src.keys.data()),
                static_cast<std::streamsize>(src.keys.size() * sizeof(double)));
        if (!in) throw FormatError("index file: truncated key matrix");
    }
    for (size_t s = 0; s < 2; ++s) {
        const auto has = read_pod<uint8_t>(in, "graph flag");
        if (!has) continue;
        const auto len = read_pod<uint64_t>(in, "graph size");
        std::vector<uint8_t> blob(len);
        in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(len));
        if (!in) throw FormatError("index file: truncated graph");
        auto graph = std::make_unique<HnswGraph>();
        graph->deserialize(blob.data(), blob.size(), index.sources[s].keys.data(),
                           index.sources[s].size(), index.d_r);
        index.graphs[s] = std::move(graph);
    }
    return index;
}

}  // namespace matter
