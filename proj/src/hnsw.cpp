#include "matter/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <queue>

#include "matter/error.hpp"
#include "matter/rng.hpp"

namespace matter {

namespace {

// max-heap on distance = "worst first" result set
using DistNode = std::pair<double, int>;

}  // namespace

double HnswGraph::dist(const double* a, const double* b) const {
    double dot = 0.0;
    for (int i = 0; i < dim_; ++i) dot += a[i] * b[i];
    return 1.0 - dot;
}

std::vector<int>& HnswGraph::neighbors(int node, int level) { return links_[node][level]; }
const std::vector<int>& HnswGraph::neighbors(int node, int level) const {
    return links_[node][level];
}

std::vector<DistNode> HnswGraph::search_level(const double* query, int entry, int ef,
                                              int level) const {
    std::priority_queue<DistNode, std::vector<DistNode>, std::greater<>> candidates;  // nearest first
    std::priority_queue<DistNode> results;                                            // worst on top
    std::vector<uint8_t> visited(static_cast<size_t>(n_), 0);

    const double d0 = dist(query, keys_ + static_cast<int64_t>(entry) * dim_);
    candidates.emplace(d0, entry);
    results.emplace(d0, entry);
    visited[static_cast<size_t>(entry)] = 1;

    while (!candidates.empty()) {
        auto [d, node] = candidates.top();
        if (static_cast<int>(results.size()) >= ef && d > results.top().first) break;
        candidates.pop();
        for (int nb : neighbors(node, level)) {
            if (visited[static_cast<size_t>(nb)]) continue;
            visited[static_cast<size_t>(nb)] = 1;
            const double dn = dist(query, keys_ + static_cast<int64_t>(nb) * dim_);
            if (static_cast<int>(results.size()) < ef || dn < results.top().first) {
                candidates.emplace(dn, nb);
                results.emplace(dn, nb);
                if (static_cast<int>(results.size()) > ef) results.pop();
            }
        }
    }
    std::vector<DistNode> out;
    out.reserve(results.size());
    while (!results.empty()) {
        out.push_back(results.top());
        results.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

void HnswGraph::build(const double* keys, int n, int dim, const BuildParams& params) {
    if (n <= 0) throw InputError("hnsw: empty key set");
    keys_ = keys;
    n_ = n;
    dim_ = dim;
    M_ = params.M;
    levels_.assign(static_cast<size_t>(n), 0);
    links_.assign(static_cast<size_t>(n), {});
    entry_ = -1;
    max_level_ = -1;

    Rng rng(params.seed);
    const double ml = 1.0 / std::log(static_cast<double>(M_));
    const int m_max0 = 2 * M_;

    for (int node = 0; node < n; ++node) {
        double u = rng.next_double();
        while (u <= 0.0) u = rng.next_double();
        const int level = static_cast<int>(-std::log(u) * ml);
        levels_[static_cast<size_t>(node)] = level;
        links_[static_cast<size_t>(node)].assign(static_cast<size_t>(level) + 1, {});

        if (entry_ < 0) {
            entry_ = node;
            max_level_ = level;
            continue;
        }

        const double* key = keys_ + static_cast<int64_t>(node) * dim_;
        int cur = entry_;
        for (int lvl = max_level_; lvl > level; --lvl)
            cur = search_level(key, cur, 1, lvl)[0].second;

        for (int lvl = std::min(level, max_level_); lvl >= 0; --lvl) {
            auto cand = search_level(key, cur, params.ef_construction, lvl);
            const int cap = lvl == 0 ? m_max0 : M_;
            const int take = std::min<int>(M_, static_cast<int>(cand.size()));
            for (int i = 0; i < take; ++i) {
                const int nb = cand[static_cast<size_t>(i)].second;
                neighbors(node, lvl).push_back(nb);
                auto& back = neighbors(nb, lvl);
                back.push_back(node);
                if (static_cast<int>(back.size()) > cap) {
                    // keep the `cap` closest to nb
                    const double* nb_key = keys_ + static_cast<int64_t>(nb) * dim_;
                    std::sort(back.begin(), back.end(), [&](int x, int y) {
                        const double dx = dist(nb_key, keys_ + static_cast<int64_t>(x) * dim_);
                        const double dy = dist(nb_key, keys_ + static_cast<int64_t>(y) * dim_);
                        return dx != dy ? dx < dy : x < y;
                    });
                    back.resize(static_cast<size_t>(cap));
                }
            }
            cur = cand[0].second;
        }

        if (level > max_level_) {
            max_level_ = level;
            entry_ = node;
        }
    }
}

std::vector<int> HnswGraph::search(const double* query, int k, int ef) const {
    if (!built()) throw StateError("hnsw: graph not built");
    int cur = entry_;
    for (int lvl = max_level_; lvl > 0; --lvl) cur = search_level(query, cur, 1, lvl)[0].second;
    auto found = search_level(query, cur, std::max(ef, k), 0);
    std::vector<int> out;
    out.reserve(static_cast<size_t>(std::min<int>(k, static_cast<int>(found.size()))));
    for (const auto& [d, node] : found) {
        if (static_cast<int>(out.size()) >= k) break;
        out.push_back(node);
    }
    return out;
}

namespace {

template <class T>
void put(std::vector<uint8_t>& buf, const T& v) {
    const auto* p = reinterpret_cast<const uint8_t*>(&v);
    buf.insert(buf.end(), p, p + sizeof(T));
}

template <class T>
T get(const uint8_t*& p, const uint8_t* end) {
    if (p + sizeof(T) > end) throw FormatError("hnsw: truncated graph section");
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
}

}  // namespace

std::vector<uint8_t> HnswGraph::serialize() const {
    std::vector<uint8_t> buf;
    put<int32_t>(buf, n_);
    put<int32_t>(buf, M_);
    put<int32_t>(buf, max_level_);
    put<int32_t>(buf, entry_);
    for (int i = 0; i < n_; ++i) put<int32_t>(buf, levels_[static_cast<size_t>(i)]);
    for (int i = 0; i < n_; ++i) {
        for (int lvl = 0; lvl <= levels_[static_cast<size_t>(i)]; ++lvl) {
            const auto& nb = links_[static_cast<size_t>(i)][static_cast<size_t>(lvl)];
            put<int32_t>(buf, static_cast<int32_t>(nb.size()));
            for (int x : nb) put<int32_t>(buf, x);
        }
    }
    return buf;
}

void HnswGraph::deserialize(const uint8_t* data, size_t len, const double* keys, int n, int dim) {
    const uint8_t* p = data;
    const uint8_t* end = data + len;
    const int stored_n = get<int32_t>(p, end);
    if (stored_n != n) throw FormatError("hnsw: node count mismatch");
    keys_ = keys;
    n_ = n;
    dim_ = dim;
    M_ = get<int32_t>(p, end);
    max_level_ = get<int32_t>(p, end);
    entry_ = get<int32_t>(p, end);
    levels_.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) levels_[static_cast<size_t>(i)] = get<int32_t>(p, end);
    links_.assign(static_cast<size_t>(n), {});
    for (int i = 0; i < n; ++i) {
        links_[static_cast<size_t>(i)].resize(static_cast<size_t>(levels_[static_cast<size_t>(i)]) + 1);
        for (int lvl = 0; lvl <= levels_[static_cast<size_t>(i)]; ++lvl) {
            const int cnt = get<int32_t>(p, end);
            auto& nb = links_[static_cast<size_t>(i)][static_cast<size_t>(lvl)];
            nb.resize(static_cast<size_t>(cnt));
            for (int x = 0; x < cnt; ++x) nb[static_cast<size_t>(x)] = get<int32_t>(p, end);
        }
    }
}

}  // namespace matter
