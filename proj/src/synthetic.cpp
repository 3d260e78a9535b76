#include "matter/synthetic.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "matter/error.hpp"
#include "matter/rng.hpp"

namespace matter {

namespace {

const char* kAttrWords[] = {"color",   "size",   "origin", "flavor", "shape",  "rank",
                            "genre",   "metal",  "climate", "texture", "sound", "season",
                            "symbol",  "trade",  "motto",  "emblem", "fuel",   "fabric",
                            "dance",   "stone",  "spice",  "craft",  "herb",   "badge"};

std::string make_word(Rng& rng, int syllables) {
    static const char* cons[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
    static const char* vows[] = {"a", "e", "i", "o", "u"};
    std::string w;
    for (int s = 0; s < syllables; ++s) {
        w += cons[rng.next_below(14)];
        w += vows[rng.next_below(5)];
    }
    w += cons[rng.next_below(14)];
    return w;
}

std::string unique_word(Rng& rng, int syllables, std::set<std::string>& used) {
    for (;;) {
        std::string w = make_word(rng, syllables);
        if (used.insert(w).second) return w;
    }
}

std::string paraphrase(Rng& rng, const std::string& attr, const std::string& entity) {
    switch (rng.next_below(4)) {
        case 0: return "what is the " + attr + " of " + entity + " ?";
        case 1: return "tell me the " + attr + " of " + entity;
        case 2: return "the " + attr + " of " + entity + " is what ?";
        default: return "which " + attr + " does " + entity + " have ?";
    }
}

}  // namespace

std::vector<KnowledgeRecord> SyntheticData::all_records() const {
    std::vector<KnowledgeRecord> all = qa_records;
    all.insert(all.end(), prg_records.begin(), prg_records.end());
    return all;
}

SyntheticData gen_synthetic(const SyntheticOptions& opts) {
    if (static_cast<int64_t>(opts.n_entities) * opts.n_attrs > 100000)
        throw InputError("gen_synthetic: world too large (n_entities * n_attrs > 1e5)");
    if (opts.n_attrs < 1 || opts.n_attrs > static_cast<int>(std::size(kAttrWords)))
        throw InputError("gen_synthetic: n_attrs out of range");
    if (opts.n_entities < 1) throw InputError("gen_synthetic: need at least one entity");

    Rng rng(opts.seed);
    std::set<std::string> used;
    for (int a = 0; a < opts.n_attrs; ++a) used.insert(kAttrWords[a]);

    std::vector<std::string> entities;
    for (int e = 0; e < opts.n_entities; ++e) entities.push_back(unique_word(rng, 2, used));
    std::vector<std::string> values;
    for (int v = 0; v < opts.value_pool; ++v) values.push_back(unique_word(rng, 1, used));

    struct Fact {
        int entity, attr;
        std::string value;
        bool prg_only;
        int64_t qa_id = -1, prg_id = -1;
    };
    std::vector<Fact> facts;
    for (int e = 0; e < opts.n_entities; ++e)
        for (int a = 0; a < opts.n_attrs; ++a)
            facts.push_back({e, a, values[rng.next_below(values.size())],
                             rng.next_double() < opts.prg_only_fraction});

    SyntheticData data;
    int64_t next_id = 1;

    // QA knowledge for facts that are not paragraph-only
    for (auto& f : facts) {
        if (f.prg_only) continue;
        f.qa_id = next_id++;
        data.qa_records.push_back(KnowledgeRecord::qa(
            f.qa_id, "what is the " + std::string(kAttrWords[f.attr]) + " of " + entities[f.entity] + " ?",
            f.value));
    }

    // one paragraph per entity covering every fact, chunked into
    // two-sentence records (the chunking mirrors split_paragraph exactly)
    for (int e = 0; e < opts.n_entities; ++e) {
        std::string content;
        for (int a = 0; a < opts.n_attrs; ++a) {
            Fact& f = facts[static_cast<size_t>(e) * opts.n_attrs + a];
            if (!content.empty()) content += ' ';
            content += "the " + std::string(kAttrWords[a]) + " of " + entities[e] + " is " + f.value + " .";
        }
        const auto chunks = split_paragraph(content);
        if (static_cast<int>(chunks.size()) != (opts.n_attrs + 1) / 2)
            throw Error("gen_synthetic: unexpected chunking");
        std::vector<int64_t> chunk_ids;
        for (const auto& chunk : chunks) {
            const int64_t id = next_id++;
            chunk_ids.push_back(id);
            data.prg_records.push_back(KnowledgeRecord::prg(id, entities[e], chunk));
        }
        for (int a = 0; a < opts.n_attrs; ++a)
            facts[static_cast<size_t>(e) * opts.n_attrs + a].prg_id = chunk_ids[static_cast<size_t>(a / 2)];
    }

    // disjoint train/test fact split
    std::vector<size_t> order(facts.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const size_t n_test = static_cast<size_t>(opts.test_fraction * static_cast<double>(facts.size()));

    for (size_t i = 0; i < order.size(); ++i) {
        const Fact& f = facts[order[i]];
        QAExample ex;
        ex.question = paraphrase(rng, kAttrWords[f.attr], entities[static_cast<size_t>(f.entity)]);
        ex.answer = f.value;
        if (f.qa_id >= 0) ex.gold_ids.push_back(f.qa_id);
        ex.gold_ids.push_back(f.prg_id);
        (i < n_test ? data.test : data.train).push_back(std::move(ex));
    }
    return data;
}

}  // namespace matter
