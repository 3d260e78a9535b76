// Synthetic heterogeneous knowledge generator: a random entity-attribute
// world emitted as QA pairs and titled paragraphs, with train/test question
// splits over disjoint facts so answers are only reachable via retrieval.
#pragma once

#include <cstdint>
#include <vector>

#include "matter/records.hpp"

namespace matter {

struct SyntheticOptions {
    uint64_t seed = 7;
    int n_entities = 120;
    int n_attrs = 4;
    double prg_only_fraction = 0.3;  // facts present only in paragraph form
    double test_fraction = 0.25;
    int value_pool = 40;             // distinct value words shared across facts
};

struct SyntheticData {
    std::vector<KnowledgeRecord> qa_records;
    std::vector<KnowledgeRecord> prg_records;
    std::vector<QAExample> train;
    std::vector<QAExample> test;

    std::vector<KnowledgeRecord> all_records() const;
};

SyntheticData gen_synthetic(const SyntheticOptions& opts);

}  // namespace matter
