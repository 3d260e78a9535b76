// Exact Match scoring, per-question traces, and the conditioning analysis
// that buckets predictions by where they appear in retrieved knowledge.
#pragma once

#include <string>
#include <vector>

#include "matter/knowledge_index.hpp"
#include "matter/records.hpp"

namespace matter {

// SQuAD-style normalization: lowercase, strip punctuation, drop articles
// (a/an/the), collapse whitespace.
std::string normalize_answer(const std::string& s);

int exact_match(const std::string& prediction, const std::string& gold);

struct QuestionTrace {
    std::string question, gold, prediction;
    std::vector<ScoredId> retrieved;  // overall rank order
    int em = 0;
};

struct EvalReport {
    double em = 0.0;
    int n = 0;
    std::vector<QuestionTrace> traces;
};

// em = mean of per-question indicators.
EvalReport summarize(std::vector<QuestionTrace> traces);

struct ConditioningBucket {
    int count = 0;
    double em = 0.0;
};

// Buckets use the "only in" convention: a prediction appearing in more than
// one of {retrieved questions, answers, paragraphs} lands in `multi`. The
// five buckets partition all questions. d_bar = mean(1 - score) over the
// retrieved items of the questions in each gold-containment group.
struct ConditioningReport {
    int n = 0;
    ConditioningBucket only_q, only_a, only_p, multi, not_in;
    ConditioningBucket gold_in_r, gold_not_in_r;
    double dbar_in_r = 0.0, dbar_not_in_r = 0.0;
};

ConditioningReport conditioning_analysis(const std::vector<QuestionTrace>& traces,
                                         const std::vector<KnowledgeRecord>& knowledge);

}  // namespace matter
