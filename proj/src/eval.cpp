#include "matter/eval.hpp"

#include <cctype>
#include <sstream>
#include <unordered_map>

#include "matter/error.hpp"

namespace matter {

std::string normalize_answer(const std::string& s) {
    static const std::string punct = R"(!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~)";
    std::string lowered;
    lowered.reserve(s.size());
    for (char c : s) {
        const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (punct.find(lc) != std::string::npos) continue;
        lowered += lc;
    }
    std::istringstream words(lowered);
    std::string w, out;
    while (words >> w) {
        if (w == "a" || w == "an" || w == "the") continue;
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

int exact_match(const std::string& prediction, const std::string& gold) {
    return normalize_answer(prediction) == normalize_answer(gold) ? 1 : 0;
}

EvalReport summarize(std::vector<QuestionTrace> traces) {
    EvalReport report;
    report.n = static_cast<int>(traces.size());
    double hits = 0.0;
    for (auto& t : traces) {
        t.em = exact_match(t.prediction, t.gold);
        hits += t.em;
    }
    report.em = report.n ? hits / report.n : 0.0;
    report.traces = std::move(traces);
    return report;
}

namespace {

bool contains_normalized(const std::string& text, const std::string& needle_norm) {
    if (needle_norm.empty()) return false;
    return normalize_answer(text).find(needle_norm) != std::string::npos;
}

void bucket_add(ConditioningBucket& b, int em) {
    b.em = (b.em * b.count + em) / (b.count + 1);
    ++b.count;
}

}  // namespace

ConditioningReport conditioning_analysis(const std::vector<QuestionTrace>& traces,
                                         const std::vector<KnowledgeRecord>& knowledge) {
    std::unordered_map<int64_t, const KnowledgeRecord*> by_id;
    for (const auto& r : knowledge) by_id[r.id] = &r;

    ConditioningReport rep;
    rep.n = static_cast<int>(traces.size());
    double dbar_in_sum = 0.0, dbar_out_sum = 0.0;

    for (const auto& t : traces) {
        const std::string pred = normalize_answer(t.prediction);
        const std::string gold = normalize_answer(t.gold);
        bool in_q = false, in_a = false, in_p = false, gold_in = false;
        double dist_sum = 0.0;
        for (const auto& hit : t.retrieved) {
            auto it = by_id.find(hit.id);
            if (it == by_id.end())
                throw ConsistencyError("conditioning_analysis: retrieved id " +
                                       std::to_string(hit.id) + " missing from knowledge");
            const KnowledgeRecord& rec = *it->second;
            dist_sum += 1.0 - hit.score;
            if (rec.type == SourceType::QA) {
                in_q = in_q || contains_normalized(rec.question, pred);
                in_a = in_a || contains_normalized(rec.answer, pred);
                gold_in = gold_in || contains_normalized(rec.question, gold) ||
                          contains_normalized(rec.answer, gold);
            } else {
                const std::string text = raw_text(rec);
                in_p = in_p || contains_normalized(text, pred);
                gold_in = gold_in || contains_normalized(text, gold);
            }
        }
        const int memberships = static_cast<int>(in_q) + static_cast<int>(in_a) + static_cast<int>(in_p);
        if (memberships == 0)
            bucket_add(rep.not_in, t.em);
        else if (memberships > 1)
            bucket_add(rep.multi, t.em);
        else if (in_q)
            bucket_add(rep.only_q, t.em);
        else if (in_a)
            bucket_add(rep.only_a, t.em);
        else
            bucket_add(rep.only_p, t.em);

        const double dbar = t.retrieved.empty() ? 0.0 : dist_sum / static_cast<double>(t.retrieved.size());
        if (gold_in) {
            bucket_add(rep.gold_in_r, t.em);
            dbar_in_sum += dbar;
        } else {
            bucket_add(rep.gold_not_in_r, t.em);
            dbar_out_sum += dbar;
        }
    }
    if (rep.gold_in_r.count) rep.dbar_in_r = dbar_in_sum / rep.gold_in_r.count;
    if (rep.gold_not_in_r.count) rep.dbar_not_in_r = dbar_out_sum / rep.gold_not_in_r.count;
    return rep;
}

}  // namespace matter
