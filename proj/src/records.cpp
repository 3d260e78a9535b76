#include "matter/records.hpp"

#include <cctype>
#include <fstream>
#include <set>

#include <json.hpp>

#include "matter/error.hpp"
#include "matter/text.hpp"

namespace matter {

using nlohmann::json;

const char* source_name(SourceType t) { return t == SourceType::QA ? "qa" : "prg"; }

KnowledgeRecord KnowledgeRecord::qa(int64_t id, std::string question, std::string answer) {
    if (question.empty() || answer.empty())
        throw InputError("qa record " + std::to_string(id) + ": question and answer must be non-empty");
    KnowledgeRecord r;
    r.id = id;
    r.type = SourceType::QA;
    r.question = std::move(question);
    r.answer = std::move(answer);
    return r;
}

KnowledgeRecord KnowledgeRecord::prg(int64_t id, std::string title, std::string content) {
    if (content.empty())
        throw InputError("prg record " + std::to_string(id) + ": content must be non-empty");
    KnowledgeRecord r;
    r.id = id;
    r.type = SourceType::PRG;
    r.title = std::move(title);
    r.content = std::move(content);
    return r;
}

namespace {

const std::string& require_field(const std::map<std::string, std::string>& fields,
                                 const char* name) {
    auto it = fields.find(name);
    if (it == fields.end())
        throw TemplateError(std::string("render_template: missing field '") + name + "'");
    return it->second;
}

}  // namespace

std::string render_template(TemplateKind kind, const std::map<std::string, std::string>& fields) {
    switch (kind) {
        case TemplateKind::Question:
            return "Question: " + require_field(fields, "question") + " Answer:";
        case TemplateKind::QAPair:
            return "<spe1><spe2> Question: " + require_field(fields, "question") +
                   " Answer: " + require_field(fields, "answer");
        case TemplateKind::Paragraph:
            return "<spe3><spe4> Title : " + require_field(fields, "title") +
                   " Content: " + require_field(fields, "content");
    }
    throw TemplateError("render_template: unknown kind");
}

std::string render_question(const std::string& question) {
    return render_template(TemplateKind::Question, {{"question", question}});
}

std::string render_record(const KnowledgeRecord& rec) {
    if (rec.type == SourceType::QA)
        return render_template(TemplateKind::QAPair,
                               {{"question", rec.question}, {"answer", rec.answer}});
    return render_template(TemplateKind::Paragraph, {{"title", rec.title}, {"content", rec.content}});
}

std::string raw_text(const KnowledgeRecord& rec) {
    if (rec.type == SourceType::QA) return rec.question + " " + rec.answer;
    if (rec.title.empty()) return rec.content;
    return rec.title + " " + rec.content;
}

namespace {

bool is_abbreviation_at(const std::string& text, size_t dot) {
    // token ending at text[dot] == '.'
    size_t start = dot;
    while (start > 0 && !std::isspace(static_cast<unsigned char>(text[start - 1]))) --start;
    const std::string tok = text.substr(start, dot - start + 1);
    for (const char* abbr : {"Dr.", "Mr.", "St.", "No."})
        if (tok == abbr) return true;
    return false;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

std::vector<std::string> split_paragraph(const std::string& text) {
    std::vector<std::string> sentences;
    size_t begin = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const bool terminator = (c == '.' || c == '!' || c == '?');
        if (!terminator) continue;
        const bool at_end = (i + 1 == text.size());
        const bool before_space =
            !at_end && std::isspace(static_cast<unsigned char>(text[i + 1]));
        if (!at_end && !before_space) continue;
        if (c == '.' && is_abbreviation_at(text, i)) continue;
        std::string s = trim(text.substr(begin, i - begin + 1));
        if (!s.empty()) sentences.push_back(std::move(s));
        begin = i + 1;
    }
    std::string tail = trim(text.substr(begin));
    if (!tail.empty()) sentences.push_back(std::move(tail));

    std::vector<std::string> chunks;
    for (size_t i = 0; i < sentences.size(); i += 2) {
        if (i + 1 < sentences.size())
            chunks.push_back(sentences[i] + " " + sentences[i + 1]);
        else
            chunks.push_back(sentences[i]);
    }
    return chunks;
}

std::vector<KnowledgeRecord> load_records_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open records file: " + path);
    std::vector<KnowledgeRecord> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw FormatError(path + ":" + std::to_string(lineno) + ": invalid JSON");
        const std::string type = j.value("type", "");
        if (type == "qa")
            out.push_back(KnowledgeRecord::qa(j.at("id").get<int64_t>(),
                                              j.at("question").get<std::string>(),
                                              j.at("answer").get<std::string>()));
        else if (type == "prg")
            out.push_back(KnowledgeRecord::prg(j.at("id").get<int64_t>(),
                                               j.at("title").get<std::string>(),
                                               j.at("content").get<std::string>()));
        else
            throw FormatError(path + ":" + std::to_string(lineno) + ": unknown record type '" +
                              type + "'");
    }
    return out;
}

void save_records_jsonl(const std::string& path, const std::vector<KnowledgeRecord>& records) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write records file: " + path);
    for (const auto& r : records) {
        json j;
        j["id"] = r.id;
        j["type"] = source_name(r.type);
        if (r.type == SourceType::QA) {
            j["question"] = r.question;
            j["answer"] = r.answer;
        } else {
            j["title"] = r.title;
            j["content"] = r.content;
        }
        out << j.dump() << '\n';
    }
}

std::vector<QAExample> load_examples_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open examples file: " + path);
    std::vector<QAExample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw FormatError(path + ": invalid JSON line");
        QAExample e;
        e.question = j.at("question").get<std::string>();
        e.answer = j.at("answer").get<std::string>();
        if (j.contains("gold_ids")) e.gold_ids = j["gold_ids"].get<std::vector<int64_t>>();
        if (e.question.empty() || e.answer.empty())
            throw FormatError(path + ": example with empty question or answer");
        out.push_back(std::move(e));
    }
    return out;
}

Vocab build_vocab(const std::vector<KnowledgeRecord>& records,
                  const std::vector<QAExample>& train_examples,
                  const std::vector<QAExample>& test_examples) {
    std::set<std::string> seen;
    auto take = [&seen](const std::string& text) {
        for (auto& t : split_tokens(text)) seen.insert(std::move(t));
    };
    for (const auto& r : records) {
        take(render_record(r));
        take(raw_text(r));
    }
    for (const auto* set : {&train_examples, &test_examples}) {
        for (const auto& e : *set) {
            take(render_question(e.question));
            take(e.answer);
        }
    }
    Vocab vocab;
    for (const auto& t : seen) vocab.add(t);
    return vocab;
}

void save_examples_jsonl(const std::string& path, const std::vector<QAExample>& examples) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write examples file: " + path);
    for (const auto& e : examples) {
        json j;
        j["question"] = e.question;
        j["answer"] = e.answer;
        j["gold_ids"] = e.gold_ids;
        out << j.dump() << '\n';
    }
}

}  // namespace matter
