// Knowledge records, rendering templates, paragraph splitting, JSONL IO.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace matter {

enum class SourceType { QA = 0, PRG = 1 };

const char* source_name(SourceType t);

// One unit of external knowledge. QA uses question/answer, PRG title/content.
struct KnowledgeRecord {
    int64_t id = 0;
    SourceType type = SourceType::QA;
    std::string question, answer;  // QA
    std::string title, content;    // PRG

    static KnowledgeRecord qa(int64_t id, std::string question, std::string answer);
    static KnowledgeRecord prg(int64_t id, std::string title, std::string content);
};

struct QAExample {
    std::string question, answer;
    std::vector<int64_t> gold_ids;  // synthetic diagnostics only, never fed to the model
};

enum class TemplateKind { Question, QAPair, Paragraph };

// Exact rendering templates. Knowledge types are distinguished purely by
// their special-token prefixes.
std::string render_template(TemplateKind kind, const std::map<std::string, std::string>& fields);
std::string render_question(const std::string& question);
std::string render_record(const KnowledgeRecord& rec);

// The knowledge text itself, without template words or special tokens:
// "question answer" for QA, "title content" for PRG. This is both the
// retrieval-embedding text and the auto-encoding target.
std::string raw_text(const KnowledgeRecord& rec);

// Sentence-splits on . ! ? followed by whitespace (a short abbreviation list
// is exempt) and groups consecutive sentences into two-sentence chunks; a
// trailing odd sentence becomes a singleton chunk.
std::vector<std::string> split_paragraph(const std::string& text);

// Line-delimited JSON corpora.
std::vector<KnowledgeRecord> load_records_jsonl(const std::string& path);
void save_records_jsonl(const std::string& path, const std::vector<KnowledgeRecord>& records);
std::vector<QAExample> load_examples_jsonl(const std::string& path);
void save_examples_jsonl(const std::string& path, const std::vector<QAExample>& examples);

struct Vocab;

// Closed-world vocabulary from the corpus: every token of every rendered
// record/question plus every answer. Tokens are added in sorted order so the
// result is independent of input ordering.
Vocab build_vocab(const std::vector<KnowledgeRecord>& records,
                  const std::vector<QAExample>& train_examples,
                  const std::vector<QAExample>& test_examples);

}  // namespace matter
