// Word-level tokenizer over a closed vocabulary built from the corpus.
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace matter {

struct Vocab {
    static constexpr int kPad = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;
    static constexpr int kUnk = 3;
    static constexpr int kSpe1 = 4;
    static constexpr int kSpe2 = 5;
    static constexpr int kSpe3 = 6;
    static constexpr int kSpe4 = 7;

    Vocab();

    int add(const std::string& token);       // no-op when already present
    int id_of(const std::string& token) const;  // kUnk when missing
    const std::string& token_of(int id) const;
    int size() const { return static_cast<int>(tokens_.size()); }

    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> ids_;
};

// Splits on whitespace; alphanumeric runs are words, punctuation marks are
// single-character tokens, <spe1>..<spe4> stay atomic.
std::vector<std::string> split_tokens(const std::string& text);

std::vector<int> encode(const Vocab& vocab, const std::string& text);

// Space-joined tokens; pad/bos/eos are dropped.
std::string decode(const Vocab& vocab, const std::vector<int>& ids);

}  // namespace matter
