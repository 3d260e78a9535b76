#include "matter/text.hpp"

#include <cctype>

#include "matter/error.hpp"

namespace matter {

Vocab::Vocab() {
    for (const char* t : {"<pad>", "<bos>", "<eos>", "<unk>", "<spe1>", "<spe2>", "<spe3>", "<spe4>"})
        add(t);
}

int Vocab::add(const std::string& token) {
    auto it = ids_.find(token);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
    ids_.emplace(token, id);
    return id;
}

int Vocab::id_of(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocab::token_of(int id) const {
    if (id < 0 || id >= size()) throw InputError("Vocab: token id out of range");
    return tokens_[static_cast<size_t>(id)];
}

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

// "<speN>" for N in 1..4
size_t match_special(const std::string& s, size_t i) {
    if (i + 6 <= s.size() && s.compare(i, 4, "<spe") == 0 && s[i + 4] >= '1' && s[i + 4] <= '4' &&
        s[i + 5] == '>')
        return 6;
    return 0;
}

}  // namespace

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (size_t n = match_special(text, i)) {
            out.push_back(text.substr(i, n));
            i += n;
            continue;
        }
        if (is_word_char(c)) {
            size_t j = i + 1;
            while (j < text.size() && is_word_char(text[j])) ++j;
            out.push_back(text.substr(i, j - i));
            i = j;
            continue;
        }
        out.push_back(std::string(1, c));
        ++i;
    }
    return out;
}

std::vector<int> encode(const Vocab& vocab, const std::string& text) {
    std::vector<int> ids;
    for (const auto& t : split_tokens(text)) ids.push_back(vocab.id_of(t));
    return ids;
}

std::string decode(const Vocab& vocab, const std::vector<int>& ids) {
    std::string out;
    for (int id : ids) {
        if (id == Vocab::kPad || id == Vocab::kBos || id == Vocab::kEos) continue;
        if (!out.empty()) out += ' ';
        out += vocab.token_of(id);
    }
    return out;
}

}  // namespace matter
