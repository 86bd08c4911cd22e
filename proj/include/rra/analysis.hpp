#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "rra/porter_stemmer.hpp"

namespace rra {

/// Lowercases ASCII and splits on maximal runs of non-alphanumeric ASCII
/// characters. Bytes >= 0x80 count as word characters so multi-byte UTF-8
/// letters stay inside their token.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
            current.push_back(ch);
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

// Lucene's default English stop set.
inline constexpr std::array<std::string_view, 33> english_stopwords = {
    "a",    "an",   "and",  "are",   "as",    "at",   "be",    "but",  "by",   "for",  "if",
    "in",   "into", "is",   "it",    "no",    "not",  "of",    "on",   "or",   "such", "that",
    "the",  "their", "then", "there", "these", "they", "this", "to",   "was",  "will", "with"};

inline bool is_stopword(std::string_view token) {
    for (auto w : english_stopwords) {
        if (w == token) return true;
    }
    return false;
}

/// Tokenization plus optional stopword removal and Porter stemming. Both
/// filters are off by default.
struct Analyzer {
    bool remove_stopwords = false;
    bool stem = false;

    [[nodiscard]] std::vector<std::string> operator()(std::string_view text) const {
        auto tokens = tokenize(text);
        if (!remove_stopwords && !stem) {
            return tokens;
        }
        std::vector<std::string> out;
        out.reserve(tokens.size());
        const PorterStemmer stemmer;
        for (auto& tok : tokens) {
            if (remove_stopwords && is_stopword(tok)) continue;
            out.push_back(stem ? stemmer(tok) : std::move(tok));
        }
        return out;
    }
};

} // namespace rra
