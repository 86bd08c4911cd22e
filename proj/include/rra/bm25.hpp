#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rra/analysis.hpp"
#include "rra/error.hpp"
#include "rra/lexicon.hpp"
#include "rra/query.hpp"

namespace rra {

/// Anserini defaults.
struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;

    void validate() const {
        if (!(k1 > 0.0) || !std::isfinite(k1)) {
            throw std::invalid_argument("bm25: k1 must be positive");
        }
        if (!(b >= 0.0 && b <= 1.0)) {
            throw std::invalid_argument("bm25: b must lie in [0, 1]");
        }
    }
};

struct TokenizedCorpus {
    std::vector<std::string> doc_ids;
    std::vector<std::vector<std::string>> docs;

    void add(std::string id, std::vector<std::string> tokens) {
        doc_ids.push_back(std::move(id));
        docs.push_back(std::move(tokens));
    }

    [[nodiscard]] std::size_t size() const noexcept { return docs.size(); }

    [[nodiscard]] double average_length() const noexcept {
        if (docs.empty()) return 0.0;
        double total = 0.0;
        for (const auto& d : docs) total += static_cast<double>(d.size());
        return total / static_cast<double>(docs.size());
    }
};

/// Okapi BM25 idf with the +1 inside the log, which keeps it positive.
inline double bm25_idf(std::size_t n_docs, std::size_t df) {
    const double n = static_cast<double>(n_docs);
    const double f = static_cast<double>(df);
    return std::log(1.0 + (n - f + 0.5) / (f + 0.5));
}

inline double bm25_term_weight(double idf, double tf, double doc_len, double avg_len, const Bm25Params& p) {
    const double norm = avg_len > 0.0 ? doc_len / avg_len : 1.0;
    return idf * tf * (p.k1 + 1.0) / (tf + p.k1 * (1.0 - p.b + p.b * norm));
}

/// Converts a tokenized corpus into a lexicon of BM25 document weights.
/// Tokens are registered in order of first occurrence across the corpus.
inline SparseLexicon build_bm25_lexicon(const TokenizedCorpus& corpus, const Bm25Params& params = {}) {
    params.validate();
    if (corpus.size() == 0) {
        throw InputError("bm25: corpus is empty");
    }

    // Per-document term frequencies, kept in first-occurrence order.
    std::vector<std::vector<std::pair<std::string, double>>> tfs(corpus.size());
    std::unordered_map<std::string, std::size_t> df;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        std::unordered_map<std::string, std::size_t> slot;
        for (const auto& tok : corpus.docs[i]) {
            auto [it, inserted] = slot.try_emplace(tok, tfs[i].size());
            if (inserted) {
                tfs[i].emplace_back(tok, 1.0);
                ++df[tok];
            } else {
                tfs[i][it->second].second += 1.0;
            }
        }
    }

    const double avg_len = corpus.average_length();
    LexiconBuilder builder;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const double len = static_cast<double>(corpus.docs[i].size());
        auto& row = tfs[i];
        for (auto& [tok, tf] : row) {
            tf = bm25_term_weight(bm25_idf(corpus.size(), df[tok]), tf, len, avg_len, params);
        }
        builder.add_document(corpus.doc_ids[i], row);
    }
    return std::move(builder).build();
}

/// Query-side weights are raw token counts; tokens outside `vocab` are dropped.
inline QueryVector bm25_query_vector(std::string_view query, const Vocabulary& vocab, const Analyzer& analyzer = {}) {
    std::vector<QueryTerm> terms;
    for (const auto& tok : analyzer(query)) {
        if (auto id = vocab.find(tok)) {
            terms.push_back({*id, 1.0});
        }
    }
    return QueryVector(std::move(terms), vocab.size());
}

} // namespace rra
