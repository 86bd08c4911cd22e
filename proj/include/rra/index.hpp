#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "rra/lexicon.hpp"
#include "rra/query.hpp"
#include "rra/transform.hpp"

namespace rra {

struct ScoredDoc {
    DocId doc;
    double score;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Top-k documents, score descending, ties by ascending doc id.
using ScoredList = std::vector<ScoredDoc>;

inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) noexcept {
    return a.score != b.score ? a.score > b.score : a.doc < b.doc;
}

inline ScoredList select_top_k(std::span<const double> scores, std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("k must be at least 1");
    }
    ScoredList all;
    all.reserve(scores.size());
    for (std::size_t d = 0; d < scores.size(); ++d) {
        all.push_back({static_cast<DocId>(d), scores[d]});
    }
    const std::size_t n = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), ranks_before);
    all.resize(n);
    return all;
}

/// Inverted index over a pragmatic lexicon.
///
/// Postings hold delta = L1(d|t) - lt1[t] * ld1[d], so the score of every
/// document is
///
///   sum_{t in q, d in D_t} w(t,q) delta(t,d)  +  ld1[d] * G,   G = sum_{t in q} w(t,q) lt1[t]
///
/// which equals the split support/off-support sum while touching only the
/// query's posting lists plus one pass over ld1.
class PostingsIndex {
public:
    PostingsIndex() = default;

    explicit PostingsIndex(const PragmaticLexicon& prag)
        : vocab_(prag.shared_vocabulary()), docs_(prag.shared_doc_registry()),
          offsets_(prag.token_offsets().begin(), prag.token_offsets().end()), lt1_(prag.lt1().begin(), prag.lt1().end()),
          ld1_(prag.ld1().begin(), prag.ld1().end()) {
        postings_.reserve(prag.nnz());
        for (TokenId t = 0; t < prag.n_tokens(); ++t) {
            for (const auto& p : prag.postings(t)) {
                postings_.push_back({p.doc, numeric::residual(p.value, lt1_[t] * ld1_[p.doc])});
            }
        }
    }

    [[nodiscard]] std::size_t n_tokens() const noexcept { return lt1_.size(); }
    [[nodiscard]] std::size_t n_docs() const noexcept { return ld1_.size(); }
    [[nodiscard]] std::size_t n_postings() const noexcept { return postings_.size(); }

    [[nodiscard]] std::span<const Posting> postings(TokenId t) const {
        return {postings_.data() + offsets_[t], postings_.data() + offsets_[t + 1]};
    }
    [[nodiscard]] double lt1(TokenId t) const { return lt1_[t]; }
    [[nodiscard]] double ld1(DocId d) const { return ld1_[d]; }

    /// L1(d|t) of a posting, rebuilt from its delta.
    [[nodiscard]] double reconstruct(TokenId t, const Posting& p) const { return p.value + lt1_[t] * ld1_[p.doc]; }

    /// Scores of all documents.
    [[nodiscard]] std::vector<double> score_all(const QueryVector& q) const {
        std::vector<double> acc(n_docs(), 0.0);
        double g = 0.0;
        for (const auto& qt : q.terms()) {
            g += qt.weight * lt1_.at(qt.token);
            for (const auto& p : postings(qt.token)) {
                acc[p.doc] += qt.weight * p.value;
            }
        }
        for (std::size_t d = 0; d < acc.size(); ++d) {
            acc[d] += ld1_[d] * g;
        }
        return acc;
    }

    [[nodiscard]] ScoredList score(const QueryVector& q, std::size_t k) const { return select_top_k(score_all(q), k); }

    [[nodiscard]] const Vocabulary& vocabulary() const noexcept { return *vocab_; }
    [[nodiscard]] const DocRegistry& doc_registry() const noexcept { return *docs_; }

private:
    std::shared_ptr<const Vocabulary> vocab_ = std::make_shared<const Vocabulary>();
    std::shared_ptr<const DocRegistry> docs_ = std::make_shared<const DocRegistry>();
    std::vector<std::size_t> offsets_{0};
    std::vector<Posting> postings_;
    std::vector<double> lt1_;
    std::vector<double> ld1_;
};

inline PostingsIndex build_index(const PragmaticLexicon& prag) { return PostingsIndex(prag); }

/// Support and off-support sums evaluated separately per document, without
/// the delta regrouping. O(|q| |D| log) reference path.
inline std::vector<double> score_two_sum(const PragmaticLexicon& prag, const QueryVector& q) {
    std::vector<double> scores(prag.n_docs(), 0.0);
    for (DocId d = 0; d < prag.n_docs(); ++d) {
        double on_support = 0.0;
        double off_support = 0.0;
        for (const auto& qt : q.terms()) {
            const auto list = prag.postings(qt.token);
            auto it = std::lower_bound(list.begin(), list.end(), d,
                                       [](const Posting& p, DocId doc) { return p.doc < doc; });
            if (it != list.end() && it->doc == d) {
                on_support += qt.weight * it->value;
            } else {
                off_support += qt.weight * prag.lt1(qt.token);
            }
        }
        scores[d] = on_support + prag.ld1(d) * off_support;
    }
    return scores;
}

/// Plain sparse dot product against untransformed weights.
inline std::vector<double> baseline_score_all(const SparseLexicon& lex, const QueryVector& q) {
    std::vector<double> acc(lex.n_docs(), 0.0);
    for (const auto& qt : q.terms()) {
        for (const auto& p : lex.postings(qt.token)) {
            acc[p.doc] += qt.weight * p.value;
        }
    }
    return acc;
}

inline ScoredList baseline_score(const SparseLexicon& lex, const QueryVector& q, std::size_t k) {
    return select_top_k(baseline_score_all(lex, q), k);
}

} // namespace rra
