#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rra/error.hpp"

namespace rra {

using TokenId = std::uint32_t;
using DocId = std::uint32_t;

/// Bijection between external string keys and dense ids assigned in
/// first-seen order.
template <typename Id>
class IdRegistry {
public:
    /// Returns the id for `key`, registering it if unseen.
    Id intern(std::string_view key) {
        auto it = ids_.find(std::string(key));
        if (it != ids_.end()) {
            return it->second;
        }
        const Id id = static_cast<Id>(names_.size());
        names_.emplace_back(key);
        ids_.emplace(names_.back(), id);
        return id;
    }

    [[nodiscard]] std::optional<Id> find(std::string_view key) const {
        auto it = ids_.find(std::string(key));
        if (it == ids_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    [[nodiscard]] bool contains(std::string_view key) const { return find(key).has_value(); }
    [[nodiscard]] const std::string& name(Id id) const { return names_.at(id); }
    [[nodiscard]] std::size_t size() const noexcept { return names_.size(); }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }

private:
    std::unordered_map<std::string, Id> ids_;
    std::vector<std::string> names_;
};

using Vocabulary = IdRegistry<TokenId>;
using DocRegistry = IdRegistry<DocId>;

/// (doc, value) entry of a token-major list.
struct Posting {
    DocId doc;
    double value;

    friend bool operator==(const Posting&, const Posting&) = default;
};

/// (token, value) entry of a document-major list.
struct TermWeight {
    TokenId token;
    double value;

    friend bool operator==(const TermWeight&, const TermWeight&) = default;
};

struct Triple {
    TokenId token;
    DocId doc;
    double weight;

    friend bool operator==(const Triple&, const Triple&) = default;
};

/// Immutable sparse term-document weight matrix stored in both orientations.
///
/// Token-major lists are sorted by doc id and document-major lists by token
/// id. Only strictly positive weights are stored. `cross_positions(d)` maps
/// each entry of document d's list to its index in the flat token-major
/// array, which lets per-document passes read and write token-major data.
class SparseLexicon {
public:
    SparseLexicon()
        : vocab_(std::make_shared<const Vocabulary>()), docs_(std::make_shared<const DocRegistry>()),
          token_offsets_(1, 0), doc_offsets_(1, 0) {}

    /// Builds both orientations from triples. Every (token, doc) pair must be
    /// unique and every weight strictly positive and finite.
    SparseLexicon(std::shared_ptr<const Vocabulary> vocab, std::shared_ptr<const DocRegistry> docs,
                  std::vector<Triple> triples)
        : vocab_(std::move(vocab)), docs_(std::move(docs)) {
        const std::size_t n_tokens = vocab_->size();
        const std::size_t n_docs = docs_->size();
        for (const auto& tr : triples) {
            if (tr.token >= n_tokens || tr.doc >= n_docs) {
                throw InputError("triple references an unregistered token or document");
            }
            if (!(tr.weight > 0.0) || !std::isfinite(tr.weight)) {
                throw InputError("stored weights must be strictly positive and finite");
            }
        }
        std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
            return a.token != b.token ? a.token < b.token : a.doc < b.doc;
        });
        for (std::size_t i = 1; i < triples.size(); ++i) {
            if (triples[i].token == triples[i - 1].token && triples[i].doc == triples[i - 1].doc) {
                throw InputError("duplicate (token, document) pair '" + vocab_->name(triples[i].token) + "', '" +
                                 docs_->name(triples[i].doc) + "'");
            }
        }

        token_offsets_.assign(n_tokens + 1, 0);
        doc_offsets_.assign(n_docs + 1, 0);
        for (const auto& tr : triples) {
            ++token_offsets_[tr.token + 1];
            ++doc_offsets_[tr.doc + 1];
        }
        for (std::size_t t = 0; t < n_tokens; ++t) {
            token_offsets_[t + 1] += token_offsets_[t];
        }
        for (std::size_t d = 0; d < n_docs; ++d) {
            doc_offsets_[d + 1] += doc_offsets_[d];
        }

        token_major_.reserve(triples.size());
        for (const auto& tr : triples) {
            token_major_.push_back({tr.doc, tr.weight});
        }
        // Scattering in token order leaves each document's list sorted by token.
        doc_major_.resize(triples.size());
        cross_.resize(triples.size());
        std::vector<std::size_t> cursor(doc_offsets_.begin(), doc_offsets_.end() - 1);
        for (std::size_t pos = 0; pos < triples.size(); ++pos) {
            const auto& tr = triples[pos];
            const std::size_t slot = cursor[tr.doc]++;
            doc_major_[slot] = {tr.token, tr.weight};
            cross_[slot] = pos;
        }
    }

    [[nodiscard]] std::size_t n_tokens() const noexcept { return token_offsets_.size() - 1; }
    [[nodiscard]] std::size_t n_docs() const noexcept { return doc_offsets_.size() - 1; }
    [[nodiscard]] std::size_t nnz() const noexcept { return token_major_.size(); }

    /// The set D_t with weights.
    [[nodiscard]] std::span<const Posting> postings(TokenId t) const {
        return {token_major_.data() + token_offsets_[t], token_major_.data() + token_offsets_[t + 1]};
    }

    /// The set T_d with weights.
    [[nodiscard]] std::span<const TermWeight> terms(DocId d) const {
        return {doc_major_.data() + doc_offsets_[d], doc_major_.data() + doc_offsets_[d + 1]};
    }

    [[nodiscard]] std::span<const std::size_t> cross_positions(DocId d) const {
        return {cross_.data() + doc_offsets_[d], cross_.data() + doc_offsets_[d + 1]};
    }

    [[nodiscard]] std::size_t token_offset(TokenId t) const { return token_offsets_[t]; }
    [[nodiscard]] std::span<const std::size_t> token_offsets() const noexcept { return token_offsets_; }
    [[nodiscard]] std::span<const Posting> token_major() const noexcept { return token_major_; }

    [[nodiscard]] const Vocabulary& vocabulary() const noexcept { return *vocab_; }
    [[nodiscard]] const DocRegistry& doc_registry() const noexcept { return *docs_; }
    [[nodiscard]] const std::shared_ptr<const Vocabulary>& shared_vocabulary() const noexcept { return vocab_; }
    [[nodiscard]] const std::shared_ptr<const DocRegistry>& shared_doc_registry() const noexcept { return docs_; }

    /// Stored triples in token-major order.
    [[nodiscard]] std::vector<Triple> triples() const {
        std::vector<Triple> out;
        out.reserve(nnz());
        for (TokenId t = 0; t < n_tokens(); ++t) {
            for (const auto& p : postings(t)) {
                out.push_back({t, p.doc, p.value});
            }
        }
        return out;
    }

    /// Bytes held by support-sized and dimension-sized arrays.
    [[nodiscard]] std::size_t storage_bytes() const noexcept {
        return token_major_.capacity() * sizeof(Posting) + doc_major_.capacity() * sizeof(TermWeight) +
               cross_.capacity() * sizeof(std::size_t) +
               (token_offsets_.capacity() + doc_offsets_.capacity()) * sizeof(std::size_t);
    }

private:
    std::shared_ptr<const Vocabulary> vocab_;
    std::shared_ptr<const DocRegistry> docs_;
    std::vector<std::size_t> token_offsets_;
    std::vector<Posting> token_major_;
    std::vector<std::size_t> doc_offsets_;
    std::vector<TermWeight> doc_major_;
    std::vector<std::size_t> cross_;
};

/// Accumulates documents in stream order and produces a SparseLexicon.
///
/// Tokens and documents get ids on first sight. Zero weights are dropped
/// without registering their token; negative or non-finite weights and
/// repeated document ids are rejected.
class LexiconBuilder {
public:
    LexiconBuilder() : vocab_(std::make_shared<Vocabulary>()), docs_(std::make_shared<DocRegistry>()) {}

    DocId add_document(std::string_view doc_id, std::span<const std::pair<std::string, double>> weights) {
        if (docs_->contains(doc_id)) {
            throw InputError("duplicate document id '" + std::string(doc_id) + "'");
        }
        for (const auto& [token, w] : weights) {
            if (!std::isfinite(w) || w < 0.0) {
                throw InputError("negative or non-finite weight for (doc '" + std::string(doc_id) + "', token '" +
                                 token + "')");
            }
        }
        const DocId d = docs_->intern(doc_id);
        for (const auto& [token, w] : weights) {
            if (w == 0.0) {
                continue;
            }
            triples_.push_back({vocab_->intern(token), d, w});
        }
        return d;
    }

    DocId add_document(std::string_view doc_id, const std::vector<std::pair<std::string, double>>& weights) {
        return add_document(doc_id, std::span<const std::pair<std::string, double>>(weights));
    }

    [[nodiscard]] SparseLexicon build() && {
        return SparseLexicon(std::move(vocab_), std::move(docs_), std::move(triples_));
    }

private:
    std::shared_ptr<Vocabulary> vocab_;
    std::shared_ptr<DocRegistry> docs_;
    std::vector<Triple> triples_;
};

struct CollectionStats {
    std::size_t n_docs = 0;
    std::size_t n_tokens = 0;
    std::size_t n_nonzeros = 0;
    std::vector<std::size_t> token_doc_counts; ///< |D_t| per token
    std::vector<std::size_t> doc_token_counts; ///< |T_d| per document
};

inline CollectionStats collection_stats(const SparseLexicon& lex) {
    CollectionStats s;
    s.n_docs = lex.n_docs();
    s.n_tokens = lex.n_tokens();
    s.n_nonzeros = lex.nnz();
    s.token_doc_counts.reserve(s.n_tokens);
    for (TokenId t = 0; t < s.n_tokens; ++t) {
        s.token_doc_counts.push_back(lex.postings(t).size());
    }
    s.doc_token_counts.reserve(s.n_docs);
    for (DocId d = 0; d < s.n_docs; ++d) {
        s.doc_token_counts.push_back(lex.terms(d).size());
    }
    return s;
}

} // namespace rra
