#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rra/error.hpp"
#include "rra/lexicon.hpp"

namespace rra {

struct QueryTerm {
    TokenId token;
    double weight;

    friend bool operator==(const QueryTerm&, const QueryTerm&) = default;
};

/// Sparse query representation w_{t,q}: sorted by token, one entry per
/// token, weights finite and strictly positive.
class QueryVector {
public:
    QueryVector() = default;

    /// Sums duplicate tokens and drops zero weights. Throws InputError on a
    /// negative or non-finite weight, or a token id >= n_tokens.
    QueryVector(std::vector<QueryTerm> terms, std::size_t n_tokens) {
        for (const auto& qt : terms) {
            if (!std::isfinite(qt.weight) || qt.weight < 0.0) {
                throw InputError("query weights must be finite and nonnegative");
            }
            if (qt.token >= n_tokens) {
                throw InputError("query token id out of range");
            }
        }
        std::sort(terms.begin(), terms.end(), [](const QueryTerm& a, const QueryTerm& b) { return a.token < b.token; });
        for (const auto& qt : terms) {
            if (qt.weight == 0.0) continue;
            if (!terms_.empty() && terms_.back().token == qt.token) {
                terms_.back().weight += qt.weight;
            } else {
                terms_.push_back(qt);
            }
        }
    }

    [[nodiscard]] std::span<const QueryTerm> terms() const noexcept { return terms_; }
    [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

    /// Resolves token strings through `vocab`; unknown tokens are dropped.
    static QueryVector from_strings(const std::vector<std::pair<std::string, double>>& weights,
                                    const Vocabulary& vocab) {
        std::vector<QueryTerm> terms;
        for (const auto& [token, w] : weights) {
            if (auto id = vocab.find(token)) {
                terms.push_back({*id, w});
            } else if (!std::isfinite(w) || w < 0.0) {
                throw InputError("query weights must be finite and nonnegative");
            }
        }
        return QueryVector(std::move(terms), vocab.size());
    }

private:
    std::vector<QueryTerm> terms_;
};

} // namespace rra
