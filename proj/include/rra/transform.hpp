#pragma once

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rra/error.hpp"
#include "rra/lexicon.hpp"
#include "rra/numeric.hpp"
#include "rra/parallel.hpp"

/// RRA transform.
///
/// A sparse lexicon w(t,d) is turned into a pragmatic listener L1(d|t) through
/// one speaker/listener round of Rational Speech Acts:
///
///   L0(d|t) = P(d) f(w(t,d)) / Z0_t
///   S1(t|d) = L0(d|t)^alpha / Z1_d
///   L1(d|t) = P(d) S1(t|d) / Z1_t
///
/// Every distribution is kept sparse: entries on the support of w are stored
/// explicitly, and every off-support entry equals a product of a per-token
/// and a per-document factor. Each stage therefore holds nnz + O(|T| + |D|)
/// scalars. Normalizers are accumulated in log space.
namespace rra {

enum class PreTransformKind { identity, log1p, exp, one_plus, scale, tanh };

/// Initial lexicon map L(t,d) = f(w(t,d)).
struct PreTransform {
    PreTransformKind kind = PreTransformKind::one_plus;
    double lambda = 1.0; ///< only used by `scale`

    [[nodiscard]] double operator()(double x) const {
        switch (kind) {
        case PreTransformKind::identity: return x;
        case PreTransformKind::log1p: return std::log1p(x);
        case PreTransformKind::exp: return std::exp(x);
        case PreTransformKind::one_plus: return 1.0 + x;
        case PreTransformKind::scale: return lambda * x;
        case PreTransformKind::tanh: return std::tanh(x);
        }
        return x;
    }

    [[nodiscard]] double at_zero() const { return (*this)(0.0); }

    [[nodiscard]] std::string_view name() const {
        switch (kind) {
        case PreTransformKind::identity: return "identity";
        case PreTransformKind::log1p: return "log1p";
        case PreTransformKind::exp: return "exp";
        case PreTransformKind::one_plus: return "one-plus";
        case PreTransformKind::scale: return "scale";
        case PreTransformKind::tanh: return "tanh";
        }
        return "?";
    }

    static PreTransform parse(std::string_view name, double lambda = 1.0) {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) {
            throw std::invalid_argument("pretransform lambda must be positive and finite");
        }
        for (auto kind : all_kinds()) {
            PreTransform f{kind, lambda};
            if (f.name() == name) return f;
        }
        throw std::invalid_argument("unknown pretransform '" + std::string(name) + "'");
    }

    static constexpr std::array<PreTransformKind, 6> all_kinds() {
        return {PreTransformKind::identity, PreTransformKind::log1p, PreTransformKind::exp,
                PreTransformKind::one_plus, PreTransformKind::scale, PreTransformKind::tanh};
    }
};

/// Document prior P(d): uniform, or explicit strictly positive probabilities
/// summing to one.
class Prior {
public:
    static Prior uniform() { return Prior{}; }

    static Prior from_probabilities(std::vector<double> probs) {
        numeric::CompensatedSum total;
        for (double p : probs) {
            if (!(p > 0.0) || !std::isfinite(p)) {
                throw InputError("prior probabilities must be strictly positive and finite");
            }
            total.add(p);
        }
        if (std::fabs(total.value() - 1.0) > 1e-12) {
            throw InputError("prior probabilities must sum to 1 (got " + std::to_string(total.value()) + ")");
        }
        Prior prior;
        prior.probs_ = std::move(probs);
        return prior;
    }

    [[nodiscard]] bool is_uniform() const noexcept { return probs_.empty(); }
    [[nodiscard]] std::span<const double> probabilities() const noexcept { return probs_; }

    [[nodiscard]] double prob(DocId d, std::size_t n_docs) const {
        return is_uniform() ? 1.0 / static_cast<double>(n_docs) : probs_[d];
    }

    void check(std::size_t n_docs) const {
        if (!is_uniform() && probs_.size() != n_docs) {
            throw InputError("prior has " + std::to_string(probs_.size()) + " entries for " +
                             std::to_string(n_docs) + " documents");
        }
    }

private:
    std::vector<double> probs_;
};

/// f applied to the stored weights, in token-major order, plus f(0) for
/// every off-support pair.
struct PretransformedWeights {
    std::vector<double> values;
    double f0 = 0.0;
};

inline PretransformedWeights apply_pretransform(const SparseLexicon& lex, const PreTransform& f) {
    PretransformedWeights out;
    out.f0 = f.at_zero();
    if (!std::isfinite(out.f0) || out.f0 < 0.0) {
        throw NumericError("pretransform value at zero must be finite and nonnegative");
    }
    out.values.reserve(lex.nnz());
    for (TokenId t = 0; t < lex.n_tokens(); ++t) {
        for (const auto& p : lex.postings(t)) {
            const double v = f(p.value);
            if (!std::isfinite(v) || !(v > 0.0)) {
                throw NumericError("pretransform '" + std::string(f.name()) + "' gives non-finite or zero value for (doc '" +
                                   lex.doc_registry().name(p.doc) + "', token '" + lex.vocabulary().name(t) + "')");
            }
            out.values.push_back(v);
        }
    }
    return out;
}

/// L0 in log space. Explicit entries follow the lexicon's token-major order.
/// Off-support: L0(d|t) = lt0[t] * ld0[d] with lt0 = f(0)/Z0_t and ld0 = P(d).
struct LiteralListener {
    std::vector<double> log_explicit;
    std::vector<double> log_z;  ///< log Z0_t
    std::vector<double> log_lt; ///< log lt0 (-inf when f(0) = 0)
    std::vector<double> log_ld; ///< log ld0 = log P(d)

    [[nodiscard]] double explicit_value(std::size_t pos) const { return std::exp(log_explicit[pos]); }
    [[nodiscard]] double z0(TokenId t) const { return std::exp(log_z[t]); }
    [[nodiscard]] double lt0(TokenId t) const { return std::exp(log_lt[t]); }
    [[nodiscard]] double ld0(DocId d) const { return std::exp(log_ld[d]); }
    [[nodiscard]] double implicit_value(TokenId t, DocId d) const { return lt0(t) * ld0(d); }
};

/// S1 in log space. Explicit entries are stored in token-major order even
/// though they normalize per document. Off-support: S1(t|d) = st1[t] * sd1[d].
struct PragmaticSpeaker {
    std::vector<double> log_explicit;
    std::vector<double> log_z;  ///< log Z1_d
    std::vector<double> log_st; ///< log st1 = alpha * log lt0
    std::vector<double> log_sd; ///< log sd1 = alpha * log ld0 - log Z1_d
    double alpha = 1.0;

    [[nodiscard]] double explicit_value(std::size_t pos) const { return std::exp(log_explicit[pos]); }
    [[nodiscard]] double z1(DocId d) const { return std::exp(log_z[d]); }
    [[nodiscard]] double st1(TokenId t) const { return std::exp(log_st[t]); }
    [[nodiscard]] double sd1(DocId d) const { return std::exp(log_sd[d]); }
    [[nodiscard]] double implicit_value(TokenId t, DocId d) const { return st1(t) * sd1(d); }
};

/// Final pragmatic representation in linear space: explicit L1(d|t) on the
/// support, and lt1[t] * ld1[d] everywhere else.
class PragmaticLexicon {
public:
    PragmaticLexicon() = default;

    PragmaticLexicon(std::shared_ptr<const Vocabulary> vocab, std::shared_ptr<const DocRegistry> docs,
                     std::vector<std::size_t> token_offsets, std::vector<Posting> entries, std::vector<double> lt1,
                     std::vector<double> ld1, double alpha)
        : vocab_(std::move(vocab)), docs_(std::move(docs)), token_offsets_(std::move(token_offsets)),
          entries_(std::move(entries)), lt1_(std::move(lt1)), ld1_(std::move(ld1)), alpha_(alpha) {
        if (token_offsets_.size() != vocab_->size() + 1 || lt1_.size() != vocab_->size() ||
            ld1_.size() != docs_->size() || token_offsets_.back() != entries_.size() || token_offsets_.front() != 0) {
            throw InputError("pragmatic lexicon: inconsistent dimensions");
        }
        for (std::size_t t = 0; t + 1 < token_offsets_.size(); ++t) {
            if (token_offsets_[t] > token_offsets_[t + 1]) {
                throw InputError("pragmatic lexicon: token offsets must be nondecreasing");
            }
            for (std::size_t i = token_offsets_[t]; i < token_offsets_[t + 1]; ++i) {
                if (entries_[i].doc >= docs_->size() ||
                    (i > token_offsets_[t] && entries_[i].doc <= entries_[i - 1].doc)) {
                    throw InputError("pragmatic lexicon: postings must be sorted with valid document ids");
                }
            }
        }
    }

    [[nodiscard]] std::size_t n_tokens() const noexcept { return lt1_.size(); }
    [[nodiscard]] std::size_t n_docs() const noexcept { return ld1_.size(); }
    [[nodiscard]] std::size_t nnz() const noexcept { return entries_.size(); }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }

    [[nodiscard]] std::span<const Posting> postings(TokenId t) const {
        return {entries_.data() + token_offsets_[t], entries_.data() + token_offsets_[t + 1]};
    }
    [[nodiscard]] std::span<const Posting> entries() const noexcept { return entries_; }
    [[nodiscard]] std::span<const std::size_t> token_offsets() const noexcept { return token_offsets_; }
    [[nodiscard]] std::span<const double> lt1() const noexcept { return lt1_; }
    [[nodiscard]] std::span<const double> ld1() const noexcept { return ld1_; }
    [[nodiscard]] double lt1(TokenId t) const { return lt1_[t]; }
    [[nodiscard]] double ld1(DocId d) const { return ld1_[d]; }
    [[nodiscard]] double implicit_value(TokenId t, DocId d) const { return lt1_[t] * ld1_[d]; }

    /// L1(d|t) for any pair.
    [[nodiscard]] double value(TokenId t, DocId d) const {
        const auto list = postings(t);
        auto it = std::lower_bound(list.begin(), list.end(), d, [](const Posting& p, DocId doc) { return p.doc < doc; });
        return (it != list.end() && it->doc == d) ? it->value : implicit_value(t, d);
    }

    [[nodiscard]] const Vocabulary& vocabulary() const noexcept { return *vocab_; }
    [[nodiscard]] const DocRegistry& doc_registry() const noexcept { return *docs_; }
    [[nodiscard]] const std::shared_ptr<const Vocabulary>& shared_vocabulary() const noexcept { return vocab_; }
    [[nodiscard]] const std::shared_ptr<const DocRegistry>& shared_doc_registry() const noexcept { return docs_; }

    [[nodiscard]] std::size_t storage_bytes() const noexcept {
        return entries_.capacity() * sizeof(Posting) + token_offsets_.capacity() * sizeof(std::size_t) +
               (lt1_.capacity() + ld1_.capacity()) * sizeof(double);
    }

private:
    std::shared_ptr<const Vocabulary> vocab_ = std::make_shared<const Vocabulary>();
    std::shared_ptr<const DocRegistry> docs_ = std::make_shared<const DocRegistry>();
    std::vector<std::size_t> token_offsets_{0};
    std::vector<Posting> entries_;
    std::vector<double> lt1_;
    std::vector<double> ld1_;
    double alpha_ = 1.0;
};

struct TransformOptions {
    unsigned threads = 1; ///< 0 = hardware concurrency
};

namespace detail {

inline std::vector<double> log_prior(const Prior& prior, std::size_t n_docs) {
    prior.check(n_docs);
    std::vector<double> out(n_docs);
    for (DocId d = 0; d < n_docs; ++d) {
        out[d] = std::log(prior.prob(d, n_docs));
    }
    return out;
}

// Materializes exp(x), rejecting results that over- or underflow.
inline double materialize(double log_value, const char* what) {
    const double v = std::exp(log_value);
    if (log_value != numeric::neg_inf && (!std::isfinite(v) || v < DBL_MIN)) {
        throw NumericError(std::string("pragmatic ") + what +
                           " cannot be represented in linear space (log value " + std::to_string(log_value) +
                           "); lower alpha");
    }
    return v;
}

} // namespace detail

/// Literal listener. Z0_t covers support entries plus f(0) times the prior
/// mass of the documents outside D_t.
inline LiteralListener literal_listener(const SparseLexicon& lex, const PretransformedWeights& weights,
                                        const Prior& prior, const TransformOptions& opts = {}) {
    const std::size_t n_docs = lex.n_docs();
    const std::size_t n_tokens = lex.n_tokens();
    if (weights.values.size() != lex.nnz()) {
        throw std::invalid_argument("literal_listener: weights do not match the lexicon support");
    }

    LiteralListener l0;
    l0.log_ld = detail::log_prior(prior, n_docs);
    l0.log_explicit.resize(lex.nnz());
    l0.log_z.resize(n_tokens);
    l0.log_lt.resize(n_tokens);

    numeric::CompensatedSum total_mass;
    for (DocId d = 0; d < n_docs && !prior.is_uniform(); ++d) {
        total_mass.add(prior.prob(d, n_docs));
    }
    const double log_f0 = weights.f0 > 0.0 ? std::log(weights.f0) : numeric::neg_inf;

    parallel_for(n_tokens, opts.threads, [&](std::size_t t) {
        const auto list = lex.postings(static_cast<TokenId>(t));
        const std::size_t base = lex.token_offset(static_cast<TokenId>(t));

        // Prior mass of documents outside D_t.
        double log_off_mass = numeric::neg_inf;
        if (list.size() < n_docs) {
            if (prior.is_uniform()) {
                log_off_mass = std::log(static_cast<double>(n_docs - list.size()) / static_cast<double>(n_docs));
            } else {
                numeric::CompensatedSum inside;
                for (const auto& p : list) inside.add(prior.prob(p.doc, n_docs));
                const double off = total_mass.value() - inside.value();
                log_off_mass = off > 0.0 ? std::log(off) : numeric::neg_inf;
            }
        }

        numeric::LogSumExp z;
        for (std::size_t i = 0; i < list.size(); ++i) {
            z.add(l0.log_ld[list[i].doc] + std::log(weights.values[base + i]));
        }
        if (log_f0 != numeric::neg_inf) {
            z.add(log_f0 + log_off_mass);
        }
        const double log_z = z.value();
        if (log_z == numeric::neg_inf || !std::isfinite(log_z)) {
            throw NumericError("literal listener normalizer is zero or non-finite for token '" +
                               lex.vocabulary().name(static_cast<TokenId>(t)) + "'");
        }
        l0.log_z[t] = log_z;
        l0.log_lt[t] = log_f0 - log_z;
        for (std::size_t i = 0; i < list.size(); ++i) {
            l0.log_explicit[base + i] = l0.log_ld[list[i].doc] + std::log(weights.values[base + i]) - log_z;
        }
    });
    return l0;
}

/// Pragmatic speaker. The off-support part of Z1_d is
/// ld0[d]^alpha * (sum over all t of lt0^alpha - sum over T_d of lt0^alpha).
inline PragmaticSpeaker pragmatic_speaker(const SparseLexicon& lex, const LiteralListener& l0, double alpha,
                                          const TransformOptions& opts = {}) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be finite and nonnegative");
    }
    const std::size_t n_docs = lex.n_docs();
    const std::size_t n_tokens = lex.n_tokens();

    PragmaticSpeaker s1;
    s1.alpha = alpha;
    s1.log_explicit.resize(lex.nnz());
    s1.log_z.resize(n_docs);
    s1.log_sd.resize(n_docs);
    s1.log_st.resize(n_tokens);

    numeric::LogSumExp all_tokens;
    for (std::size_t t = 0; t < n_tokens; ++t) {
        s1.log_st[t] = numeric::scale_log(l0.log_lt[t], alpha);
        all_tokens.add(s1.log_st[t]);
    }
    const double log_all_tokens = all_tokens.value();

    parallel_for(n_docs, opts.threads, [&](std::size_t d) {
        const auto terms = lex.terms(static_cast<DocId>(d));
        const auto cross = lex.cross_positions(static_cast<DocId>(d));

        double log_off_tokens = numeric::neg_inf;
        if (terms.size() < n_tokens) {
            numeric::LogSumExp inside;
            for (const auto& tw : terms) inside.add(s1.log_st[tw.token]);
            log_off_tokens = numeric::log_diff_exp(log_all_tokens, inside.value());
        }
        const double log_ld_pow = numeric::scale_log(l0.log_ld[d], alpha);

        numeric::LogSumExp z;
        for (const std::size_t pos : cross) {
            z.add(numeric::scale_log(l0.log_explicit[pos], alpha));
        }
        z.add(log_ld_pow + log_off_tokens);
        // With an empty vocabulary there is no distribution to normalize.
        const double log_z = n_tokens == 0 ? 0.0 : z.value();
        if (!std::isfinite(log_z) && terms.empty()) {
            throw NumericError("document '" + lex.doc_registry().name(static_cast<DocId>(d)) +
                               "' has no tokens and f(0) = 0, so it assigns no probability to any token; "
                               "drop it or use a pre-transform with f(0) > 0");
        }
        if (!std::isfinite(log_z)) {
            throw NumericError("pragmatic speaker normalizer underflowed for document '" +
                               lex.doc_registry().name(static_cast<DocId>(d)) + "'");
        }
        s1.log_z[d] = log_z;
        s1.log_sd[d] = log_ld_pow - log_z;
        for (const std::size_t pos : cross) {
            s1.log_explicit[pos] = numeric::scale_log(l0.log_explicit[pos], alpha) - log_z;
        }
    });
    return s1;
}

/// Pragmatic listener, materialized in linear space:
/// lt1[t] = st1[t] / Z1_t and ld1[d] = P(d) sd1[d].
inline PragmaticLexicon pragmatic_listener(const SparseLexicon& lex, const PragmaticSpeaker& s1, const Prior& prior,
                                           const TransformOptions& opts = {}) {
    const std::size_t n_docs = lex.n_docs();
    const std::size_t n_tokens = lex.n_tokens();
    const auto log_p = detail::log_prior(prior, n_docs);

    // log(P(d) sd1[d]); this is also log ld1.
    std::vector<double> log_doc_factor(n_docs);
    numeric::LogSumExp all_docs;
    for (std::size_t d = 0; d < n_docs; ++d) {
        log_doc_factor[d] = log_p[d] + s1.log_sd[d];
        all_docs.add(log_doc_factor[d]);
    }
    const double log_all_docs = all_docs.value();

    std::vector<double> ld1(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
        ld1[d] = detail::materialize(log_doc_factor[d], "document factor");
    }

    std::vector<Posting> entries(lex.token_major().begin(), lex.token_major().end());
    std::vector<double> lt1(n_tokens);

    parallel_for(n_tokens, opts.threads, [&](std::size_t t) {
        const auto list = lex.postings(static_cast<TokenId>(t));
        const std::size_t base = lex.token_offset(static_cast<TokenId>(t));

        double log_off_docs = numeric::neg_inf;
        if (list.size() < n_docs) {
            numeric::LogSumExp inside;
            for (const auto& p : list) inside.add(log_doc_factor[p.doc]);
            log_off_docs = numeric::log_diff_exp(log_all_docs, inside.value());
        }

        numeric::LogSumExp z;
        for (std::size_t i = 0; i < list.size(); ++i) {
            z.add(log_p[list[i].doc] + s1.log_explicit[base + i]);
        }
        z.add(s1.log_st[t] + log_off_docs);
        const double log_z = z.value();
        if (!std::isfinite(log_z)) {
            throw NumericError("pragmatic listener normalizer underflowed for token '" +
                               lex.vocabulary().name(static_cast<TokenId>(t)) + "'");
        }
        lt1[t] = detail::materialize(s1.log_st[t] - log_z, "token factor");
        // Each entry is moved to within one ulp so that some double delta
        // rebuilds it exactly as delta + lt1 * ld1.
        for (std::size_t i = 0; i < list.size(); ++i) {
            const double v = detail::materialize(log_p[list[i].doc] + s1.log_explicit[base + i] - log_z, "entry");
            const double implicit = lt1[t] * ld1[list[i].doc];
            entries[base + i].value = numeric::residual(v, implicit) + implicit;
        }
    });

    return PragmaticLexicon(lex.shared_vocabulary(), lex.shared_doc_registry(),
                            std::vector<std::size_t>(lex.token_offsets().begin(), lex.token_offsets().end()),
                            std::move(entries), std::move(lt1), std::move(ld1), s1.alpha);
}

/// One full speaker/listener round: f, L0, S1, L1. Intermediate stages are
/// released as soon as the next one is built.
inline PragmaticLexicon transform(const SparseLexicon& lex, const PreTransform& f, double alpha,
                                  const Prior& prior = Prior::uniform(), const TransformOptions& opts = {}) {
    PragmaticSpeaker s1;
    {
        LiteralListener l0;
        {
            const auto weights = apply_pretransform(lex, f);
            l0 = literal_listener(lex, weights, prior, opts);
        }
        s1 = pragmatic_speaker(lex, l0, alpha, opts);
    }
    return pragmatic_listener(lex, s1, prior, opts);
}

} // namespace rra
