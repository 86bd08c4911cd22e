#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rra/analysis.hpp"
#include "rra/bm25.hpp"
#include "rra/error.hpp"
#include "rra/eval.hpp"
#include "rra/lexicon.hpp"
#include "rra/query.hpp"
#include "rra/transform.hpp"

// File formats:
//   weights   JSON lines {"id": str, "weights": {token: number}}
//   corpus    JSON lines {"id" | "_id": str, "text": str, "title"?: str}
//   queries   TSV "qid<TAB>text", JSON lines {"id", "text"}, or pre-weighted
//             JSON lines {"id", "weights"}
//   qrels     TREC "qid 0 docid grade"
//   run       TREC "qid Q0 docid rank score tag"
//   snapshot  JSON lines: header, one line per document (ld1), one line per
//             token (lt1 and explicit L1 postings)
//   prior     "docid weight" lines, normalized on load
namespace rra::io {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

inline ordered_json parse_line(const std::string& line, std::size_t lineno, const char* what) {
    try {
        return ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
    }
}

inline std::string required_string(const ordered_json& obj, std::initializer_list<const char*> keys,
                                   std::size_t lineno, const char* what) {
    if (obj.is_object()) {
        for (const char* key : keys) {
            if (auto it = obj.find(key); it != obj.end() && it->is_string()) {
                return it->get<std::string>();
            }
        }
    }
    throw InputError(std::string(what) + " line " + std::to_string(lineno) + ": missing string field '" +
                     *keys.begin() + "'");
}

inline std::vector<std::pair<std::string, double>> weight_map(const ordered_json& obj, std::size_t lineno,
                                                               const char* what) {
    auto it = obj.find("weights");
    if (it == obj.end() || !it->is_object()) {
        throw InputError(std::string(what) + " line " + std::to_string(lineno) + ": missing object field 'weights'");
    }
    std::vector<std::pair<std::string, double>> out;
    out.reserve(it->size());
    for (const auto& [token, value] : it->items()) {
        if (!value.is_number()) {
            throw InputError(std::string(what) + " line " + std::to_string(lineno) + ": weight of token '" + token +
                             "' is not a number");
        }
        out.emplace_back(token, value.get<double>());
    }
    return out;
}

} // namespace detail

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw InputError(context + ": cannot parse number '" + std::string(s) + "'");
    }
    return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

// ---- weights ----

inline SparseLexicon read_weights(std::istream& in) {
    LexiconBuilder builder;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        const auto obj = detail::parse_line(line, lineno, "weights");
        const auto id = detail::required_string(obj, {"id"}, lineno, "weights");
        builder.add_document(id, detail::weight_map(obj, lineno, "weights"));
    }
    return std::move(builder).build();
}

inline void write_weights(std::ostream& out, const SparseLexicon& lex) {
    for (DocId d = 0; d < lex.n_docs(); ++d) {
        ordered_json weights = ordered_json::object();
        for (const auto& tw : lex.terms(d)) {
            weights[lex.vocabulary().name(tw.token)] = tw.value;
        }
        ordered_json rec;
        rec["id"] = lex.doc_registry().name(d);
        rec["weights"] = std::move(weights);
        out << rec.dump() << '\n';
    }
}

// ---- corpus ----

inline TokenizedCorpus read_corpus(std::istream& in, const Analyzer& analyzer = {}) {
    TokenizedCorpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        const auto obj = detail::parse_line(line, lineno, "corpus");
        auto id = detail::required_string(obj, {"id", "_id"}, lineno, "corpus");
        auto text = detail::required_string(obj, {"text"}, lineno, "corpus");
        if (auto t = obj.find("title"); t != obj.end() && t->is_string() && !t->get<std::string>().empty()) {
            text = t->get<std::string>() + " " + text;
        }
        corpus.add(std::move(id), analyzer(text));
    }
    return corpus;
}

// ---- queries ----

struct QueryRecord {
    std::string id;
    std::string text;
    std::vector<std::pair<std::string, double>> weights;
    bool pre_weighted = false;
};

/// Reads TSV or JSON-lines queries; the format is detected per line.
inline std::vector<QueryRecord> read_queries(std::istream& in) {
    std::vector<QueryRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::blank(line)) continue;
        QueryRecord rec;
        if (line.front() == '{') {
            const auto obj = detail::parse_line(line, lineno, "queries");
            rec.id = detail::required_string(obj, {"id", "_id"}, lineno, "queries");
            if (obj.contains("weights")) {
                rec.weights = detail::weight_map(obj, lineno, "queries");
                rec.pre_weighted = true;
            } else {
                rec.text = detail::required_string(obj, {"text"}, lineno, "queries");
            }
        } else {
            const auto tab = line.find('\t');
            if (tab == std::string::npos) {
                throw InputError("queries line " + std::to_string(lineno) + ": expected 'qid<TAB>text'");
            }
            rec.id = line.substr(0, tab);
            rec.text = line.substr(tab + 1);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

/// Text queries become BM25-style count vectors; pre-weighted ones keep
/// their weights. Tokens outside the vocabulary are dropped.
inline std::vector<NamedQuery> vectorize_queries(const std::vector<QueryRecord>& records, const Vocabulary& vocab,
                                                 const Analyzer& analyzer = {}) {
    std::vector<NamedQuery> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        out.push_back({rec.id, rec.pre_weighted ? QueryVector::from_strings(rec.weights, vocab)
                                                : bm25_query_vector(rec.text, vocab, analyzer)});
    }
    return out;
}

// ---- qrels ----

inline Qrels read_qrels(std::istream& in) {
    Qrels qrels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        const auto f = split_ws(line);
        const std::string ctx = "qrels line " + std::to_string(lineno);
        if (f.size() != 4) {
            throw InputError(ctx + ": expected 'qid 0 docid grade'");
        }
        int grade = 0;
        auto res = std::from_chars(f[3].data(), f[3].data() + f[3].size(), grade);
        if (res.ec != std::errc() || res.ptr != f[3].data() + f[3].size()) {
            throw InputError(ctx + ": grade must be an integer");
        }
        qrels.set(std::string(f[0]), std::string(f[2]), grade);
    }
    return qrels;
}

// ---- runs ----

inline std::string format_score(double score) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", score);
    return buf;
}

inline void write_run(std::ostream& out, const Run& run, const std::string& tag) {
    for (const auto& [qid, ranking] : run) {
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            out << qid << " Q0 " << ranking[i].doc << ' ' << (i + 1) << ' ' << format_score(ranking[i].score) << ' '
                << tag << '\n';
        }
    }
}

/// Lists are ordered by the rank column.
inline Run read_run(std::istream& in) {
    std::map<std::string, std::vector<std::pair<long, RankedDoc>>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        const auto f = split_ws(line);
        const std::string ctx = "run line " + std::to_string(lineno);
        if (f.size() != 6) {
            throw InputError(ctx + ": expected 'qid Q0 docid rank score tag'");
        }
        long rank = 0;
        auto res = std::from_chars(f[3].data(), f[3].data() + f[3].size(), rank);
        if (res.ec != std::errc() || res.ptr != f[3].data() + f[3].size()) {
            throw InputError(ctx + ": rank must be an integer");
        }
        rows[std::string(f[0])].push_back({rank, {std::string(f[2]), parse_double(f[4], ctx)}});
    }
    Run run;
    for (auto& [qid, list] : rows) {
        std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        auto& out = run[qid];
        for (auto& [rank, rd] : list) out.push_back(std::move(rd));
    }
    return run;
}

// ---- pragmatic snapshot ----

inline void write_snapshot(std::ostream& out, const PragmaticLexicon& prag, const PreTransform& f) {
    ordered_json header;
    header["format"] = "rra-pragmatic";
    header["version"] = 1;
    header["alpha"] = prag.alpha();
    header["pretransform"] = f.name();
    header["lambda"] = f.lambda;
    header["n_docs"] = prag.n_docs();
    header["n_tokens"] = prag.n_tokens();
    header["nnz"] = prag.nnz();
    out << header.dump() << '\n';
    for (DocId d = 0; d < prag.n_docs(); ++d) {
        ordered_json rec;
        rec["doc"] = prag.doc_registry().name(d);
        rec["ld1"] = prag.ld1(d);
        out << rec.dump() << '\n';
    }
    for (TokenId t = 0; t < prag.n_tokens(); ++t) {
        ordered_json rec;
        rec["token"] = prag.vocabulary().name(t);
        rec["lt1"] = prag.lt1(t);
        auto postings = ordered_json::array();
        for (const auto& p : prag.postings(t)) {
            postings.push_back(ordered_json::array({p.doc, p.value}));
        }
        rec["postings"] = std::move(postings);
        out << rec.dump() << '\n';
    }
}

struct Snapshot {
    PragmaticLexicon lexicon;
    PreTransform pretransform;
};

inline Snapshot read_snapshot(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next = [&](const char* what) {
        while (std::getline(in, line)) {
            ++lineno;
            if (!detail::blank(line)) return detail::parse_line(line, lineno, "snapshot");
        }
        throw InputError(std::string("snapshot truncated: expected ") + what);
    };

    try {
        const auto header = next("header");
        if (header.value("format", "") != "rra-pragmatic" || header.value("version", 0) != 1) {
            throw InputError("not an rra-pragmatic v1 snapshot");
        }
        const double alpha = header.at("alpha").get<double>();
        const auto f = PreTransform::parse(header.at("pretransform").get<std::string>(),
                                           header.at("lambda").get<double>());
        const auto n_docs = header.at("n_docs").get<std::size_t>();
        const auto n_tokens = header.at("n_tokens").get<std::size_t>();
        const auto nnz = header.at("nnz").get<std::size_t>();

        auto docs = std::make_shared<DocRegistry>();
        std::vector<double> ld1;
        ld1.reserve(n_docs);
        for (std::size_t i = 0; i < n_docs; ++i) {
            const auto rec = next("document record");
            if (docs->intern(rec.at("doc").get<std::string>()) != i) {
                throw InputError("snapshot line " + std::to_string(lineno) + ": duplicate document id");
            }
            ld1.push_back(rec.at("ld1").get<double>());
        }

        auto vocab = std::make_shared<Vocabulary>();
        std::vector<double> lt1;
        std::vector<std::size_t> offsets{0};
        std::vector<Posting> entries;
        lt1.reserve(n_tokens);
        offsets.reserve(n_tokens + 1);
        entries.reserve(nnz);
        for (std::size_t i = 0; i < n_tokens; ++i) {
            const auto rec = next("token record");
            if (vocab->intern(rec.at("token").get<std::string>()) != i) {
                throw InputError("snapshot line " + std::to_string(lineno) + ": duplicate token");
            }
            lt1.push_back(rec.at("lt1").get<double>());
            for (const auto& p : rec.at("postings")) {
                entries.push_back({p.at(0).get<DocId>(), p.at(1).get<double>()});
            }
            offsets.push_back(entries.size());
        }
        if (entries.size() != nnz) {
            throw InputError("snapshot holds " + std::to_string(entries.size()) + " postings, header says " +
                             std::to_string(nnz));
        }
        return {PragmaticLexicon(std::move(vocab), std::move(docs), std::move(offsets), std::move(entries),
                                 std::move(lt1), std::move(ld1), alpha),
                f};
    } catch (const nlohmann::json::exception& e) {
        throw InputError("snapshot line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("snapshot header: ") + e.what());
    }
}

// ---- prior ----

/// Reads "docid weight" lines covering every document and normalizes them.
inline Prior read_prior(std::istream& in, const DocRegistry& docs) {
    std::vector<double> weights(docs.size(), 0.0);
    std::vector<bool> seen(docs.size(), false);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        const auto f = split_ws(line);
        const std::string ctx = "prior line " + std::to_string(lineno);
        if (f.size() != 2) throw InputError(ctx + ": expected 'docid weight'");
        const auto d = docs.find(f[0]);
        if (!d) throw InputError(ctx + ": unknown document '" + std::string(f[0]) + "'");
        if (seen[*d]) throw InputError(ctx + ": duplicate document '" + std::string(f[0]) + "'");
        const double w = parse_double(f[1], ctx);
        if (!(w > 0.0) || !std::isfinite(w)) throw InputError(ctx + ": prior weight must be positive and finite");
        weights[*d] = w;
        seen[*d] = true;
    }
    for (std::size_t d = 0; d < docs.size(); ++d) {
        if (!seen[d]) throw InputError("prior file misses document '" + docs.name(static_cast<DocId>(d)) + "'");
    }
    numeric::CompensatedSum total;
    for (double w : weights) total.add(w);
    const double z = total.value();
    for (double& w : weights) w /= z;
    return Prior::from_probabilities(std::move(weights));
}

} // namespace rra::io
