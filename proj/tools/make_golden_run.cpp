// Writes reference runs for the CLI regression test: RRA scored through the
// dense oracle, and BM25 scored by brute force from the token lists.
//
//   make_golden_run <collection dir> <rra run out> <bm25 run out>
//
// Refuses to write if a near tie or a rounding boundary in the printed score
// could make an independent implementation disagree on the bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "rra.hpp"
#include "rra/oracle.hpp"

namespace {

constexpr std::size_t k = 10;
constexpr double alpha = 1.0;

struct Checker {
    int problems = 0;

    std::vector<rra::RankedDoc> top(const std::string& label, const std::string& qid, const std::vector<double>& scores,
                        const std::vector<std::string>& doc_ids) {
        std::vector<std::size_t> order(scores.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
        const std::size_t n = std::min(k, order.size());
        for (std::size_t i = 0; i + 1 < std::min(k + 1, order.size()); ++i) {
            const double a = scores[order[i]], b = scores[order[i + 1]];
            if (a != b && a - b <= 1e-9 * std::fabs(a)) {
                std::cerr << label << ' ' << qid << ": near tie at rank " << i + 1 << '\n';
                ++problems;
            }
        }
        std::vector<rra::RankedDoc> out;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = scores[order[i]];
            const auto text = rra::io::format_score(s);
            if (rra::io::format_score(s * (1 + 1e-13)) != text || rra::io::format_score(s * (1 - 1e-13)) != text) {
                std::cerr << label << ' ' << qid << ": score " << text << " sits on a rounding boundary (" << std::setprecision(17) << s << ")\n";
                ++problems;
            }
            out.push_back({doc_ids[order[i]], s});
        }
        return out;
    }
};

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rra::InputError("cannot open '" + path + "'");
    return in;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 4) {
        std::cerr << "usage: make_golden_run <collection dir> <rra run out> <bm25 run out>\n";
        return 2;
    }
    const std::string dir = argv[1];
    try {
        auto corpus_in = open_in(dir + "/corpus.jsonl");
        const auto corpus = rra::io::read_corpus(corpus_in);
        auto queries_in = open_in(dir + "/queries_test.tsv");
        const auto records = rra::io::read_queries(queries_in);

        const auto lex = rra::build_bm25_lexicon(corpus);
        const auto dense = rra::oracle::dense_rra(rra::oracle::densify(lex, rra::Prior::uniform()),
                                                  rra::PreTransform{}, alpha);

        // BM25 straight from the token lists.
        const rra::Bm25Params params;
        const std::size_t n_docs = corpus.size();
        std::map<std::string, std::size_t> df;
        std::vector<std::map<std::string, double>> tf(n_docs);
        for (std::size_t d = 0; d < n_docs; ++d) {
            for (const auto& tok : corpus.docs[d]) tf[d][tok] += 1.0;
            for (const auto& [tok, c] : tf[d]) ++df[tok];
        }
        const double avg_len = corpus.average_length();

        Checker check;
        rra::Run rra_run, bm25_run;
        for (const auto& rec : records) {
            const auto tokens = rra::Analyzer{}(rec.text);

            std::vector<double> bm25(n_docs, 0.0);
            for (std::size_t d = 0; d < n_docs; ++d) {
                for (const auto& tok : tokens) {
                    const auto it = tf[d].find(tok);
                    if (it == tf[d].end()) continue;
                    const double idf = std::log(1.0 + (n_docs - df[tok] + 0.5) / (df[tok] + 0.5));
                    const double len = static_cast<double>(corpus.docs[d].size());
                    bm25[d] += idf * it->second * (params.k1 + 1.0) /
                               (it->second + params.k1 * (1.0 - params.b + params.b * len / avg_len));
                }
            }
            bm25_run[rec.id] = check.top("bm25", rec.id, bm25, corpus.doc_ids);

            const auto q = rra::bm25_query_vector(rec.text, lex.vocabulary());
            rra_run[rec.id] = check.top("rra", rec.id, rra::oracle::dense_score(q, dense.l1), corpus.doc_ids);
        }
        if (check.problems) {
            std::cerr << check.problems << " problem(s); nothing written\n";
            return 1;
        }
        std::ofstream rra_out(argv[2]), bm25_out(argv[3]);
        rra::io::write_run(rra_out, rra_run, "rra");
        rra::io::write_run(bm25_out, bm25_run, "bm25");
        if (!rra_out || !bm25_out) throw std::runtime_error("write failed");
    } catch (const std::exception& e) {
        std::cerr << "make_golden_run: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
