#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "rra/index.hpp"
#include "rra/lexicon.hpp"
#include "rra/parallel.hpp"
#include "rra/query.hpp"
#include "rra/transform.hpp"

namespace rra {

/// Graded judgments; unjudged pairs have grade 0.
class Qrels {
public:
    void set(const std::string& qid, const std::string& doc, int grade) {
        if (grade < 0) {
            throw InputError("negative relevance grade for (" + qid + ", " + doc + ")");
        }
        judgments_[qid][doc] = grade;
    }

    [[nodiscard]] int grade(const std::string& qid, const std::string& doc) const {
        auto q = judgments_.find(qid);
        if (q == judgments_.end()) return 0;
        auto it = q->second.find(doc);
        return it == q->second.end() ? 0 : it->second;
    }

    [[nodiscard]] bool has_query(const std::string& qid) const { return judgments_.count(qid) != 0; }

    [[nodiscard]] std::vector<int> grades(const std::string& qid) const {
        std::vector<int> out;
        if (auto q = judgments_.find(qid); q != judgments_.end()) {
            for (const auto& [doc, g] : q->second) out.push_back(g);
        }
        return out;
    }

    [[nodiscard]] std::size_t n_queries() const noexcept { return judgments_.size(); }

private:
    std::map<std::string, std::unordered_map<std::string, int>> judgments_;
};

struct RankedDoc {
    std::string doc;
    double score;

    friend bool operator==(const RankedDoc&, const RankedDoc&) = default;
};

/// Ranked result lists keyed by query id; each list is in rank order.
using Run = std::map<std::string, std::vector<RankedDoc>>;

inline std::vector<RankedDoc> to_ranked(const ScoredList& list, const DocRegistry& docs) {
    std::vector<RankedDoc> out;
    out.reserve(list.size());
    for (const auto& sd : list) out.push_back({docs.name(sd.doc), sd.score});
    return out;
}

inline double dcg_gain(int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; }
inline double dcg_discount(std::size_t rank) { return std::log2(static_cast<double>(rank) + 1.0); }

/// nDCG@k of one ranked list. Returns 0 when the ideal DCG is 0.
inline double ndcg(std::span<const RankedDoc> ranking, const std::string& qid, const Qrels& qrels, std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
        dcg += dcg_gain(qrels.grade(qid, ranking[i].doc)) / dcg_discount(i + 1);
    }
    auto ideal = qrels.grades(qid);
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
        idcg += dcg_gain(ideal[i]) / dcg_discount(i + 1);
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

struct NdcgReport {
    std::map<std::string, double> per_query;
    double mean = 0.0;
    std::vector<std::string> warnings;
};

/// Per-query and mean nDCG@k over the queries of `run`. Queries with no
/// relevant judgments score 0 and count toward the mean unless
/// `exclude_zero_idcg` is set.
inline NdcgReport ndcg_at_k(const Run& run, const Qrels& qrels, std::size_t k, bool exclude_zero_idcg = false) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    NdcgReport report;
    if (run.empty()) {
        report.warnings.push_back("run is empty; mean nDCG is 0");
        return report;
    }
    double total = 0.0;
    std::size_t counted = 0;
    for (const auto& [qid, ranking] : run) {
        if (!qrels.has_query(qid)) {
            report.warnings.push_back("query '" + qid + "' has no judgments; treating all documents as non-relevant");
        }
        const auto grades = qrels.grades(qid);
        const bool no_relevant = std::none_of(grades.begin(), grades.end(), [](int g) { return g > 0; });
        if (no_relevant && exclude_zero_idcg) continue;
        const double v = ndcg(ranking, qid, qrels, k);
        report.per_query[qid] = v;
        total += v;
        ++counted;
    }
    report.mean = counted ? total / static_cast<double>(counted) : 0.0;
    return report;
}

enum class TTestCase { regular, zero_differences, zero_variance };

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    std::size_t n = 0;
    TTestCase degenerate = TTestCase::regular;
};

/// Two-sided paired t-test on per-query differences a - b with n - 1 degrees
/// of freedom. All-zero differences give p = 1, constant nonzero differences
/// give p = 0; both are flagged.
inline TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired_ttest: samples differ in length");
    if (a.size() < 2) throw std::invalid_argument("paired_ttest: need at least two pairs");

    TTestResult r;
    r.n = a.size();
    const double n = static_cast<double>(r.n);
    double mean = 0.0;
    for (std::size_t i = 0; i < r.n; ++i) mean += a[i] - b[i];
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < r.n; ++i) {
        const double dev = (a[i] - b[i]) - mean;
        ss += dev * dev;
    }
    const bool all_zero = std::equal(a.begin(), a.end(), b.begin());
    if (all_zero) {
        r.degenerate = TTestCase::zero_differences;
        return r;
    }
    if (ss == 0.0) {
        r.degenerate = TTestCase::zero_variance;
        r.t = mean > 0.0 ? HUGE_VAL : -HUGE_VAL;
        r.p = 0.0;
        return r;
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    r.t = mean / (sd / std::sqrt(n));
    const boost::math::students_t dist(n - 1.0);
    r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
    r.p = std::min(1.0, r.p);
    return r;
}

struct NamedQuery {
    std::string id;
    QueryVector vector;
};

/// Scores every query against the index and keeps the top k.
inline Run run_queries(const PostingsIndex& index, std::span<const NamedQuery> queries, std::size_t k,
                       unsigned threads = 1) {
    std::vector<ScoredList> lists(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) { lists[i] = index.score(queries[i].vector, k); });
    Run run;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        run[queries[i].id] = to_ranked(lists[i], index.doc_registry());
    }
    return run;
}

inline Run run_baseline(const SparseLexicon& lex, std::span<const NamedQuery> queries, std::size_t k,
                        unsigned threads = 1) {
    std::vector<ScoredList> lists(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) { lists[i] = baseline_score(lex, queries[i].vector, k); });
    Run run;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        run[queries[i].id] = to_ranked(lists[i], lex.doc_registry());
    }
    return run;
}

inline const std::vector<double>& default_alpha_grid() {
    static const std::vector<double> grid{0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
    return grid;
}

struct SweepPoint {
    double alpha;
    double mean_ndcg;
};

struct AlphaSweepResult {
    std::vector<SweepPoint> points; ///< in grid order
    double best_alpha = 0.0;
    double best_mean_ndcg = 0.0;
};

struct SweepOptions {
    std::size_t k = 10;
    bool exclude_zero_idcg = false;
    unsigned threads = 1;
};

/// Runs transform, index, retrieval and nDCG@k for every alpha of the grid.
/// The best alpha maximizes mean nDCG; ties go to the smallest alpha.
inline AlphaSweepResult sweep_alpha(const SparseLexicon& lex, const PreTransform& f, const Prior& prior,
                                    std::span<const NamedQuery> queries, const Qrels& qrels,
                                    std::span<const double> grid, const SweepOptions& opts = {}) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    for (double a : grid) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("sweep alphas must be finite and >= 0");
    }
    AlphaSweepResult result;
    bool have_best = false;
    for (double alpha : grid) {
        const auto index = build_index(transform(lex, f, alpha, prior, {opts.threads}));
        const auto run = run_queries(index, queries, opts.k, opts.threads);
        const double mean = ndcg_at_k(run, qrels, opts.k, opts.exclude_zero_idcg).mean;
        result.points.push_back({alpha, mean});
        if (!have_best || mean > result.best_mean_ndcg || (mean == result.best_mean_ndcg && alpha < result.best_alpha)) {
            result.best_alpha = alpha;
            result.best_mean_ndcg = mean;
            have_best = true;
        }
    }
    return result;
}

} // namespace rra
