#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rra/eval.hpp"
#include "support/instances.hpp"

namespace {

using rra::Qrels;
using rra::RankedDoc;

std::vector<RankedDoc> ranking(std::initializer_list<const char*> docs) {
    std::vector<RankedDoc> out;
    double s = static_cast<double>(docs.size());
    for (const char* d : docs) out.push_back({d, s--});
    return out;
}

TEST(Ndcg, RelevantAtRankOne) {
    Qrels q;
    q.set("q", "d1", 1);
    EXPECT_DOUBLE_EQ(rra::ndcg(ranking({"d1", "d2"}), "q", q, 10), 1.0);
}

TEST(Ndcg, RelevantAtRankTwo) {
    Qrels q;
    q.set("q", "d1", 1);
    EXPECT_NEAR(rra::ndcg(ranking({"d2", "d1"}), "q", q, 10), 1.0 / std::log2(3.0), 1e-15);
    EXPECT_NEAR(rra::ndcg(ranking({"d2", "d1"}), "q", q, 10), 0.63092975357145743710, 1e-15);
}

TEST(Ndcg, CutoffExcludesLowerRanks) {
    Qrels q;
    q.set("q", "d3", 2);
    EXPECT_EQ(rra::ndcg(ranking({"d1", "d2", "d3"}), "q", q, 2), 0.0);
}

TEST(Ndcg, GradedGains) {
    Qrels q;
    q.set("q", "a", 2);
    q.set("q", "b", 1);
    // DCG = 1 + 3/log2(3); ideal = 3 + 1/log2(3)
    const double expected = (1.0 + 3.0 / std::log2(3.0)) / (3.0 + 1.0 / std::log2(3.0));
    EXPECT_NEAR(rra::ndcg(ranking({"b", "a"}), "q", q, 10), expected, 1e-15);
}

TEST(NdcgAtK, ZeroIdcgCountsUnlessExcluded) {
    Qrels q;
    q.set("q1", "d1", 1);
    q.set("q2", "d1", 0);
    const rra::Run run{{"q1", ranking({"d1"})}, {"q2", ranking({"d1"})}};
    const auto with = rra::ndcg_at_k(run, q, 10);
    EXPECT_DOUBLE_EQ(with.mean, 0.5);
    EXPECT_EQ(with.per_query.at("q2"), 0.0);
    const auto without = rra::ndcg_at_k(run, q, 10, true);
    EXPECT_DOUBLE_EQ(without.mean, 1.0);
    EXPECT_EQ(without.per_query.count("q2"), 0u);
}

TEST(NdcgAtK, EmptyRunWarns) {
    const auto r = rra::ndcg_at_k(rra::Run{}, Qrels{}, 10);
    EXPECT_EQ(r.mean, 0.0);
    EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(NdcgAtK, UnjudgedQueryWarnsAndScoresZero) {
    const auto r = rra::ndcg_at_k(rra::Run{{"qx", ranking({"d1"})}}, Qrels{}, 10);
    EXPECT_EQ(r.per_query.at("qx"), 0.0);
    EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Qrels, RejectsNegativeGrade) {
    Qrels q;
    EXPECT_THROW(q.set("q", "d", -1), rra::InputError);
}

// Range and invariance under renaming documents consistently.
TEST(NdcgProperty, BoundedAndLabelInvariant) {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 1 + static_cast<int>(rng() % 20);
        Qrels q, renamed;
        std::vector<RankedDoc> list, list2;
        for (int i = 0; i < n; ++i) {
            const int g = static_cast<int>(rng() % 4);
            const std::string d = "d" + std::to_string(i);
            const std::string e = "x" + std::to_string(n - i);
            if (rng() % 2) {
                q.set("q", d, g);
                renamed.set("q", e, g);
            }
            list.push_back({d, 0.0});
            list2.push_back({e, 0.0});
        }
        std::shuffle(list.begin(), list.end(), rng);
        for (std::size_t i = 0; i < list.size(); ++i) {
            const int idx = std::stoi(list[i].doc.substr(1));
            list2[i] = {"x" + std::to_string(n - idx), 0.0};
        }
        const std::size_t k = 1 + rng() % 12;
        const double v = rra::ndcg(list, "q", q, k);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0 + 1e-15);
        EXPECT_EQ(v, rra::ndcg(list2, "q", renamed, k));
    }
}

// Reference from scipy.stats.ttest_rel on differences {0.1, 0.2, 0.15, 0.05, 0.1}.
TEST(PairedTTest, MatchesReference) {
    const std::vector<double> a{0.6, 0.7, 0.65, 0.55, 0.6};
    const std::vector<double> b{0.5, 0.5, 0.5, 0.5, 0.5};
    const auto r = rra::paired_ttest(a, b);
    EXPECT_EQ(r.degenerate, rra::TTestCase::regular);
    EXPECT_EQ(r.n, 5u);
    EXPECT_NEAR(r.t, 4.706787243316417, 1e-9);
    EXPECT_NEAR(r.p, 0.009261696759514418, 1e-9);
}

TEST(PairedTTest, IdenticalSamples) {
    const std::vector<double> a{0.1, 0.4, 0.3};
    const auto r = rra::paired_ttest(a, a);
    EXPECT_EQ(r.degenerate, rra::TTestCase::zero_differences);
    EXPECT_EQ(r.t, 0.0);
    EXPECT_EQ(r.p, 1.0);
}

TEST(PairedTTest, ConstantShift) {
    const std::vector<double> a{1.5, 2.5, 3.5};
    const std::vector<double> b{1.0, 2.0, 3.0};
    const auto r = rra::paired_ttest(a, b);
    EXPECT_EQ(r.degenerate, rra::TTestCase::zero_variance);
    EXPECT_EQ(r.p, 0.0);
    EXPECT_GT(r.t, 0.0);
}

TEST(PairedTTest, RejectsBadSizes) {
    const std::vector<double> one{1.0};
    const std::vector<double> two{1.0, 2.0};
    EXPECT_THROW(rra::paired_ttest(one, one), std::invalid_argument);
    EXPECT_THROW(rra::paired_ttest(one, two), std::invalid_argument);
}

TEST(PairedTTestProperty, SwappingNegatesT) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> a(2 + rng() % 30), b(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
        }
        const auto ab = rra::paired_ttest(a, b);
        const auto ba = rra::paired_ttest(b, a);
        EXPECT_NEAR(ab.t, -ba.t, 1e-12 * std::fabs(ab.t));
        EXPECT_NEAR(ab.p, ba.p, 1e-12);
        EXPECT_GE(ab.p, 0.0);
        EXPECT_LE(ab.p, 1.0);
    }
}

struct SweepFixture {
    rra::SparseLexicon lex = rra::testing::toy1();
    std::vector<rra::NamedQuery> queries;
    Qrels qrels;

    SweepFixture() {
        queries.push_back({"q1", rra::QueryVector({{0, 1.0}, {2, 1.0}}, 3)});
        queries.push_back({"q2", rra::QueryVector({{1, 1.0}}, 3)});
        qrels.set("q1", "d1", 1);
        qrels.set("q2", "d2", 1);
    }
};

TEST(SweepAlpha, SingletonGrid) {
    SweepFixture fx;
    const std::vector<double> grid{1.0};
    const auto r = rra::sweep_alpha(fx.lex, {}, rra::Prior::uniform(), fx.queries, fx.qrels, grid);
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_EQ(r.best_alpha, 1.0);
    EXPECT_EQ(r.best_mean_ndcg, r.points[0].mean_ndcg);
}

// Every document ties at alpha = 0, so the ascending-id order decides.
TEST(SweepAlpha, AlphaZeroFallsBackToDocOrder) {
    SweepFixture fx;
    const std::vector<double> grid{0.0};
    const auto r = rra::sweep_alpha(fx.lex, {}, rra::Prior::uniform(), fx.queries, fx.qrels, grid, {1});
    // q1 wants d1 (rank 1 -> 1), q2 wants d2 (rank 2 -> cut off at k = 1)
    EXPECT_DOUBLE_EQ(r.points[0].mean_ndcg, 0.5);
}

TEST(SweepAlpha, RejectsBadGrid) {
    SweepFixture fx;
    EXPECT_THROW(rra::sweep_alpha(fx.lex, {}, rra::Prior::uniform(), fx.queries, fx.qrels, std::vector<double>{}),
                 std::invalid_argument);
    EXPECT_THROW(rra::sweep_alpha(fx.lex, {}, rra::Prior::uniform(), fx.queries, fx.qrels, std::vector<double>{-1.0}),
                 std::invalid_argument);
}

TEST(SweepAlphaProperty, BestIsArgmaxOfCurve) {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 5; ++rep) {
        const auto lex = rra::testing::random_lexicon(rng, 30, 60);
        std::vector<rra::NamedQuery> queries;
        Qrels qrels;
        for (int i = 0; i < 8; ++i) {
            const std::string id = "q" + std::to_string(i);
            queries.push_back({id, rra::testing::random_query(rng, lex.n_tokens())});
            for (int j = 0; j < 3; ++j) {
                qrels.set(id, lex.doc_registry().name(static_cast<rra::DocId>(rng() % lex.n_docs())), 1);
            }
        }
        const auto& grid = rra::default_alpha_grid();
        const auto r = rra::sweep_alpha(lex, {}, rra::Prior::uniform(), queries, qrels, grid);
        ASSERT_EQ(r.points.size(), 8u);
        double best = -1.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            EXPECT_EQ(r.points[i].alpha, grid[i]);
            best = std::max(best, r.points[i].mean_ndcg);
        }
        EXPECT_EQ(r.best_mean_ndcg, best);
        for (const auto& p : r.points) {
            if (p.alpha < r.best_alpha) EXPECT_LT(p.mean_ndcg, best);
        }
    }
}

} // namespace
