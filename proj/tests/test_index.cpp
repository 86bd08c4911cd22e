#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "rra/index.hpp"
#include "rra/oracle.hpp"
#include "support/instances.hpp"

namespace {

using rra::PreTransform;
using rra::Prior;

TEST(BuildIndex, EmptySupportKeepsFactors) {
    auto vocab = std::make_shared<rra::Vocabulary>();
    auto docs = std::make_shared<rra::DocRegistry>();
    vocab->intern("t0");
    vocab->intern("t1");
    docs->intern("d0");
    const rra::PragmaticLexicon prag(vocab, docs, {0, 0, 0}, {}, {0.25, 0.75}, {2.0}, 1.0);
    const auto index = rra::build_index(prag);
    EXPECT_EQ(index.n_postings(), 0u);
    EXPECT_TRUE(index.postings(0).empty());
    EXPECT_EQ(index.lt1(1), 0.75);
    EXPECT_EQ(index.ld1(0), 2.0);
    const auto scores = index.score_all(rra::QueryVector({{0, 1.0}, {1, 2.0}}, 2));
    EXPECT_DOUBLE_EQ(scores[0], 2.0 * (0.25 + 1.5));
}

TEST(BuildIndex, Toy1PostingsAndReconstruction) {
    const auto prag = rra::transform(rra::testing::toy1(), PreTransform{}, 1.0);
    const auto index = rra::build_index(prag);
    EXPECT_EQ(index.n_postings(), 5u);
    EXPECT_EQ(index.postings(0).size(), 1u);
    EXPECT_EQ(index.postings(1).size(), 2u);
    EXPECT_EQ(index.postings(2).size(), 2u);
    for (rra::TokenId t = 0; t < 3; ++t) {
        for (std::size_t i = 0; i < index.postings(t).size(); ++i) {
            EXPECT_EQ(index.reconstruct(t, index.postings(t)[i]), prag.postings(t)[i].value);
        }
    }
}

// Rebuilt L1 equals the stored double exactly, on every posting.
TEST(BuildIndexProperty, ReconstructionIsBitExact) {
    for (std::size_t i = 0; i < 60; ++i) {
        const auto inst = rra::testing::acceptance_instance(i);
        const auto prag = rra::transform(inst.lexicon, inst.f, inst.alpha, inst.prior);
        const auto index = rra::build_index(prag);
        for (rra::TokenId t = 0; t < prag.n_tokens(); ++t) {
            ASSERT_EQ(index.postings(t).size(), prag.postings(t).size());
            for (std::size_t j = 0; j < prag.postings(t).size(); ++j) {
                EXPECT_EQ(index.postings(t)[j].doc, prag.postings(t)[j].doc);
                EXPECT_EQ(index.reconstruct(t, index.postings(t)[j]), prag.postings(t)[j].value);
            }
        }
    }
}

TEST(Score, ZeroQueryReturnsTieOrder) {
    const auto index = rra::build_index(rra::transform(rra::testing::toy1(), PreTransform{}, 1.0));
    const auto list = index.score(rra::QueryVector{}, 2);
    ASSERT_EQ(list.size(), 2u);
    EXPECT_EQ(list[0], (rra::ScoredDoc{0, 0.0}));
    EXPECT_EQ(list[1], (rra::ScoredDoc{1, 0.0}));
}

TEST(Score, AlphaZeroIsAPureTie) {
    std::mt19937_64 rng(31);
    const auto lex = rra::testing::random_lexicon(rng, 25, 50);
    const auto index = rra::build_index(rra::transform(lex, PreTransform{}, 0.0));
    const auto q = rra::testing::random_query(rng, lex.n_tokens());
    double total = 0.0;
    for (const auto& qt : q.terms()) total += qt.weight;
    const auto list = index.score(q, lex.n_docs());
    for (std::size_t i = 0; i < list.size(); ++i) {
        EXPECT_NEAR(list[i].score, total / static_cast<double>(lex.n_docs()), 1e-13);
    }
}

TEST(Score, Toy1MatchesDenseScore) {
    const auto lex = rra::testing::toy1();
    const auto index = rra::build_index(rra::transform(lex, PreTransform{}, 1.0));
    const rra::QueryVector q({{0, 1.0}, {2, 1.0}}, 3);
    const auto dense = rra::oracle::dense_score(
        q, rra::oracle::dense_rra(rra::oracle::densify(lex, Prior::uniform()), PreTransform{}, 1.0).l1);
    const auto list = index.score(q, 3);
    ASSERT_EQ(list.size(), 3u);
    EXPECT_EQ(list[0].doc, 2u);
    EXPECT_EQ(list[1].doc, 0u);
    EXPECT_EQ(list[2].doc, 1u);
    for (const auto& sd : list) {
        EXPECT_NEAR(sd.score, dense[sd.doc], 1e-9 * dense[sd.doc]);
    }
}

TEST(Score, RejectsZeroK) {
    const auto index = rra::build_index(rra::transform(rra::testing::toy1(), PreTransform{}, 1.0));
    EXPECT_THROW(index.score(rra::QueryVector{}, 0), std::invalid_argument);
}

TEST(Score, TopKIsSortedWithTieBreak) {
    const std::vector<double> scores{0.5, 0.9, 0.5, 0.1, 0.9};
    const auto list = rra::select_top_k(scores, 4);
    EXPECT_EQ(list, (rra::ScoredList{{1, 0.9}, {4, 0.9}, {0, 0.5}, {2, 0.5}}));
    EXPECT_EQ(rra::select_top_k(scores, 10).size(), 5u);
}

TEST(Score, DeterministicAcrossCallsAndThreads) {
    std::mt19937_64 rng(37);
    const auto lex = rra::testing::random_lexicon(rng, 50, 200);
    const auto index = rra::build_index(rra::transform(lex, PreTransform{}, 1.5));
    std::vector<rra::QueryVector> queries;
    for (int i = 0; i < 16; ++i) queries.push_back(rra::testing::random_query(rng, lex.n_tokens()));
    std::vector<rra::ScoredList> expected;
    for (const auto& q : queries) expected.push_back(index.score(q, 10));

    std::vector<std::vector<rra::ScoredList>> got(4);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < got.size(); ++w) {
            pool.emplace_back([&, w] {
                for (const auto& q : queries) got[w].push_back(index.score(q, 10));
            });
        }
    }
    for (const auto& g : got) EXPECT_EQ(g, expected);
}

TEST(Score, RegroupingMatchesTwoSumForm) {
    for (std::size_t i = 0; i < 30; ++i) {
        const auto inst = rra::testing::acceptance_instance(i);
        const auto prag = rra::transform(inst.lexicon, inst.f, inst.alpha, inst.prior);
        const auto index = rra::build_index(prag);
        std::mt19937_64 rng(i);
        const auto q = rra::testing::random_query(rng, prag.n_tokens());
        const auto fast = index.score_all(q);
        const auto slow = rra::score_two_sum(prag, q);
        for (std::size_t d = 0; d < fast.size(); ++d) {
            EXPECT_LE(std::fabs(fast[d] - slow[d]), 1e-12 * std::max(std::fabs(fast[d]), std::fabs(slow[d])));
        }
    }
}

TEST(BaselineScore, OneHotReturnsWeights) {
    const auto lex = rra::testing::toy1();
    const auto scores = rra::baseline_score_all(lex, rra::QueryVector({{2, 1.0}}, 3));
    EXPECT_EQ(scores, (std::vector<double>{0.0, 3.0, 1.0}));
    const auto list = rra::baseline_score(lex, rra::QueryVector{}, 3);
    for (const auto& sd : list) EXPECT_EQ(sd.score, 0.0);
}

} // namespace
