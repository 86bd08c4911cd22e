#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "rra/io.hpp"
#include "support/instances.hpp"

namespace {

namespace io = rra::io;

TEST(Snapshot, RoundTripIsBitExact) {
    for (std::size_t i = 0; i < 30; ++i) {
        const auto inst = rra::testing::acceptance_instance(i);
        const auto prag = rra::transform(inst.lexicon, inst.f, inst.alpha, inst.prior);
        std::stringstream buf;
        io::write_snapshot(buf, prag, inst.f);
        const auto back = io::read_snapshot(buf);
        EXPECT_EQ(back.pretransform.name(), inst.f.name());
        EXPECT_EQ(back.pretransform.lambda, inst.f.lambda);
        EXPECT_EQ(back.lexicon.alpha(), prag.alpha());
        EXPECT_EQ(back.lexicon.vocabulary().names(), prag.vocabulary().names());
        EXPECT_EQ(back.lexicon.doc_registry().names(), prag.doc_registry().names());
        EXPECT_TRUE(std::ranges::equal(back.lexicon.lt1(), prag.lt1()));
        EXPECT_TRUE(std::ranges::equal(back.lexicon.ld1(), prag.ld1()));
        EXPECT_TRUE(std::ranges::equal(back.lexicon.token_offsets(), prag.token_offsets()));
        ASSERT_EQ(back.lexicon.entries().size(), prag.entries().size());
        for (std::size_t j = 0; j < prag.entries().size(); ++j) {
            EXPECT_EQ(back.lexicon.entries()[j], prag.entries()[j]);
        }
    }
}

TEST(Snapshot, RejectsForeignAndTruncatedFiles) {
    std::istringstream foreign(R"({"format": "other", "version": 1})" "\n");
    EXPECT_THROW(io::read_snapshot(foreign), rra::InputError);
    const auto prag = rra::transform(rra::testing::toy1(), {}, 1.0);
    std::ostringstream out;
    io::write_snapshot(out, prag, {});
    const auto text = out.str();
    std::istringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
    EXPECT_THROW(io::read_snapshot(truncated), rra::InputError);
}

TEST(Qrels, ParsesTrecFormat) {
    std::istringstream in("q1 0 d1 2\nq1 0 d2 0\n\nq2 0 d9 1\n");
    const auto q = io::read_qrels(in);
    EXPECT_EQ(q.n_queries(), 2u);
    EXPECT_EQ(q.grade("q1", "d1"), 2);
    EXPECT_EQ(q.grade("q1", "d2"), 0);
    EXPECT_EQ(q.grade("q1", "d3"), 0);
    EXPECT_EQ(q.grade("q2", "d9"), 1);
}

TEST(Qrels, RejectsMalformedLines) {
    std::istringstream three("q1 0 d1\n");
    EXPECT_THROW(io::read_qrels(three), rra::InputError);
    std::istringstream grade("q1 0 d1 x\n");
    EXPECT_THROW(io::read_qrels(grade), rra::InputError);
    std::istringstream negative("q1 0 d1 -2\n");
    EXPECT_THROW(io::read_qrels(negative), rra::InputError);
}

TEST(Run, WriteThenReadPreservesOrder) {
    const rra::Run run{{"q1", {{"b", 0.75}, {"a", 0.5}}}, {"q2", {{"c", 1.0}}}};
    std::stringstream buf;
    io::write_run(buf, run, "tag");
    EXPECT_EQ(buf.str(), "q1 Q0 b 1 0.75 tag\nq1 Q0 a 2 0.5 tag\nq2 Q0 c 1 1 tag\n");
    EXPECT_EQ(io::read_run(buf), run);
}

TEST(Run, OrdersByRankColumn) {
    std::istringstream in("q1 Q0 a 2 0.5 t\nq1 Q0 b 1 0.9 t\n");
    const auto run = io::read_run(in);
    ASSERT_EQ(run.at("q1").size(), 2u);
    EXPECT_EQ(run.at("q1")[0].doc, "b");
    std::istringstream bad("q1 Q0 a one 0.5 t\n");
    EXPECT_THROW(io::read_run(bad), rra::InputError);
}

TEST(Queries, TsvAndJsonLines) {
    std::istringstream in("q1\tquick fox\n"
                          R"({"id": "q2", "text": "lazy dog"})" "\n"
                          R"({"_id": "q3", "weights": {"fox": 0.5, "zebra": 2}})" "\n");
    const auto recs = io::read_queries(in);
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[0].id, "q1");
    EXPECT_EQ(recs[0].text, "quick fox");
    EXPECT_EQ(recs[1].text, "lazy dog");
    EXPECT_TRUE(recs[2].pre_weighted);

    rra::Vocabulary vocab;
    vocab.intern("fox");
    vocab.intern("quick");
    const auto qs = io::vectorize_queries(recs, vocab);
    EXPECT_TRUE(std::ranges::equal(qs[0].vector.terms(), std::vector<rra::QueryTerm>{{0, 1.0}, {1, 1.0}}));
    EXPECT_TRUE(qs[1].vector.empty());
    EXPECT_TRUE(std::ranges::equal(qs[2].vector.terms(), std::vector<rra::QueryTerm>{{0, 0.5}}));
}

TEST(Queries, RejectsLineWithoutTab) {
    std::istringstream in("q1 quick fox\n");
    EXPECT_THROW(io::read_queries(in), rra::InputError);
}

TEST(Prior, NormalizesAndRequiresEveryDocument) {
    rra::DocRegistry docs;
    docs.intern("a");
    docs.intern("b");
    std::istringstream in("a 1\nb 3\n");
    const auto prior = io::read_prior(in, docs);
    EXPECT_DOUBLE_EQ(prior.prob(0, 2), 0.25);
    EXPECT_DOUBLE_EQ(prior.prob(1, 2), 0.75);

    std::istringstream missing("a 1\n");
    EXPECT_THROW(io::read_prior(missing, docs), rra::InputError);
    std::istringstream unknown("a 1\nb 1\nc 1\n");
    EXPECT_THROW(io::read_prior(unknown, docs), rra::InputError);
    std::istringstream zero("a 0\nb 1\n");
    EXPECT_THROW(io::read_prior(zero, docs), rra::InputError);
}

TEST(Corpus, AcceptsIdVariantsAndTitle) {
    std::istringstream in(R"({"_id": "x", "title": "Big Cat", "text": "sleeps"})" "\n"
                          R"({"id": "y", "text": "runs"})" "\n");
    const auto c = io::read_corpus(in);
    EXPECT_EQ(c.doc_ids, (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(c.docs[0], (std::vector<std::string>{"big", "cat", "sleeps"}));
}

TEST(FormatDouble, ShortestRoundTrip) {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        EXPECT_EQ(io::parse_double(io::format_double(v), "test"), v);
    }
}

} // namespace
