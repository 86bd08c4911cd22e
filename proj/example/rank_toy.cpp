// Ranks a three-document collection with plain BM25 and with its pragmatic
// (RRA) counterpart, printing both score lists.
#include <iostream>

#include "rra.hpp"

int main() {
    rra::TokenizedCorpus corpus;
    corpus.add("d1", rra::tokenize("the cat sat on the mat"));
    corpus.add("d2", rra::tokenize("the dog chased the cat"));
    corpus.add("d3", rra::tokenize("the bird sang"));

    const auto lexicon = rra::build_bm25_lexicon(corpus);
    const auto query = rra::bm25_query_vector("the cat", lexicon.vocabulary());

    const auto pragmatic = rra::transform(lexicon, rra::PreTransform{}, /*alpha=*/1.0);
    const auto index = rra::build_index(pragmatic);

    std::cout << "bm25:\n";
    for (const auto& sd : rra::baseline_score(lexicon, query, 3)) {
        std::cout << "  " << lexicon.doc_registry().name(sd.doc) << ' ' << sd.score << '\n';
    }
    std::cout << "bm25+rra (alpha=1, f=1+x):\n";
    for (const auto& sd : index.score(query, 3)) {
        std::cout << "  " << index.doc_registry().name(sd.doc) << ' ' << sd.score << '\n';
    }
}
