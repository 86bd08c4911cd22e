#!/usr/bin/env python3
"""Writes the bundled mini collection (corpus, queries, qrels) deterministically.

Each query pairs one discriminative key term with two common terms that
appear, often repeatedly, across many documents. Relevant documents use the
key term among plain filler text; distractors repeat the common terms.
"""

import argparse
import json
import random
from pathlib import Path

SEED = 20240607
N_TOPICS = 30
N_DOCS = 200
N_COMMON = 40
N_FILLER = 400
VALIDATION = 10

ONSETS = ["b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "cl", "dr", "gr", "pl", "st", "tr"]
VOWELS = ["a", "e", "i", "o", "u", "ai", "ou", "ea"]
CODAS = ["", "n", "r", "s", "l", "m", "t", "nd", "st"]


def make_words(rng, n, syllables, taken):
    words = []
    while len(words) < n:
        w = "".join(rng.choice(ONSETS) + rng.choice(VOWELS) for _ in range(syllables)) + rng.choice(CODAS)
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


def build(rng):
    taken = set()
    common = make_words(rng, N_COMMON, 2, taken)
    filler = make_words(rng, N_FILLER, 3, taken)
    keys = make_words(rng, N_TOPICS, 4, taken)

    topics = []
    for i in range(N_TOPICS):
        a, b = rng.sample(common, 2)
        topics.append({"key": keys[i], "common": [a, b], "relevant": []})

    docs = []

    def filler_text(n):
        return [rng.choice(filler) for _ in range(n)]

    for i, topic in enumerate(topics):
        for _ in range(rng.choice([2, 3])):
            words = [topic["key"]] * rng.choice([1, 1, 2])
            words += [rng.choice(topic["common"])]
            words += filler_text(rng.randint(14, 22))
            rng.shuffle(words)
            topic["relevant"].append(len(docs))
            docs.append(words)

    while len(docs) < N_DOCS:
        topic = rng.choice(topics)
        words = []
        for c in topic["common"]:
            words += [c] * rng.randint(2, 4)
        words += [rng.choice(common) for _ in range(rng.randint(1, 3))]
        words += filler_text(rng.randint(10, 16))
        rng.shuffle(words)
        docs.append(words)

    order = list(range(len(docs)))
    rng.shuffle(order)
    doc_ids = {old: f"D{new:03d}" for new, old in enumerate(order)}
    corpus = [{"id": doc_ids[old], "text": " ".join(docs[old])} for old in order]

    queries = []
    qrels = []
    for i, topic in enumerate(topics):
        qid = f"q{i + 1:02d}"
        queries.append((qid, " ".join([topic["key"]] + topic["common"])))
        for old in topic["relevant"]:
            qrels.append((qid, doc_ids[old], 1))
    return corpus, queries, qrels


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", type=Path)
    args = parser.parse_args()
    corpus, queries, qrels = build(random.Random(SEED))
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "corpus.jsonl", "w") as f:
        for rec in corpus:
            f.write(json.dumps(rec) + "\n")
    for name, part in (("queries_val.tsv", queries[:VALIDATION]), ("queries_test.tsv", queries[VALIDATION:])):
        with open(args.out / name, "w") as f:
            for qid, text in part:
                f.write(f"{qid}\t{text}\n")
    with open(args.out / "qrels.txt", "w") as f:
        for qid, doc, grade in qrels:
            f.write(f"{qid} 0 {doc} {grade}\n")


if __name__ == "__main__":
    main()
