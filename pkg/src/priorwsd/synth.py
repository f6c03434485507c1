"""Synthetic pseudo-homonym benchmark.

Two unrelated verbs are fused into one token, so the fused token carries two
clearly distinct senses whose true identity is known for every occurrence.
The generated corpus gives every verb its own topic (its own subject and
object nouns, plus an unambiguous "landmark" verb used in the same clauses),
and the evaluation set pairs a fused-verb sentence with a landmark sentence,
scored high when the landmark belongs to the sense the nouns select.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from .errors import InsufficientOccurrencesError, ValidationError
from .evaluation import PhrasePair

MIN_OCCURRENCES = 20


@dataclass
class FusedCorpus:
    sentences: List[List[str]]
    # (sentence index, token index) -> original word, for every fused occurrence
    gold: Dict[Tuple[int, int], str]
    tokens: Dict[Tuple[str, str], str]  # original pair -> fused token


def fused_name(a, b):
    return f"{a}_{b}"


def generate_pseudo_homonyms(corpus, word_pairs, min_occurrences=MIN_OCCURRENCES):
    """Replace both words of each pair by one fused token, recording the originals."""
    sentences = [list(s) for s in corpus]
    freq = Counter(tok for s in sentences for tok in s)
    words = [w for pair in word_pairs for w in pair]
    if len(set(words)) != len(words):
        raise ValidationError("a word may appear in only one pair")
    bad = [(a, b, freq[a], freq[b]) for a, b in word_pairs
           if freq[a] < min_occurrences or freq[b] < min_occurrences]
    if bad:
        raise InsufficientOccurrencesError(bad)

    replace = {}
    tokens = {}
    for a, b in word_pairs:
        fused = fused_name(a, b)
        if fused in freq:
            raise ValidationError(f"fused token {fused!r} already occurs in the corpus")
        tokens[(a, b)] = fused
        replace[a] = replace[b] = fused
    gold = {}
    for si, sent in enumerate(sentences):
        for ti, tok in enumerate(sent):
            if tok in replace:
                gold[(si, ti)] = tok
                sent[ti] = replace[tok]
    return FusedCorpus(sentences, gold, tokens)


def purity(clusters, labels):
    """Fraction of items whose cluster's majority label equals their own."""
    total = sum(len(c) for c in clusters)
    hits = sum(Counter(labels[i] for i in c).most_common(1)[0][1] for c in clusters if c)
    return hits / total


@dataclass
class Benchmark:
    corpus: List[List[str]]           # fused corpus, ready for vector building
    raw_corpus: List[List[str]]       # before fusion
    fused: FusedCorpus
    pairs: List[PhrasePair]
    topics: Dict[str, dict] = field(default_factory=dict)


def _topic(t, nouns_per_topic):
    return {
        "verb": f"verb{t:02d}",
        "landmark": f"land{t:02d}",
        "nouns": [f"noun{t:02d}{chr(ord('a') + j)}" for j in range(nouns_per_topic)],
    }


def _clause(rng, topic, verb):
    s, o = rng.choice(topic["nouns"], size=2, replace=False)
    return ["the", str(s), verb, "the", str(o)]


def make_benchmark(seed, n_fused=10, n_sentences=200, n_pairs=40, nouns_per_topic=6,
                   scale_max=7.0):
    """Build a fused corpus and a scored SVO evaluation set.

    Every sentence stays inside one topic and holds two clauses with the
    topic's verb and one with its landmark, so each verb occurs at least
    ``2 * n_sentences / (2 * n_fused)`` times.
    """
    rng = np.random.default_rng(seed)
    n_topics = 2 * n_fused
    per_topic = n_sentences // n_topics
    if per_topic * 2 < MIN_OCCURRENCES:
        raise ValidationError(
            f"{n_sentences} sentences over {n_topics} topics give fewer than "
            f"{MIN_OCCURRENCES} occurrences per verb"
        )
    topics = [_topic(t, nouns_per_topic) for t in range(n_topics)]
    order = np.repeat(np.arange(n_topics), per_topic)
    order = np.concatenate([order, rng.integers(0, n_topics, n_sentences - len(order))])
    rng.shuffle(order)
    raw = []
    for t in order:
        tp = topics[t]
        raw.append(_clause(rng, tp, tp["verb"]) + ["and"] + _clause(rng, tp, tp["landmark"])
                   + [","] + _clause(rng, tp, tp["verb"]) + ["."])

    word_pairs = [(topics[2 * i]["verb"], topics[2 * i + 1]["verb"]) for i in range(n_fused)]
    fused = generate_pseudo_homonyms(raw, word_pairs)

    pairs = []
    for p in range(n_pairs):
        i = int(rng.integers(n_fused))
        sense = 2 * i + int(rng.integers(2))
        other = (2 * i + 1) if sense == 2 * i else 2 * i
        high = p % 2 == 0
        landmark = topics[sense if high else other]["landmark"]
        subj, obj = (str(x) for x in rng.choice(topics[sense]["nouns"], 2, replace=False))
        fused_tok = fused.tokens[word_pairs[i]]
        score = rng.uniform(5.0, scale_max) if high else rng.uniform(1.0, 3.0)
        pairs.append(PhrasePair(
            f"p{p:03d}", "SVO",
            ((subj, "S"), (fused_tok, "V"), (obj, "O")),
            ((subj, "S"), (landmark, "V"), (obj, "O")),
            round(float(score), 4), scale_max,
        ))
    return Benchmark(fused.sentences, raw, fused, pairs,
                     {tp["verb"]: tp for tp in topics})


def write_corpus(sentences, path):
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(" ".join(s) + "\n")


def write_gold(fused, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sentence\tposition\ttoken\toriginal\n")
        for (si, ti), orig in sorted(fused.gold.items()):
            fh.write(f"{si}\t{ti}\t{fused.sentences[si][ti]}\t{orig}\n")
