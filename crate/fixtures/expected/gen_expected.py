#!/usr/bin/env python3
"""Reference implementation of the text feature pipeline.

Generates fixtures/expected/expected.json, the frozen expected values the
Rust test suite compares against. Run from the repository root:

    python3 fixtures/expected/gen_expected.py

Conventions implemented here (and mirrored by the Rust pipeline):
  - tokens: maximal runs of alphanumeric characters, lowercased
  - idf(t) = ln((D + 1) / (df(t) + 1)) + 1 over all training documents;
    unseen terms take df = 0
  - tf-idf: raw term counts times idf, L2-normalized
  - mean cluster similarity: average cosine to the other sentences
  - lexrank: stationary distribution of the row-normalized cosine matrix
    (zero rows replaced by uniform), power iteration on the transpose to
    1e-10 in max-norm, L1-normalized
  - global bins: quantiles {1/k..(k-1)/k} with linear interpolation over
    values pooled from the training clusters; local bins likewise within
    one cluster; a value lands in the bin counting edges strictly below it
  - quality features (39): constant; 5 length bins; positions 1-5 plus
    other; similarity raw + 5 global + 10 local; lexrank raw + 5 global +
    5 local
  - oracle summary: greedily add the affordable sentence with the highest
    mean per-reference unigram F-measure, then remove covered words from
    the reference multisets; stop when nothing fits or the best score is 0
"""

import json
import math
import re
import sys
from collections import Counter
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
TRAIN = [ROOT / "toy" / "train" / c for c in
         ("cluster-alpha", "cluster-beta", "cluster-gamma")]
TEST = ROOT / "toy" / "test" / "cluster-delta"
BUDGET = 665

TOKEN_RE = re.compile(r"[0-9a-z]+")


def tokenize(text):
    return TOKEN_RE.findall(text.lower())


def load_cluster(path):
    docs = []
    for doc_file in sorted((path / "docs").iterdir()):
        sentences = [ln for ln in doc_file.read_text().splitlines() if ln.strip()]
        docs.append(sentences)
    refs = [f.read_text() for f in sorted((path / "refs").iterdir())]
    return {"docs": docs, "refs": refs}


def flat_sentences(cluster):
    out = []
    for d, doc in enumerate(cluster["docs"]):
        for p, s in enumerate(doc):
            out.append({"text": s, "doc": d, "pos": p, "bytes": len(s.encode())})
    return out


def build_idf(clusters):
    doc_count = 0
    df = Counter()
    for c in clusters:
        for doc in c["docs"]:
            doc_count += 1
            seen = set()
            for s in doc:
                seen.update(tokenize(s))
            df.update(seen)
    idf = {t: math.log((doc_count + 1) / (df[t] + 1)) + 1.0 for t in df}
    default = math.log(doc_count + 1) + 1.0
    return idf, default


def tfidf(sentences, idf, default):
    vecs = []
    for s in sentences:
        counts = Counter(tokenize(s["text"]))
        v = {t: c * idf.get(t, default) for t, c in counts.items()}
        norm = math.sqrt(sum(x * x for x in v.values()))
        if norm > 0:
            v = {t: x / norm for t, x in v.items()}
        vecs.append(v)
    return vecs


def cosine(a, b):
    if len(b) < len(a):
        a, b = b, a
    return sum(x * b.get(t, 0.0) for t, x in a.items())


def cosine_matrix(vecs):
    n = len(vecs)
    c = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            c[i, j] = cosine(vecs[i], vecs[j])
    return c


def mean_similarity(cos):
    n = cos.shape[0]
    if n == 1:
        return np.zeros(1)
    return (cos.sum(axis=1) - np.diag(cos)) / (n - 1)


def lexrank(cos):
    n = cos.shape[0]
    w = cos.copy()
    sums = w.sum(axis=1)
    for i in range(n):
        if sums[i] == 0.0:
            w[i, :] = 1.0 / n
        else:
            w[i, :] /= sums[i]
    x = np.full(n, 1.0 / n)
    for _ in range(10_000):
        nxt = w.T @ x
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - x)) < 1e-10:
            x = nxt
            break
        x = nxt
    return x / x.sum()


def quantile_edges(values, bins):
    qs = [k / bins for k in range(1, bins)]
    return [float(np.quantile(np.array(values), q, method="linear")) for q in qs]


def bin_onehot(value, edges):
    idx = sum(1 for e in edges if e < value)
    out = [0.0] * (len(edges) + 1)
    out[idx] = 1.0
    return out


def cluster_stats(cluster, idf, default):
    sents = flat_sentences(cluster)
    vecs = tfidf(sents, idf, default)
    cos = cosine_matrix(vecs)
    return sents, vecs, cos, mean_similarity(cos), lexrank(cos)


def feature_vectors(cluster, idf, default, global_edges):
    sents, _, _, mcs, lr = cluster_stats(cluster, idf, default)
    mcs_local = quantile_edges(list(mcs), 10)
    lr_local = quantile_edges(list(lr), 5)
    out = []
    for i, s in enumerate(sents):
        f = [1.0]
        f += bin_onehot(s["bytes"], global_edges["length"])
        pos = [0.0] * 6
        pos[min(s["pos"], 5)] = 1.0
        f += pos
        f += [float(mcs[i])]
        f += bin_onehot(float(mcs[i]), global_edges["similarity"])
        f += bin_onehot(float(mcs[i]), mcs_local)
        f += [float(lr[i])]
        f += bin_onehot(float(lr[i]), global_edges["lexrank"])
        f += bin_onehot(float(lr[i]), lr_local)
        assert len(f) == 39, len(f)
        out.append(f)
    return out


def unigram_f(cand_counts, cand_total, ref_counts, ref_total):
    if cand_total == 0 or ref_total == 0:
        return 0.0
    match = sum(min(c, ref_counts.get(t, 0)) for t, c in cand_counts.items())
    p = match / cand_total
    r = match / ref_total
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def oracle_summary(cluster, budget):
    sents = flat_sentences(cluster)
    refs = [Counter(tokenize(r)) for r in cluster["refs"]]
    chosen = []
    remaining = list(range(len(sents)))
    spent = 0
    while True:
        afford = [i for i in remaining if spent + sents[i]["bytes"] <= budget]
        if not afford:
            break
        best, best_score = None, 0.0
        for i in afford:
            counts = Counter(tokenize(sents[i]["text"]))
            total = sum(counts.values())
            score = sum(
                unigram_f(counts, total, r, sum(r.values())) for r in refs
            ) / len(refs)
            if best is None or score > best_score:
                best, best_score = i, score
        if best_score <= 0.0:
            break
        chosen.append(best)
        spent += sents[best]["bytes"]
        remaining.remove(best)
        counts = Counter(tokenize(sents[best]["text"]))
        for r in refs:
            for t, c in counts.items():
                if t in r:
                    r[t] = max(0, r[t] - c)
    return chosen


def main():
    # Sanity check of the quantile rule on 1..100 with five bins.
    edges = quantile_edges(list(range(1, 101)), 5)
    assert all(abs(a - b) < 1e-9 for a, b in zip(edges, [20.8, 40.6, 60.4, 80.2])), edges

    clusters = [load_cluster(p) for p in TRAIN]
    test_cluster = load_cluster(TEST)
    idf, default = build_idf(clusters)

    lengths, sims, ranks = [], [], []
    for c in clusters:
        sents, _, _, mcs, lr = cluster_stats(c, idf, default)
        lengths += [s["bytes"] for s in sents]
        sims += [float(x) for x in mcs]
        ranks += [float(x) for x in lr]
    global_edges = {
        "length": quantile_edges(lengths, 5),
        "similarity": quantile_edges(sims, 5),
        "lexrank": quantile_edges(ranks, 5),
    }

    alpha = clusters[0]
    alpha_sents, alpha_vecs, alpha_cos, alpha_mcs, alpha_lr = cluster_stats(
        alpha, idf, default
    )

    expected = {
        "alpha_sentence_count": len(alpha_sents),
        "alpha_doc_counts": [len(d) for d in alpha["docs"]],
        "alpha_byte_lengths": [s["bytes"] for s in alpha_sents],
        "idf_doc_count": sum(len(c["docs"]) for c in clusters),
        "idf_default": default,
        "idf_spot": {t: idf[t] for t in ("the", "dam", "harlow", "comet")},
        "global_edges": global_edges,
        "alpha_cosine": [[float(x) for x in row] for row in alpha_cos],
        "alpha_mean_similarity": [float(x) for x in alpha_mcs],
        "alpha_lexrank": [float(x) for x in alpha_lr],
        "alpha_features": feature_vectors(alpha, idf, default, global_edges),
        "alpha_oracle": oracle_summary(alpha, BUDGET),
        "delta_oracle": oracle_summary(test_cluster, BUDGET),
        "quantile_1_100_5bins": edges,
    }

    out = ROOT / "expected" / "expected.json"
    out.write_text(json.dumps(expected, indent=1))
    print(f"wrote {out}")
    print("alpha oracle:", expected["alpha_oracle"])
    print("delta oracle:", expected["delta_oracle"])
    print("global edges:", json.dumps(global_edges, indent=1))
    return 0


if __name__ == "__main__":
    sys.exit(main())
