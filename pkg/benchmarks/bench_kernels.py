#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python fallback.

Runs every kernel on identical inputs taken from a small Zipf corpus, checks
that both backends return the same arrays, and prints per-kernel timings.

    python benchmarks/bench_kernels.py --docs 20
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from proxsearch import kernels
from proxsearch.bench import CorpusSpec, generate_corpus
from proxsearch.lexicon import build_fl_list, tokenize


def prepare(docs: int, seed: int, sw_count: int, md: int):
    texts = generate_corpus(CorpusSpec(doc_count=docs, words_per_doc=(1000, 3000), vocab_size=5000,
                                       rng_seed=seed))
    counts: dict[str, int] = {}
    for t in texts:
        for w, _ in tokenize(t):
            counts[w] = counts.get(w, 0) + 1
    fl = build_fl_list(counts)
    per_doc = []
    for t in texts:
        toks = tokenize(t)
        pos = np.array([p for _, p in toks], dtype=np.int64)
        rank = np.array([fl.rank_of(w) for w, _ in toks], dtype=np.int64)
        keep = rank < sw_count
        per_doc.append((pos[keep], rank[keep]))
    # one long posting list for the codec kernels, and per-document triple postings
    triples = [kernels.pure.triple_postings(p, r, md) for p, r in per_doc]
    n = sum(len(t[3]) for t in triples)
    ids = np.concatenate([np.full(len(t[3]), d, dtype=np.int64) for d, t in enumerate(triples)])
    ps = np.concatenate([t[3] for t in triples])
    dists = np.stack([np.concatenate([t[4] for t in triples]), np.concatenate([t[5] for t in triples])], axis=1)
    order = np.lexsort((dists[:, 1], dists[:, 0], ps, ids))
    return per_doc, triples, (ids[order], ps[order], dists[order]), n


def _same(a, b) -> bool:
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if a is None or b is None:
        return a is b
    if isinstance(a, (bytes, int, float)):
        return a == b
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--sw-count", type=int, default=100)
    ap.add_argument("--max-distance", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)

    if kernels.compiled is None:
        print("compiled kernels are not available; nothing to compare", file=sys.stderr)
        return 1
    md = args.max_distance
    per_doc, triples, (ids, ps, dists), n = prepare(args.docs, args.seed, args.sw_count, md)
    blob = kernels.pure.encode_postings(ids, ps, dists)
    cases = {
        "triple_postings": lambda k: [k.triple_postings(p, r, md) for p, r in per_doc],
        "pair_postings": lambda k: [k.pair_postings(p, r, md) for p, r in per_doc],
        "encode_postings": lambda k: k.encode_postings(ids, ps, dists),
        "decode_postings": lambda k: k.decode_postings(blob, n, 2),
        "fill_lists": lambda k: [k.fill_lists(t[3], np.stack([t[4], t[5]], axis=1), 2 * md, (False,) * 3)
                                 for t in triples],
        "search_document": lambda k: [k.search_document([np.sort(t[3]), np.sort(t[3] + t[4]),
                                                         np.sort(t[3] + t[5])]) for t in triples if len(t[3])],
    }
    rows = []
    for name, fn in cases.items():
        timings = {}
        outputs = {}
        for label, mod in (("pure", kernels.pure), ("compiled", kernels.compiled)):
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                outputs[label] = fn(mod)
                best = min(best, time.perf_counter() - t0)
            timings[label] = best
        rows.append({"kernel": name, "pure_s": timings["pure"], "compiled_s": timings["compiled"],
                     "speedup": timings["pure"] / max(timings["compiled"], 1e-9),
                     "agree": _same(outputs["pure"], outputs["compiled"])})
    if args.json:
        print(json.dumps({"postings": n, "docs": args.docs, "results": rows}, indent=2))
    else:
        print(f"{args.docs} documents, {n} triple postings, max_distance {md}")
        print(f"{'kernel':<18}{'pure ms':>12}{'compiled ms':>14}{'speedup':>10}  agree")
        for r in rows:
            print(f"{r['kernel']:<18}{r['pure_s'] * 1000:>12.1f}{r['compiled_s'] * 1000:>14.2f}"
                  f"{r['speedup']:>9.1f}x  {'yes' if r['agree'] else 'NO'}")
    return 0 if all(r["agree"] for r in rows) else 2


if __name__ == "__main__":
    sys.exit(main())
